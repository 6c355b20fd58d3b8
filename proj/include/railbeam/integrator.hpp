#pragma once

#include <Eigen/SparseCholesky>
#include <cstddef>
#include <optional>
#include <vector>

#include "railbeam/beam_model.hpp"
#include "railbeam/fem.hpp"
#include "railbeam/inputs.hpp"

namespace railbeam {

struct StepControl {
  double dt = 1e-3;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;

  /// Throws ConfigError unless dt > 0, newton_tol > 0, newton_max_iter >= 1.
  void validate() const;
};

/// Uniformly sampled solution together with the scalar records every
/// certificate check consumes.
struct Trajectory {
  double dt = 0.0;
  InputClass input_class = InputClass::C1;
  std::vector<double> times;
  /// ||x||^2 in the state norm.
  std::vector<double> energy_norm_sq;
  /// integral of w^4 and w^T M v; together with energy_norm_sq they give V for any multiplier.
  std::vector<double> quartic;
  std::vector<double> cross;
  /// V(x) for `multiplier`; empty until a multiplier is attached.
  std::vector<double> lyapunov_value;
  std::optional<double> multiplier;
  /// ||u(t)||^2, sup_{s<=t} ||u(s)||^2 and integral_0^t ||u||^2 (exact, from the signal).
  std::vector<double> input_norm_sq;
  std::vector<double> input_sup_sq;
  std::vector<double> input_energy;
  /// Stored states and the sample index each belongs to.
  std::vector<StateVec> states;
  std::vector<std::size_t> state_index;

  std::size_t size() const noexcept { return times.size(); }
};

struct SimulateOptions {
  /// Keep every `state_stride`-th state (0 keeps none).
  std::size_t state_stride = 1;
  /// When set, lyapunov_value is filled for this multiplier.
  std::optional<double> multiplier;
};

/// Implicit trapezoidal rule for
///   w' = v,  rho_a M v' = -(EI K w + Cd K v + mu M v + k M w + N(w)) + f(t)
/// with Newton iteration on the velocity at the new time level. Jumps of a
/// piecewise-constant input are resolved by using one-sided load values at
/// the two ends of each step.
class Integrator {
 public:
  Integrator(const BeamParams& params, const FemOperators& ops, const InputSignal& input,
             StepControl control);

  /// Advances x from t to t + dt. Throws NewtonDiverged or NonFiniteState.
  StateVec step(const StateVec& x, double t);

  /// Newton updates used by the last step.
  int last_iterations() const noexcept { return last_iterations_; }

  Vector load(double t, InputSignal::Side side) const;

 private:
  Vector internal_force(const StateVec& x) const;

  using Factorization = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;

  const BeamParams params_;
  const FemOperators& ops_;
  const InputSignal input_;
  const StepControl control_;
  SparseMatrix stiffness_;   // EI K + k M
  SparseMatrix damping_;     // Cd K + mu M
  SparseMatrix linear_jac_;  // rho_a M + dt/2 damping + (dt/2)^2 stiffness
  Factorization mass_solver_;
  Factorization jac_solver_;
  bool linear_factored_ = false;
  std::vector<Vector> cached_loads_;  // unit-profile loads (separable) or per-segment loads
  int last_iterations_ = 0;
};

/// One step from (x, t); see Integrator.
StateVec step(const StateVec& x, double t, const StepControl& ctrl, const BeamParams& p,
              const FemOperators& ops, const InputSignal& u);

/// Uniform-step trajectory on [0, t_final]. Throws ConfigError when t_final is
/// not a positive integer multiple of dt, and SolverError (with the failing
/// time attached) when a step fails.
Trajectory simulate(const StateVec& x0, const InputSignal& u, double t_final, const StepControl& ctrl,
                    const BeamParams& p, const FemOperators& ops, const SimulateOptions& options = {});

/// Number of steps N with N dt = t_final; throws ConfigError otherwise.
long step_count(double t_final, double dt);

}  // namespace railbeam
