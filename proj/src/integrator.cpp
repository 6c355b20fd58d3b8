#include "railbeam/integrator.hpp"

#include <cmath>

#include "railbeam/errors.hpp"

namespace railbeam {

void StepControl::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step dt must be > 0");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be > 0");
  if (newton_max_iter < 1) throw ConfigError("newton_max_iter must be >= 1");
}

long step_count(double t_final, double dt) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be > 0");
  if (!(dt > 0.0)) throw ConfigError("time step dt must be > 0");
  const double ratio = t_final / dt;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("t_final must be an integer multiple of dt");
  return n;
}

Integrator::Integrator(const BeamParams& params, const FemOperators& ops, const InputSignal& input,
                       StepControl control)
    : params_(params), ops_(ops), input_(input), control_(control) {
  control_.validate();
  const SparseMatrix& M = ops_.mass();
  const SparseMatrix& K = ops_.bending();
  stiffness_ = params_.EI() * K + params_.k() * M;
  damping_ = params_.Cd() * K + params_.mu() * M;
  const double half = 0.5 * control_.dt;
  linear_jac_ = params_.rho_a() * M + half * damping_ + (half * half) * stiffness_;
  mass_solver_.compute(M);
  jac_solver_.analyzePattern(linear_jac_);

  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, InputSignal::Separable> || std::is_same_v<K, InputSignal::ExpDecay>) {
          const Profile& prof = kind.profile;
          cached_loads_.push_back(load_vector([&](double xi) { return prof.value(xi); }, ops_));
        } else if constexpr (std::is_same_v<K, InputSignal::Piecewise>) {
          for (const auto& prof : kind.profiles)
            cached_loads_.push_back(load_vector([&](double xi) { return prof.value(xi); }, ops_));
        }
      },
      input_.kind());
}

Vector Integrator::load(double t, InputSignal::Side side) const {
  return std::visit(
      [&](const auto& kind) -> Vector {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, InputSignal::Zero>) {
          return Vector::Zero(ops_.dofs());
        } else if constexpr (std::is_same_v<K, InputSignal::Separable>) {
          return kind.envelope.value(t) * cached_loads_[0];
        } else if constexpr (std::is_same_v<K, InputSignal::ExpDecay>) {
          return (kind.u0 * std::exp(-kind.delta * t)) * cached_loads_[0];
        } else if constexpr (std::is_same_v<K, InputSignal::MovingGaussian>) {
          return load_vector(eval_profile(input_, t), ops_);
        } else {
          const int seg = input_.segment_index(t, side);
          return seg < 0 ? Vector::Zero(ops_.dofs()) : cached_loads_[seg];
        }
      },
      input_.kind());
}

Vector Integrator::internal_force(const StateVec& x) const {
  Vector g = -(stiffness_ * x.w + damping_ * x.v);
  if (params_.alpha() != 0.0) g -= nonlinear_force(x.w, params_.alpha(), ops_);
  return g;
}

StateVec Integrator::step(const StateVec& x, double t) {
  const double dt = control_.dt;
  const double half = 0.5 * dt;
  const SparseMatrix& M = ops_.mass();
  const double rho_a = params_.rho_a();
  const double alpha = params_.alpha();

  // Everything in the residual that does not depend on the unknown v.
  const Vector known = half * (internal_force(x) + load(t, InputSignal::Side::Right) +
                               load(t + dt, InputSignal::Side::Left));

  auto residual = [&](const Vector& w, const Vector& v) {
    Vector r = rho_a * (M * (v - x.v)) + half * (stiffness_ * w + damping_ * v) - known;
    if (alpha != 0.0) r += half * nonlinear_force(w, alpha, ops_);
    return r;
  };
  auto dual_norm = [&](const Vector& r) { return std::sqrt(std::max(0.0, r.dot(mass_solver_.solve(r)))); };

  Vector v = x.v;
  Vector w = x.w + half * (x.v + v);
  bool stagnated = false;
  for (int it = 0;; ++it) {
    const Vector r = residual(w, v);
    const double res = dual_norm(r);
    if (!std::isfinite(res)) throw NonFiniteState();
    // At least one update, so an absolute tolerance never freezes small states.
    // A negligible update means the residual sits at its roundoff floor.
    if (it > 0 && (res <= control_.newton_tol || stagnated)) {
      last_iterations_ = it;
      break;
    }
    if (it == control_.newton_max_iter) throw NewtonDiverged(it, res);

    if (alpha != 0.0) {
      const SparseMatrix jac = linear_jac_ + (half * half) * nonlinear_jacobian(w, alpha, ops_);
      jac_solver_.factorize(jac);
    } else if (!linear_factored_) {
      jac_solver_.factorize(linear_jac_);
      linear_factored_ = true;
    }
    const Vector delta = jac_solver_.solve(-r);
    v += delta;
    w = x.w + half * (x.v + v);
    if (!v.allFinite() || !w.allFinite()) throw NonFiniteState();
    stagnated = delta.lpNorm<Eigen::Infinity>() <= 1e-11 * std::max(1.0, v.lpNorm<Eigen::Infinity>());
  }
  return {std::move(w), std::move(v)};
}

StateVec step(const StateVec& x, double t, const StepControl& ctrl, const BeamParams& p,
              const FemOperators& ops, const InputSignal& u) {
  Integrator integrator(p, ops, u, ctrl);
  return integrator.step(x, t);
}

namespace {

void record(Trajectory& traj, const StateVec& x, double t, std::size_t i, const BeamParams& p,
            const FemOperators& ops, const InputSignal& u, const SimulateOptions& opt) {
  traj.times.push_back(t);
  const double energy = energy_norm_sq(x, p, ops);
  const double quartic = quartic_integral(x.w, ops);
  const double cross = bilinear(ops.mass(), x.w, x.v);
  traj.energy_norm_sq.push_back(energy);
  traj.quartic.push_back(quartic);
  traj.cross.push_back(cross);
  if (opt.multiplier)
    traj.lyapunov_value.push_back(energy + 0.5 * p.alpha() * quartic + 2.0 * *opt.multiplier * cross);

  traj.input_norm_sq.push_back(u.norm_sq(t));
  if (i == 0) {
    traj.input_sup_sq.push_back(u.sup_norm_sq(0.0, 0.0));
    traj.input_energy.push_back(0.0);
  } else {
    const double prev = traj.times[i - 1];
    traj.input_sup_sq.push_back(std::max(traj.input_sup_sq.back(), u.sup_norm_sq(prev, t)));
    traj.input_energy.push_back(traj.input_energy.back() + u.energy(prev, t));
  }
  if (opt.state_stride > 0 && i % opt.state_stride == 0) {
    traj.states.push_back(x);
    traj.state_index.push_back(i);
  }
}

}  // namespace

Trajectory simulate(const StateVec& x0, const InputSignal& u, double t_final, const StepControl& ctrl,
                    const BeamParams& p, const FemOperators& ops, const SimulateOptions& options) {
  ctrl.validate();
  const long n = step_count(t_final, ctrl.dt);
  if (x0.w.size() != ops.dofs() || x0.v.size() != ops.dofs())
    throw ConfigError("initial state does not match the mesh");
  if (!x0.w.allFinite() || !x0.v.allFinite()) throw ConfigError("initial state must be finite");

  Trajectory traj;
  traj.dt = ctrl.dt;
  traj.input_class = u.input_class();
  traj.multiplier = options.multiplier;
  const std::size_t samples = static_cast<std::size_t>(n) + 1;
  traj.times.reserve(samples);

  Integrator integrator(p, ops, u, ctrl);
  StateVec x = x0;
  record(traj, x, 0.0, 0, p, ops, u, options);
  for (long i = 0; i < n; ++i) {
    const double t = i * ctrl.dt;
    try {
      x = integrator.step(x, t);
    } catch (SolverError& e) {
      e.attach_time(t);
      throw;
    }
    record(traj, x, (i + 1) * ctrl.dt, static_cast<std::size_t>(i + 1), p, ops, u, options);
    if (!std::isfinite(traj.energy_norm_sq.back())) {
      NonFiniteState err;
      err.attach_time(t);
      throw err;
    }
  }
  return traj;
}

}  // namespace railbeam
