#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "railbeam/beam_model.hpp"
#include "railbeam/fem.hpp"
#include "railbeam/integrator.hpp"

namespace railbeam {

/// Constants of the multiplier Lyapunov function
///
///   V(w, v) = integral EI w''^2 + k w^2 + alpha/2 w^4 + rho_a v^2 + 2 c w v
///
/// and of the estimates it certifies:
///   c_l ||x||^2 <= V <= c_u ||x||^2 + c_h ||x||^4,
///   dV/dt <= input_gain ||u||^2 - omega V.
struct LyapunovCertificate {
  Convention convention = Convention::Corrected;
  double c_max = 0.0;  // admissible_c_max under `convention`
  double c = 0.0;
  double eps_b = 0.0;  // Young parameter of the sandwich bound
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  std::array<double, 4> omega0_terms{};
  double omega0 = 0.0;
  double eps_r = 0.0;
  double r = 0.0;
  double omega = 0.0;
  double c_l = 0.0;
  double c_u = 0.0;
  double c_h = 0.0;
  double c_e = 0.0;
  /// sigma in dV/dt <= sigma ||u||^2 - omega V.
  double input_gain = 0.0;
  /// Coefficient of sup ||u||^2 in the pointwise state bounds.
  double decay_gain = 0.0;
  /// Coefficient of ||u||^2_{L^2(0,t)} in the integral state bound.
  double mild_gain = 0.0;
};

/// Comparison functions realized by a certificate. Arguments are norms;
/// beta and gamma_sq return bounds on squared norms.
struct ISSGains {
  double omega = 0.0;
  double c_l = 0.0;
  double c_u = 0.0;
  double c_h = 0.0;
  double input_gain = 0.0;
  double decay_gain = 0.0;

  double beta(double s, double t) const;
  double gamma_sq(double s) const { return decay_gain * s * s; }
  double psi1(double s) const { return c_l * s * s; }
  double psi2(double s) const { return c_u * s * s + c_h * s * s * s * s; }
  double alpha_damp(double s) const { return omega * c_l * s * s; }
  double sigma(double s) const { return input_gain * s * s; }
};

ISSGains iss_gains(const LyapunovCertificate& cert);

/// Throws InvalidMultiplier unless 0 < c < sqrt(rho_a k).
double lyapunov_value(const StateVec& x, double c, const BeamParams& p, const FemOperators& ops);

/// Fills traj.lyapunov_value for multiplier c from the stored records.
void attach_lyapunov(Trajectory& traj, double c, const BeamParams& p);

/// integral w^4 / (w^T K w)^2 for a nonzero discrete displacement.
double embedding_ratio(const Vector& w, const FemOperators& ops);

/// Estimate of sup integral w^4 / (integral w''^2)^2 over the discrete space,
/// by normalized ascent from the first mode and ten seeded random starts,
/// inflated by 1.25.
double embedding_constant(const FemOperators& ops, std::uint64_t seed = 0x5eedULL);

/// The four bracketed terms whose minimum, times 2c/rho_a, is omega0.
std::array<double, 4> omega0_terms(const BeamParams& p, double c, double eps1, double eps2, double eps3);

/// Builds the certificate for an explicit multiplier c (no c_max check).
LyapunovCertificate certificate_for_multiplier(const BeamParams& p, double c, const FemOperators& ops,
                                               Convention convention = Convention::Corrected);

/// c = c_fraction * admissible_c_max(p); eps1 and eps3 by a 64 x 64 log grid
/// (refined once around the best cell) maximizing omega0. Throws ConfigError
/// for c_fraction outside (0, 1) and InfeasibleMultiplier when no (eps1, eps3)
/// pair makes omega0 positive.
LyapunovCertificate select_constants(const BeamParams& p, double c_fraction, const FemOperators& ops,
                                     Convention convention = Convention::Corrected);

/// Human-readable list of violated certificate invariants (empty when valid).
std::vector<std::string> certificate_violations(const LyapunovCertificate& cert, const BeamParams& p);

/// Scales c_l and omega (and the gains that depend on them) for forced-failure runs.
LyapunovCertificate sabotage(LyapunovCertificate cert, double c_l_scale, double omega_scale);

struct BoundEntry {
  std::string check;
  double worst_margin = 0.0;
  std::optional<double> first_violation_time;
  bool pass = true;
  double tolerance = 0.0;
  std::size_t samples = 0;  // inequality evaluations, summed over components
  /// Worst margin of each inequality folded into this entry.
  std::vector<std::pair<std::string, double>> components;
};

using BoundReport = std::vector<BoundEntry>;

/// Per-run estimate of the finite-difference error constant: the difference
/// between central-difference derivatives of V at dt and dt/2, scaled to the
/// coarse error and doubled.
struct FdCalibration {
  double c_fd = 0.0;
};

FdCalibration calibrate_fd(const Trajectory& coarse, const Trajectory& fine);

/// Lower and upper norm bounds of V, per sample; tolerance 1e-9 relative.
BoundEntry check_sandwich(const Trajectory& traj, const LyapunovCertificate& cert);

/// Sandwich margins of a single state: {lower, upper}, already divided by 1 + scale.
std::array<double, 2> sandwich_margins(const StateVec& x, const LyapunovCertificate& cert,
                                       const BeamParams& p, const FemOperators& ops);

/// Central-difference dV/dt against input_gain ||u||^2 - omega V at interior
/// samples; tolerance 1e-6 (1 + |V|) + c_fd dt^2. Requires a C^1 input.
BoundEntry check_dissipation(const Trajectory& traj, const LyapunovCertificate& cert, const FdCalibration& fd);

/// Pointwise state bound with exponential envelope and the Gronwall
/// convolution bound on V. Requires a C^1 input.
BoundEntry check_classical_decay(const Trajectory& traj, const LyapunovCertificate& cert);

/// sup ||x||^2 + omega integral ||x||^2 against initial data and input energy.
BoundEntry check_mild_integral(const Trajectory& traj, const LyapunovCertificate& cert);

/// Input-to-state bound using the running sup of ||u||; with `fd` and a C^1
/// input also the ISS-Lyapunov form dV/dt <= -omega c_l ||x||^2 + sigma sup ||u||^2.
/// Throws InputClassMismatch for L2loc inputs.
BoundEntry check_iss(const Trajectory& traj, const LyapunovCertificate& cert, const ISSGains& gains,
                     const std::optional<FdCalibration>& fd = std::nullopt);

}  // namespace railbeam
