#pragma once

namespace railbeam {

/// Unvalidated coefficient record, e.g. straight from a config file.
struct RawParams {
  double EI = 1.0;
  double rho_a = 1.0;
  double ell = 1.0;
  double k = 1.0;
  double alpha = 1.0;
  double mu = 1.0;
  double Cd = 0.0;
};

/// Coefficients of the damped beam on a cubic viscoelastic foundation
///
///   rho_a w_tt + (EI w_xx + Cd w_xxt)_xx + mu w_t + k w + alpha w^3 = u
///
/// on (0, ell) with pinned, moment-free ends. Only obtainable through
/// validate_params, so every instance satisfies the sign constraints.
class BeamParams {
 public:
  double EI() const noexcept { return raw_.EI; }
  double rho_a() const noexcept { return raw_.rho_a; }
  double ell() const noexcept { return raw_.ell; }
  double k() const noexcept { return raw_.k; }
  double alpha() const noexcept { return raw_.alpha; }
  double mu() const noexcept { return raw_.mu; }
  double Cd() const noexcept { return raw_.Cd; }
  const RawParams& raw() const noexcept { return raw_; }

 private:
  explicit BeamParams(const RawParams& raw) : raw_(raw) {}
  friend BeamParams validate_params(const RawParams& raw);
  RawParams raw_;
};

/// Throws NonPositiveCoefficient, NegativeCoefficient (alpha < 0) or NegativeDamping.
BeamParams validate_params(const RawParams& raw);

/// Which algebra the certificate constants follow.
///
/// Published keeps the original formulas verbatim: the multiplier bound
/// min{4 rho_a k mu/(mu^2 + 4 rho_a k), 4 rho_a k mu/(1 + 4 rho_a k)} and an
/// input gain of eps3. Both are too optimistic: the first admits multipliers
/// for which no (eps1, eps3) pair exists, the second does not account for the
/// Young splitting that produced the eps3 penalties. Corrected uses the exact
/// feasibility bound and the gain eps3 + 1/eps3.
enum class Convention { Corrected, Published };

/// Supremum of multipliers c for which both the norm sandwich and the
/// dissipation estimate can be certified (Cd == 0 drops the Kelvin-Voigt term).
double admissible_c_max(const BeamParams& p, Convention convention = Convention::Corrected);

/// The published bound; equal to admissible_c_max(p, Convention::Published).
double published_c_bound(const BeamParams& p);

}  // namespace railbeam
