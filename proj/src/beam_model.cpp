#include "railbeam/beam_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "railbeam/errors.hpp"

namespace railbeam {

BeamParams validate_params(const RawParams& raw) {
  const std::pair<const char*, double> strict[] = {
      {"EI", raw.EI}, {"rho_a", raw.rho_a}, {"ell", raw.ell}, {"k", raw.k}, {"mu", raw.mu},
  };
  for (const auto& [name, value] : strict) {
    // NaN fails the comparison as well.
    if (!(value > 0.0) || !std::isfinite(value)) throw NonPositiveCoefficient(name);
  }
  // alpha = 0 is the linear reference problem.
  if (!(raw.alpha >= 0.0) || !std::isfinite(raw.alpha)) throw NegativeCoefficient("alpha");
  if (!(raw.Cd >= 0.0) || !std::isfinite(raw.Cd)) throw NegativeDamping();
  return BeamParams(raw);
}

namespace {

double kelvin_voigt_bound(const BeamParams& p) {
  if (p.Cd() == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * p.rho_a() * p.EI() / p.Cd();
}

}  // namespace

double published_c_bound(const BeamParams& p) {
  const double rk = p.rho_a() * p.k();
  const double mu = p.mu();
  return std::min({std::sqrt(rk), kelvin_voigt_bound(p), 4.0 * rk * mu / (mu * mu + 4.0 * rk),
                   4.0 * rk * mu / (1.0 + 4.0 * rk)});
}

double admissible_c_max(const BeamParams& p, Convention convention) {
  if (convention == Convention::Published) return published_c_bound(p);
  // eps1 < 2k/mu - c/(rho_a eps3 mu) and eps3 < 2mu - 2c - mu c/(eps1 rho_a)
  // share a solution iff c (1/(2k - mu eps1) + mu/eps1) / rho_a < 2(mu - c) for
  // some eps1; the left side is smallest at eps1 = 2k/(1 + mu).
  const double rk = p.rho_a() * p.k();
  const double mu = p.mu();
  const double coupled = 4.0 * rk * mu / ((1.0 + mu) * (1.0 + mu) + 4.0 * rk);
  return std::min({std::sqrt(rk), kelvin_voigt_bound(p), coupled});
}

}  // namespace railbeam
