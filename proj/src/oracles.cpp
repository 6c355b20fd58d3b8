#include "railbeam/oracles.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <string>

#include "railbeam/errors.hpp"

namespace railbeam {

ModalCoefficients modal_coefficients(const BeamParams& p, int n) {
  const double kn = n * boost::math::constants::pi<double>() / p.ell();
  const double lambda = kn * kn * kn * kn;
  return {(p.Cd() * lambda + p.mu()) / p.rho_a(), (p.EI() * lambda + p.k()) / p.rho_a(), lambda};
}

ModalState modal_solution(const BeamParams& p, const ModalSpec& spec, double t) {
  if (p.alpha() != 0.0) throw NonlinearNotSupported();
  if (spec.n < 1) throw ConfigError("mode index must be >= 1");
  const auto [a, b, lambda] = modal_coefficients(p, spec.n);

  // Shift to the static deflection so the ODE is homogeneous.
  const double q_static = spec.force_amp / (p.rho_a() * b);
  const double q0 = spec.w_amp - q_static;
  const double p0 = spec.v_amp;

  const double disc = a * a - 4.0 * b;
  if (std::abs(disc) <= 1e-12 * (a * a + 4.0 * b)) {
    // Repeated root r = -a/2: q = (q0 + (p0 - r q0) t) e^{rt}.
    const double r = -0.5 * a;
    const double c2 = p0 - r * q0;
    const double e = std::exp(r * t);
    return {q_static + (q0 + c2 * t) * e, (c2 + r * (q0 + c2 * t)) * e};
  }
  if (disc < 0.0) {
    const double sigma = -0.5 * a;
    const double omega = 0.5 * std::sqrt(-disc);
    const double B = (p0 - sigma * q0) / omega;
    const double e = std::exp(sigma * t);
    const double c = std::cos(omega * t), s = std::sin(omega * t);
    const double q = e * (q0 * c + B * s);
    const double qd = e * ((sigma * q0 + omega * B) * c + (sigma * B - omega * q0) * s);
    return {q_static + q, qd};
  }
  // Two real roots r1 > r2, both negative.
  const double root = std::sqrt(disc);
  const double r1 = 0.5 * (-a + root), r2 = 0.5 * (-a - root);
  const double c1 = (p0 - r2 * q0) / (r1 - r2);
  const double c2 = q0 - c1;
  const double e1 = std::exp(r1 * t), e2 = std::exp(r2 * t);
  return {q_static + c1 * e1 + c2 * e2, c1 * r1 * e1 + c2 * r2 * e2};
}

double fd_derivative(std::span<const double> series, std::size_t i, double dt) {
  if (i < 1 || i + 1 >= series.size())
    throw IndexOutOfRange("central difference needs an interior index, got " + std::to_string(i));
  return (series[i + 1] - series[i - 1]) / (2.0 * dt);
}

double convergence_order(std::span<const std::pair<double, double>> errors) {
  if (errors.size() < 3) throw DegenerateData("need at least three refinement levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [step, err] : errors) {
    if (!(step > 0.0) || !(err > 0.0)) throw DegenerateData("steps and errors must be positive");
    const double x = std::log(step), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(errors.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw DegenerateData("steps must not all coincide");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace railbeam
