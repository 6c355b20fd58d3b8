#pragma once

#include <span>
#include <utility>
#include <vector>

#include "railbeam/beam_model.hpp"

namespace railbeam {

/// Single sin(n pi xi / ell) mode of the linear beam, optionally driven by a
/// time-constant modal load force_amp * sin(n pi xi / ell).
struct ModalSpec {
  int n = 1;
  double w_amp = 1.0;
  double v_amp = 0.0;
  double force_amp = 0.0;
};

struct ModalState {
  double w = 0.0;
  double v = 0.0;
};

/// Modal damping and stiffness per unit mass:
///   q'' + damping q' + stiffness q = force / rho_a.
struct ModalCoefficients {
  double damping = 0.0;
  double stiffness = 0.0;
  double lambda = 0.0;  // (n pi / ell)^4
};

ModalCoefficients modal_coefficients(const BeamParams& p, int n);

/// Closed-form amplitudes at time t (under-, over- and critically damped).
/// Throws NonlinearNotSupported unless alpha == 0.
ModalState modal_solution(const BeamParams& p, const ModalSpec& spec, double t);

/// Central difference (f[i+1] - f[i-1]) / (2 dt). Throws IndexOutOfRange
/// unless 1 <= i <= size - 2.
double fd_derivative(std::span<const double> series, std::size_t i, double dt);

/// Least-squares slope of log(error) against log(step). Throws DegenerateData
/// for fewer than three levels or non-positive entries.
double convergence_order(std::span<const std::pair<double, double>> errors);

}  // namespace railbeam
