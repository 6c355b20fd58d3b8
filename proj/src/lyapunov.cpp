#include "railbeam/lyapunov.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "railbeam/errors.hpp"

namespace railbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_multiplier(double c, const BeamParams& p) {
  const double top = std::sqrt(p.rho_a() * p.k());
  if (!(c > 0.0) || !(c < top))
    throw InvalidMultiplier("multiplier c=" + std::to_string(c) + " outside (0, sqrt(rho_a k))");
}

void require_class(const Trajectory& traj, bool ok, const char* check) {
  if (!ok)
    throw InputClassMismatch(std::string(check) + " does not accept " + to_string(traj.input_class) +
                             " inputs");
}

const std::vector<double>& lyapunov_record(const Trajectory& traj, const LyapunovCertificate& cert) {
  if (!traj.multiplier || traj.lyapunov_value.size() != traj.size())
    throw ConfigError("trajectory has no Lyapunov record; call attach_lyapunov first");
  if (std::abs(*traj.multiplier - cert.c) > 1e-14 * std::max(1.0, cert.c))
    throw ConfigError("trajectory Lyapunov record uses a different multiplier");
  return traj.lyapunov_value;
}

// Running folds of per-sample margins into one entry.
class Accumulator {
 public:
  Accumulator(std::string name, double tol) { entry_.check = std::move(name); entry_.tolerance = tol; }

  void component(const std::string& name) {
    entry_.components.emplace_back(name, kInf);
    current_ = entry_.components.size() - 1;
  }

  void add(double margin, double t) {
    auto& worst = entry_.components[current_].second;
    worst = std::min(worst, margin);
    ++entry_.samples;
    if (margin < -entry_.tolerance && (!first_ || t < *first_)) first_ = t;
  }

  BoundEntry finish() {
    double worst = kInf;
    for (auto& [name, m] : entry_.components) {
      if (m == kInf) m = 0.0;  // no samples
      worst = std::min(worst, m);
    }
    entry_.worst_margin = worst == kInf ? 0.0 : worst;
    entry_.pass = entry_.worst_margin >= -entry_.tolerance;
    entry_.first_violation_time = first_;
    return std::move(entry_);
  }

 private:
  BoundEntry entry_;
  std::size_t current_ = 0;
  std::optional<double> first_;
};

// Central differences of V at samples 1 .. n-2.
double central(const std::vector<double>& v, std::size_t i, double dt) {
  return (v[i + 1] - v[i - 1]) / (2.0 * dt);
}

// Trapezoidal integral of e^{-omega (t - s)} g(s) at every sample, with the
// discrepancy against the same rule at step 2 dt as an error allowance.
struct Convolution {
  std::vector<double> value;
  std::vector<double> allowance;
};

Convolution discounted_integral(const std::vector<double>& g, double dt, double omega) {
  const std::size_t n = g.size();
  Convolution out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double q = std::exp(-omega * dt);
  const double q2 = q * q;
  double coarse = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    out.value[i] = q * out.value[i - 1] + 0.5 * dt * (q * g[i - 1] + g[i]);
    if (i % 2 == 0) {
      coarse = q2 * coarse + dt * (q2 * g[i - 2] + g[i]);
      out.allowance[i] = std::abs(out.value[i] - coarse);
    } else {
      out.allowance[i] = out.allowance[i - 1];
    }
  }
  // An odd sample borrows from its left neighbour; use the larger of both sides.
  for (std::size_t i = 1; i + 1 < n; i += 2) out.allowance[i] = std::max(out.allowance[i], out.allowance[i + 1]);
  return out;
}

double initial_term(const LyapunovCertificate& cert, double e0) {
  return (cert.c_u / cert.c_l) * e0 + (cert.c_h / cert.c_l) * e0 * e0;
}

double grid_point(double lo, double hi, int j, int count) {
  return lo * std::pow(hi / lo, (j + 0.5) / count);
}

}  // namespace

double ISSGains::beta(double s, double t) const {
  const double s2 = s * s;
  return std::exp(-omega * t) * ((c_u / c_l) * s2 + (c_h / c_l) * s2 * s2);
}

ISSGains iss_gains(const LyapunovCertificate& cert) {
  ISSGains g;
  g.omega = cert.omega;
  g.c_l = cert.c_l;
  g.c_u = cert.c_u;
  g.c_h = cert.c_h;
  g.input_gain = cert.input_gain;
  g.decay_gain = cert.decay_gain;
  return g;
}

double lyapunov_value(const StateVec& x, double c, const BeamParams& p, const FemOperators& ops) {
  require_multiplier(c, p);
  const double cross = bilinear(ops.mass(), x.w, x.v);
  return energy_norm_sq(x, p, ops) + 0.5 * p.alpha() * quartic_integral(x.w, ops) + 2.0 * c * cross;
}

void attach_lyapunov(Trajectory& traj, double c, const BeamParams& p) {
  require_multiplier(c, p);
  traj.lyapunov_value.resize(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i)
    traj.lyapunov_value[i] = traj.energy_norm_sq[i] + 0.5 * p.alpha() * traj.quartic[i] + 2.0 * c * traj.cross[i];
  traj.multiplier = c;
}

double embedding_ratio(const Vector& w, const FemOperators& ops) {
  const double b = bilinear(ops.bending(), w, w);
  if (!(b > 0.0)) throw DegenerateData("embedding ratio of a zero displacement");
  return quartic_integral(w, ops) / (b * b);
}

double embedding_constant(const FemOperators& ops, std::uint64_t seed) {
  // Maximizing the convex quartic on the ellipsoid w^T K w = 1: the update
  // w <- K^{-1} grad / |K^{-1} grad|_K never decreases the objective.
  Eigen::SimplicialLDLT<SparseMatrix> solver(ops.bending());
  const auto ascend = [&](Vector w) {
    double best = embedding_ratio(w, ops);
    for (int it = 0; it < 500; ++it) {
      Vector z = solver.solve(nonlinear_force(w, 4.0, ops));
      const double norm = std::sqrt(bilinear(ops.bending(), z, z));
      if (!(norm > 0.0) || !std::isfinite(norm)) break;
      w = z / norm;
      const double r = embedding_ratio(w, ops);
      const bool done = r - best <= 1e-13 * best;
      best = std::max(best, r);
      if (done) break;
    }
    return best;
  };

  const double ell = ops.mesh().ell;
  const double pi = std::acos(-1.0);
  Vector mode1 = interpolate([&](double xi) { return std::sin(pi * xi / ell); },
                             [&](double xi) { return pi / ell * std::cos(pi * xi / ell); }, ops);
  double best = ascend(mode1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < 10; ++s) {
    Vector w(ops.dofs());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    best = std::max(best, ascend(w));
  }
  return 1.25 * best;
}

std::array<double, 4> omega0_terms(const BeamParams& p, double c, double eps1, double eps2, double eps3) {
  const double ra = p.rho_a();
  return {
      1.0 - p.Cd() * eps2 / (2.0 * p.EI()),
      1.0 - p.mu() * eps1 / (2.0 * p.k()) - c / (2.0 * ra * eps3 * p.k()),
      p.mu() / c - 1.0 - p.mu() / (2.0 * eps1 * ra) - eps3 / (2.0 * c),
      ra / c - 1.0 / (2.0 * eps2),
  };
}

namespace {

double omega0_of(const std::array<double, 4>& terms, double c, double rho_a) {
  return 2.0 * c / rho_a * *std::min_element(terms.begin(), terms.end());
}

void fill_gains(LyapunovCertificate& cert) {
  if (cert.convention == Convention::Published) {
    cert.input_gain = cert.eps3;
    cert.decay_gain = cert.eps3 / cert.omega;
    cert.mild_gain = cert.eps3 / cert.c_l;
  } else {
    cert.input_gain = cert.eps3 + 1.0 / cert.eps3;
    cert.decay_gain = cert.input_gain / (cert.c_l * cert.omega);
    cert.mild_gain = cert.input_gain / cert.c_l;
  }
}

}  // namespace

LyapunovCertificate certificate_for_multiplier(const BeamParams& p, double c, const FemOperators& ops,
                                               Convention convention) {
  require_multiplier(c, p);
  const double ra = p.rho_a();
  const double k = p.k();
  const double mu = p.mu();

  LyapunovCertificate cert;
  cert.convention = convention;
  cert.c_max = admissible_c_max(p, convention);
  cert.c = c;
  cert.eps2 = p.Cd() > 0.0 ? std::sqrt(c * p.EI() / (ra * p.Cd())) : c / ra;

  // For fixed eps1, eps3 ranges over (lo, hi) with
  //   lo = c / (rho_a mu (2k/mu - eps1)),  hi = 2 mu - 2c - mu c / (eps1 rho_a).
  const double eps1_top = 2.0 * k / mu;
  const auto eps3_range = [&](double e1) {
    return std::pair{c / (ra * mu * (eps1_top - e1)), 2.0 * mu - 2.0 * c - mu * c / (e1 * ra)};
  };
  double best = -kInf;
  double best1 = 0.0;
  double best3 = 0.0;
  const auto scan_eps3 = [&](double e1) {
    const auto [lo, hi] = eps3_range(e1);
    if (!(e1 > 0.0 && e1 < eps1_top) || !(hi > lo) || !(lo > 0.0)) return;
    constexpr int n = 64;
    for (int j = 0; j < n; ++j) {
      const double e3 = grid_point(lo, hi, j, n);
      const double w0 = omega0_of(omega0_terms(p, c, e1, cert.eps2, e3), c, ra);
      if (w0 > best) {
        best = w0;
        best1 = e1;
        best3 = e3;
      }
    }
  };

  constexpr int n1 = 64;
  const double lo1 = 1e-4 * eps1_top;
  for (int i = 0; i < n1; ++i) scan_eps3(grid_point(lo1, eps1_top, i, n1));
  // Centre of the coupled region; keeps thin regions near the bound reachable.
  scan_eps3(2.0 * k / (1.0 + mu));
  if (best > 0.0) {
    const double step = std::pow(eps1_top / lo1, 1.0 / n1);
    const double a = best1 / step;
    const double b = std::min(best1 * step, eps1_top);
    for (int i = 0; i < n1; ++i) scan_eps3(grid_point(a, b, i, n1));
  }
  if (!(best > 0.0))
    throw InfeasibleMultiplier("no (eps1, eps3) pair gives a positive decay rate for c=" + std::to_string(c));

  cert.eps1 = best1;
  cert.eps3 = best3;
  cert.omega0_terms = omega0_terms(p, c, best1, cert.eps2, best3);
  cert.omega0 = omega0_of(cert.omega0_terms, c, ra);

  const double ratio = c / std::sqrt(ra * k);
  cert.eps_b = std::sqrt(k / ra);
  cert.eps_r = std::sqrt(k / ra);
  cert.r = 1.0 + ratio;
  cert.omega = cert.omega0 / cert.r;
  cert.c_l = 1.0 - ratio;
  cert.c_u = 1.0 + ratio;
  cert.c_e = embedding_constant(ops);
  cert.c_h = p.alpha() * cert.c_e / (2.0 * p.EI() * p.EI());
  fill_gains(cert);
  return cert;
}

LyapunovCertificate select_constants(const BeamParams& p, double c_fraction, const FemOperators& ops,
                                     Convention convention) {
  if (!(c_fraction > 0.0 && c_fraction < 1.0)) throw ConfigError("c_fraction must lie in (0, 1)");
  const double c_max = admissible_c_max(p, convention);
  // Near c_max the admissible region collapses; the grid must still find it.
  return certificate_for_multiplier(p, c_fraction * c_max, ops, convention);
}

std::vector<std::string> certificate_violations(const LyapunovCertificate& cert, const BeamParams& p) {
  std::vector<std::string> out;
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) out.push_back(what);
  };
  const double ra = p.rho_a();
  const double k = p.k();
  const double mu = p.mu();
  const double c = cert.c;
  const double c_max = admissible_c_max(p, Convention::Corrected);
  need(c > 0.0 && c < c_max, "0 < c < admissible_c_max");
  need(c / ra < cert.eps_b && cert.eps_b < k / c, "c/rho_a < eps_b < k/c");
  need(cert.eps1 > 0.0 && cert.eps1 < 2.0 * k / mu - c / (ra * cert.eps3 * mu), "eps1 range");
  const double eps2_top = p.Cd() > 0.0 ? 2.0 * p.EI() / p.Cd() : kInf;
  need(cert.eps2 > c / (2.0 * ra) && cert.eps2 < eps2_top, "eps2 range");
  need(cert.eps3 > 0.0 && cert.eps3 < 2.0 * mu - 2.0 * c - mu * c / (cert.eps1 * ra), "eps3 range");
  need(cert.omega0 > 0.0, "omega0 > 0");
  need(cert.r > 1.0, "r > 1");
  need(cert.omega > 0.0, "omega > 0");
  need(std::abs(cert.omega - cert.omega0 / cert.r) <= 1e-12 * cert.omega0, "omega = omega0 / r");
  need(cert.c_l > 0.0 && cert.c_l <= 1.0, "c_l in (0, 1]");
  need(cert.c_u >= 1.0, "c_u >= 1");
  need(cert.c_h >= 0.0, "c_h >= 0");
  need(cert.c_e > 0.0, "c_e > 0");
  need(cert.input_gain > 0.0, "input_gain > 0");
  return out;
}

LyapunovCertificate sabotage(LyapunovCertificate cert, double c_l_scale, double omega_scale) {
  cert.c_l *= c_l_scale;
  cert.omega *= omega_scale;
  fill_gains(cert);
  return cert;
}

FdCalibration calibrate_fd(const Trajectory& coarse, const Trajectory& fine) {
  const auto& vc = coarse.lyapunov_value;
  const auto& vf = fine.lyapunov_value;
  if (vc.size() != coarse.size() || vf.size() != fine.size() || coarse.size() < 3)
    throw ConfigError("calibration runs need Lyapunov records");
  if (std::abs(coarse.dt - 2.0 * fine.dt) > 1e-12 * coarse.dt || fine.size() != 2 * coarse.size() - 1)
    throw ConfigError("calibration run must halve dt over the same horizon");
  double diff = 0.0;
  for (std::size_t i = 1; i + 1 < coarse.size(); ++i)
    diff = std::max(diff, std::abs(central(vc, i, coarse.dt) - central(vf, 2 * i, fine.dt)));
  // D_dt - D_dt/2 = C dt^2 (1 - 1/4); doubled for safety.
  return {2.0 * diff / (0.75 * coarse.dt * coarse.dt)};
}

std::array<double, 2> sandwich_margins(const StateVec& x, const LyapunovCertificate& cert, const BeamParams& p,
                                       const FemOperators& ops) {
  const double e = energy_norm_sq(x, p, ops);
  const double v = lyapunov_value(x, cert.c, p, ops);
  const double upper = cert.c_u * e + cert.c_h * e * e;
  const double scale = 1.0 + std::max(std::abs(v), upper);
  return {(v - cert.c_l * e) / scale, (upper - v) / scale};
}

BoundEntry check_sandwich(const Trajectory& traj, const LyapunovCertificate& cert) {
  const auto& V = lyapunov_record(traj, cert);
  Accumulator acc("sandwich", 1e-9);
  const auto scale = [&](std::size_t i) {
    const double e = traj.energy_norm_sq[i];
    return 1.0 + std::max(std::abs(V[i]), cert.c_u * e + cert.c_h * e * e);
  };
  acc.component("lower");
  for (std::size_t i = 0; i < traj.size(); ++i)
    acc.add((V[i] - cert.c_l * traj.energy_norm_sq[i]) / scale(i), traj.times[i]);
  acc.component("upper");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double e = traj.energy_norm_sq[i];
    acc.add((cert.c_u * e + cert.c_h * e * e - V[i]) / scale(i), traj.times[i]);
  }
  return acc.finish();
}

BoundEntry check_dissipation(const Trajectory& traj, const LyapunovCertificate& cert, const FdCalibration& fd) {
  require_class(traj, traj.input_class == InputClass::C1, "dissipation check");
  const auto& V = lyapunov_record(traj, cert);
  const double tol = 1e-6;
  const double fd_slack = fd.c_fd * traj.dt * traj.dt / tol;
  Accumulator acc("dissipation", tol);
  acc.component("dV/dt <= sigma |u|^2 - omega V");
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double lhs = central(V, i, traj.dt);
    const double rhs = cert.input_gain * traj.input_norm_sq[i] - cert.omega * V[i];
    acc.add((rhs - lhs) / (1.0 + std::abs(V[i]) + fd_slack), traj.times[i]);
  }
  return acc.finish();
}

BoundEntry check_classical_decay(const Trajectory& traj, const LyapunovCertificate& cert) {
  require_class(traj, traj.input_class == InputClass::C1, "classical decay check");
  const auto& V = lyapunov_record(traj, cert);
  Accumulator acc("classical_decay", 1e-6);
  if (traj.size() == 0) return acc.finish();
  const double w = cert.omega;
  const double x0 = initial_term(cert, traj.energy_norm_sq[0]);

  acc.component("pointwise");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double decay = std::exp(-w * t);
    const double rhs = decay * x0 + cert.decay_gain * (1.0 - decay) * traj.input_sup_sq[i];
    acc.add((rhs - traj.energy_norm_sq[i]) / (1.0 + std::abs(rhs)), t);
  }

  acc.component("gronwall");
  const Convolution conv = discounted_integral(traj.input_norm_sq, traj.dt, w);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double rhs = std::exp(-w * t) * V[0] + cert.input_gain * conv.value[i];
    const double slack = cert.input_gain * conv.allowance[i];
    acc.add((rhs - V[i] + slack) / (1.0 + std::abs(rhs)), t);
  }
  return acc.finish();
}

BoundEntry check_mild_integral(const Trajectory& traj, const LyapunovCertificate& cert) {
  Accumulator acc("mild_integral", 1e-6);
  acc.component("sup + omega integral");
  if (traj.size() == 0) return acc.finish();
  const auto& E = traj.energy_norm_sq;
  const Convolution integral = discounted_integral(E, traj.dt, 0.0);
  const double x0 = initial_term(cert, E[0]);
  double running = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    running = std::max(running, E[i]);
    const double lhs = running + cert.omega * integral.value[i];
    const double rhs = x0 + cert.mild_gain * traj.input_energy[i];
    const double slack = cert.omega * integral.allowance[i];
    acc.add((rhs - lhs + slack) / (1.0 + std::abs(rhs)), traj.times[i]);
  }
  return acc.finish();
}

BoundEntry check_iss(const Trajectory& traj, const LyapunovCertificate& cert, const ISSGains& gains,
                     const std::optional<FdCalibration>& fd) {
  require_class(traj, traj.input_class != InputClass::L2loc, "ISS check");
  Accumulator acc("iss", 1e-6);
  if (traj.size() == 0) return acc.finish();
  const double e0 = traj.energy_norm_sq[0];
  const double s0 = std::sqrt(e0);

  acc.component("state bound");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double rhs = gains.beta(s0, t) + gains.gamma_sq(std::sqrt(traj.input_sup_sq[i]));
    acc.add((rhs - traj.energy_norm_sq[i]) / (1.0 + std::abs(rhs)), t);
  }

  if (fd && traj.input_class == InputClass::C1) {
    const auto& V = lyapunov_record(traj, cert);
    const double fd_slack = fd->c_fd * traj.dt * traj.dt / 1e-6;
    acc.component("iss-lyapunov");
    for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
      const double lhs = central(V, i, traj.dt);
      const double rhs = -gains.alpha_damp(std::sqrt(traj.energy_norm_sq[i])) +
                         gains.sigma(std::sqrt(traj.input_sup_sq[i]));
      acc.add((rhs - lhs) / (1.0 + std::abs(V[i]) + fd_slack), traj.times[i]);
    }
  }
  return acc.finish();
}

}  // namespace railbeam
