#include "railbeam/inputs.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <set>

#include "railbeam/errors.hpp"

namespace railbeam {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double nodal_eval(const Profile::Nodal& nd, double xi, bool slope) {
  const int n_el = static_cast<int>(nd.values.size()) - 1;
  const double h = nd.ell / n_el;
  int e = static_cast<int>(std::floor(xi / h));
  e = std::clamp(e, 0, n_el - 1);
  const double s = (xi - e * h) / h;
  const double s2 = s * s, s3 = s2 * s;
  if (!slope) {
    return (1 - 3 * s2 + 2 * s3) * nd.values[e] + h * (s - 2 * s2 + s3) * nd.slopes[e] +
           (3 * s2 - 2 * s3) * nd.values[e + 1] + h * (s3 - s2) * nd.slopes[e + 1];
  }
  return (6 * s2 - 6 * s) / h * nd.values[e] + (1 - 4 * s + 3 * s2) * nd.slopes[e] +
         (6 * s - 6 * s2) / h * nd.values[e + 1] + (3 * s2 - 2 * s) * nd.slopes[e + 1];
}

double term_value(const Profile::Term& term, double xi) {
  return std::visit(
      Overloaded{
          [&](const Profile::Mode& m) { return m.amp * std::sin(m.n * kPi * xi / m.ell); },
          [&](const Profile::Gaussian& g) {
            const double z = (xi - g.center) / g.width;
            return g.amp * std::exp(-0.5 * z * z);
          },
          [&](const Profile::Polynomial& p) {
            double acc = 0.0;
            for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * xi + *it;
            return acc;
          },
          [&](const Profile::Nodal& nd) { return nodal_eval(nd, xi, false); },
      },
      term);
}

double term_slope(const Profile::Term& term, double xi) {
  return std::visit(
      Overloaded{
          [&](const Profile::Mode& m) {
            const double k = m.n * kPi / m.ell;
            return m.amp * k * std::cos(k * xi);
          },
          [&](const Profile::Gaussian& g) {
            const double z = (xi - g.center) / g.width;
            return -g.amp * z / g.width * std::exp(-0.5 * z * z);
          },
          [&](const Profile::Polynomial& p) {
            double acc = 0.0;
            for (std::size_t j = p.coeffs.size(); j-- > 1;) acc = acc * xi + j * p.coeffs[j];
            return acc;
          },
          [&](const Profile::Nodal& nd) { return nodal_eval(nd, xi, true); },
      },
      term);
}

double gaussian_sq_integral(double amp, double center, double width, double a, double b) {
  // amp^2 * integral exp(-(xi - center)^2 / width^2)
  return amp * amp * width * std::sqrt(kPi) / 2.0 *
         (std::erf((b - center) / width) - std::erf((a - center) / width));
}

double term_norm_sq(const Profile::Term& term, double ell) {
  return std::visit(
      Overloaded{
          [&](const Profile::Mode& m) {
            if (m.ell == ell) return m.amp * m.amp * ell / 2.0;
            const double k = m.n * kPi / m.ell;
            return m.amp * m.amp * (ell / 2.0 - std::sin(2.0 * k * ell) / (4.0 * k));
          },
          [&](const Profile::Gaussian& g) {
            return gaussian_sq_integral(g.amp, g.center, g.width, 0.0, ell);
          },
          [&](const Profile::Polynomial& p) {
            double total = 0.0;
            for (std::size_t i = 0; i < p.coeffs.size(); ++i)
              for (std::size_t j = 0; j < p.coeffs.size(); ++j)
                total += p.coeffs[i] * p.coeffs[j] * std::pow(ell, double(i + j + 1)) / double(i + j + 1);
            return total;
          },
          [&](const Profile::Nodal& nd) {
            // Piecewise cubic squared is degree 6: the 7-point rule is exact.
            const GaussRule rule = gauss_rule(7);
            const int n_el = static_cast<int>(nd.values.size()) - 1;
            const double h = nd.ell / n_el;
            double total = 0.0;
            for (int e = 0; e < n_el; ++e) {
              const double lo = e * h, hi = std::min((e + 1) * h, ell);
              if (hi <= lo) break;
              for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double xi = lo + rule.points[q] * (hi - lo);
                const double v = nodal_eval(nd, xi, false);
                total += rule.weights[q] * (hi - lo) * v * v;
              }
            }
            return total;
          },
      },
      term);
}

}  // namespace

std::string to_string(InputClass c) {
  switch (c) {
    case InputClass::C1: return "C1";
    case InputClass::PC: return "PC";
    case InputClass::L2loc: return "L2loc";
  }
  return "?";
}

// --- Profile -----------------------------------------------------------------

Profile Profile::mode(int n, double amp, double ell) {
  if (n < 1) throw ConfigError("mode index must be >= 1");
  if (!(ell > 0.0)) throw ConfigError("mode length must be positive");
  Profile p;
  if (amp != 0.0) p.terms_.push_back(Mode{n, amp, ell});
  return p;
}

Profile Profile::gaussian(double center, double width, double amp) {
  if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
  Profile p;
  if (amp != 0.0) p.terms_.push_back(Gaussian{center, width, amp});
  return p;
}

Profile Profile::polynomial(std::vector<double> coeffs) {
  Profile p;
  if (std::any_of(coeffs.begin(), coeffs.end(), [](double c) { return c != 0.0; }))
    p.terms_.push_back(Polynomial{std::move(coeffs)});
  return p;
}

Profile Profile::nodal(double ell, std::vector<double> values, std::vector<double> slopes) {
  if (values.size() < 2 || values.size() != slopes.size())
    throw ConfigError("nodal profile needs matching value/slope lists with >= 2 nodes");
  if (!(ell > 0.0)) throw ConfigError("nodal profile length must be positive");
  Profile p;
  p.terms_.push_back(Nodal{ell, std::move(values), std::move(slopes)});
  return p;
}

Profile Profile::operator+(const Profile& other) const {
  Profile sum = *this;
  sum.terms_.insert(sum.terms_.end(), other.terms_.begin(), other.terms_.end());
  return sum;
}

Profile Profile::scaled(double factor) const {
  if (factor == 0.0) return {};
  Profile out = *this;
  for (auto& term : out.terms_) {
    std::visit(Overloaded{
                   [&](Mode& m) { m.amp *= factor; },
                   [&](Gaussian& g) { g.amp *= factor; },
                   [&](Polynomial& p) {
                     for (double& c : p.coeffs) c *= factor;
                   },
                   [&](Nodal& nd) {
                     for (double& v : nd.values) v *= factor;
                     for (double& v : nd.slopes) v *= factor;
                   },
               },
               term);
  }
  return out;
}

double Profile::value(double xi) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += term_value(t, xi);
  return acc;
}

double Profile::slope(double xi) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += term_slope(t, xi);
  return acc;
}

double Profile::norm_sq(double ell) const {
  if (terms_.empty()) return 0.0;
  if (terms_.size() == 1) return term_norm_sq(terms_.front(), ell);

  // Split at nodal grid points so each panel is smooth.
  std::set<double> breaks{0.0, ell};
  for (const auto& t : terms_) {
    if (const auto* nd = std::get_if<Nodal>(&t)) {
      const int n_el = static_cast<int>(nd->values.size()) - 1;
      for (int i = 1; i < n_el; ++i) {
        const double x = nd->ell * i / n_el;
        if (x < ell) breaks.insert(x);
      }
    }
  }
  using boost::math::quadrature::gauss_kronrod;
  auto sq = [this](double xi) {
    const double v = value(xi);
    return v * v;
  };
  double total = 0.0;
  for (auto it = breaks.begin(); std::next(it) != breaks.end(); ++it)
    total += gauss_kronrod<double, 31>::integrate(sq, *it, *std::next(it), 15, 1e-14);
  return total;
}

// --- Envelope ----------------------------------------------------------------

namespace {

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}

// integral of smoothstep^2 from 0 to x
double smoothstep_sq_primitive(double x) {
  if (x <= 0.0) return 0.0;
  const double y = std::min(x, 1.0);
  const double y5 = std::pow(y, 5);
  const double head = 9.0 * y5 / 5.0 - 2.0 * y5 * y + 4.0 * y5 * y * y / 7.0;
  return head + std::max(0.0, x - 1.0);
}

}  // namespace

double Envelope::value(double t) const {
  return std::visit(Overloaded{
                        [&](const Constant& c) { return c.level; },
                        [&](const Sine& s) { return s.offset + s.amp * std::sin(s.freq * t + s.phase); },
                        [&](const SmoothRamp& r) { return r.level * smoothstep(t / r.t_rise); },
                    },
                    kind);
}

double Envelope::sup_abs(double a, double b) const {
  return std::visit(
      Overloaded{
          [&](const Constant& c) { return std::abs(c.level); },
          [&](const Sine& s) {
            double best = std::max(std::abs(value(a)), std::abs(value(b)));
            if (s.freq == 0.0) return best;
            // Extremes of sin sit at freq t + phase = pi/2 + m pi.
            const double w = std::abs(s.freq);
            if ((b - a) * w >= 2.0 * kPi) return std::abs(s.offset) + std::abs(s.amp);
            const double lo = std::min(s.freq * a, s.freq * b) + s.phase;
            const double hi = std::max(s.freq * a, s.freq * b) + s.phase;
            for (double m = std::ceil((lo - kPi / 2) / kPi); kPi / 2 + m * kPi <= hi; m += 1.0) {
              const double arg = kPi / 2 + m * kPi;
              best = std::max(best, std::abs(s.offset + s.amp * std::sin(arg)));
            }
            return best;
          },
          [&](const SmoothRamp& r) { return std::abs(r.level) * smoothstep(b / r.t_rise); },
      },
      kind);
}

double Envelope::sq_integral(double a, double b) const {
  return std::visit(
      Overloaded{
          [&](const Constant& c) { return c.level * c.level * (b - a); },
          [&](const Sine& s) {
            const double o = s.offset, A = s.amp, w = s.freq;
            if (w == 0.0) {
              const double v = o + A * std::sin(s.phase);
              return v * v * (b - a);
            }
            auto prim = [&](double t) {
              const double arg = w * t + s.phase;
              return o * o * t - 2.0 * o * A * std::cos(arg) / w +
                     A * A * (t / 2.0 - std::sin(2.0 * arg) / (4.0 * w));
            };
            return prim(b) - prim(a);
          },
          [&](const SmoothRamp& r) {
            return r.level * r.level * r.t_rise *
                   (smoothstep_sq_primitive(b / r.t_rise) - smoothstep_sq_primitive(a / r.t_rise));
          },
      },
      kind);
}

// --- InputSignal -------------------------------------------------------------

InputSignal::InputSignal(Kind kind, double ell) : kind_(std::move(kind)), ell_(ell) {
  if (!(ell > 0.0)) throw ConfigError("input domain length must be positive");
  std::visit(Overloaded{
                 [&](const Zero&) {},
                 [&](const Separable& s) { profile_norm_sq_.push_back(s.profile.norm_sq(ell_)); },
                 [&](const ExpDecay& s) { profile_norm_sq_.push_back(s.profile.norm_sq(ell_)); },
                 [&](const MovingGaussian&) {},
                 [&](const Piecewise& pc) {
                   for (const auto& p : pc.profiles) profile_norm_sq_.push_back(p.norm_sq(ell_));
                 },
             },
             kind_);
}

InputSignal InputSignal::zero(double ell) { return InputSignal(Zero{}, ell); }

InputSignal InputSignal::separable(Profile profile, Envelope envelope, double ell) {
  if (const auto* r = std::get_if<Envelope::SmoothRamp>(&envelope.kind); r && !(r->t_rise > 0.0))
    throw ConfigError("ramp rise time must be positive");
  return InputSignal(Separable{std::move(profile), envelope}, ell);
}

InputSignal InputSignal::exp_decay(Profile profile, double u0, double delta, double ell) {
  if (!(u0 >= 0.0)) throw ConfigError("exp_decay amplitude u0 must be >= 0");
  if (!(delta > 0.0)) throw ConfigError("exp_decay rate delta must be > 0");
  return InputSignal(ExpDecay{std::move(profile), u0, delta}, ell);
}

InputSignal InputSignal::moving_gaussian(double F, double speed, double width, double t_enter,
                                         double ell) {
  if (!(width > 0.0)) throw ConfigError("moving load width must be > 0");
  if (speed == 0.0 || !std::isfinite(speed)) throw ConfigError("moving load speed must be nonzero");
  return InputSignal(MovingGaussian{F, speed, width, t_enter}, ell);
}

InputSignal InputSignal::entering_load(double F, double speed, double width, double ell) {
  if (!(speed > 0.0)) throw ConfigError("entering load needs positive speed");
  return moving_gaussian(F, speed, width, 8.0 * width / speed, ell);
}

InputSignal InputSignal::piecewise(std::vector<double> starts, std::vector<Profile> profiles,
                                   double ell) {
  if (starts.empty() || starts.size() != profiles.size())
    throw ConfigError("piecewise input needs one profile per segment start");
  if (!(starts.front() >= 0.0)) throw ConfigError("segment starts must be >= 0");
  for (std::size_t i = 1; i < starts.size(); ++i)
    if (!(starts[i] > starts[i - 1])) throw ConfigError("segment starts must be strictly increasing");
  return InputSignal(Piecewise{std::move(starts), std::move(profiles)}, ell);
}

InputClass InputSignal::input_class() const noexcept {
  return std::holds_alternative<Piecewise>(kind_) ? InputClass::PC : InputClass::C1;
}

int InputSignal::segment_index(double t, Side side) const {
  if (!std::holds_alternative<Piecewise>(kind_)) return -1;
  const auto& starts = std::get<Piecewise>(kind_).starts;
  // Right: last start <= t.  Left: last start < t (the value just before t).
  auto it = side == Side::Right ? std::upper_bound(starts.begin(), starts.end(), t)
                                : std::lower_bound(starts.begin(), starts.end(), t);
  if (side == Side::Left && t <= 0.0) it = std::upper_bound(starts.begin(), starts.end(), t);
  return static_cast<int>(it - starts.begin()) - 1;
}

double InputSignal::value(double xi, double t, Side side) const {
  return std::visit(
      Overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const Separable& s) { return s.envelope.value(t) * s.profile.value(xi); },
          [&](const ExpDecay& s) { return s.u0 * std::exp(-s.delta * t) * s.profile.value(xi); },
          [&](const MovingGaussian& g) {
            const double z = (xi - g.speed * (t - g.t_enter)) / g.width;
            return g.F * std::exp(-0.5 * z * z);
          },
          [&](const Piecewise& pc) {
            const int k = segment_index(t, side);
            return k < 0 ? 0.0 : pc.profiles[k].value(xi);
          },
      },
      kind_);
}

namespace {

double moving_norm_sq(const InputSignal::MovingGaussian& g, double t, double ell) {
  const double c = g.speed * (t - g.t_enter);
  return gaussian_sq_integral(g.F, c, g.width, 0.0, ell);
}

}  // namespace

double InputSignal::norm_sq(double t, Side side) const {
  return std::visit(
      Overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const Separable& s) {
            const double e = s.envelope.value(t);
            return e * e * profile_norm_sq_[0];
          },
          [&](const ExpDecay& s) {
            const double e = s.u0 * std::exp(-s.delta * t);
            return e * e * profile_norm_sq_[0];
          },
          [&](const MovingGaussian& g) { return moving_norm_sq(g, t, ell_); },
          [&](const Piecewise&) {
            const int k = segment_index(t, side);
            return k < 0 ? 0.0 : profile_norm_sq_[k];
          },
      },
      kind_);
}

double InputSignal::sup_norm_sq(double a, double b) const {
  return std::visit(
      Overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const Separable& s) {
            const double e = s.envelope.sup_abs(a, b);
            return e * e * profile_norm_sq_[0];
          },
          [&](const ExpDecay& s) {
            const double e = s.u0 * std::exp(-s.delta * a);
            return e * e * profile_norm_sq_[0];
          },
          [&](const MovingGaussian& g) {
            // ||u||^2 is unimodal in the centre position with its peak at ell/2.
            const double ca = g.speed * (a - g.t_enter), cb = g.speed * (b - g.t_enter);
            const double c = std::clamp(ell_ / 2.0, std::min(ca, cb), std::max(ca, cb));
            return gaussian_sq_integral(g.F, c, g.width, 0.0, ell_);
          },
          [&](const Piecewise&) {
            const int first = segment_index(a, Side::Right);
            const int last = segment_index(b, Side::Right);
            double best = first < 0 ? 0.0 : profile_norm_sq_[first];
            for (int k = std::max(first, 0); k <= last; ++k) best = std::max(best, profile_norm_sq_[k]);
            return best;
          },
      },
      kind_);
}

double InputSignal::energy(double a, double b) const {
  if (b <= a) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Zero&) { return 0.0; },
          [&](const Separable& s) { return s.envelope.sq_integral(a, b) * profile_norm_sq_[0]; },
          [&](const ExpDecay& s) {
            const double d2 = 2.0 * s.delta;
            return s.u0 * s.u0 * profile_norm_sq_[0] * (std::exp(-d2 * a) - std::exp(-d2 * b)) / d2;
          },
          [&](const MovingGaussian& g) {
            // Fixed Gauss rule on pieces short against the load's transit time.
            using boost::math::quadrature::gauss;
            auto f = [&](double t) { return moving_norm_sq(g, t, ell_); };
            const double piece = 0.25 * g.width / g.speed;
            const int n = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
            double total = 0.0;
            for (int i = 0; i < n; ++i)
              total += gauss<double, 20>::integrate(f, a + (b - a) * i / n, a + (b - a) * (i + 1) / n);
            return total;
          },
          [&](const Piecewise& pc) {
            double total = 0.0;
            for (std::size_t k = 0; k < pc.starts.size(); ++k) {
              const double lo = std::max(a, pc.starts[k]);
              const double hi = std::min(b, k + 1 < pc.starts.size() ? pc.starts[k + 1] : b);
              if (hi > lo) total += profile_norm_sq_[k] * (hi - lo);
            }
            return total;
          },
      },
      kind_);
}

ScalarFunction eval_profile(const InputSignal& sig, double t, InputSignal::Side side) {
  return [sig, t, side](double xi) { return sig.value(xi, t, side); };
}

SignalNorms signal_norms(const InputSignal& sig, double t) {
  return {std::sqrt(sig.sup_norm_sq(0.0, t)), std::sqrt(sig.energy(0.0, t))};
}

InputSignal random_piecewise(std::uint64_t seed, int switches, double t_end, double grid,
                             double max_norm, double ell) {
  if (switches < 0 || !(grid > 0.0) || !(t_end > grid))
    throw ConfigError("random piecewise input needs switches >= 0 and t_end > grid > 0");
  const long slots = static_cast<long>(std::floor(t_end / grid + 1e-9)) - 1;
  if (switches > slots) throw ConfigError("too many switches for the time grid");

  std::mt19937_64 rng(seed);
  std::set<long> picks;
  std::uniform_int_distribution<long> slot(1, slots);
  while (static_cast<int>(picks.size()) < switches) picks.insert(slot(rng));

  std::vector<double> starts{0.0};
  for (long s : picks) starts.push_back(s * grid);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Profile> profiles;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    double a[3], ss = 0.0;
    for (double& x : a) {
      x = gauss(rng);
      ss += x * x;
    }
    // Modes are orthogonal with norm^2 ell/2 each.
    const double scale = max_norm * unit(rng) / std::sqrt(ss * ell / 2.0);
    Profile p;
    for (int n = 0; n < 3; ++n) p = p + Profile::mode(n + 1, a[n] * scale, ell);
    profiles.push_back(p);
  }
  return InputSignal::piecewise(std::move(starts), std::move(profiles), ell);
}

}  // namespace railbeam
