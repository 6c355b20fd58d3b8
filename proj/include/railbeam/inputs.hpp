#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "railbeam/fem.hpp"

namespace railbeam {

/// Time-regularity class of an input, mirroring the hypotheses of the
/// stability estimates: continuously differentiable, piecewise continuous,
/// or merely locally square integrable.
enum class InputClass { C1, PC, L2loc };

std::string to_string(InputClass c);

/// Spatial shape u(xi) as a finite sum of closed-form terms.
class Profile {
 public:
  /// amp * sin(n pi xi / ell)
  struct Mode {
    int n = 1;
    double amp = 1.0;
    double ell = 1.0;
  };
  /// amp * exp(-(xi - center)^2 / (2 width^2))
  struct Gaussian {
    double center = 0.0;
    double width = 1.0;
    double amp = 1.0;
  };
  /// sum_j coeffs[j] xi^j
  struct Polynomial {
    std::vector<double> coeffs;
  };
  /// Cubic Hermite interpolant of (value, slope) pairs on a uniform grid of [0, ell].
  struct Nodal {
    double ell = 1.0;
    std::vector<double> values;
    std::vector<double> slopes;
  };
  using Term = std::variant<Mode, Gaussian, Polynomial, Nodal>;

  Profile() = default;  // identically zero
  static Profile mode(int n, double amp, double ell);
  static Profile gaussian(double center, double width, double amp);
  static Profile polynomial(std::vector<double> coeffs);
  static Profile nodal(double ell, std::vector<double> values, std::vector<double> slopes);

  Profile operator+(const Profile& other) const;
  Profile scaled(double factor) const;

  double value(double xi) const;
  double slope(double xi) const;
  /// Integral of value^2 over (0, ell): closed form for a single term,
  /// adaptive Gauss-Kronrod for sums.
  double norm_sq(double ell) const;
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// Scalar time factor of a separable input; every kind is C^1 in t.
struct Envelope {
  struct Constant {
    double level = 1.0;
  };
  /// offset + amp * sin(freq t + phase)
  struct Sine {
    double amp = 1.0;
    double freq = 1.0;
    double phase = 0.0;
    double offset = 0.0;
  };
  /// level * (3 s^2 - 2 s^3), s = min(t / t_rise, 1)
  struct SmoothRamp {
    double level = 1.0;
    double t_rise = 1.0;
  };
  std::variant<Constant, Sine, SmoothRamp> kind = Constant{};

  double value(double t) const;
  /// max |value| over [a, b]
  double sup_abs(double a, double b) const;
  /// integral of value^2 over [a, b]
  double sq_integral(double a, double b) const;
};

/// Distributed forcing u(xi, t) on (0, ell) together with its regularity class.
class InputSignal {
 public:
  struct Zero {};
  struct Separable {
    Profile profile;
    Envelope envelope;
  };
  struct ExpDecay {
    Profile profile;
    double u0 = 1.0;
    double delta = 1.0;
  };
  /// F exp(-(xi - speed (t - t_enter))^2 / (2 width^2))
  struct MovingGaussian {
    double F = 1.0;
    double speed = 1.0;
    double width = 1.0;
    double t_enter = 0.0;
  };
  /// profiles[i] on [starts[i], starts[i+1]); zero before starts[0].
  struct Piecewise {
    std::vector<double> starts;
    std::vector<Profile> profiles;
  };
  using Kind = std::variant<Zero, Separable, ExpDecay, MovingGaussian, Piecewise>;

  /// Which one-sided value to use at a jump of a piecewise-constant input.
  enum class Side { Right, Left };

  static InputSignal zero(double ell);
  static InputSignal separable(Profile profile, Envelope envelope, double ell);
  /// Throws ConfigError unless u0 >= 0 and delta > 0.
  static InputSignal exp_decay(Profile profile, double u0, double delta, double ell);
  /// Throws ConfigError unless width > 0 and speed != 0.
  static InputSignal moving_gaussian(double F, double speed, double width, double t_enter, double ell);
  /// Moving load whose centre starts 8 widths left of the domain.
  static InputSignal entering_load(double F, double speed, double width, double ell);
  /// Throws ConfigError unless starts are >= 0 and strictly increasing.
  static InputSignal piecewise(std::vector<double> starts, std::vector<Profile> profiles, double ell);

  const Kind& kind() const noexcept { return kind_; }
  InputClass input_class() const noexcept;
  double ell() const noexcept { return ell_; }

  double value(double xi, double t, Side side = Side::Right) const;
  /// ||u(t)||^2 in L^2(0, ell), evaluated in closed form.
  double norm_sq(double t, Side side = Side::Right) const;
  /// sup of ||u(s)||^2 over s in [a, b].
  double sup_norm_sq(double a, double b) const;
  /// integral of ||u(s)||^2 over [a, b].
  double energy(double a, double b) const;

  /// Active segment of a piecewise input at t (-1 before the first start).
  int segment_index(double t, Side side = Side::Right) const;

 private:
  InputSignal(Kind kind, double ell);

  Kind kind_;
  double ell_;
  std::vector<double> profile_norm_sq_;  // one per profile carried by kind_
};

/// Spatial slice xi -> u(xi, t).
ScalarFunction eval_profile(const InputSignal& sig, double t,
                            InputSignal::Side side = InputSignal::Side::Right);

struct SignalNorms {
  double sup = 0.0;  // sup_{s <= t} ||u(s)||
  double l2 = 0.0;   // ||u||_{L^2(0, t; L^2(0, ell))}
};

SignalNorms signal_norms(const InputSignal& sig, double t);

/// Piecewise-constant input with `switches` jumps at distinct multiples of
/// `grid` inside (0, t_end); each segment is a random combination of the
/// first three modes with L^2 norm drawn uniformly from [0, max_norm].
InputSignal random_piecewise(std::uint64_t seed, int switches, double t_end, double grid,
                             double max_norm, double ell);

}  // namespace railbeam
