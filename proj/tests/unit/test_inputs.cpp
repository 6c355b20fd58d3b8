#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "railbeam/errors.hpp"
#include "railbeam/fem.hpp"
#include "railbeam/inputs.hpp"

using namespace railbeam;

namespace {

const double kPi = std::acos(-1.0);

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace

TEST(EvalProfile, ZeroSignal) {
  const auto f = eval_profile(InputSignal::zero(kPi), 3.0);
  for (double x : {0.0, 1.0, 2.5}) EXPECT_EQ(f(x), 0.0);
}

TEST(EvalProfile, ExpDecayAtOrigin) {
  const auto sig = InputSignal::exp_decay(Profile::mode(1, 1.0, kPi), 1.0, 0.3, kPi);
  const auto f = eval_profile(sig, 0.0);
  for (double x : {0.2, 1.0, 2.9}) EXPECT_DOUBLE_EQ(f(x), std::sin(x));
}

TEST(EvalProfile, MovingLoadPeak) {
  const auto sig = InputSignal::moving_gaussian(1.0, 1.0, 0.2, 0.0, kPi);
  const auto f = eval_profile(sig, 1.0);
  EXPECT_DOUBLE_EQ(f(1.0), 1.0);
  EXPECT_LT(f(0.9), 1.0);
  EXPECT_LT(f(1.1), 1.0);
}

TEST(SignalNorms, ZeroPiecewiseAndDecay) {
  const auto z = signal_norms(InputSignal::zero(kPi), 5.0);
  EXPECT_EQ(z.sup, 0.0);
  EXPECT_EQ(z.l2, 0.0);

  // sin on (0, pi) has norm^2 pi/2; rescale to unit norm.
  const Profile unit = Profile::mode(1, std::sqrt(2.0 / kPi), kPi);
  const auto pc = signal_norms(InputSignal::piecewise({0.0}, {unit}, kPi), 4.0);
  EXPECT_NEAR(pc.sup, 1.0, 1e-14);
  EXPECT_NEAR(pc.l2, 2.0, 1e-14);

  const auto ed = signal_norms(InputSignal::exp_decay(unit, 1.0, 0.5, kPi), 80.0);
  EXPECT_NEAR(ed.sup, 1.0, 1e-14);
  EXPECT_NEAR(ed.l2, 1.0, 1e-14);
}

TEST(InputClassTag, MatchesKind) {
  const Profile p = Profile::mode(1, 1.0, 1.0);
  EXPECT_EQ(InputSignal::zero(1.0).input_class(), InputClass::C1);
  EXPECT_EQ(InputSignal::separable(p, Envelope{}, 1.0).input_class(), InputClass::C1);
  EXPECT_EQ(InputSignal::exp_decay(p, 1.0, 1.0, 1.0).input_class(), InputClass::C1);
  EXPECT_EQ(InputSignal::moving_gaussian(1.0, 1.0, 0.1, 0.0, 1.0).input_class(), InputClass::C1);
  EXPECT_EQ(InputSignal::piecewise({0.0}, {p}, 1.0).input_class(), InputClass::PC);
}

TEST(InputSignal, RejectsInvalidDescriptors) {
  const Profile p = Profile::mode(1, 1.0, 1.0);
  EXPECT_THROW(InputSignal::exp_decay(p, -1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(InputSignal::exp_decay(p, 1.0, 0.0, 1.0), ConfigError);
  EXPECT_THROW(InputSignal::piecewise({0.0, 0.0}, {p, p}, 1.0), ConfigError);
  EXPECT_THROW(InputSignal::piecewise({0.5, 0.2}, {p, p}, 1.0), ConfigError);
  EXPECT_THROW(InputSignal::moving_gaussian(1.0, 1.0, 0.0, 0.0, 1.0), ConfigError);
}

TEST(InputSignal, ExpDecayNormLaw) {
  const Profile prof = Profile::gaussian(1.0, 0.3, 2.0) + Profile::mode(2, 0.5, kPi);
  const auto sig = InputSignal::exp_decay(prof, 1.7, 0.4, kPi);
  const double base = quad([&](double x) { return prof.value(x) * prof.value(x); }, 0.0, kPi);
  for (double t : {0.0, 0.5, 3.0}) {
    const double expect = 1.7 * std::exp(-0.4 * t) * std::sqrt(base);
    EXPECT_NEAR(std::sqrt(sig.norm_sq(t)), expect, 1e-12 * expect);
  }
}

TEST(InputSignal, PolynomialNormAgainstLoadSpaceQuadrature) {
  // integral of u^2 through the Galerkin load vector of u tested against the
  // interpolant of u (exact for cubic u on the Hermite space)
  const double ell = 2.0;
  const Profile cubic = Profile::polynomial({0.0, 1.0, -0.5, 0.0});  // x - x^2/2, zero at 0 and 2
  const FemOperators ops = assemble_operators(build_mesh(ell, 6));
  const Vector f = load_vector([&](double x) { return cubic.value(x); }, ops);
  const Vector i = interpolate([&](double x) { return cubic.value(x); }, [&](double x) { return cubic.slope(x); }, ops);
  const auto sig = InputSignal::separable(cubic, Envelope{Envelope::Constant{1.0}}, ell);
  // integral_0^2 x^2 - x^3 + x^4/4 = 8/3 - 4 + 8/5
  const double closed = 4.0 / 15.0;
  EXPECT_NEAR(sig.norm_sq(0.0), closed, 1e-12);
  EXPECT_NEAR(f.dot(i), closed, 1e-10);
}

TEST(InputSignal, EnvelopeIntegralsAndSup) {
  const std::vector<Envelope> envs = {Envelope{Envelope::Constant{-1.5}},
                                      Envelope{Envelope::Sine{0.7, 2.3, 0.4, 0.2}},
                                      Envelope{Envelope::SmoothRamp{2.0, 1.5}}};
  for (const Envelope& e : envs) {
    for (auto [a, b] : {std::pair{0.0, 0.7}, std::pair{0.3, 4.0}, std::pair{1.0, 1.2}}) {
      const double q = quad([&](double t) { return e.value(t) * e.value(t); }, a, b);
      EXPECT_NEAR(e.sq_integral(a, b), q, 1e-11 * (1 + q));
      double sampled = 0.0;
      for (int i = 0; i <= 20000; ++i) sampled = std::max(sampled, std::abs(e.value(a + (b - a) * i / 20000.0)));
      EXPECT_GE(e.sup_abs(a, b), sampled - 1e-12);
      EXPECT_LE(e.sup_abs(a, b), sampled + 1e-6);
    }
  }
}

TEST(InputSignal, PiecewiseSupAttainedAtSegmentStart) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sig = random_piecewise(seed, 10, 20.0, 0.1, 2.0, kPi);
    const auto& pc = std::get<InputSignal::Piecewise>(sig.kind());
    ASSERT_EQ(pc.starts.size(), 11u);
    double at_starts = 0.0;
    for (double s : pc.starts) at_starts = std::max(at_starts, sig.norm_sq(s));
    EXPECT_EQ(sig.sup_norm_sq(0.0, 20.0), at_starts);
    for (std::size_t k = 1; k < pc.starts.size(); ++k) {
      const double r = pc.starts[k] / 0.1;
      EXPECT_NEAR(r, std::round(r), 1e-9);
      EXPECT_LE(sig.norm_sq(pc.starts[k]), 4.0 + 1e-12);
    }
  }
}

TEST(InputSignal, PiecewiseOneSidedValues) {
  const Profile a = Profile::mode(1, 1.0, kPi), b = Profile::mode(1, 3.0, kPi);
  const auto sig = InputSignal::piecewise({0.0, 1.0}, {a, b}, kPi);
  EXPECT_DOUBLE_EQ(sig.value(kPi / 2, 1.0, InputSignal::Side::Right), 3.0);
  EXPECT_DOUBLE_EQ(sig.value(kPi / 2, 1.0, InputSignal::Side::Left), 1.0);
  EXPECT_EQ(sig.segment_index(0.5), 0);
  EXPECT_EQ(sig.segment_index(1.0, InputSignal::Side::Left), 0);
  EXPECT_EQ(sig.segment_index(1.0), 1);
  EXPECT_NEAR(sig.energy(0.0, 3.0), kPi / 2 * (1.0 + 9.0 * 2.0), 1e-12);
}

TEST(InputSignal, EnteringLoadIsSmoothAtStart) {
  const double ell = kPi, width = 0.2, speed = 3.0;
  const auto sig = InputSignal::entering_load(5.0, speed, width, ell);
  // the Gaussian tail inside the domain is negligible at t = 0
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(sig.value(ell * i / 100.0, 0.0)));
  EXPECT_LT(worst, 1e-12 * 5.0 * 1e2);
  EXPECT_LT(sig.norm_sq(0.0), 1e-24);
  // first time derivative from central differences against the analytic form
  const double t = 0.7, h = 1e-5, xi = 1.3;
  const double fd = (sig.value(xi, t + h) - sig.value(xi, t - h)) / (2 * h);
  const double z = (xi - speed * (t - 8 * width / speed)) / width;
  const double exact = 5.0 * std::exp(-0.5 * z * z) * z * speed / width;
  EXPECT_NEAR(fd, exact, 1e-5 * (1 + std::abs(exact)));
}

TEST(InputSignal, MovingLoadEnergyAndSup) {
  const auto sig = InputSignal::moving_gaussian(2.0, 1.5, 0.3, 0.4, kPi);
  const double q = quad([&](double t) { return sig.norm_sq(t); }, 0.0, 3.0);
  EXPECT_NEAR(sig.energy(0.0, 3.0), q, 1e-10 * q);
  double sampled = 0.0;
  for (int i = 0; i <= 3000; ++i) sampled = std::max(sampled, sig.norm_sq(3.0 * i / 3000.0));
  EXPECT_GE(sig.sup_norm_sq(0.0, 3.0), sampled - 1e-12);
  EXPECT_LE(sig.sup_norm_sq(0.0, 3.0), sampled * (1 + 1e-5));
}

TEST(Profile, SumNormMatchesQuadrature) {
  const Profile p = Profile::mode(1, 1.0, kPi) + Profile::gaussian(2.0, 0.25, -1.0) +
                    Profile::nodal(kPi, {0.0, 1.0, 0.0}, {1.0, 0.0, -1.0});
  const double q = quad([&](double x) { return p.value(x) * p.value(x); }, 0.0, kPi);
  EXPECT_NEAR(p.norm_sq(kPi), q, 1e-10 * q);
  EXPECT_NEAR(Profile::mode(3, 2.0, kPi).norm_sq(kPi), 4.0 * kPi / 2, 1e-13);
  EXPECT_TRUE(Profile().is_zero());
  EXPECT_NEAR(p.scaled(2.0).value(0.7), 2.0 * p.value(0.7), 1e-14);
}
