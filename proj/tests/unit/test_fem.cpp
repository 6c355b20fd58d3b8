#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <random>

#include "railbeam/errors.hpp"
#include "railbeam/fem.hpp"

using namespace railbeam;

namespace {

const double kPi = std::acos(-1.0);

BeamParams p0() { return validate_params({1.0, 1.0, kPi, 1.0, 1.0, 1.0, 0.0}); }

// Hermite cubics on [0, h] and their second derivatives, written out here
// rather than taken from the library.
std::array<double, 4> shape(double s, double h) {
  return {1 - 3 * s * s + 2 * s * s * s, h * (s - 2 * s * s + s * s * s), 3 * s * s - 2 * s * s * s,
          h * (-s * s + s * s * s)};
}
std::array<double, 4> shape_dd(double s, double h) {
  return {(-6 + 12 * s) / (h * h), (-4 + 6 * s) / h, (6 - 12 * s) / (h * h), (-2 + 6 * s) / h};
}

// Full-space assembly by 10-point Gauss, then removal of the two end values.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> oracle_matrices(double ell, int n_el) {
  using Q = boost::math::quadrature::gauss<double, 10>;
  const double h = ell / n_el;
  const int full = 2 * (n_el + 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(full, full), K = M;
  for (int e = 0; e < n_el; ++e)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const int ga = 2 * e + a, gb = 2 * e + b;
        M(ga, gb) += h * Q::integrate([&](double x) {
          const double s = 0.5 * (x + 1);
          return 0.5 * shape(s, h)[a] * shape(s, h)[b];
        }, -1.0, 1.0);
        K(ga, gb) += h * Q::integrate([&](double x) {
          const double s = 0.5 * (x + 1);
          return 0.5 * shape_dd(s, h)[a] * shape_dd(s, h)[b];
        }, -1.0, 1.0);
      }
  std::vector<int> keep;
  for (int g = 0; g < full; ++g)
    if (g != 0 && g != 2 * n_el) keep.push_back(g);
  Eigen::MatrixXd Mr(keep.size(), keep.size()), Kr(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) {
      Mr(i, j) = M(keep[i], keep[j]);
      Kr(i, j) = K(keep[i], keep[j]);
    }
  return {Mr, Kr};
}

Vector sin_interp(const FemOperators& ops) {
  return interpolate([](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }, ops);
}

Vector random_vector(const FemOperators& ops, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector w(ops.dofs());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = g(rng);
  return w;
}

// Integral of f(w_h(x)) z_h(x) by 20-point Gauss per element.
template <class F>
double element_sum(const FemOperators& ops, const Vector& w, F&& f) {
  using Q = boost::math::quadrature::gauss<double, 20>;
  const Mesh& m = ops.mesh();
  double total = 0.0;
  for (int e = 0; e < m.n_el; ++e) {
    const double a = m.nodes[e], b = m.nodes[e + 1];
    total += Q::integrate([&](double x) { return f(ops.evaluate(w, x), x); }, a, b);
  }
  return total;
}

}  // namespace

TEST(BuildMesh, UniformSubdivision) {
  const Mesh m = build_mesh(kPi, 2);
  ASSERT_EQ(m.nodes.size(), 3u);
  EXPECT_EQ(m.nodes[0], 0.0);
  EXPECT_DOUBLE_EQ(m.nodes[1], kPi / 2);
  EXPECT_EQ(m.nodes[2], kPi);
  EXPECT_DOUBLE_EQ(m.h, kPi / 2);
  EXPECT_DOUBLE_EQ(build_mesh(1.0, 4).h, 0.25);
}

TEST(BuildMesh, RejectsSingleElement) {
  EXPECT_THROW(build_mesh(1.0, 1), TooFewElements);
  EXPECT_THROW(build_mesh(0.0, 4), ConfigError);
}

TEST(Operators, ElementEntries) {
  // Two elements of length h: the interior value dof (reduced index 1) sums
  // two element (value, value) entries; the first slope dof sees one element.
  const double h = 0.7;
  const FemOperators ops = assemble_operators(build_mesh(2 * h, 2));
  EXPECT_NEAR(ops.bending().coeff(1, 1) / 2, 12 / (h * h * h), 1e-12);
  EXPECT_NEAR(ops.mass().coeff(1, 1) / 2, 156 * h / 420, 1e-14);
  EXPECT_NEAR(ops.bending().coeff(0, 0), 4 / h, 1e-12);
  EXPECT_NEAR(ops.mass().coeff(0, 0), 4 * h * h * h / 420, 1e-14);
}

TEST(Operators, MatchQuadratureAssembly) {
  for (int n_el : {2, 3, 7}) {
    const FemOperators ops = assemble_operators(build_mesh(1.3, n_el));
    const auto [M, K] = oracle_matrices(1.3, n_el);
    EXPECT_LT((Eigen::MatrixXd(ops.mass()) - M).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((Eigen::MatrixXd(ops.bending()) - K).cwiseAbs().maxCoeff(), 1e-9 * K.cwiseAbs().maxCoeff());
  }
}

TEST(Operators, Symmetric) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 9));
  const SparseMatrix dk = ops.bending() - SparseMatrix(ops.bending().transpose());
  const SparseMatrix dm = ops.mass() - SparseMatrix(ops.mass().transpose());
  EXPECT_EQ(dk.norm(), 0.0);
  EXPECT_EQ(dm.norm(), 0.0);
}

TEST(ProjectInitial, SineNodalData) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 8));
  const StateVec x = project_initial([](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
                                     [](double) { return 0.0; }, [](double) { return 0.0; }, ops);
  const auto& nodes = ops.mesh().nodes;
  EXPECT_DOUBLE_EQ(x.w[0], 1.0);
  for (int i = 1; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(x.w[2 * i - 1], std::sin(nodes[i]));
    EXPECT_DOUBLE_EQ(x.w[2 * i], std::cos(nodes[i]));
  }
  EXPECT_DOUBLE_EQ(x.w[15], -1.0);
  EXPECT_EQ(x.v.norm(), 0.0);
}

TEST(ProjectInitial, ZeroAndBoundaryMismatch) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 4));
  const auto zero = [](double) { return 0.0; };
  const StateVec x = project_initial(zero, zero, zero, zero, ops);
  EXPECT_EQ(x.w.norm() + x.v.norm(), 0.0);
  EXPECT_THROW(project_initial([](double x) { return x; }, [](double) { return 1.0; }, zero, zero, ops),
               BoundaryMismatch);
}

TEST(NonlinearForce, ZeroLinearityAndSineQuartic) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 32));
  EXPECT_EQ(nonlinear_force(Vector::Zero(ops.dofs()), 1.0, ops).norm(), 0.0);
  const Vector w = sin_interp(ops);
  const Vector n1 = nonlinear_force(w, 1.3, ops);
  const Vector n2 = nonlinear_force(w, 2.6, ops);
  EXPECT_LT((n2 - 2 * n1).norm(), 1e-14 * n2.norm());
  EXPECT_NEAR(nonlinear_force(w, 1.0, ops).dot(w), 3 * kPi / 8, 1e-3);
}

TEST(NonlinearForce, ExactForPiecewiseCubics) {
  std::mt19937_64 rng(1);
  const FemOperators ops = assemble_operators(build_mesh(1.0, 3));
  const Vector w = random_vector(ops, rng);
  for (int j = 0; j < ops.dofs(); ++j) {
    Vector z = Vector::Zero(ops.dofs());
    z[j] = 1.0;
    const double exact = element_sum(ops, w, [&](double wx, double x) { return wx * wx * wx * ops.evaluate(z, x); });
    EXPECT_NEAR(nonlinear_force(w, 1.0, ops)[j], exact, 1e-13 * (1 + std::abs(exact)));
  }
  const double q = element_sum(ops, w, [](double wx, double) { return wx * wx * wx * wx; });
  EXPECT_NEAR(quartic_integral(w, ops), q, 1e-13 * q);
}

TEST(NonlinearJacobian, MatchesFiniteDifference) {
  std::mt19937_64 rng(2);
  const FemOperators ops = assemble_operators(build_mesh(2.0, 5));
  const Vector w = random_vector(ops, rng);
  const Vector d = random_vector(ops, rng);
  const double eps = 1e-6;
  const Vector fd = (nonlinear_force(w + eps * d, 0.7, ops) - nonlinear_force(w - eps * d, 0.7, ops)) / (2 * eps);
  const Vector jd = nonlinear_jacobian(w, 0.7, ops) * d;
  EXPECT_LT((fd - jd).norm(), 1e-7 * jd.norm());
}

TEST(LoadVector, ZeroAdditivityAndSine) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 32));
  EXPECT_EQ(load_vector([](double) { return 0.0; }, ops).norm(), 0.0);
  const auto u1 = [](double x) { return std::exp(-x); };
  const auto u2 = [](double x) { return x * x - 1.0; };
  const Vector sum = load_vector([&](double x) { return u1(x) + u2(x); }, ops);
  EXPECT_LT((sum - load_vector(u1, ops) - load_vector(u2, ops)).norm(), 1e-13 * sum.norm());
  const Vector f = load_vector([](double x) { return std::sin(x); }, ops);
  EXPECT_NEAR(f.dot(sin_interp(ops)), kPi / 2, 1e-6);
}

TEST(EnergyNorm, SineValues) {
  const BeamParams p = p0();
  const FemOperators ops = assemble_operators(build_mesh(kPi, 32));
  const Vector s = sin_interp(ops);
  EXPECT_EQ(energy_norm_sq({Vector::Zero(ops.dofs()), Vector::Zero(ops.dofs())}, p, ops), 0.0);
  EXPECT_NEAR(energy_norm_sq({s, Vector::Zero(ops.dofs())}, p, ops), kPi, 1e-3);
  EXPECT_NEAR(energy_norm_sq({s, s}, p, ops), 1.5 * kPi, 1e-3);
}

TEST(EnergyNorm, PositiveOnRandomStates) {
  std::mt19937_64 rng(4);
  const BeamParams p = p0();
  const FemOperators ops = assemble_operators(build_mesh(kPi, 12));
  for (int i = 0; i < 200; ++i) {
    const StateVec x{random_vector(ops, rng), random_vector(ops, rng)};
    EXPECT_GT(energy_norm_sq(x, p, ops), 0.0);
  }
}

TEST(QuarticIntegral, ZeroHomogeneityAndSine) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 32));
  const Vector s = sin_interp(ops);
  EXPECT_EQ(quartic_integral(Vector::Zero(ops.dofs()), ops), 0.0);
  EXPECT_NEAR(quartic_integral(2 * s, ops), 16 * quartic_integral(s, ops), 1e-13);
  EXPECT_NEAR(quartic_integral(s, ops), 3 * kPi / 8, 1e-3);
}

TEST(Conformity, EndValuesVanishExactly) {
  std::mt19937_64 rng(6);
  const FemOperators ops = assemble_operators(build_mesh(2.5, 6));
  for (int i = 0; i < 50; ++i) {
    const Vector w = random_vector(ops, rng);
    EXPECT_EQ(ops.evaluate(w, 0.0), 0.0);
    EXPECT_EQ(ops.evaluate(w, 2.5), 0.0);
  }
}

TEST(Interpolation, SlopeAndValueConsistency) {
  const FemOperators ops = assemble_operators(build_mesh(kPi, 16));
  const Vector s = sin_interp(ops);
  for (double x : {0.1, 0.9, 1.7, 3.0}) {
    EXPECT_NEAR(ops.evaluate(s, x), std::sin(x), 1e-5);
    EXPECT_NEAR(ops.evaluate_slope(s, x), std::cos(x), 1e-4);
  }
  EXPECT_NEAR(l2_distance_sq(s, [](double x) { return std::sin(x); }, ops), 0.0, 1e-10);
}
