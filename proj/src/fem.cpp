#include "railbeam/fem.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <string>

#include "railbeam/errors.hpp"

namespace railbeam {

Mesh build_mesh(double ell, int n_el) {
  if (n_el < 2) throw TooFewElements(n_el);
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ConfigError("mesh length must be positive");
  Mesh mesh;
  mesh.ell = ell;
  mesh.n_el = n_el;
  mesh.h = ell / n_el;
  mesh.nodes.resize(n_el + 1);
  for (int i = 0; i <= n_el; ++i) mesh.nodes[i] = ell * i / n_el;
  mesh.nodes.back() = ell;
  return mesh;
}

namespace {

template <int N>
GaussRule mapped_gauss() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& wt = Rule::weights();
  GaussRule rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.points.push_back(0.5);
      rule.weights.push_back(0.5 * wt[i]);
      continue;
    }
    rule.points.push_back(0.5 * (1.0 - x[i]));
    rule.weights.push_back(0.5 * wt[i]);
    rule.points.push_back(0.5 * (1.0 + x[i]));
    rule.weights.push_back(0.5 * wt[i]);
  }
  return rule;
}

// Cubic Hermite basis on s in [0, 1] for an element of length h.
std::array<double, 4> shape(double s, double h) {
  const double s2 = s * s, s3 = s2 * s;
  return {1.0 - 3.0 * s2 + 2.0 * s3, h * (s - 2.0 * s2 + s3), 3.0 * s2 - 2.0 * s3, h * (s3 - s2)};
}

std::array<double, 4> shape_slope(double s, double h) {
  const double s2 = s * s;
  return {(6.0 * s2 - 6.0 * s) / h, 1.0 - 4.0 * s + 3.0 * s2, (6.0 * s - 6.0 * s2) / h,
          3.0 * s2 - 2.0 * s};
}

}  // namespace

GaussRule gauss_rule(int n) {
  switch (n) {
    case 2: return mapped_gauss<2>();
    case 3: return mapped_gauss<3>();
    case 4: return mapped_gauss<4>();
    case 5: return mapped_gauss<5>();
    case 6: return mapped_gauss<6>();
    case 7: return mapped_gauss<7>();
    case 8: return mapped_gauss<8>();
    case 10: return mapped_gauss<10>();
    default: throw std::invalid_argument("unsupported Gauss rule size " + std::to_string(n));
  }
}

FemOperators::FemOperators(Mesh mesh) : mesh_(std::move(mesh)), rule_(gauss_rule(7)) {
  const double h = mesh_.h;
  const double h2 = h * h;
  // Closed-form element matrices of the cubic Hermite element.
  const double ke[4][4] = {{12.0, 6.0 * h, -12.0, 6.0 * h},
                           {6.0 * h, 4.0 * h2, -6.0 * h, 2.0 * h2},
                           {-12.0, -6.0 * h, 12.0, -6.0 * h},
                           {6.0 * h, 2.0 * h2, -6.0 * h, 4.0 * h2}};
  const double me[4][4] = {{156.0, 22.0 * h, 54.0, -13.0 * h},
                           {22.0 * h, 4.0 * h2, 13.0 * h, -3.0 * h2},
                           {54.0, 13.0 * h, 156.0, -22.0 * h},
                           {-13.0 * h, -3.0 * h2, -22.0 * h, 4.0 * h2}};
  const double kscale = 1.0 / (h2 * h);
  const double mscale = h / 420.0;

  std::vector<Eigen::Triplet<double>> kt, mt;
  for (int e = 0; e < mesh_.n_el; ++e) {
    const auto dofs = element_dofs(e);
    for (int a = 0; a < 4; ++a) {
      if (dofs[a] < 0) continue;
      for (int b = 0; b < 4; ++b) {
        if (dofs[b] < 0) continue;
        kt.emplace_back(dofs[a], dofs[b], kscale * ke[a][b]);
        mt.emplace_back(dofs[a], dofs[b], mscale * me[a][b]);
      }
    }
  }
  const int n = dofs();
  bending_.resize(n, n);
  bending_.setFromTriplets(kt.begin(), kt.end());
  mass_.resize(n, n);
  mass_.setFromTriplets(mt.begin(), mt.end());

  for (double s : rule_.points) ref_values_.push_back(shape(s, 1.0));
}

std::array<int, 4> FemOperators::element_dofs(int e) const {
  // Global layout (value, slope) per node; the value at node 0 and node n_el
  // is pinned, shifting every later index down by one.
  auto reduced = [this](int node, int comp) {
    if (comp == 0 && (node == 0 || node == mesh_.n_el)) return -1;
    const int global = 2 * node + comp;
    return global < 2 * mesh_.n_el ? global - 1 : global - 2;
  };
  return {reduced(e, 0), reduced(e, 1), reduced(e + 1, 0), reduced(e + 1, 1)};
}

namespace {

int locate(const Mesh& mesh, double xi, double& s) {
  int e = static_cast<int>(std::floor(xi / mesh.h));
  if (e < 0) e = 0;
  if (e >= mesh.n_el) e = mesh.n_el - 1;
  s = (xi - mesh.nodes[e]) / mesh.h;
  if (xi >= mesh.nodes.back()) s = 1.0;  // keep the far end exactly on the node
  return e;
}

double gather(const std::array<int, 4>& dofs, const std::array<double, 4>& basis, const Vector& c) {
  double value = 0.0;
  for (int a = 0; a < 4; ++a)
    if (dofs[a] >= 0) value += basis[a] * c[dofs[a]];
  return value;
}

}  // namespace

double FemOperators::evaluate(const Vector& dofs, double xi) const {
  double s = 0.0;
  const int e = locate(mesh_, xi, s);
  return gather(element_dofs(e), shape(s, mesh_.h), dofs);
}

double FemOperators::evaluate_slope(const Vector& dofs, double xi) const {
  double s = 0.0;
  const int e = locate(mesh_, xi, s);
  return gather(element_dofs(e), shape_slope(s, mesh_.h), dofs);
}

FemOperators assemble_operators(const Mesh& mesh) { return FemOperators(mesh); }

Vector interpolate(const ScalarFunction& f, const ScalarFunction& df, const FemOperators& ops) {
  const Mesh& mesh = ops.mesh();
  Vector c = Vector::Zero(ops.dofs());
  for (int e = 0; e < mesh.n_el; ++e) {
    const auto dofs = ops.element_dofs(e);
    const double left = mesh.nodes[e], right = mesh.nodes[e + 1];
    if (dofs[0] >= 0) c[dofs[0]] = f(left);
    c[dofs[1]] = df(left);
    if (dofs[2] >= 0) c[dofs[2]] = f(right);
    c[dofs[3]] = df(right);
  }
  return c;
}

StateVec project_initial(const ScalarFunction& w0, const ScalarFunction& dw0,
                         const ScalarFunction& v0, const ScalarFunction& dv0,
                         const FemOperators& ops) {
  constexpr double tol = 1e-12;
  const double ell = ops.mesh().ell;
  if (std::abs(w0(0.0)) > tol || std::abs(w0(ell)) > tol)
    throw BoundaryMismatch("initial displacement must vanish at both ends");
  if (std::abs(v0(0.0)) > tol || std::abs(v0(ell)) > tol)
    throw BoundaryMismatch("initial velocity must vanish at both ends");
  return {interpolate(w0, dw0, ops), interpolate(v0, dv0, ops)};
}

namespace {

// Calls visit(e, dofs, jacobian_weight, basis, w_value) at every quadrature
// point of every element.
template <typename Visit>
void for_each_point(const Vector& w, const FemOperators& ops, Visit&& visit) {
  const Mesh& mesh = ops.mesh();
  const GaussRule& rule = ops.quadrature();
  const double h = mesh.h;
  for (int e = 0; e < mesh.n_el; ++e) {
    const auto dofs = ops.element_dofs(e);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      auto basis = ops.reference_values()[q];
      basis[1] *= h;
      basis[3] *= h;
      visit(dofs, rule.weights[q] * h, basis, gather(dofs, basis, w));
    }
  }
}

}  // namespace

Vector nonlinear_force(const Vector& w, double alpha, const FemOperators& ops) {
  Vector out = Vector::Zero(ops.dofs());
  for_each_point(w, ops, [&](const auto& dofs, double jw, const auto& basis, double wq) {
    const double f = alpha * wq * wq * wq * jw;
    for (int a = 0; a < 4; ++a)
      if (dofs[a] >= 0) out[dofs[a]] += f * basis[a];
  });
  return out;
}

SparseMatrix nonlinear_jacobian(const Vector& w, double alpha, const FemOperators& ops) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(16 * 7 * ops.mesh().n_el);
  for_each_point(w, ops, [&](const auto& dofs, double jw, const auto& basis, double wq) {
    const double f = 3.0 * alpha * wq * wq * jw;
    for (int a = 0; a < 4; ++a) {
      if (dofs[a] < 0) continue;
      for (int b = 0; b < 4; ++b)
        if (dofs[b] >= 0) trip.emplace_back(dofs[a], dofs[b], f * basis[a] * basis[b]);
    }
  });
  SparseMatrix jac(ops.dofs(), ops.dofs());
  jac.setFromTriplets(trip.begin(), trip.end());
  return jac;
}

Vector load_vector(const ScalarFunction& u, const FemOperators& ops) {
  const Mesh& mesh = ops.mesh();
  const GaussRule& rule = ops.quadrature();
  Vector out = Vector::Zero(ops.dofs());
  for (int e = 0; e < mesh.n_el; ++e) {
    const auto dofs = ops.element_dofs(e);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      auto basis = ops.reference_values()[q];
      basis[1] *= mesh.h;
      basis[3] *= mesh.h;
      const double f = u(mesh.nodes[e] + rule.points[q] * mesh.h) * rule.weights[q] * mesh.h;
      for (int a = 0; a < 4; ++a)
        if (dofs[a] >= 0) out[dofs[a]] += f * basis[a];
    }
  }
  return out;
}

double quartic_integral(const Vector& w, const FemOperators& ops) {
  double total = 0.0;
  for_each_point(w, ops, [&](const auto&, double jw, const auto&, double wq) {
    const double w2 = wq * wq;
    total += w2 * w2 * jw;
  });
  return total;
}

double bilinear(const SparseMatrix& a, const Vector& x, const Vector& y) { return x.dot(a * y); }

double energy_norm_sq(const StateVec& x, const BeamParams& p, const FemOperators& ops) {
  return p.EI() * bilinear(ops.bending(), x.w, x.w) + p.k() * bilinear(ops.mass(), x.w, x.w) +
         p.rho_a() * bilinear(ops.mass(), x.v, x.v);
}

double l2_distance_sq(const Vector& w, const ScalarFunction& f, const FemOperators& ops) {
  const Mesh& mesh = ops.mesh();
  const GaussRule& rule = ops.quadrature();
  double total = 0.0;
  for (int e = 0; e < mesh.n_el; ++e) {
    const auto dofs = ops.element_dofs(e);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      auto basis = ops.reference_values()[q];
      basis[1] *= mesh.h;
      basis[3] *= mesh.h;
      const double xi = mesh.nodes[e] + rule.points[q] * mesh.h;
      const double d = gather(dofs, basis, w) - f(xi);
      total += d * d * rule.weights[q] * mesh.h;
    }
  }
  return total;
}

}  // namespace railbeam
