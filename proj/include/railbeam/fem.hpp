#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <vector>

#include "railbeam/beam_model.hpp"

namespace railbeam {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarFunction = std::function<double(double)>;

/// Uniform partition of [0, ell].
struct Mesh {
  double ell = 0.0;
  int n_el = 0;
  double h = 0.0;
  std::vector<double> nodes;
};

/// Throws TooFewElements for n_el < 2 and ConfigError for ell <= 0.
Mesh build_mesh(double ell, int n_el);

/// Gauss-Legendre rule mapped to the unit interval.
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point rule on [0, 1]; exact for polynomials of degree 2n - 1.
GaussRule gauss_rule(int n);

/// Displacement and velocity coefficients of the cubic Hermite space.
///
/// Each node carries (value, slope); the values at xi = 0 and xi = ell are
/// removed, so both vectors have 2 n_el entries ordered node by node.
struct StateVec {
  Vector w;
  Vector v;
};

/// Unit-coefficient mass and bending matrices of the pinned Hermite space,
/// plus the element-to-dof map shared by every other routine here.
class FemOperators {
 public:
  explicit FemOperators(Mesh mesh);

  const Mesh& mesh() const noexcept { return mesh_; }
  int dofs() const noexcept { return 2 * mesh_.n_el; }
  /// Integral of phi_i phi_j.
  const SparseMatrix& mass() const noexcept { return mass_; }
  /// Integral of phi_i'' phi_j''.
  const SparseMatrix& bending() const noexcept { return bending_; }
  /// Seven-point rule used for every nonlinear integrand (degree <= 13).
  const GaussRule& quadrature() const noexcept { return rule_; }

  /// Reduced indices of [w_e, w'_e, w_{e+1}, w'_{e+1}]; -1 marks a pinned value.
  std::array<int, 4> element_dofs(int e) const;

  /// Value of the Hermite interpolant with coefficients `dofs` at xi.
  double evaluate(const Vector& dofs, double xi) const;
  /// First derivative of the interpolant at xi.
  double evaluate_slope(const Vector& dofs, double xi) const;

  /// Shape function values at the quadrature points of one element (unit h);
  /// slope functions must be multiplied by h.
  const std::vector<std::array<double, 4>>& reference_values() const noexcept { return ref_values_; }

 private:
  Mesh mesh_;
  SparseMatrix mass_;
  SparseMatrix bending_;
  GaussRule rule_;
  std::vector<std::array<double, 4>> ref_values_;
};

FemOperators assemble_operators(const Mesh& mesh);

/// Hermite interpolant of (w0, v0) using nodal values and slopes.
/// Throws BoundaryMismatch when |w0| or |v0| exceeds 1e-12 at an end.
StateVec project_initial(const ScalarFunction& w0, const ScalarFunction& dw0,
                         const ScalarFunction& v0, const ScalarFunction& dv0,
                         const FemOperators& ops);

/// Hermite interpolant of a single function (no boundary check).
Vector interpolate(const ScalarFunction& f, const ScalarFunction& df, const FemOperators& ops);

/// Galerkin vector  integral alpha w^3 phi_i.
Vector nonlinear_force(const Vector& w, double alpha, const FemOperators& ops);

/// Derivative of nonlinear_force:  integral 3 alpha w^2 phi_i phi_j.
SparseMatrix nonlinear_jacobian(const Vector& w, double alpha, const FemOperators& ops);

/// Entries  integral u phi_i.
Vector load_vector(const ScalarFunction& u, const FemOperators& ops);

/// Integral of w^4 over (0, ell).
double quartic_integral(const Vector& w, const FemOperators& ops);

/// Squared state norm  integral EI w''^2 + k w^2 + rho_a v^2.
double energy_norm_sq(const StateVec& x, const BeamParams& p, const FemOperators& ops);

/// Integral of (w_h - f)^2 over (0, ell).
double l2_distance_sq(const Vector& w, const ScalarFunction& f, const FemOperators& ops);

/// x^T A y for the symmetric sparse operators above.
double bilinear(const SparseMatrix& a, const Vector& x, const Vector& y);

}  // namespace railbeam
