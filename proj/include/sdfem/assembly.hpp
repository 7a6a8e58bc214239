#pragma once

#include <array>
#include <iosfwd>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sdfem/mesh.hpp"
#include "sdfem/problem.hpp"
#include "sdfem/weight.hpp"

namespace sdfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vector = Eigen::VectorXd;

/// Affine data of one mesh triangle: area and the constant gradients of the
/// three barycentric (hat) functions, also split into streamline components.
struct TriangleGeometry {
  std::array<Point, 3> p;
  double area;
  std::array<Point, 3> grad;
  std::array<double, 3> grad_beta;
  std::array<double, 3> grad_eta;

  static TriangleGeometry of(const ShishkinMesh& mesh, int tri,
                             const StreamlineFrame& frame = StreamlineFrame{});
};

/// A member of the P1 space with zero boundary values, stored by interior dof.
class FEFunction {
public:
  FEFunction(std::shared_ptr<const ShishkinMesh> mesh, Vector dofs);

  const ShishkinMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const ShishkinMesh> mesh_ptr() const { return mesh_; }
  const Vector& dofs() const { return dofs_; }

  /// Value at node (i, j); zero on the boundary.
  double nodal(int i, int j) const;
  double nodal(int node) const;
  std::array<double, 3> triangle_values(int tri) const;

  double evaluate(Point x) const;
  Point gradient(int tri) const;
  double directional_grad(int tri, Point dir) const;

private:
  std::shared_ptr<const ShishkinMesh> mesh_;
  Vector dofs_;
};

/// Interpolates a function given on the closed square into the P1 space
/// (boundary values are dropped).
template <class F>
FEFunction interpolate(std::shared_ptr<const ShishkinMesh> mesh, F&& f) {
  Vector d(static_cast<Eigen::Index>(mesh->num_interior()));
  const int N = mesh->N();
  for (int j = 1; j < N; ++j)
    for (int i = 1; i < N; ++i) d[mesh->dof(i, j)] = f(mesh->node(i, j));
  return FEFunction(std::move(mesh), std::move(d));
}

/// Pointwise integrand of the modified streamline-diffusion form
///   eps u_b v_b + eps_hat u_e v_e + (b u_b + c u) v + delta (b u_b + c u) b v_b
/// for (u, u_beta, u_eta) against (v, v_beta, v_eta) on one triangle.
struct FormCoefficients {
  double epsilon;
  double eps_hat;
  double b;
  double c;
  double delta;

  double operator()(double u, double ub, double ue, double v, double vb, double ve) const {
    const double streamline = b * ub + c * u;
    return epsilon * ub * vb + eps_hat * ue * ve + streamline * v + delta * streamline * b * vb;
  }
};

FormCoefficients form_coefficients(const ShishkinMesh& mesh, const ProblemData& prob,
                                   const StabilizationConfig& stab, int tri);

/// Stiffness matrix A(i, j) = a(phi_j, phi_i) and load F(i) = (f, phi_i + delta b (phi_i)_beta).
struct AssembledSystem {
  std::shared_ptr<const ShishkinMesh> mesh;
  ProblemData problem;
  StabilizationConfig stab;
  StreamlineFrame frame;
  SparseMatrix A;
  Vector F;
  int load_quad_level;
};

/// Default quadrature level of the load functional.
inline constexpr int kLoadQuadLevel = 2;

AssembledSystem assemble(std::shared_ptr<const ShishkinMesh> mesh, const ProblemData& prob,
                         const StabilizationConfig& stab, int load_quad_level = kLoadQuadLevel);

/// a(u, v) for two P1 functions, evaluated element by element.
double bilinear_form(const AssembledSystem& sys, const FEFunction& u, const FEFunction& v);

/// (f, v + delta b v_beta) by quadrature.
double load_functional(const AssembledSystem& sys, const FEFunction& v, int quad_level);

/// Writes the matrix as "row col value" lines (0-based), preceded by a
/// "rows cols nnz" header.
void write_coo(std::ostream& os, const SparseMatrix& A);

}  // namespace sdfem
