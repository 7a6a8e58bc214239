#pragma once

#include <memory>

#include <Eigen/SparseLU>

#include "sdfem/assembly.hpp"

namespace sdfem {

/// Sparse LU factorization of a square nonsymmetric matrix, reusable for
/// many right-hand sides in either orientation. Every solve is followed by
/// iterative refinement until the relative infinity-norm residual is at
/// most `tolerance`; failure throws SolverError.
class SparseLuSolver {
public:
  explicit SparseLuSolver(const SparseMatrix& A, double tolerance = 1e-10);

  struct Result {
    Vector x;
    double residual;  // ||b - op(A) x||_inf / ||b||_inf
    int refinement_steps;
  };

  Result solve(const Vector& rhs, bool transpose = false) const;

  /// Hager/Higham estimate of the 1-norm condition number.
  double condition_estimate() const;

  Eigen::Index size() const { return A_.rows(); }

private:
  Vector raw_solve(const Vector& rhs, bool transpose) const;

  SparseMatrix A_;
  SparseMatrix At_;
  // transpose() is non-const in Eigen although it only builds a view.
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  double tolerance_;
};

/// One-shot convenience wrapper around SparseLuSolver.
Vector linear_solve(const SparseMatrix& A, const Vector& rhs, bool transpose = false);

struct ForwardSolution {
  FEFunction u;
  double residual;
};

ForwardSolution solve_forward(const AssembledSystem& sys);
ForwardSolution solve_forward(const AssembledSystem& sys, const SparseLuSolver& lu);

/// Discrete Green function for the interior node (i, j):
/// a(phi_m, G) = phi_m(x*) for every interior hat function, i.e. A^T g = e_{i*}.
struct GreenFunction {
  FEFunction fe;
  int i;
  int j;
  Point x_star;
  double residual;
};

GreenFunction solve_green(const AssembledSystem& sys, int i, int j);
GreenFunction solve_green(const AssembledSystem& sys, const SparseLuSolver& lu, int i, int j);

}  // namespace sdfem
