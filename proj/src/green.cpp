#include "sdfem/green.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sdfem/error.hpp"

namespace sdfem {

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

constexpr int kMaxRefinement = 6;

}  // namespace

SparseLuSolver::SparseLuSolver(const SparseMatrix& A, double tolerance)
    : A_(A), At_(A.transpose()), tolerance_(tolerance) {
  if (A.rows() != A.cols()) throw InvalidArgument("matrix must be square");
  A_.makeCompressed();
  At_.makeCompressed();
  lu_.analyzePattern(A_);
  lu_.factorize(A_);
  if (lu_.info() != Eigen::Success)
    throw SolverError("sparse LU factorization failed: " + lu_.lastErrorMessage(),
                      std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity());
}

Vector SparseLuSolver::raw_solve(const Vector& rhs, bool transpose) const {
  if (transpose) return lu_.transpose().solve(rhs);
  return lu_.solve(rhs);
}

SparseLuSolver::Result SparseLuSolver::solve(const Vector& rhs, bool transpose) const {
  if (rhs.size() != A_.rows()) throw InvalidArgument("right-hand side has the wrong size");
  const SparseMatrix& op = transpose ? At_ : A_;
  const double scale = inf_norm(rhs);
  Result r{Vector::Zero(rhs.size()), 0.0, 0};
  if (scale == 0.0) return r;

  r.x = raw_solve(rhs, transpose);
  Vector res = rhs - op * r.x;
  r.residual = inf_norm(res) / scale;
  while (r.residual > tolerance_ && r.refinement_steps < kMaxRefinement) {
    r.x += raw_solve(res, transpose);
    res = rhs - op * r.x;
    r.residual = inf_norm(res) / scale;
    ++r.refinement_steps;
  }
  if (!std::isfinite(r.residual) || r.residual > tolerance_) {
    const double cond = condition_estimate();
    std::ostringstream msg;
    msg << "linear solve did not reach relative residual " << tolerance_ << " (achieved "
        << r.residual << ", condition estimate " << cond << ")";
    throw SolverError(msg.str(), r.residual, cond);
  }
  return r;
}

double SparseLuSolver::condition_estimate() const {
  const Eigen::Index n = A_.rows();
  if (n == 0) return 0.0;
  double norm_A = 0.0;
  for (int col = 0; col < A_.outerSize(); ++col) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(A_, col); it; ++it) s += std::abs(it.value());
    norm_A = std::max(norm_A, s);
  }
  // Hager's method for ||A^{-1}||_1.
  Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector y = raw_solve(x, false);
    est = y.lpNorm<1>();
    const Vector xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Vector z = raw_solve(xi, true);
    Eigen::Index jmax;
    const double zmax = z.cwiseAbs().maxCoeff(&jmax);
    if (!std::isfinite(zmax) || zmax <= z.dot(x)) break;
    x.setZero();
    x[jmax] = 1.0;
  }
  return norm_A * est;
}

Vector linear_solve(const SparseMatrix& A, const Vector& rhs, bool transpose) {
  return SparseLuSolver(A).solve(rhs, transpose).x;
}

ForwardSolution solve_forward(const AssembledSystem& sys, const SparseLuSolver& lu) {
  auto r = lu.solve(sys.F, false);
  return {FEFunction(sys.mesh, std::move(r.x)), r.residual};
}

ForwardSolution solve_forward(const AssembledSystem& sys) {
  return solve_forward(sys, SparseLuSolver(sys.A));
}

GreenFunction solve_green(const AssembledSystem& sys, const SparseLuSolver& lu, int i, int j) {
  const int d = sys.mesh->dof(i, j);
  if (d < 0) {
    std::ostringstream msg;
    msg << "x* = (" << i << ", " << j << ") is not an interior mesh node";
    throw InvalidArgument(msg.str());
  }
  Vector e = Vector::Zero(lu.size());
  e[d] = 1.0;
  auto r = lu.solve(e, true);
  return {FEFunction(sys.mesh, std::move(r.x)), i, j, sys.mesh->node(i, j), r.residual};
}

GreenFunction solve_green(const AssembledSystem& sys, int i, int j) {
  return solve_green(sys, SparseLuSolver(sys.A), i, j);
}

}  // namespace sdfem
