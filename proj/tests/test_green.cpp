#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "sdfem/error.hpp"
#include "sdfem/green.hpp"

using namespace sdfem;

namespace {

AssembledSystem make_system(int N, double eps, CrosswindMode mode, double b2 = 0.5) {
  auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{N, eps, 2.5, 1.0, b2});
  ProblemData prob;
  prob.epsilon = eps;
  prob.b2 = b2;
  return assemble(mesh, prob, StabilizationConfig{0.5, mode});
}

oracle::Problem oracle_problem(int N, double eps, CrosswindMode mode, double b2 = 0.5) {
  oracle::Problem p;
  p.N = N;
  p.eps = eps;
  p.b2 = b2;
  p.acd = mode == CrosswindMode::ACD;
  return p;
}

}  // namespace

TEST(Solver, IdentityReturnsRhs) {
  SparseMatrix I(6, 6);
  I.setIdentity();
  const Vector b = Vector::LinSpaced(6, -1.0, 4.0);
  const auto r = SparseLuSolver(I).solve(b);
  EXPECT_EQ((r.x - b).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Solver, RandomShiftedSystemMatchesDense) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 50;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || u(rng) > 0.8) D(i, j) = u(rng);
  D = D * D.transpose() + 5.0 * Eigen::MatrixXd::Identity(n, n);
  D(0, n - 1) += 0.7;  // break symmetry
  const SparseMatrix A = D.sparseView();
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = u(rng);
  const SparseLuSolver lu(A);
  const Vector ref = D.fullPivLu().solve(b);
  const Vector reft = D.transpose().fullPivLu().solve(b);
  EXPECT_LE((lu.solve(b).x - ref).cwiseAbs().maxCoeff(), 1e-11 * ref.cwiseAbs().maxCoeff());
  EXPECT_LE((lu.solve(b, true).x - reft).cwiseAbs().maxCoeff(), 1e-11 * reft.cwiseAbs().maxCoeff());
  EXPECT_LE((linear_solve(A, b) - ref).cwiseAbs().maxCoeff(), 1e-11 * ref.cwiseAbs().maxCoeff());
  EXPECT_GT(lu.condition_estimate(), 1.0);
}

TEST(Solver, SingularMatrixThrows) {
  SparseMatrix A(3, 3);
  A.insert(0, 0) = 1.0;
  A.insert(1, 1) = 1.0;
  A.makeCompressed();
  EXPECT_THROW(SparseLuSolver{A}, SolverError);
  EXPECT_THROW(SparseLuSolver{SparseMatrix(2, 3)}, InvalidArgument);
}

TEST(Solver, TransposeFlagMatchesExplicitTranspose) {
  const auto sys = make_system(4, 1e-2, CrosswindMode::Standard);
  const SparseMatrix At = sys.A.transpose();
  const SparseLuSolver lu(sys.A), lut(At);
  for (int k = 0; k < sys.A.rows(); ++k) {
    const Vector e = Vector::Unit(sys.A.rows(), k);
    EXPECT_LE((lu.solve(e, true).x - lut.solve(e).x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Forward, MatchesDenseOracle) {
  for (auto mode : {CrosswindMode::Standard, CrosswindMode::ACD}) {
    const auto sys = make_system(4, 1e-2, mode);
    const auto ref = oracle::assemble(oracle_problem(4, 1e-2, mode));
    const Vector u_ref = ref.A.fullPivLu().solve(ref.F);
    const auto fwd = solve_forward(sys);
    EXPECT_LE((fwd.u.dofs() - u_ref).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(fwd.residual, 1e-10);
  }
}

TEST(Green, AllNineMatchDenseOracle) {
  for (auto mode : {CrosswindMode::Standard, CrosswindMode::ACD})
    for (double eps : {1e-2, 1e-4}) {
      const auto sys = make_system(4, eps, mode);
      const auto ref = oracle::assemble(oracle_problem(4, eps, mode));
      const Eigen::MatrixXd inv_t = ref.A.transpose().fullPivLu().inverse();
      for (int j = 1; j <= 3; ++j)
        for (int i = 1; i <= 3; ++i) {
          const auto G = solve_green(sys, i, j);
          const int col = (j - 1) * 3 + (i - 1);
          EXPECT_LE((G.fe.dofs() - inv_t.col(col)).cwiseAbs().maxCoeff(),
                    1e-12 * std::max(1.0, inv_t.col(col).cwiseAbs().maxCoeff()))
              << "node " << i << "," << j;
          EXPECT_LE(G.residual, 1e-10);
          EXPECT_EQ(G.x_star.x, sys.mesh->xs()[i]);
        }
    }
}

TEST(Green, DefiningPropertyAndIdentities) {
  for (auto mode : {CrosswindMode::Standard, CrosswindMode::ACD})
    for (int N : {8, 32}) {
      const auto sys = make_system(N, 1e-6, mode);
      const SparseLuSolver lu(sys.A);
      const auto u = solve_forward(sys, lu).u;
      for (auto [i, j] : {std::pair{N / 4, N / 4}, {N - 2, N / 4}, {N / 4, N - 1}}) {
        const auto G = solve_green(sys, lu, i, j);
        // a(phi_m, G) = phi_m(x*) for every interior hat.
        const Vector lhs = sys.A.transpose() * G.fe.dofs();
        const int star = sys.mesh->dof(i, j);
        for (Eigen::Index m = 0; m < lhs.size(); ++m)
          EXPECT_NEAR(lhs[m], m == star ? 1.0 : 0.0, 1e-10 * G.fe.dofs().cwiseAbs().maxCoeff());
        const double g_star = G.fe.nodal(i, j);
        EXPECT_LE(std::abs(bilinear_form(sys, G.fe, G.fe) - g_star) / std::abs(g_star), 1e-9);
        const double dual = load_functional(sys, G.fe, sys.load_quad_level);
        EXPECT_LE(std::abs(u.nodal(i, j) - dual) / std::abs(u.nodal(i, j)), 1e-8);
      }
    }
}

TEST(Green, Reciprocity) {
  const int N = 16;
  const auto sys = make_system(N, 1e-4, CrosswindMode::ACD);
  const SparseLuSolver lu(sys.A);
  const std::pair<int, int> p{3, 5}, q{12, 9};
  const auto Gp = solve_green(sys, lu, p.first, p.second);
  // G_p(q) = (A^{-T})_{q,p} = (A^{-1})_{p,q}.
  const Vector col = lu.solve(Vector::Unit(sys.A.rows(), sys.mesh->dof(q.first, q.second))).x;
  EXPECT_NEAR(Gp.fe.nodal(q.first, q.second), col[sys.mesh->dof(p.first, p.second)],
              1e-12 * col.cwiseAbs().maxCoeff());
}

TEST(Green, FactorizationReuse) {
  const auto sys = make_system(16, 1e-6, CrosswindMode::Standard);
  const SparseLuSolver lu(sys.A);
  for (auto [i, j] : {std::pair{2, 3}, {8, 8}, {15, 1}}) {
    const auto a = solve_green(sys, lu, i, j);
    const auto b = solve_green(sys, i, j);
    EXPECT_LE((a.fe.dofs() - b.fe.dofs()).cwiseAbs().maxCoeff(),
              1e-12 * b.fe.dofs().cwiseAbs().maxCoeff());
  }
}

TEST(Green, RejectsBoundaryNodes) {
  const auto sys = make_system(16, 1e-6, CrosswindMode::Standard);
  EXPECT_THROW(solve_green(sys, 16, 16), InvalidArgument);
  EXPECT_THROW(solve_green(sys, 0, 5), InvalidArgument);
  EXPECT_THROW(solve_green(sys, 5, -1), InvalidArgument);
}
