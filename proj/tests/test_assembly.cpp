#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "oracle.hpp"
#include "sdfem/assembly.hpp"
#include "sdfem/error.hpp"
#include "sdfem/green.hpp"
#include "sdfem/norms.hpp"

using namespace sdfem;

namespace {

AssembledSystem build(const oracle::Problem& p) {
  auto mesh = std::make_shared<const ShishkinMesh>(
      MeshParams{p.N, p.eps, p.rho, p.mesh_beta1 > 0 ? p.mesh_beta1 : p.b1,
                 p.mesh_beta2 > 0 ? p.mesh_beta2 : p.b2});
  ProblemData prob;
  prob.epsilon = p.eps;
  prob.b1 = p.b1;
  prob.b2 = p.b2;
  prob.c = p.c;
  prob.f = [f = p.f](Point x) { return f({x.x, x.y}); };
  return assemble(mesh, prob,
                  StabilizationConfig{p.c_star, p.acd ? CrosswindMode::ACD : CrosswindMode::Standard});
}

double max_abs_diff(const SparseMatrix& A, const Eigen::MatrixXd& B) {
  return (Eigen::MatrixXd(A) - B).cwiseAbs().maxCoeff();
}

Vector random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST(Assembly, MatchesDenseOracle) {
  for (bool acd : {false, true})
    for (double eps : {1e-2, 1e-4})
      for (auto [b1, b2] : {std::pair{1.0, 0.5}, std::pair{1.0, 1.0}, std::pair{0.3, 1.2}}) {
        oracle::Problem p;
        p.N = 4;
        p.eps = eps;
        p.b1 = b1;
        p.b2 = b2;
        p.c = 1.5;
        p.acd = acd;
        const auto ref = oracle::assemble(p);
        const auto sys = build(p);
        const double scale = ref.A.cwiseAbs().maxCoeff();
        EXPECT_LE(max_abs_diff(sys.A, ref.A), 1e-13 * scale) << "acd=" << acd << " eps=" << eps;
        EXPECT_LE((sys.F - ref.F).cwiseAbs().maxCoeff(), 1e-14);
      }
}

TEST(Assembly, MatchesDenseOracleAtN8WithVariableSource) {
  oracle::Problem p;
  p.N = 8;
  p.eps = 1e-3;
  p.acd = true;
  p.f = [](oracle::P x) { return 1.0 + x.x * x.y; };
  const auto ref = oracle::assemble(p);
  const auto sys = build(p);
  EXPECT_LE(max_abs_diff(sys.A, ref.A), 1e-13 * ref.A.cwiseAbs().maxCoeff());
  EXPECT_LE((sys.F - ref.F).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, GalerkinLimit) {
  // delta = 0 and eps_hat = eps: the plain Galerkin matrix.
  oracle::Problem p;
  p.N = 4;
  p.eps = 1e-2;
  p.c_star = 0.0;
  const auto ref = oracle::assemble(p);
  const auto sys = build(p);
  EXPECT_LE(max_abs_diff(sys.A, ref.A), 1e-13 * ref.A.cwiseAbs().maxCoeff());
  EXPECT_EQ(ref.A.rows(), 9);
}

TEST(Assembly, SparsityIsSevenPointStencil) {
  const int N = 8;
  oracle::Problem p;
  p.N = N;
  p.eps = 1e-4;
  const auto sys = build(p);
  const auto& mesh = *sys.mesh;
  for (int col = 0; col < sys.A.outerSize(); ++col) {
    std::set<int> got;
    for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) got.insert(static_cast<int>(it.row()));
    const auto ij = mesh.dof_indices(col);
    std::set<int> expect;
    for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}) {
      const int d = mesh.dof(ij[0] + di, ij[1] + dj);
      if (d >= 0) expect.insert(d);
    }
    EXPECT_EQ(got, expect) << "column " << col;
  }
}

TEST(Assembly, ConstantFunctionsGiveReactionTimesArea) {
  // u = v = 1 without boundary conditions: only the reaction term survives.
  oracle::Problem p;
  p.N = 8;
  p.c = 1.7;
  const auto sys = build(p);
  const auto& mesh = *sys.mesh;
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles().size()); ++t) {
    const auto k = form_coefficients(mesh, sys.problem, sys.stab, t);
    total += k(1.0, 0.0, 0.0, 1.0, 0.0, 0.0) * mesh.area(t);
  }
  EXPECT_NEAR(total, 1.7, 1e-13);
}

TEST(Assembly, SymmetricPartIsPositiveDefinite) {
  // With c = 0 the convection block is skew on the zero-trace space, so the
  // symmetric part is the diffusion plus streamline-diffusion block.
  oracle::Problem p;
  p.N = 8;
  p.eps = 1e-4;
  p.b1 = 1.0;
  p.b2 = 0.0;
  p.mesh_beta2 = 1.0;
  p.c = 0.0;
  const auto sys = build(p);
  const Eigen::MatrixXd A(sys.A);
  const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  EXPECT_EQ(llt.info(), Eigen::Success);

  const auto ref = oracle::assemble(p);
  EXPECT_LE((S - 0.5 * (ref.A + ref.A.transpose())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Assembly, EnergyIdentity) {
  // a(v, v) = ||v||^2_MSD + sum_K delta_K c (v, b v_beta)_K for zero-trace v.
  for (bool acd : {false, true}) {
    oracle::Problem p;
    p.N = 16;
    p.eps = 1e-5;
    p.acd = acd;
    const auto sys = build(p);
    const FEFunction v(sys.mesh, random_vector(sys.A.rows(), 5));
    const double a = bilinear_form(sys, v, v);
    EXPECT_NEAR(a, v.dofs().dot(sys.A * v.dofs()), 1e-12 * std::abs(a));
    double cross = 0.0;
    const auto& mesh = *sys.mesh;
    for (int t = 0; t < static_cast<int>(mesh.triangles().size()); ++t) {
      const auto k = form_coefficients(mesh, sys.problem, sys.stab, t);
      const auto g = TriangleGeometry::of(mesh, t, sys.frame);
      const auto u = v.triangle_values(t);
      const double vb = u[0] * g.grad_beta[0] + u[1] * g.grad_beta[1] + u[2] * g.grad_beta[2];
      cross += k.delta * k.c * k.b * vb * g.area * (u[0] + u[1] + u[2]) / 3.0;
    }
    const double msd = msd_norm(v, sys).squared();
    EXPECT_NEAR(a, msd + cross, 1e-10 * std::abs(a));
  }
}

TEST(Assembly, GradientSplitsIntoFrameComponents) {
  oracle::Problem p;
  p.N = 8;
  const auto sys = build(p);
  const FEFunction v(sys.mesh, random_vector(sys.A.rows(), 9));
  for (int t = 0; t < static_cast<int>(sys.mesh->triangles().size()); ++t) {
    const Point gr = v.gradient(t);
    const double vb = v.directional_grad(t, sys.frame.beta);
    const double ve = v.directional_grad(t, sys.frame.eta);
    EXPECT_NEAR(gr.x * gr.x + gr.y * gr.y, vb * vb + ve * ve,
                1e-13 * std::max(1.0, gr.x * gr.x + gr.y * gr.y));
  }
}

TEST(FEFunction, InterpolationAndEvaluation) {
  auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{8, 1e-2, 2.5, 1, 1});
  const auto v = interpolate(mesh, [](Point x) { return 2 * x.x + 3 * x.y; });
  for (int j = 1; j < 8; ++j)
    for (int i = 1; i < 8; ++i)
      EXPECT_EQ(v.nodal(i, j), 2 * mesh->xs()[i] + 3 * mesh->ys()[j]);
  EXPECT_EQ(v.nodal(0, 3), 0.0);
  // Away from the boundary strip the plane is reproduced exactly.
  for (int t = 0; t < static_cast<int>(mesh->triangles().size()); ++t) {
    const auto& tri = mesh->triangles()[t];
    if (tri.cell_i == 0 || tri.cell_j == 0 || tri.cell_i == 7 || tri.cell_j == 7) continue;
    EXPECT_NEAR(v.directional_grad(t, {1.0, 0.0}), 2.0, 1e-9);
    EXPECT_NEAR(v.gradient(t).y, 3.0, 1e-9);
  }
  EXPECT_NEAR(v.evaluate({0.3, 0.4}), 2 * 0.3 + 3 * 0.4, 1e-14);
}

TEST(Forward, ZeroSourceGivesZero) {
  oracle::Problem p;
  p.N = 8;
  p.f = [](oracle::P) { return 0.0; };
  const auto sys = build(p);
  const auto fwd = solve_forward(sys);
  EXPECT_EQ(fwd.u.dofs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, ManufacturedSolutionConverges) {
  // w = x(1-x)y(1-y) with f = -eps Lap w + b.grad w + c w at moderate eps.
  const double eps = 0.1, b1 = 1.0, b2 = 0.5, c = 1.0;
  auto w = [](Point x) { return x.x * (1 - x.x) * x.y * (1 - x.y); };
  auto f = [&](Point x) {
    const double X = x.x, Y = x.y;
    const double wx = (1 - 2 * X) * Y * (1 - Y), wy = X * (1 - X) * (1 - 2 * Y);
    const double lap = -2 * Y * (1 - Y) - 2 * X * (1 - X);
    return -eps * lap + b1 * wx + b2 * wy + c * X * (1 - X) * Y * (1 - Y);
  };
  double prev = 0.0;
  for (int N : {8, 16, 32, 64}) {
    auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{N, eps, 2.5, b1, b2});
    ProblemData prob{eps, b1, b2, c, f};
    const auto sys = assemble(mesh, prob, StabilizationConfig{});
    const auto u = solve_forward(sys).u;
    const FEFunction err(sys.mesh, u.dofs() - interpolate(sys.mesh, w).dofs());
    const double e = msd_norm(err, sys).norm();
    if (N > 8) {
      EXPECT_LT(e, 0.6 * prev) << "N=" << N;
    }
    prev = e;
  }
}

TEST(Assembly, RejectsBadCoefficients) {
  auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{8, 1e-3, 2.5, 1, 1});
  ProblemData prob;
  prob.epsilon = 1e-3;
  prob.c = -1.0;
  EXPECT_THROW(assemble(mesh, prob, StabilizationConfig{}), InvalidArgument);
  prob.c = 1.0;
  prob.epsilon = 0.0;
  EXPECT_THROW(assemble(mesh, prob, StabilizationConfig{}), InvalidArgument);
}

TEST(Assembly, CooOutput) {
  oracle::Problem p;
  p.N = 4;
  const auto sys = build(p);
  std::ostringstream os;
  write_coo(os, sys.A);
  std::istringstream is(os.str());
  int rows = 0, cols = 0, nnz = 0;
  is >> rows >> cols >> nnz;
  EXPECT_EQ(rows, 9);
  EXPECT_EQ(cols, 9);
  EXPECT_EQ(nnz, sys.A.nonZeros());
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(9, 9);
  int r = 0, c = 0;
  double v = 0;
  while (is >> r >> c >> v) back(r, c) = v;
  EXPECT_EQ((back - Eigen::MatrixXd(sys.A)).cwiseAbs().maxCoeff(), 0.0);
}
