#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracle.hpp"
#include "sdfem/error.hpp"
#include "sdfem/mesh.hpp"

using namespace sdfem;

TEST(Transitions, CoarseEpsilonValues) {
  const auto t = compute_transitions({4, 0.01, 2.5, 1.0, 1.0});
  const double lambda = 2.5 * 0.01 * std::log(4.0);
  EXPECT_NEAR(t.lambda_x, 0.0346574, 5e-8);
  EXPECT_DOUBLE_EQ(t.lambda_x, lambda);
  EXPECT_DOUBLE_EQ(t.lambda_y, lambda);
  EXPECT_NEAR(t.Hx, 0.4826713, 5e-8);
  EXPECT_NEAR(t.hx, 0.0173287, 5e-8);
  EXPECT_FALSE(t.degenerate);
}

TEST(Transitions, SaturatesAtOneHalf) {
  const auto t = compute_transitions({4, 0.2, 2.5, 1.0, 1.0});
  EXPECT_EQ(t.lambda_x, 0.5);
  EXPECT_EQ(t.lambda_y, 0.5);
  EXPECT_TRUE(t.degenerate);
  EXPECT_TRUE(t.epsilon_assumption_violated == (0.2 > 0.25));
}

TEST(Transitions, SmallEpsilon) {
  const auto t = compute_transitions({16, 1e-6, 2.5, 1.0, 1.0});
  EXPECT_NEAR(t.lambda_x / 6.9315e-6, 1.0, 1e-4);
  EXPECT_NEAR(t.hx / 8.6643e-7, 1.0, 1e-4);
}

TEST(Transitions, Validation) {
  EXPECT_THROW(compute_transitions({5, 0.01, 2.5, 1, 1}), InvalidArgument);
  EXPECT_THROW(compute_transitions({2, 0.01, 2.5, 1, 1}), InvalidArgument);
  EXPECT_THROW(compute_transitions({8, 0.0, 2.5, 1, 1}), InvalidArgument);
  EXPECT_THROW(compute_transitions({8, 0.01, -1, 1, 1}), InvalidArgument);
  EXPECT_THROW(compute_transitions({8, 0.01, 2.5, 0, 1}), InvalidArgument);
  try {
    compute_transitions({5, 0.01, 2.5, 1, 1});
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("N must be even"), std::string::npos);
  }
  EXPECT_TRUE(compute_transitions({8, 0.01, 3.0, 1, 1}).nonstandard_rho);
}

TEST(Mesh, CoordinatesN4) {
  const ShishkinMesh mesh({4, 0.01, 2.5, 1, 1});
  // Quoted to 7 digits; the middle value is 0.96534264... so 1e-7 is the honest tolerance.
  const std::vector<double> expect{0.0, 0.4826713, 0.9653427, 0.9826713, 1.0};
  ASSERT_EQ(mesh.xs().size(), 5u);
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(mesh.xs()[i], expect[i], 1e-7);
  EXPECT_DOUBLE_EQ(mesh.xs()[2], 1.0 - 2.5 * 0.01 * std::log(4.0));
  EXPECT_EQ(mesh.triangles().size(), 32u);
  EXPECT_EQ(mesh.num_interior(), 9u);
}

TEST(Mesh, CoordinatesMatchFormula) {
  for (int N : {4, 8, 16, 64})
    for (double eps : {1e-2, 1e-4, 1e-8})
      for (double beta2 : {1.0, 0.5}) {
        const ShishkinMesh mesh({N, eps, 2.5, 1.0, beta2});
        const auto xs = oracle::shishkin(N, eps, 2.5, 1.0);
        const auto ys = oracle::shishkin(N, eps, 2.5, beta2);
        for (int i = 0; i <= N; ++i) {
          EXPECT_NEAR(mesh.xs()[i], xs[i], 1e-15);
          EXPECT_NEAR(mesh.ys()[i], ys[i], 1e-15);
        }
        EXPECT_EQ(mesh.xs()[N / 2], 1.0 - mesh.transitions().lambda_x);
        EXPECT_EQ(mesh.x_transition(), 1.0 - mesh.transitions().lambda_x);
        EXPECT_EQ(mesh.xs().front(), 0.0);
        EXPECT_EQ(mesh.xs().back(), 1.0);
      }
}

TEST(Mesh, Tiling) {
  for (int N : {4, 8, 16, 32, 128})
    for (double eps : {1e-2, 1e-4, 1e-8}) {
      const ShishkinMesh mesh({N, eps, 2.5, 1, 0.5});
      double total = 0.0;
      for (std::size_t t = 0; t < mesh.triangles().size(); ++t) {
        EXPECT_GT(mesh.area(static_cast<int>(t)), 0.0);
        total += mesh.area(static_cast<int>(t));
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Mesh, TriangleVerticesFollowDiagonalConvention) {
  const int N = 8;
  const ShishkinMesh mesh({N, 1e-3, 2.5, 1, 1});
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const auto& k1 = mesh.triangles()[2 * (j * N + i)];
      const auto& k2 = mesh.triangles()[2 * (j * N + i) + 1];
      EXPECT_EQ(k1.orientation, Orientation::K1);
      EXPECT_EQ(k2.orientation, Orientation::K2);
      EXPECT_EQ(k1.vertices, (std::array<int, 3>{mesh.node_id(i, j), mesh.node_id(i + 1, j),
                                                 mesh.node_id(i, j + 1)}));
      EXPECT_EQ(k2.vertices, (std::array<int, 3>{mesh.node_id(i, j + 1), mesh.node_id(i + 1, j),
                                                 mesh.node_id(i + 1, j + 1)}));
    }
}

TEST(Mesh, InteriorNodesHaveSixTriangles) {
  for (int N : {4, 8, 16}) {
    const ShishkinMesh mesh({N, 1e-4, 2.5, 1, 1});
    std::map<int, int> count;
    for (const auto& t : mesh.triangles())
      for (int v : t.vertices) ++count[v];
    for (int j = 0; j <= N; ++j)
      for (int i = 0; i <= N; ++i) {
        const int c = count[mesh.node_id(i, j)];
        int expected = -1;
        if (i > 0 && j > 0 && i < N && j < N) expected = 6;
        // Corners (0,0) and (N,N) touch one triangle, the other two corners two.
        if ((i == 0 && j == 0) || (i == N && j == N)) expected = 1;
        if ((i == N && j == 0) || (i == 0 && j == N)) expected = 2;
        if (expected > 0) {
          EXPECT_EQ(c, expected) << i << "," << j;
        }
      }
  }
}

TEST(Mesh, FineToCoarseRatioBound) {
  for (int N : {4, 8, 16, 32, 64, 128})
    for (double eps : {1.0 / N, 1e-3, 1e-5, 1e-8}) {
      if (eps > 1.0 / N) continue;
      const auto t = compute_transitions({N, eps, 2.5, 1, 1});
      EXPECT_LE(t.hx / t.Hx, 2.5 * eps * std::log(double(N)) / (1.0 - t.lambda_x) * (1 + 1e-14));
    }
}

TEST(Mesh, RegionQueries) {
  const ShishkinMesh mesh({8, 0.01, 2.5, 1, 1});
  EXPECT_EQ(mesh.region_of({0.99, 0.5}), Region::X);
  EXPECT_EQ(mesh.region_of({0.0, 0.0}), Region::S);
  EXPECT_EQ(mesh.region_of({1.0, 1.0}), Region::XY);
  EXPECT_EQ(mesh.region_of({0.5, 0.99}), Region::Y);
  const double lx = mesh.transitions().lambda_x;
  EXPECT_EQ(mesh.region_of({1.0 - lx, 0.3}), Region::X);
  EXPECT_EQ(mesh.node_region(4, 2), Region::X);
  EXPECT_EQ(mesh.node_region(3, 3), Region::S);
  EXPECT_EQ(mesh.node_region(4, 4), Region::XY);
}

TEST(Mesh, TriangleLocation) {
  const ShishkinMesh mesh({16, 1e-4, 2.5, 1, 0.5});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    // Half the samples go into the thin layers.
    Point p{u(rng), u(rng)};
    if (n % 2) p.x = 1.0 - 1e-3 * u(rng);
    const int tri = mesh.triangle_at(p);
    ASSERT_GE(tri, 0);
    const auto v = mesh.vertices(tri);
    const double det = (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
    const double l1 = ((p.x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (p.y - v[0].y)) / det;
    const double l2 = ((v[1].x - v[0].x) * (p.y - v[0].y) - (p.x - v[0].x) * (v[1].y - v[0].y)) / det;
    EXPECT_GE(l1, -1e-12);
    EXPECT_GE(l2, -1e-12);
    EXPECT_LE(l1 + l2, 1.0 + 1e-12);
    EXPECT_EQ(mesh.triangles()[tri].region, mesh.region_of(p));
  }
}

TEST(Mesh, DofMapping) {
  const int N = 8;
  const ShishkinMesh mesh({N, 1e-4, 2.5, 1, 1});
  EXPECT_EQ(mesh.dof(0, 3), -1);
  EXPECT_EQ(mesh.dof(N, 3), -1);
  EXPECT_EQ(mesh.dof(1, 1), 0);
  EXPECT_EQ(mesh.dof(N - 1, N - 1), (N - 1) * (N - 1) - 1);
  for (int d = 0; d < (N - 1) * (N - 1); ++d) {
    const auto ij = mesh.dof_indices(d);
    EXPECT_EQ(mesh.dof(ij[0], ij[1]), d);
    EXPECT_EQ(mesh.dof_of_node(mesh.node_id(ij[0], ij[1])), d);
  }
}

TEST(Mesh, SummaryJson) {
  const ShishkinMesh mesh({4, 0.01, 2.5, 1, 1});
  const auto j = mesh_summary(mesh);
  EXPECT_NEAR(j.at("lambda_x").get<double>(), 0.0346574, 5e-8);
  EXPECT_EQ(j.at("num_triangles").get<int>(), 32);
  EXPECT_EQ(j.at("num_interior_nodes").get<int>(), 9);
  EXPECT_FALSE(j.at("degenerate").get<bool>());
}
