#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sdfem/error.hpp"
#include "sdfem/experiments.hpp"

using namespace sdfem;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.Ns = {8, 16};
  cfg.epsilons = {1e-6};
  cfg.modes = {CrosswindMode::Standard};
  return cfg;
}

}  // namespace

TEST(Placement, NamesRoundTrip) {
  for (auto p : kAllPlacements) EXPECT_EQ(parse_placement(to_string(p)), p);
  EXPECT_THROW(parse_placement("corner"), InvalidArgument);
}

TEST(Placement, NodesLandInRequestedRegion) {
  for (int N : {8, 16, 32, 64, 128})
    for (double eps : {1e-4, 1e-8}) {
      const ShishkinMesh mesh({N, eps, 2.5, 1.0, 0.5});
      const auto c = place_x_star(mesh, Placement::CenterS);
      EXPECT_EQ(mesh.node_region(c.i, c.j), Region::S);
      EXPECT_EQ(c.i, N / 4);
      EXPECT_EQ(c.j, N / 4);
      const auto mx = place_x_star(mesh, Placement::MidX);
      EXPECT_EQ(mesh.node_region(mx.i, mx.j), Region::X);
      EXPECT_EQ(mx.i, 3 * N / 4);
      const auto my = place_x_star(mesh, Placement::MidY);
      EXPECT_EQ(mesh.node_region(my.i, my.j), Region::Y);
      EXPECT_EQ(my.j, 3 * N / 4);
      const auto nt = place_x_star(mesh, Placement::NearTransition);
      EXPECT_EQ(mesh.node_region(nt.i, nt.j), Region::S);
      EXPECT_EQ(nt.i, N / 2 - 1);
    }
}

TEST(Slope, KnownPowerLaws) {
  const std::vector<double> x{8, 16, 32, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::sqrt(v));
  EXPECT_NEAR(loglog_slope(x, y), 0.5, 1e-12);
  EXPECT_NEAR(loglog_slope(x, {2, 2, 2, 2}), 0.0, 1e-14);
  EXPECT_THROW(loglog_slope({1, 2}, {1, 2}), InvalidArgument);
  EXPECT_THROW(loglog_slope({1, 2, 3}, {1, 2}), InvalidArgument);
}

TEST(Sweep, SmallRunIsOrderedAndDeterministic) {
  const auto cfg = small_config();
  const auto a = run_sweep(cfg);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_TRUE(a[r].ok()) << a[r].error;
    EXPECT_EQ(a[r].N, r < 4 ? 8 : 16);
    EXPECT_EQ(a[r].placement, kAllPlacements[r % 4]);
    EXPECT_GT(a[r].norm_w, 0.0);
    EXPECT_LE(a[r].r_thm, 1.0);
    EXPECT_LE(a[r].solver_residual, kSolverResidualTol);
    EXPECT_LE(a[r].energy_residual, kEnergyResidualTol);
  }
  const auto b = run_sweep(cfg);
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(a[r].norm_w, b[r].norm_w);
    EXPECT_EQ(a[r].e_not_s, b[r].e_not_s);
  }
}

TEST(Sweep, LargeEpsilonIsRecordedPerRow) {
  SweepConfig cfg = small_config();
  cfg.Ns = {8};
  cfg.epsilons = {0.2, 1e-6};
  cfg.placements = {Placement::CenterS};
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].ok());
  EXPECT_NE(rows[0].error.find("1/N"), std::string::npos) << rows[0].error;
  EXPECT_TRUE(rows[1].ok());
}

TEST(Sweep, FitScalingUsesMatchingRows) {
  SweepConfig cfg = small_config();
  cfg.Ns = {8, 16, 32};
  cfg.placements = {Placement::CenterS};
  const auto rows = run_sweep(cfg);
  const double s = fit_scaling(rows, Placement::CenterS, 1e-6, CrosswindMode::Standard);
  std::vector<double> n, w;
  for (const auto& r : rows) {
    n.push_back(r.N);
    w.push_back(r.norm_w);
  }
  EXPECT_DOUBLE_EQ(s, loglog_slope(n, w));
  EXPECT_THROW(fit_scaling(rows, Placement::MidX, 1e-6, CrosswindMode::Standard), InvalidArgument);
}

TEST(Sweep, AnalyzeGreenNodeHandling) {
  const SweepConfig cfg;
  EXPECT_THROW(analyze_green(cfg, 16, 1e-6, CrosswindMode::Standard, {16, 16}), InvalidArgument);
  EXPECT_THROW(analyze_green(cfg, 16, 1e-6, CrosswindMode::Standard, {0, 4}), InvalidArgument);
  const auto corner = analyze_green(cfg, 16, 1e-6, CrosswindMode::Standard, {12, 12});
  EXPECT_EQ(corner.row.region, Region::XY);
  EXPECT_FALSE(corner.row.in_bound_scope());
  EXPECT_LE(corner.row.energy_residual, kEnergyResidualTol);
  const auto g = analyze_green(cfg, 16, 1e-6, CrosswindMode::Standard, {4, 4});
  EXPECT_EQ(g.row.region, Region::S);
  EXPECT_NEAR(g.green.nodal(4, 4), g.row.base.analysis.lemma.g_at_star, 0.0);
}

TEST(Checks, SmallSweepProducesEveryCheck) {
  const auto cfg = small_config();
  const auto rows = run_sweep(cfg);
  const auto checks = evaluate_checks(rows, cfg);
  std::vector<std::string> ids;
  for (const auto& c : checks) ids.push_back(c.id);
  for (const char* id : {"rows", "policy", "identities", "theorem", "lemma1", "lemma4"})
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  for (const auto& c : checks)
    if (c.id == "rows" || c.id == "identities" || c.id == "theorem") {
      EXPECT_TRUE(c.passed) << c.id << ": " << (c.failures.empty() ? "" : c.failures.front());
    }
}

TEST(Checks, CornerRowsAreSkipped) {
  const SweepConfig cfg;
  auto corner = analyze_green(cfg, 16, 1e-6, CrosswindMode::Standard, {12, 12}).row;
  corner.r_thm = 2.0;  // would fail the inequality if it were checked
  corner.base.lemma1_ratio = 0.0;
  for (const auto& c : evaluate_checks({corner}, cfg))
    if (c.id == "theorem" || c.id == "lemma1" || c.id == "lemma4") {
      EXPECT_TRUE(c.passed) << c.id;
    }
}

TEST(Checks, DefaultGridHas120Cases) {
  const SweepConfig cfg;
  EXPECT_EQ(cfg.Ns.size() * cfg.epsilons.size() * cfg.modes.size() * cfg.placements.size(), 120u);
}
