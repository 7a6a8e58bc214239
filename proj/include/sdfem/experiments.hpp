#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdfem/green.hpp"
#include "sdfem/norms.hpp"

namespace sdfem {

/// Where the Green function pole is placed.
///   center-s:        centre of the coarse region
///   mid-x, mid-y:    middle of the layer region at x = 1 (resp. y = 1)
///   near-transition: the node just left of x = 1 - lambda_x, nearest y = 1/2
enum class Placement { CenterS, MidX, MidY, NearTransition };

inline constexpr std::array<Placement, 4> kAllPlacements = {
    Placement::CenterS, Placement::MidX, Placement::MidY, Placement::NearTransition};

std::string to_string(Placement p);
Placement parse_placement(const std::string& s);

struct NodeIndex {
  int i;
  int j;
};

/// Snaps the placement target to the nearest interior node of the requested
/// region. Nodes on a transition line count as fine-side nodes.
NodeIndex place_x_star(const ShishkinMesh& mesh, Placement p);

struct SweepConfig {
  std::vector<int> Ns{8, 16, 32, 64, 128};
  std::vector<double> epsilons{1e-4, 1e-6, 1e-8};
  std::vector<CrosswindMode> modes{CrosswindMode::Standard, CrosswindMode::ACD};
  std::vector<Placement> placements{kAllPlacements.begin(), kAllPlacements.end()};
  double k = 2.0;
  // Upper end of the k ladder (k, 2k, 4k, ...) tried when a lemma check fails.
  double k_max = 8.0;
  double b1 = 1.0;
  double b2 = 0.5;
  double c = 1.0;
  double c_star = 0.5;
  double rho = 2.5;
  QuadratureOptions quad;
};

/// Weighted quantities of one Green function at one value of k.
struct WeightedRecord {
  double k = 0.0;
  double sigma_beta = 0.0;
  double sigma_eta = 0.0;
  GreenAnalysis analysis;
  double lemma1_ratio = 0.0;  // a(w^{-1}G, G) / |||G|||^2
  double lemma4_ratio = 0.0;  // a(E, G) / |||G|||^2

  bool lemma1_ok() const { return lemma1_ratio >= 0.25; }
  bool lemma4_ok() const { return std::abs(lemma4_ratio) <= 1.0 / 16.0; }
};

struct BoundRow {
  int N = 0;
  double epsilon = 0.0;
  CrosswindMode mode = CrosswindMode::Standard;
  double k = 0.0;
  double c_star = 0.0;
  Placement placement = Placement::CenterS;
  Region region = Region::S;
  int xi = 0;
  int xj = 0;
  bool degenerate_mesh = false;

  SigmaPolicy policy{};
  NormBreakdown msd;
  WeightedRecord base;                   // at the configured k
  std::optional<WeightedRecord> raised;  // first ladder k at which both lemma checks pass

  double norm_msd = 0.0;
  double norm_w = 0.0;
  double r_thm = 0.0;    // ||G||_MSD / (sqrt(8) |||G|||_w)
  double r_s = 0.0;      // |||G|||_w / (N sigma_beta^{1/2})
  double r_layer = 0.0;  // |||G|||_w / (N^{1/2} ln^{1/2} N)
  double e_s = 0.0;
  double e_not_s = 0.0;
  double e_grad_s = 0.0;
  double e_grad_not_s = 0.0;

  double solver_residual = 0.0;
  double energy_residual = 0.0;          // |a(G,G) - G(x*)| / |G(x*)|
  double duality_residual = 0.0;         // |u(x*) - (f, G + delta b G_beta)| / |u(x*)|
  double norm_identity_residual = 0.0;   // relative to |||G|||_w^2
  double decomposition_residual = 0.0;   // relative to |||G|||_w^2

  std::string error;  // non-empty if the case failed to compute

  bool ok() const { return error.empty(); }
  /// Corner-region poles are computed but left out of every bound check.
  bool in_bound_scope() const { return ok() && region != Region::XY; }
  /// The record at the accepted k: the base record if both lemma checks pass there.
  const WeightedRecord* accepted() const;
};

/// Weighted record for one Green function at a given k.
WeightedRecord weighted_record(const AssembledSystem& sys, const FEFunction& G, Point x_star,
                               CrosswindMode mode, double k, const QuadratureOptions& quad);

/// One row per (N, eps, mode, placement), ordered by N, eps, mode, placement.
/// Per-case failures are recorded in BoundRow::error and the sweep continues.
std::vector<BoundRow> run_sweep(const SweepConfig& cfg);

struct GreenCase {
  BoundRow row;
  FEFunction green;
  FEFunction forward;  // solution for the configured problem with f = 1
};

/// Full row analysis for one explicit node. Unlike run_sweep, errors throw;
/// boundary nodes are rejected with InvalidArgument. Corner-region nodes are
/// analysed like any other, see BoundRow::in_bound_scope.
GreenCase analyze_green(const SweepConfig& cfg, int N, double eps, CrosswindMode mode,
                        NodeIndex node);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope of log |||G|||_w against log N over the rows matching the filter.
double fit_scaling(const std::vector<BoundRow>& rows, Placement p, double epsilon,
                   CrosswindMode mode);

struct CheckResult {
  CheckResult(std::string id_, std::string description_)
      : id(std::move(id_)), description(std::move(description_)) {}

  std::string id;
  std::string description;
  bool passed = true;
  std::vector<std::string> failures;
};

/// Row-level verification checks: identities, the sqrt(8) inequality,
/// N-doubling growth of the normalized ratios, fitted slopes, lemma ratios,
/// eps-robustness and sigma-policy admissibility.
std::vector<CheckResult> evaluate_checks(const std::vector<BoundRow>& rows, const SweepConfig& cfg);

// Thresholds of the verification checks.
inline constexpr double kEnergyResidualTol = 1e-9;
inline constexpr double kDualityResidualTol = 1e-8;
inline constexpr double kIdentityResidualTol = 1e-7;
inline constexpr double kDoublingGrowth = 1.15;
inline constexpr double kLayerSlopeMax = 0.65;
inline constexpr double kEpsSpreadMax = 2.0;
inline constexpr double kSolverResidualTol = 1e-10;

}  // namespace sdfem
