#include "sdfem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "sdfem/error.hpp"

namespace sdfem {

std::string to_string(Placement p) {
  switch (p) {
    case Placement::CenterS: return "center-s";
    case Placement::MidX: return "mid-x";
    case Placement::MidY: return "mid-y";
    case Placement::NearTransition: return "near-transition";
  }
  return "?";
}

Placement parse_placement(const std::string& s) {
  for (Placement p : kAllPlacements)
    if (to_string(p) == s) return p;
  throw InvalidArgument("unknown x* placement '" + s +
                        "' (expected center-s, mid-x, mid-y or near-transition)");
}

namespace {

int nearest(const std::vector<double>& c, double target, int lo, int hi) {
  int best = lo;
  for (int i = lo + 1; i <= hi; ++i)
    if (std::abs(c[i] - target) < std::abs(c[best] - target)) best = i;
  return best;
}

}  // namespace

NodeIndex place_x_star(const ShishkinMesh& mesh, Placement p) {
  const int N = mesh.N(), half = N / 2;
  const auto& xs = mesh.xs();
  const auto& ys = mesh.ys();
  const double lx = mesh.transitions().lambda_x, ly = mesh.transitions().lambda_y;
  const double sx = 0.5 * (1.0 - lx), sy = 0.5 * (1.0 - ly);
  switch (p) {
    case Placement::CenterS:
      return {nearest(xs, sx, 1, half - 1), nearest(ys, sy, 1, half - 1)};
    case Placement::MidX:
      return {nearest(xs, 1.0 - 0.5 * lx, half, N - 1), nearest(ys, sy, 1, half - 1)};
    case Placement::MidY:
      return {nearest(xs, sx, 1, half - 1), nearest(ys, 1.0 - 0.5 * ly, half, N - 1)};
    case Placement::NearTransition:
      return {half - 1, nearest(ys, 0.5, 1, half - 1)};
  }
  throw InvalidArgument("unknown placement");
}

const WeightedRecord* BoundRow::accepted() const {
  if (base.lemma1_ok() && base.lemma4_ok()) return &base;
  return raised ? &*raised : nullptr;
}

WeightedRecord weighted_record(const AssembledSystem& sys, const FEFunction& G, Point x_star,
                               CrosswindMode mode, double k, const QuadratureOptions& quad) {
  const int N = sys.mesh->N();
  const double n = N, logN = std::log(n);
  WeightedRecord rec;
  rec.k = k;
  // Same formulas as sigma_policy, which additionally gates eps <= 1/N.
  rec.sigma_beta = k * logN / n;
  rec.sigma_eta = mode == CrosswindMode::Standard
                      ? k / std::sqrt(n)
                      : k * std::sqrt(sys.stab.eps_tilde(sys.problem.epsilon, N) * logN);
  const WeightSpec w{x_star, rec.sigma_beta, rec.sigma_eta, sys.frame};
  rec.analysis = analyze_weighted(sys, G, w, quad);
  const double nsq = rec.analysis.weighted.squared();
  rec.lemma1_ratio = rec.analysis.lemma.a_weighted / nsq;
  rec.lemma4_ratio = rec.analysis.lemma.a_EG / nsq;
  return rec;
}

namespace {

GreenFunction fill_row(BoundRow& row, const AssembledSystem& sys, const SparseLuSolver& lu,
                       const FEFunction& u, const SweepConfig& cfg, NodeIndex node) {
  const auto& mesh = *sys.mesh;
  row.xi = node.i;
  row.xj = node.j;
  row.region = mesh.node_region(node.i, node.j);

  const GreenFunction green = solve_green(sys, lu, node.i, node.j);
  const FEFunction& G = green.fe;
  row.solver_residual = green.residual;

  const double g_star = G.nodal(node.i, node.j);
  row.energy_residual = std::abs(bilinear_form(sys, G, G) - g_star) / std::abs(g_star);
  const double u_star = u.nodal(node.i, node.j);
  row.duality_residual =
      std::abs(u_star - load_functional(sys, G, sys.load_quad_level)) / std::abs(u_star);

  row.msd = msd_norm(G, sys);
  row.base = weighted_record(sys, G, green.x_star, row.mode, cfg.k, cfg.quad);
  if (!(row.base.lemma1_ok() && row.base.lemma4_ok())) {
    for (double k = 2.0 * cfg.k; k <= cfg.k_max * (1.0 + 1e-12); k *= 2.0) {
      auto rec = weighted_record(sys, G, green.x_star, row.mode, k, cfg.quad);
      if (rec.lemma1_ok() && rec.lemma4_ok()) {
        row.raised = std::move(rec);
        break;
      }
    }
  }

  const int N = mesh.N();
  const double n = N, logN = std::log(n), eps = row.epsilon;
  const auto& a = row.base.analysis;
  row.norm_msd = row.msd.norm();
  row.norm_w = a.weighted.norm();
  row.r_thm = row.norm_msd / (std::sqrt(8.0) * row.norm_w);
  row.r_s = row.norm_w / (n * std::sqrt(row.base.sigma_beta));
  row.r_layer = row.norm_w / std::sqrt(n * logN);
  const double ws = a.weighted.coarse_norm(), wl = a.weighted.layer_norm();
  row.e_s = a.e.l2_s / (ws / std::sqrt(n));
  row.e_not_s = a.e.l2_not_s / (std::sqrt(eps) * wl);
  row.e_grad_s = (a.e.beta_s + a.e.eta_s) / (std::sqrt(n) * ws);
  row.e_grad_not_s = (a.e.beta_not_s + a.e.eta_not_s) / (wl / (std::sqrt(eps) * logN));
  row.norm_identity_residual = a.lemma.identity_residual;
  row.decomposition_residual = a.lemma.decomposition_residual;
  return green;
}

AssembledSystem build_system(const SweepConfig& cfg, int N, double eps, CrosswindMode mode) {
  auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{N, eps, cfg.rho, cfg.b1, cfg.b2});
  ProblemData prob;
  prob.epsilon = eps;
  prob.b1 = cfg.b1;
  prob.b2 = cfg.b2;
  prob.c = cfg.c;
  return assemble(mesh, prob, StabilizationConfig{cfg.c_star, mode});
}

}  // namespace

std::vector<BoundRow> run_sweep(const SweepConfig& cfg) {
  std::vector<BoundRow> rows;
  for (int N : cfg.Ns) {
    for (double eps : cfg.epsilons) {
      for (CrosswindMode mode : cfg.modes) {
        std::vector<BoundRow> group;
        for (Placement p : cfg.placements) {
          BoundRow r;
          r.N = N;
          r.epsilon = eps;
          r.mode = mode;
          r.k = cfg.k;
          r.c_star = cfg.c_star;
          r.placement = p;
          group.push_back(std::move(r));
        }
        try {
          const SigmaPolicy policy =
              sigma_policy(mode, cfg.k, N, eps, StabilizationConfig{cfg.c_star, mode});
          const AssembledSystem sys = build_system(cfg, N, eps, mode);
          const auto& mesh = sys.mesh;
          const SparseLuSolver lu(sys.A);
          const ForwardSolution fwd = solve_forward(sys, lu);
          for (auto& row : group) {
            row.policy = policy;
            row.degenerate_mesh = mesh->transitions().degenerate;
            try {
              fill_row(row, sys, lu, fwd.u, cfg, place_x_star(*mesh, row.placement));
            } catch (const std::exception& e) {
              row.error = e.what();
            }
          }
        } catch (const std::exception& e) {
          for (auto& row : group) row.error = e.what();
        }
        for (auto& r : group) rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

GreenCase analyze_green(const SweepConfig& cfg, int N, double eps, CrosswindMode mode,
                        NodeIndex node) {
  const AssembledSystem sys = build_system(cfg, N, eps, mode);
  if (node.i < 1 || node.i > N - 1 || node.j < 1 || node.j > N - 1)
    throw InvalidArgument("x* = (" + std::to_string(node.i) + "," + std::to_string(node.j) +
                          ") is not an interior node");
  BoundRow row;
  row.N = N;
  row.epsilon = eps;
  row.mode = mode;
  row.k = cfg.k;
  row.c_star = cfg.c_star;
  row.policy = sigma_policy(mode, cfg.k, N, eps, sys.stab);
  row.degenerate_mesh = sys.mesh->transitions().degenerate;
  const SparseLuSolver lu(sys.A);
  const ForwardSolution fwd = solve_forward(sys, lu);
  GreenFunction green = fill_row(row, sys, lu, fwd.u, cfg, node);
  return GreenCase{std::move(row), std::move(green.fe), std::move(fwd.u)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("slope fit needs matching x and y");
  if (x.size() < 3) throw InvalidArgument("slope fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("slope fit needs positive values");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double fit_scaling(const std::vector<BoundRow>& rows, Placement p, double epsilon,
                   CrosswindMode mode) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (r.ok() && r.placement == p && r.epsilon == epsilon && r.mode == mode)
      pts.emplace_back(r.N, r.norm_w);
  std::sort(pts.begin(), pts.end());
  std::vector<double> x, y;
  for (const auto& [n, v] : pts) {
    x.push_back(n);
    y.push_back(v);
  }
  return loglog_slope(x, y);
}

namespace {

std::string describe(const BoundRow& r) {
  std::ostringstream os;
  os << "N=" << r.N << " eps=" << r.epsilon << " mode=" << to_string(r.mode)
     << " x*=" << to_string(r.placement);
  return os.str();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

using SeriesKey = std::tuple<Placement, double, CrosswindMode>;

std::map<SeriesKey, std::vector<const BoundRow*>> series(const std::vector<BoundRow>& rows) {
  std::map<SeriesKey, std::vector<const BoundRow*>> out;
  for (const auto& r : rows)
    if (r.in_bound_scope()) out[{r.placement, r.epsilon, r.mode}].push_back(&r);
  for (auto& [key, v] : out)
    std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->N < b->N; });
  return out;
}

bool is_coarse_placement(Placement p) {
  return p == Placement::CenterS || p == Placement::NearTransition;
}

// value(2N) <= growth * value(N) along every series selected by `use`.
void doubling_check(CheckResult& c, const std::vector<BoundRow>& rows,
                    const std::function<bool(Placement)>& use, const std::string& name,
                    const std::function<double(const BoundRow&)>& value) {
  for (const auto& [key, v] : series(rows)) {
    if (!use(std::get<0>(key))) continue;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i]->N != 2 * v[i - 1]->N) continue;
      const double prev = value(*v[i - 1]), cur = value(*v[i]);
      if (!(cur <= kDoublingGrowth * prev)) {
        c.passed = false;
        c.failures.push_back(name + " " + describe(*v[i]) + ": " + fmt(cur) + " > 1.15 * " +
                             fmt(prev));
      }
    }
  }
}

}  // namespace

std::vector<CheckResult> evaluate_checks(const std::vector<BoundRow>& rows, const SweepConfig& cfg) {
  std::vector<CheckResult> out;

  CheckResult computed{"rows", "every sweep case computed without error"};
  for (const auto& r : rows) {
    if (!r.ok()) {
      computed.passed = false;
      computed.failures.push_back(describe(r) + ": " + r.error);
    }
  }
  out.push_back(computed);

  CheckResult policy{"policy", "sigma policy satisfies every admissibility condition"};
  std::map<std::tuple<int, double, CrosswindMode>, bool> seen;
  for (const auto& r : rows) {
    if (!r.ok() || seen[{r.N, r.epsilon, r.mode}]) continue;
    seen[{r.N, r.epsilon, r.mode}] = true;
    for (const auto& f : r.policy.failures()) {
      policy.passed = false;
      policy.failures.push_back("N=" + std::to_string(r.N) + " eps=" + fmt(r.epsilon) + " mode=" +
                                to_string(r.mode) + ": " + f);
    }
  }
  out.push_back(policy);

  CheckResult quad{"quadrature", "adaptive quadrature converged and solves reached 1e-10"};
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    if (!r.base.analysis.weighted.converged) {
      quad.passed = false;
      quad.failures.push_back(describe(r) + ": quadrature change " +
                              fmt(r.base.analysis.weighted.achieved_tolerance));
    }
    if (!(r.solver_residual <= kSolverResidualTol)) {
      quad.passed = false;
      quad.failures.push_back(describe(r) + ": solver residual " + fmt(r.solver_residual));
    }
  }
  out.push_back(quad);

  CheckResult ident{"identities", "a(G,G)=G(x*), duality, weighted identity, decomposition"};
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    auto check = [&](const char* what, double v, double tol) {
      if (!(v <= tol)) {
        ident.passed = false;
        ident.failures.push_back(describe(r) + ": " + what + " residual " + fmt(v));
      }
    };
    check("a(G,G)", r.energy_residual, kEnergyResidualTol);
    check("duality", r.duality_residual, kDualityResidualTol);
    check("weighted identity", r.norm_identity_residual, kIdentityResidualTol);
    check("decomposition", r.decomposition_residual, kIdentityResidualTol);
  }
  out.push_back(ident);

  CheckResult thm{"theorem", "||G||_MSD <= sqrt(8) |||G|||_w"};
  for (const auto& r : rows) {
    if (r.in_bound_scope() && !(r.r_thm <= 1.0)) {
      thm.passed = false;
      thm.failures.push_back(describe(r) + ": R_thm = " + fmt(r.r_thm));
    }
  }
  out.push_back(thm);

  CheckResult interior{"scaling-interior", "R_s(2N) <= 1.15 R_s(N) for x* at the coarse centre"};
  doubling_check(interior, rows, [](Placement p) { return p == Placement::CenterS; }, "R_s",
                 [](const BoundRow& r) { return r.r_s; });
  out.push_back(interior);

  CheckResult layer{"scaling-layer",
                    "R_layer(2N) <= 1.15 R_layer(N) and log-log slope <= 0.65 for layer x*"};
  auto is_layer = [](Placement p) { return p == Placement::MidX || p == Placement::MidY; };
  doubling_check(layer, rows, is_layer, "R_layer", [](const BoundRow& r) { return r.r_layer; });
  for (const auto& [key, v] : series(rows)) {
    if (!is_layer(std::get<0>(key)) || v.size() < 3) continue;
    const double slope = fit_scaling(rows, std::get<0>(key), std::get<1>(key), std::get<2>(key));
    if (!(slope <= kLayerSlopeMax)) {
      layer.passed = false;
      layer.failures.push_back("slope " + to_string(std::get<0>(key)) + " eps=" +
                               fmt(std::get<1>(key)) + " mode=" + to_string(std::get<2>(key)) +
                               ": " + fmt(slope));
    }
  }
  out.push_back(layer);

  CheckResult lemma1{"lemma1", "a(w^-1 G, G) >= |||G|||^2 / 4 at k, or at a raised k <= k_max"};
  CheckResult lemma4{"lemma4", "|a(E, G)| <= |||G|||^2 / 16 at the accepted k"};
  for (const auto& r : rows) {
    if (!r.in_bound_scope()) continue;
    const WeightedRecord* acc = r.accepted();
    if (!r.base.lemma1_ok() && !acc) {
      lemma1.passed = false;
      lemma1.failures.push_back(describe(r) + ": ratio " + fmt(r.base.lemma1_ratio) +
                                " and no k <= " + fmt(cfg.k_max) + " passes");
    }
    if (!acc) {
      lemma4.passed = false;
      lemma4.failures.push_back(describe(r) + ": ratio " + fmt(r.base.lemma4_ratio) +
                                " and no k <= " + fmt(cfg.k_max) + " passes");
    }
  }
  out.push_back(lemma1);
  out.push_back(lemma4);

  CheckResult escale{"e-scaling", "normalized interpolation-error ratios do not grow under N-doubling"};
  auto all = [](Placement) { return true; };
  doubling_check(escale, rows, all, "e_s", [](const BoundRow& r) { return r.e_s; });
  doubling_check(escale, rows, all, "e_not_s", [](const BoundRow& r) { return r.e_not_s; });
  doubling_check(escale, rows, all, "e_grad_s", [](const BoundRow& r) { return r.e_grad_s; });
  doubling_check(escale, rows, all, "e_grad_not_s",
                 [](const BoundRow& r) { return r.e_grad_not_s; });
  out.push_back(escale);

  CheckResult robust{"eps-robustness", "max/min over eps of R_s (coarse x*) and R_layer (layer x*) <= 2"};
  std::map<std::tuple<int, CrosswindMode, Placement>, std::vector<double>> by_n;
  for (const auto& r : rows)
    if (r.in_bound_scope())
      by_n[{r.N, r.mode, r.placement}].push_back(is_coarse_placement(r.placement) ? r.r_s
                                                                                  : r.r_layer);
  for (const auto& [key, v] : by_n) {
    if (v.size() < 2) continue;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double spread = *hi / *lo;
    if (!(spread <= kEpsSpreadMax)) {
      robust.passed = false;
      robust.failures.push_back("N=" + std::to_string(std::get<0>(key)) + " mode=" +
                                to_string(std::get<1>(key)) + " x*=" +
                                to_string(std::get<2>(key)) + ": spread " + fmt(spread));
    }
  }
  out.push_back(robust);

  return out;
}

}  // namespace sdfem
