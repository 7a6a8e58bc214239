// Command-line front end: mesh-info, solve, green, verify, sweep.
//
// Exit codes: 0 success, 1 verification check failed, 2 usage or config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdfem/config.hpp"
#include "sdfem/error.hpp"
#include "sdfem/experiments.hpp"
#include "sdfem/green.hpp"
#include "sdfem/mesh.hpp"
#include "sdfem/report.hpp"

namespace {

using namespace sdfem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<int> env_workers() {
  const char* v = std::getenv("SDFEM_WORKERS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const int n = std::stoi(v, &used);
    if (used == std::string(v).size() && n >= 1) return n;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("SDFEM_WORKERS must be a positive integer, got '") + v + "'");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

std::string nodal_csv(const FEFunction& f, const char* name) {
  const auto& mesh = f.mesh();
  std::ostringstream os;
  os << "i,j,x,y," << name << '\n';
  for (int j = 0; j <= mesh.N(); ++j)
    for (int i = 0; i <= mesh.N(); ++i)
      os << i << ',' << j << ',' << format_number(mesh.xs()[i]) << ','
         << format_number(mesh.ys()[j]) << ',' << format_number(f.nodal(i, j)) << '\n';
  return os.str();
}

void print_kv(const std::string& key, double v) { std::cout << key << ' ' << format_number(v) << '\n'; }

// Problem options shared by solve and green.
struct CaseOptions {
  int N = 16;
  double eps = 1e-6;
  std::string mode = "standard";
  SweepConfig sweep;  // carries b, c, C*, rho, k and quadrature settings

  void attach(CLI::App* app) {
    app->add_option("--N", N, "mesh intervals per direction (even, >= 4)")->capture_default_str();
    app->add_option("--eps", eps, "diffusion parameter")->capture_default_str();
    app->add_option("--mode", mode, "crosswind mode: standard or acd")->capture_default_str();
    app->add_option("--b1", sweep.b1, "convection x-component")->capture_default_str();
    app->add_option("--b2", sweep.b2, "convection y-component")->capture_default_str();
    app->add_option("--c", sweep.c, "reaction coefficient")->capture_default_str();
    app->add_option("--c-star", sweep.c_star, "stabilization constant C*")->capture_default_str();
    app->add_option("--rho", sweep.rho, "mesh transition factor")->capture_default_str();
  }
};

int cmd_mesh_info(int N, double eps, double rho, double beta1, double beta2) {
  const ShishkinMesh mesh(MeshParams{N, eps, rho, beta1, beta2});
  const auto& t = mesh.transitions();
  if (t.degenerate)
    std::cerr << "warning: transition parameter saturated at 1/2; the mesh is uniform\n";
  if (t.epsilon_assumption_violated) std::cerr << "warning: eps > 1/N\n";
  if (t.nonstandard_rho) std::cerr << "warning: rho differs from 2.5\n";
  std::cout << mesh_summary(mesh).dump(2) << '\n';
  return kExitOk;
}

int cmd_solve(const CaseOptions& o, const std::string& dump) {
  SweepConfig cfg = o.sweep;
  auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{o.N, o.eps, cfg.rho, cfg.b1, cfg.b2});
  ProblemData prob;
  prob.epsilon = o.eps;
  prob.b1 = cfg.b1;
  prob.b2 = cfg.b2;
  prob.c = cfg.c;
  const AssembledSystem sys =
      assemble(mesh, prob, StabilizationConfig{cfg.c_star, parse_crosswind_mode(o.mode)});
  const ForwardSolution fwd = solve_forward(sys);
  const auto& d = fwd.u.dofs();
  print_kv("unknowns", static_cast<double>(d.size()));
  print_kv("nonzeros", static_cast<double>(sys.A.nonZeros()));
  print_kv("residual", fwd.residual);
  print_kv("u_min", d.minCoeff());
  print_kv("u_max", d.maxCoeff());
  print_kv("u_center", fwd.u.evaluate({0.5, 0.5}));
  if (!dump.empty()) write_file(dump, nodal_csv(fwd.u, "u"));
  return kExitOk;
}

NodeIndex parse_xstar(const std::string& text, const ShishkinMesh& mesh) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return place_x_star(mesh, parse_placement(text));
  try {
    std::size_t a = 0, b = 0;
    const int i = std::stoi(text.substr(0, comma), &a);
    const int j = std::stoi(text.substr(comma + 1), &b);
    if (a == comma && b == text.size() - comma - 1) return {i, j};
  } catch (const std::exception&) {
  }
  throw InvalidArgument("--xstar expects 'i,j' or a placement keyword, got '" + text + "'");
}

int cmd_green(const CaseOptions& o, const std::string& xstar, const std::string& dump,
              const std::string& json_path, int workers) {
  SweepConfig cfg = o.sweep;
  cfg.quad.workers = workers;
  const CrosswindMode mode = parse_crosswind_mode(o.mode);
  const ShishkinMesh mesh(MeshParams{o.N, o.eps, cfg.rho, cfg.b1, cfg.b2});
  const NodeIndex node = parse_xstar(xstar, mesh);
  const GreenCase gc = analyze_green(cfg, o.N, o.eps, mode, node);
  const BoundRow& r = gc.row;

  std::cout << "xstar " << r.xi << ',' << r.xj << " region " << to_string(r.region) << '\n';
  if (!r.in_bound_scope()) std::cout << "note corner-region pole, not covered by the bound checks\n";
  print_kv("x", mesh.xs()[r.xi]);
  print_kv("y", mesh.ys()[r.xj]);
  print_kv("coercivity_residual", r.energy_residual);
  print_kv("duality_residual", r.duality_residual);
  print_kv("weighted_identity_residual", r.norm_identity_residual);
  print_kv("decomposition_residual", r.decomposition_residual);
  print_kv("solver_residual", r.solver_residual);
  print_kv("norm_msd", r.norm_msd);
  print_kv("norm_w", r.norm_w);
  print_kv("r_thm", r.r_thm);
  print_kv("lemma1_ratio", r.base.lemma1_ratio);
  print_kv("lemma4_ratio", r.base.lemma4_ratio);
  if (!r.policy.accepted())
    for (const auto& f : r.policy.failures()) std::cerr << "warning: sigma policy: " << f << '\n';

  if (!dump.empty()) write_file(dump, nodal_csv(gc.green, "G"));
  if (!json_path.empty()) write_file(json_path, to_json(r).dump(2) + "\n");
  return kExitOk;
}

// Flags that override values loaded from a config file.
struct RunOverrides {
  std::string config_path;
  std::vector<int> Ns;
  std::vector<double> eps;
  std::vector<std::string> modes;
  std::vector<std::string> placements;
  std::optional<double> k;
  std::optional<double> k_max;
  std::optional<int> workers;
  std::optional<int> quad_max_depth;
  std::string output;
  std::string format;
  bool deterministic = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--N", Ns, "mesh sizes");
    app->add_option("--eps", eps, "diffusion parameters");
    app->add_option("--mode", modes, "crosswind modes (standard, acd)");
    app->add_option("--placement", placements, "x* placements");
    app->add_option("--k", k, "weight scale factor");
    app->add_option("--k-max", k_max, "largest k tried when a lemma check fails");
    app->add_option("--workers", workers, "threads for the weighted integrals");
    app->add_option("--quad-max-depth", quad_max_depth, "quadrature refinement cap");
    app->add_option("--output", output, "report path");
    app->add_option("--format", format, "report format: csv or json");
    app->add_flag("--deterministic", deterministic, "fixed-order reductions");
  }

  RunConfig resolve() const {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument("malformed config '" + config_path + "': " + e.what());
      }
      if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    } else {
      j["schema_version"] = kConfigSchemaVersion;
    }
    if (!Ns.empty()) j["N"] = Ns;
    if (!eps.empty()) j["eps"] = eps;
    if (!modes.empty()) j["modes"] = modes;
    if (!placements.empty()) j["placements"] = placements;
    if (k) j["k"] = *k;
    if (k_max) j["k_max"] = *k_max;
    if (quad_max_depth) j["quad_max_depth"] = *quad_max_depth;
    if (!output.empty()) j["output"] = output;
    if (!format.empty()) j["format"] = format;
    if (deterministic) j["deterministic"] = true;
    if (!j.contains("workers"))
      if (auto w = env_workers()) j["workers"] = *w;
    if (workers) j["workers"] = *workers;
    RunConfig cfg = parse_run_config(j);
    if (cfg.output.empty())
      cfg.output = cfg.format == ReportFormat::Csv ? "sdfem_report.csv" : "sdfem_report.json";
    return cfg;
  }
};

int cmd_run(const RunOverrides& o, bool gate_on_checks) {
  const RunConfig cfg = o.resolve();
  const auto rows = run_sweep(cfg.sweep);
  const auto checks = evaluate_checks(rows, cfg.sweep);
  emit_report(cfg.output, cfg.format, rows, cfg.sweep, checks);

  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ": " << c.description << '\n';
    for (const auto& f : c.failures) std::cout << "    " << f << '\n';
    all = all && c.passed;
  }
  std::cout << "rows " << rows.size() << ", report " << cfg.output << '\n';
  if (!gate_on_checks) {
    for (const auto& r : rows)
      if (!r.ok()) return kExitCheckFailed;
    return kExitOk;
  }
  return all ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shishkin-mesh streamline-diffusion FEM: discrete Green function analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sdfem::version());

  int mi_N = 8;
  double mi_eps = 1e-4, mi_rho = 2.5, mi_b1 = 1.0, mi_b2 = 1.0;
  auto* mesh_info = app.add_subcommand("mesh-info", "print mesh transition parameters as JSON");
  mesh_info->add_option("--N", mi_N, "mesh intervals per direction")->capture_default_str();
  mesh_info->add_option("--eps", mi_eps, "diffusion parameter")->capture_default_str();
  mesh_info->add_option("--rho", mi_rho, "transition factor")->capture_default_str();
  mesh_info->add_option("--beta1", mi_b1, "lower bound of b1")->capture_default_str();
  mesh_info->add_option("--beta2", mi_b2, "lower bound of b2")->capture_default_str();

  CaseOptions solve_opts;
  std::string solve_dump;
  auto* solve = app.add_subcommand("solve", "assemble and solve the f = 1 problem");
  solve_opts.attach(solve);
  solve->add_option("--dump", solve_dump, "write nodal values as CSV");

  CaseOptions green_opts;
  std::string xstar = "center-s", green_dump, green_json;
  std::optional<int> green_workers;
  auto* green = app.add_subcommand("green", "discrete Green function with norm breakdown");
  green_opts.attach(green);
  green->add_option("--xstar", xstar, "'i,j' or center-s, mid-x, mid-y, near-transition")
      ->capture_default_str();
  green->add_option("--k", green_opts.sweep.k, "weight scale factor")->capture_default_str();
  green->add_option("--dump", green_dump, "write nodal G as CSV");
  green->add_option("--json", green_json, "write the full breakdown as JSON");
  green->add_option("--workers", green_workers, "threads for the weighted integrals");

  RunOverrides verify_opts, sweep_opts;
  auto* verify = app.add_subcommand("verify", "run the sweep and all checks; exit 1 on failure");
  verify_opts.attach(verify);
  auto* sweep = app.add_subcommand("sweep", "run the sweep and write the report");
  sweep_opts.attach(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mesh_info) return cmd_mesh_info(mi_N, mi_eps, mi_rho, mi_b1, mi_b2);
    if (*solve) return cmd_solve(solve_opts, solve_dump);
    if (*green) {
      int workers = 1;
      if (auto w = env_workers()) workers = *w;
      if (green_workers) workers = *green_workers;
      return cmd_green(green_opts, xstar, green_dump, green_json, workers);
    }
    if (*verify) return cmd_run(verify_opts, true);
    if (*sweep) return cmd_run(sweep_opts, false);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
