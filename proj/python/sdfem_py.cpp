#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdfem/config.hpp"
#include "sdfem/experiments.hpp"
#include "sdfem/green.hpp"
#include "sdfem/report.hpp"
#include "sdfem/weight.hpp"

namespace py = pybind11;
using namespace sdfem;

namespace {

// Structured results cross the boundary as JSON text; the Python wrapper
// decodes them. Nodal fields come back as (N+1) x (N+1) arrays indexed [j, i].
Eigen::MatrixXd nodal_grid(const FEFunction& f) {
  const int N = f.mesh().N();
  Eigen::MatrixXd out(N + 1, N + 1);
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N; ++i) out(j, i) = f.nodal(i, j);
  return out;
}

SweepConfig case_config(double b1, double b2, double c, double c_star, double rho, double k) {
  SweepConfig cfg;
  cfg.b1 = b1;
  cfg.b2 = b2;
  cfg.c = c;
  cfg.c_star = c_star;
  cfg.rho = rho;
  cfg.k = k;
  cfg.k_max = std::max(cfg.k_max, k);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_sdfem, m) {
  m.doc() = "Streamline-diffusion FEM on Shishkin meshes: discrete Green function analysis";
  m.attr("__version__") = version();

  m.def(
      "mesh_info",
      [](int N, double eps, double rho, double beta1, double beta2) {
        return mesh_summary(ShishkinMesh(MeshParams{N, eps, rho, beta1, beta2})).dump();
      },
      py::arg("N"), py::arg("eps"), py::arg("rho") = 2.5, py::arg("beta1") = 1.0,
      py::arg("beta2") = 1.0);

  m.def(
      "mesh_coordinates",
      [](int N, double eps, double rho, double beta1, double beta2) {
        const ShishkinMesh mesh(MeshParams{N, eps, rho, beta1, beta2});
        return py::make_tuple(mesh.xs(), mesh.ys());
      },
      py::arg("N"), py::arg("eps"), py::arg("rho") = 2.5, py::arg("beta1") = 1.0,
      py::arg("beta2") = 1.0);

  m.def(
      "solve",
      [](int N, double eps, const std::string& mode, double b1, double b2, double c, double c_star,
         double rho) {
        auto mesh = std::make_shared<const ShishkinMesh>(MeshParams{N, eps, rho, b1, b2});
        ProblemData prob;
        prob.epsilon = eps;
        prob.b1 = b1;
        prob.b2 = b2;
        prob.c = c;
        const auto sys =
            assemble(mesh, prob, StabilizationConfig{c_star, parse_crosswind_mode(mode)});
        const auto fwd = solve_forward(sys);
        return py::make_tuple(nodal_grid(fwd.u), fwd.residual);
      },
      py::arg("N"), py::arg("eps"), py::arg("mode") = "standard", py::arg("b1") = 1.0,
      py::arg("b2") = 0.5, py::arg("c") = 1.0, py::arg("c_star") = 0.5, py::arg("rho") = 2.5);

  m.def(
      "place_x_star",
      [](int N, double eps, const std::string& placement, double b1, double b2, double rho) {
        const ShishkinMesh mesh(MeshParams{N, eps, rho, b1, b2});
        const NodeIndex n = place_x_star(mesh, parse_placement(placement));
        return py::make_tuple(n.i, n.j);
      },
      py::arg("N"), py::arg("eps"), py::arg("placement"), py::arg("b1") = 1.0,
      py::arg("b2") = 0.5, py::arg("rho") = 2.5);

  m.def(
      "green",
      [](int N, double eps, int i, int j, const std::string& mode, double k, double b1, double b2,
         double c, double c_star, double rho) {
        const auto cfg = case_config(b1, b2, c, c_star, rho, k);
        GreenCase gc = [&] {
          py::gil_scoped_release release;
          return analyze_green(cfg, N, eps, parse_crosswind_mode(mode), NodeIndex{i, j});
        }();
        return py::make_tuple(to_json(gc.row).dump(), nodal_grid(gc.green));
      },
      py::arg("N"), py::arg("eps"), py::arg("i"), py::arg("j"), py::arg("mode") = "standard",
      py::arg("k") = 2.0, py::arg("b1") = 1.0, py::arg("b2") = 0.5, py::arg("c") = 1.0,
      py::arg("c_star") = 0.5, py::arg("rho") = 2.5);

  m.def(
      "sweep",
      [](const std::string& config_json) {
        const RunConfig cfg = parse_run_config(nlohmann::json::parse(config_json));
        std::vector<BoundRow> rows;
        std::vector<CheckResult> checks;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg.sweep);
          checks = evaluate_checks(rows, cfg.sweep);
        }
        std::ostringstream csv;
        write_csv(csv, rows);
        return py::make_tuple(sweep_report(rows, cfg.sweep, checks).dump(), csv.str());
      },
      py::arg("config_json"));

  m.def(
      "sigma_policy",
      [](const std::string& mode, double k, int N, double eps, double c_star) {
        const CrosswindMode md = parse_crosswind_mode(mode);
        const SigmaPolicy p = sigma_policy(md, k, N, eps, StabilizationConfig{c_star, md});
        py::dict d;
        d["sigma_beta"] = p.sigma_beta;
        d["sigma_eta"] = p.sigma_eta;
        d["accepted"] = p.accepted();
        d["failures"] = p.failures();
        return d;
      },
      py::arg("mode"), py::arg("k"), py::arg("N"), py::arg("eps"), py::arg("c_star") = 0.5);

  m.def(
      "omega",
      [](double x, double y, double xs, double ys, double sigma_beta, double sigma_eta, double b1,
         double b2) {
        const WeightSpec w{{xs, ys}, sigma_beta, sigma_eta, StreamlineFrame::from(b1, b2)};
        return omega({x, y}, w);
      },
      py::arg("x"), py::arg("y"), py::arg("x_star"), py::arg("y_star"), py::arg("sigma_beta"),
      py::arg("sigma_eta"), py::arg("b1") = 1.0, py::arg("b2") = 0.0);

  m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"));
}
