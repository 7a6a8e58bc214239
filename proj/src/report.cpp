#include "sdfem/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sdfem/error.hpp"

#ifndef SDFEM_VERSION
#define SDFEM_VERSION "unknown"
#endif

namespace sdfem {

std::string version() { return SDFEM_VERSION; }

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "N",           "eps",          "mode",           "k",
      "c_star",      "xstar_region", "xstar_i",        "xstar_j",
      "sigma_beta",  "sigma_eta",    "norm_msd",       "norm_w",
      "r_thm",       "r_s",          "r_layer",        "lemma1_ratio",
      "lemma4_ratio", "e_s",         "e_not_s",        "e_grad_s",
      "e_grad_not_s", "residual",    "quad_depth",
      // extensions
      "placement",   "k_accepted",   "energy_residual", "duality_residual",
      "identity_residual", "decomposition_residual", "status"};
  return cols;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const char* row_status(const BoundRow& r) {
  if (!r.ok()) return "error";
  if (!r.in_bound_scope()) return "corner";
  if (r.accepted() == nullptr) return "lemma-fail";
  if (r.raised) return "raised-k";
  return "ok";
}

std::vector<std::string> csv_fields(const BoundRow& r) {
  const double nan = std::nan("");
  const bool ok = r.ok();
  auto num = [&](double v) { return format_number(ok ? v : nan); };
  const WeightedRecord* acc = ok ? r.accepted() : nullptr;
  return {std::to_string(r.N),
          format_number(r.epsilon),
          to_string(r.mode),
          format_number(r.k),
          format_number(r.c_star),
          to_string(r.region),
          std::to_string(r.xi),
          std::to_string(r.xj),
          num(r.base.sigma_beta),
          num(r.base.sigma_eta),
          num(r.norm_msd),
          num(r.norm_w),
          num(r.r_thm),
          num(r.r_s),
          num(r.r_layer),
          num(r.base.lemma1_ratio),
          num(r.base.lemma4_ratio),
          num(r.e_s),
          num(r.e_not_s),
          num(r.e_grad_s),
          num(r.e_grad_not_s),
          num(r.solver_residual),
          std::to_string(ok ? r.base.analysis.weighted.quad_depth : 0),
          to_string(r.placement),
          format_number(acc ? acc->k : nan),
          num(r.energy_residual),
          num(r.duality_residual),
          num(r.norm_identity_residual),
          num(r.decomposition_residual),
          row_status(r)};
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

nlohmann::json policy_json(const SigmaPolicy& p) {
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints)
    cons.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"satisfied", c.satisfied}});
  return {{"mode", to_string(p.mode)},
          {"k", p.k},
          {"sigma_beta", p.sigma_beta},
          {"sigma_eta", p.sigma_eta},
          {"sigma_eta_star", p.sigma_eta_star},
          {"delta_max", p.delta_max},
          {"eps_hat_max", p.eps_hat_max},
          {"eps_hat_s", p.eps_hat_s},
          {"accepted", p.accepted()},
          {"sigma_beta_exceeds_one", p.sigma_beta_exceeds_one},
          {"constraints", cons}};
}

nlohmann::json record_json(const WeightedRecord& w) {
  return {{"k", w.k},
          {"sigma_beta", w.sigma_beta},
          {"sigma_eta", w.sigma_eta},
          {"lemma1_ratio", w.lemma1_ratio},
          {"lemma4_ratio", w.lemma4_ratio},
          {"weighted_norm", to_json(w.analysis.weighted)},
          {"e", to_json(w.analysis.e)},
          {"lemma", to_json(w.analysis.lemma)}};
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  if (rows.empty()) throw InvalidArgument("no rows to report");
  os << join(csv_columns()) << '\n';
  for (const auto& r : rows) os << join(csv_fields(r)) << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InvalidArgument("no CSV column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& s = records.at(row).at(column(name));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty CSV input");
  t.header = split_line(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto rec = split_line(line);
    if (rec.size() != t.header.size())
      throw InvalidArgument("CSV record has " + std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(t.header.size()));
    t.records.push_back(std::move(rec));
  }
  return t;
}

nlohmann::json to_json(const BoundRow& r) {
  nlohmann::json j = {{"N", r.N},
                      {"eps", r.epsilon},
                      {"mode", to_string(r.mode)},
                      {"k", r.k},
                      {"c_star", r.c_star},
                      {"placement", to_string(r.placement)},
                      {"xstar_region", to_string(r.region)},
                      {"xstar_i", r.xi},
                      {"xstar_j", r.xj},
                      {"status", row_status(r)}};
  if (!r.ok()) {
    j["error"] = r.error;
    return j;
  }
  j["degenerate_mesh"] = r.degenerate_mesh;
  j["policy"] = policy_json(r.policy);
  j["norm_msd"] = r.norm_msd;
  j["norm_w"] = r.norm_w;
  j["msd_breakdown"] = to_json(r.msd);
  j["base"] = record_json(r.base);
  if (r.raised) j["raised"] = record_json(*r.raised);
  j["ratios"] = {{"r_thm", r.r_thm},
                 {"r_s", r.r_s},
                 {"r_s_alt", r.norm_w / std::sqrt(r.k * r.N * std::log(double(r.N)))},
                 {"r_layer", r.r_layer},
                 {"e_s", r.e_s},
                 {"e_not_s", r.e_not_s},
                 {"e_grad_s", r.e_grad_s},
                 {"e_grad_not_s", r.e_grad_not_s}};
  j["residuals"] = {{"solver", r.solver_residual},
                    {"energy", r.energy_residual},
                    {"duality", r.duality_residual},
                    {"identity", r.norm_identity_residual},
                    {"decomposition", r.decomposition_residual}};
  return j;
}

nlohmann::json to_json(const SweepConfig& c) {
  nlohmann::json modes = nlohmann::json::array(), places = nlohmann::json::array();
  for (auto m : c.modes) modes.push_back(to_string(m));
  for (auto p : c.placements) places.push_back(to_string(p));
  return {{"N", c.Ns},
          {"eps", c.epsilons},
          {"modes", modes},
          {"placements", places},
          {"k", c.k},
          {"k_max", c.k_max},
          {"b1", c.b1},
          {"b2", c.b2},
          {"c", c.c},
          {"c_star", c.c_star},
          {"rho", c.rho},
          {"quadrature",
           {{"base_depth", c.quad.base_depth},
            {"max_depth", c.quad.max_depth},
            {"rtol", c.quad.rtol}}}};
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"id", c.id}, {"description", c.description}, {"passed", c.passed},
          {"failures", c.failures}};
}

nlohmann::json sweep_report(const std::vector<BoundRow>& rows, const SweepConfig& cfg,
                            const std::vector<CheckResult>& checks) {
  if (rows.empty()) throw InvalidArgument("no rows to report");
  nlohmann::json j;
  j["version"] = version();
  j["config"] = to_json(cfg);
  j["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    j["checks"].push_back(to_json(c));
    all = all && c.passed;
  }
  j["passed"] = all;
  j["columns"] = csv_columns();
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(to_json(r));
  return j;
}

ReportFormat parse_report_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw InvalidArgument("unknown report format '" + s + "' (expected csv or json)");
}

void emit_report(const std::string& path, ReportFormat format, const std::vector<BoundRow>& rows,
                 const SweepConfig& cfg, const std::vector<CheckResult>& checks) {
  std::ostringstream buf;
  if (format == ReportFormat::Csv)
    write_csv(buf, rows);
  else
    buf << sweep_report(rows, cfg, checks).dump(2) << '\n';
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << buf.str();
  if (!out.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace sdfem
