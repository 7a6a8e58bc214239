#include "sdfem/config.hpp"

#include <fstream>
#include <set>

#include "sdfem/error.hpp"

namespace sdfem {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "schema_version", "N",  "eps",    "modes",           "placements",     "k",
      "k_max",          "b1", "b2",     "c",               "c_star",         "rho",
      "quad_base_depth", "quad_max_depth", "quad_rtol",    "output",         "format",
      "deterministic",  "workers"};
  return keys;
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument("config key '" + key + "' has the wrong type");
  }
}

double get_number(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw InvalidArgument("config key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int get_int(const nlohmann::json& j, const std::string& key) {
  if (!j.at(key).is_number_integer())
    throw InvalidArgument("config key '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

template <class T, class F>
std::vector<T> get_list(const nlohmann::json& j, const std::string& key, F&& convert) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.empty())
    throw InvalidArgument("config key '" + key + "' must be a non-empty array");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(convert(e));
  return out;
}

}  // namespace

void validate(const RunConfig& cfg) {
  const auto& s = cfg.sweep;
  if (s.Ns.empty() || s.epsilons.empty() || s.modes.empty() || s.placements.empty())
    throw InvalidArgument("N, eps, modes and placements must all be non-empty");
  for (int N : s.Ns)
    if (N < 4 || N % 2 != 0) throw InvalidArgument("N must be even and >= 4, got " + std::to_string(N));
  for (double e : s.epsilons) {
    if (!(e > 0.0)) throw InvalidArgument("eps must be positive");
    for (int N : s.Ns)
      if (e > 1.0 / N)
        throw InvalidArgument("eps = " + format_number(e) + " violates eps <= 1/N for N = " +
                              std::to_string(N));
  }
  if (!(s.k > 0.0)) throw InvalidArgument("k must be positive");
  if (!(s.k_max >= s.k)) throw InvalidArgument("k_max must be >= k");
  if (!(s.b1 > 0.0) || !(s.b2 > 0.0)) throw InvalidArgument("b1 and b2 must be positive");
  if (!(s.c >= 0.0)) throw InvalidArgument("c must be nonnegative");
  if (!(s.c_star > 0.0)) throw InvalidArgument("c_star must be positive");
  if (!(s.rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (s.quad.base_depth < 0 || s.quad.max_depth < s.quad.base_depth || s.quad.max_depth > 8)
    throw InvalidArgument("quadrature depths must satisfy 0 <= base <= max <= 8");
  if (!(s.quad.rtol > 0.0)) throw InvalidArgument("quad_rtol must be positive");
  if (cfg.workers < 1) throw InvalidArgument("workers must be >= 1");
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known_keys().count(key)) throw InvalidArgument("unknown config key '" + key + "'");
  if (!j.contains("schema_version")) throw InvalidArgument("config lacks schema_version");
  if (get_int(j, "schema_version") != kConfigSchemaVersion)
    throw InvalidArgument("unsupported schema_version (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");

  RunConfig cfg;
  auto& s = cfg.sweep;
  if (j.contains("N"))
    s.Ns = get_list<int>(j, "N", [](const nlohmann::json& e) {
      if (!e.is_number_integer()) throw InvalidArgument("N entries must be integers");
      return e.get<int>();
    });
  if (j.contains("eps"))
    s.epsilons = get_list<double>(j, "eps", [](const nlohmann::json& e) {
      if (!e.is_number()) throw InvalidArgument("eps entries must be numbers");
      return e.get<double>();
    });
  if (j.contains("modes"))
    s.modes = get_list<CrosswindMode>(j, "modes", [](const nlohmann::json& e) {
      if (!e.is_string()) throw InvalidArgument("modes entries must be strings");
      return parse_crosswind_mode(e.get<std::string>());
    });
  if (j.contains("placements"))
    s.placements = get_list<Placement>(j, "placements", [](const nlohmann::json& e) {
      if (!e.is_string()) throw InvalidArgument("placements entries must be strings");
      return parse_placement(e.get<std::string>());
    });
  if (j.contains("k")) s.k = get_number(j, "k");
  if (j.contains("k_max")) s.k_max = get_number(j, "k_max");
  else s.k_max = std::max(s.k_max, s.k);
  if (j.contains("b1")) s.b1 = get_number(j, "b1");
  if (j.contains("b2")) s.b2 = get_number(j, "b2");
  if (j.contains("c")) s.c = get_number(j, "c");
  if (j.contains("c_star")) s.c_star = get_number(j, "c_star");
  if (j.contains("rho")) s.rho = get_number(j, "rho");
  if (j.contains("quad_base_depth")) s.quad.base_depth = get_int(j, "quad_base_depth");
  if (j.contains("quad_max_depth")) s.quad.max_depth = get_int(j, "quad_max_depth");
  if (j.contains("quad_rtol")) s.quad.rtol = get_number(j, "quad_rtol");
  if (j.contains("output")) cfg.output = get_as<std::string>(j, "output");
  if (j.contains("format")) cfg.format = parse_report_format(get_as<std::string>(j, "format"));
  if (j.contains("deterministic")) {
    if (!j.at("deterministic").is_boolean())
      throw InvalidArgument("config key 'deterministic' must be a boolean");
    cfg.deterministic = j.at("deterministic").get<bool>();
  }
  if (j.contains("workers")) cfg.workers = get_int(j, "workers");
  s.quad.workers = cfg.workers;
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("malformed config '" + path + "': " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
  const auto& s = cfg.sweep;
  nlohmann::json modes = nlohmann::json::array(), places = nlohmann::json::array();
  for (auto m : s.modes) modes.push_back(to_string(m));
  for (auto p : s.placements) places.push_back(to_string(p));
  return {{"schema_version", kConfigSchemaVersion},
          {"N", s.Ns},
          {"eps", s.epsilons},
          {"modes", modes},
          {"placements", places},
          {"k", s.k},
          {"k_max", s.k_max},
          {"b1", s.b1},
          {"b2", s.b2},
          {"c", s.c},
          {"c_star", s.c_star},
          {"rho", s.rho},
          {"quad_base_depth", s.quad.base_depth},
          {"quad_max_depth", s.quad.max_depth},
          {"quad_rtol", s.quad.rtol},
          {"output", cfg.output},
          {"format", cfg.format == ReportFormat::Csv ? "csv" : "json"},
          {"deterministic", cfg.deterministic},
          {"workers", cfg.workers}};
}

}  // namespace sdfem
