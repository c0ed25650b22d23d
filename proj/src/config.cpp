// config.cpp — run-config schema, defaults and validation
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <map>
#include <thread>
#include <atomic>
#include <mutex>
#include <exception>

#include "photoion/cli.hpp"
#include "photoion/model.hpp"

namespace photoion::cli {

using nlohmann::json;

namespace {

json region_defaults() {
  return {{"p_min", 0.0}, {"p_max", nullptr}, {"signs", json::array()}, {"all_space", true}, {"id", "all"}};
}

json cloud_defaults() {
  return {{"orbitals", json::array({{{"profile", "gaussian"}, {"center", 2.5}, {"width", 0.6}, {"sign", 1},
                                     {"multiplicity", 1}}})}};
}

json discrete_orbital_defaults() {
  return {{"profile", "gaussian"}, {"center", 2.5}, {"width", 0.6}, {"sign", 1}, {"multiplicity", 1}};
}

json continuum_orbital_defaults() {
  return {{"center", 2.5}, {"width", 0.5}, {"multiplicity", 1}};
}

json t_list(double a, double b, double step) {
  json out = json::array();
  for (double t = a; t <= b + 1e-12; t += step) out.push_back(t);
  return out;
}

json task_defaults(const std::string& name) {
  if (name == "ground-state") return {{"g", {0.0}}, {"tol", 1e-10}};
  if (name == "transport-sweep")
    return {{"g", {0.05}},        {"tau", 0.0},       {"R", {8.0}},
            {"t", t_list(2, 30, 2)}, {"region", region_defaults()}, {"cloud", cloud_defaults()},
            {"tol", 1e-9},        {"plateau_variation", 0.05}, {"pp_decay", false}};
  if (name == "leading-order")
    return {{"E0", nullptr},
            {"regime", "infinity"},
            {"regions", json::array({region_defaults()})},
            {"orbitals", json::array({continuum_orbital_defaults()})},
            {"p_samples", 41},
            {"tol", 1e-11},
            {"crosscheck", false},
            {"crosscheck_levels", {32, 64, 128, 256}}};
  if (name == "monochromatic")
    return {{"E0", nullptr}, {"omega", {2.0}}, {"deltas", {0.1, 0.05, 0.025}}, {"region", region_defaults()}};
  if (name == "dyson-compare")
    return {{"g", {0.01, 0.02, 0.05, 0.1}},
            {"t", 6.0},
            {"tau", 0.0},
            {"regime", "short"},
            {"R", 8.0},
            {"t_grid", t_list(2, 30, 2)},
            {"region", region_defaults()},
            {"cloud", cloud_defaults()},
            {"tol", 1e-9},
            {"horizon", 0.0},
            {"plateau_variation", 0.05},
            {"duhamel_t", json::array()}};
  if (name == "bogoliubov")
    return {{"problem", "schrodinger-toy"},
            {"toy", {{"points", 64}, {"h_x", 0.5}, {"V0", 1.0}, {"a", 1.0}, {"c", 1.0}, {"b", 1.5}, {"sigma_k", 2.0}}},
            {"g", {0.1}},
            {"tol", 1e-10},
            {"max_iter", 200}};
  if (name == "validate") return {{"g", 0.1}, {"tol", 1e-10}};
  throw ConfigError("unknown task 'task.name' = '" + name + "'");
}

json model_defaults() {
  return {{"preset", "gaussian-toy"},
          {"params", json::object()},
          {"modes", {{"cutoff_Lambda", 4.0}, {"k_lo", -1.0}, {"k_hi", -1.0}, {"n_radial", 4}, {"n_theta", 2}, {"n_phi", 4}}},
          {"electron", {{"points", 64}, {"h_x", 0.75}}}};
}

bool compatible(const json& def, const json& val) {
  if (def.is_null()) return val.is_null() || val.is_number();
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

// Array elements that are objects are merged against `element` when given.
json merge(const json& def, const json& user, const std::string& path,
           const std::map<std::string, json>& element_defaults);

json merge_value(const json& def, const json& val, const std::string& path,
                 const std::map<std::string, json>& element_defaults) {
  if (!compatible(def, val)) throw ConfigError("key '" + path + "' has the wrong type");
  if (def.is_object() && !def.empty()) return merge(def, val, path, element_defaults);
  if (def.is_array()) {
    auto it = element_defaults.find(path);
    if (it == element_defaults.end()) {
      for (const auto& e : val)
        if (!e.is_number() && !e.is_string()) throw ConfigError("key '" + path + "' must hold scalars");
      return val;
    }
    json out = json::array();
    for (std::size_t i = 0; i < val.size(); ++i) {
      if (!val[i].is_object()) throw ConfigError("key '" + path + "' must hold objects");
      out.push_back(merge(it->second, val[i], path + "[" + std::to_string(i) + "]", element_defaults));
    }
    return out;
  }
  return val;
}

json merge(const json& def, const json& user, const std::string& path,
           const std::map<std::string, json>& element_defaults) {
  if (!user.is_object()) throw ConfigError("key '" + path + "' must be an object");
  json out = def;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!def.contains(it.key())) throw ConfigError("unknown key '" + key + "'");
    out[it.key()] = merge_value(def[it.key()], it.value(), key, element_defaults);
  }
  // arrays of objects left at their defaults are still expanded
  for (auto it = out.begin(); it != out.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!user.contains(it.key()) && it.value().is_array() && element_defaults.count(key))
      out[it.key()] = merge_value(def[it.key()], it.value(), key, element_defaults);
  }
  return out;
}

void require_positive(const json& j, const std::string& key, const std::string& path) {
  if (!(j.at(key).get<double>() > 0.0)) throw ConfigError("key '" + path + "." + key + "' must be positive");
}

void require_g_list(const json& g, const std::string& path) {
  const json list = g.is_array() ? g : json::array({g});
  for (const auto& v : list)
    if (!v.is_number() || !(v.get<double>() >= 0.0)) throw ConfigError("key '" + path + "' needs g >= 0");
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema") || j["schema"] != kSchema)
    throw ConfigError(std::string("key 'schema' must be \"") + kSchema + "\"");
  if (!j.contains("task") || !j["task"].is_object() || !j["task"].contains("name") || !j["task"]["name"].is_string())
    throw ConfigError("key 'task.name' is required");
  const std::string name = j["task"]["name"];
  json tdef = task_defaults(name);
  tdef["name"] = name;
  const json top_defaults = {{"schema", kSchema},
                             {"model", model_defaults()},
                             {"fock", {{"N_max", 3}, {"memory_budget_mb", nullptr}}},
                             {"task", tdef},
                             {"output", "out"},
                             {"seed", 0}};
  std::map<std::string, json> elements = {
      {"task.regions", region_defaults()},
      {"task.orbitals", continuum_orbital_defaults()},
      {"task.cloud.orbitals", discrete_orbital_defaults()},
  };
  RunConfig cfg;
  cfg.resolved = merge(top_defaults, j, "", elements);
  // preset params are owned by the preset: check names and echo every default
  const json& params = cfg.resolved["model"]["params"];
  std::map<std::string, double> pm;
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!it.value().is_number()) throw ConfigError("key 'model.params." + it.key() + "' must be a number");
    pm[it.key()] = it.value().get<double>();
  }
  const std::string preset = cfg.resolved["model"]["preset"];
  if (preset != "gaussian-toy" && preset != "dipole") throw ConfigError("key 'model.preset': unknown preset '" + preset + "'");
  const std::vector<std::string> allowed = preset == "gaussian-toy"
      ? std::vector<std::string>{"c", "sigma_p", "sigma_k", "e0", "dim", "K", "gamma"}
      : std::vector<std::string>{"c", "R", "a", "sigma_k", "e0", "dim", "K", "gamma"};
  for (const auto& kv : pm)
    if (std::find(allowed.begin(), allowed.end(), kv.first) == allowed.end())
      throw ConfigError("unknown key 'model.params." + kv.first + "'");
  // echo the preset's own defaults as well
  const model::CouplingSpec spec = model::preset(preset, pm);
  json full = json::object();
  for (const auto& kv : spec.preset_params) full[kv.first] = kv.second;
  cfg.resolved["model"]["params"] = full;
  const json& t = cfg.resolved["task"];
  for (const char* key : {"tol"})
    if (t.contains(key)) require_positive(t, key, "task");
  if (t.contains("g")) require_g_list(t["g"], "task.g");
  const json& fk = cfg.resolved["fock"];
  if (!fk["N_max"].is_number_integer() || fk["N_max"].get<int>() < 0) throw ConfigError("key 'fock.N_max' must be an integer >= 0");
  if (!fk["memory_budget_mb"].is_null()) require_positive(fk, "memory_budget_mb", "fock");
  const json& el = cfg.resolved["model"]["electron"];
  if (!el["points"].is_number_integer() || el["points"].get<int>() < 4) throw ConfigError("key 'model.electron.points' must be an integer >= 4");
  require_positive(el, "h_x", "model.electron");
  if (!cfg.resolved["seed"].is_number_integer() || cfg.resolved["seed"].get<long long>() < 0)
    throw ConfigError("key 'seed' must be a non-negative integer");
  cfg.task = name;
  cfg.output = cfg.resolved["output"];
  cfg.seed = cfg.resolved["seed"].get<std::uint64_t>();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
  return 1;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace photoion::cli
