#include "lightray/experiment_config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "lightray/error.hpp"

namespace lightray {

namespace {

using json = nlohmann::json;

constexpr std::array<Method, 4> kMethodOrder{Method::Landweber, Method::Fista, Method::Tikhonov, Method::GenTikhonov};

// Section names use underscores so they are bare TOML keys.
std::string section_name(Method m) { return m == Method::GenTikhonov ? "gen_tikhonov" : std::string(to_string(m)); }

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::Config, msg); }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error("'" + where + "' must be a table");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) config_error("unknown key '" + key + "' in '" + where + "'");
  }
}

const json& section(const json& root, const std::string& name) {
  if (!root.contains(name)) config_error("missing section '" + name + "'");
  return root.at(name);
}

double get_double(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) config_error("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

double get_double(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? get_double(obj, key, where) : fallback;
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& where, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) config_error("'" + where + "." + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json& obj, const std::string& key, const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  config_error("'" + where + "." + key + "' must be a nonnegative integer");
}

bool get_bool(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) config_error("'" + where + "." + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) config_error("missing key '" + where + "." + key + "'");
  const json& v = obj.at(key);
  if (!v.is_string()) config_error("'" + where + "." + key + "' must be a string");
  return v.get<std::string>();
}

Interval get_interval(const json& obj, const std::string& key, const std::string& where, Interval fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    config_error("'" + where + "." + key + "' must be a two-element numeric array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> get_double_list(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_array()) config_error("'" + where + "." + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) config_error("'" + where + "." + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// The error text names the config path instead of the library's generic message.
template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    config_error("'" + where + "': " + e.what());
  }
}

MethodConfig parse_method(Method method, const json& s) {
  const std::string where = "solvers." + section_name(method);
  if (method == Method::GenTikhonov) {
    reject_unknown(s, where,
                   {"max_iters", "relaxation_factor", "dp_tau", "dp_enabled", "seed", "sigma1", "lambda_rule", "lambda",
                    "lambda_grid", "L0", "eta", "sigma_iters", "sigma_tol", "stagnation_tol", "log10_lambda_min",
                    "log10_lambda_max", "golden_evaluations", "prior"});
  } else {
    reject_unknown(s, where,
                   {"max_iters", "relaxation_factor", "dp_tau", "dp_enabled", "seed", "sigma1", "lambda_rule", "lambda",
                    "lambda_grid", "L0", "eta", "sigma_iters", "sigma_tol", "stagnation_tol", "log10_lambda_min",
                    "log10_lambda_max", "golden_evaluations"});
  }
  MethodConfig mc;
  mc.method = method;
  SolverOptions& o = mc.options;
  o.max_iters = static_cast<int>(get_int(s, "max_iters", where, o.max_iters));
  o.relaxation_factor = get_double(s, "relaxation_factor", where, o.relaxation_factor);
  o.dp_tau = get_double(s, "dp_tau", where, o.dp_tau);
  // Experiments run every iteration by default so both the DP iterate and
  // the minimum-RRE iterate can be reported.
  o.dp_enabled = get_bool(s, "dp_enabled", where, false);
  o.seed = get_seed(s, "seed", where, o.seed);
  if (s.contains("sigma1")) o.sigma1 = get_double(s, "sigma1", where);
  o.sigma_iters = static_cast<int>(get_int(s, "sigma_iters", where, o.sigma_iters));
  o.sigma_tol = get_double(s, "sigma_tol", where, o.sigma_tol);
  o.stagnation_tol = get_double(s, "stagnation_tol", where, o.stagnation_tol);
  o.log10_lambda_min = get_double(s, "log10_lambda_min", where, o.log10_lambda_min);
  o.log10_lambda_max = get_double(s, "log10_lambda_max", where, o.log10_lambda_max);
  o.golden_evaluations = static_cast<int>(get_int(s, "golden_evaluations", where, o.golden_evaluations));
  if (s.contains("L0")) o.backtracking.L0 = get_double(s, "L0", where);
  o.backtracking.eta = get_double(s, "eta", where, o.backtracking.eta);

  const std::string rule = s.contains("lambda_rule") ? get_string(s, "lambda_rule", where) : "optimal";
  if (rule == "fixed") {
    if (!s.contains("lambda")) config_error("'" + where + "': lambda_rule = \"fixed\" needs 'lambda'");
    o.lambda_rule = LambdaRule::fixed(get_double(s, "lambda", where));
  } else if (rule == "sweep") {
    if (!s.contains("lambda_grid")) config_error("'" + where + "': lambda_rule = \"sweep\" needs 'lambda_grid'");
    o.lambda_rule = LambdaRule::sweep(get_double_list(s, "lambda_grid", where));
  } else if (rule == "optimal") {
    o.lambda_rule = LambdaRule::optimal();
  } else {
    config_error("'" + where + ".lambda_rule' must be fixed, optimal or sweep");
  }
  if (rule != "fixed" && s.contains("lambda")) config_error("'" + where + ".lambda' is only valid with the fixed rule");
  if (rule != "sweep" && s.contains("lambda_grid")) {
    config_error("'" + where + ".lambda_grid' is only valid with the sweep rule");
  }

  if (method == Method::GenTikhonov && s.contains("prior")) {
    const json& p = s.at("prior");
    const std::string pw = where + ".prior";
    reject_unknown(p, pw, {"nu", "ell", "sigma2"});
    mc.prior.nu = get_double(p, "nu", pw, mc.prior.nu);
    mc.prior.ell = get_double(p, "ell", pw, mc.prior.ell);
    mc.prior.sigma2 = get_double(p, "sigma2", pw, mc.prior.sigma2);
  }
  return mc;
}

ExperimentConfig from_json(const json& root) {
  reject_unknown(root, "<root>", {"grid", "phantom", "rays", "noise", "solvers", "output"});
  ExperimentConfig cfg;

  const json& g = section(root, "grid");
  reject_unknown(g, "grid", {"nx", "extent", "planes", "time_extent"});
  cfg.grid.nx = static_cast<int>(get_int(g, "nx", "grid", cfg.grid.nx));
  cfg.grid.extent = get_interval(g, "extent", "grid", cfg.grid.extent);
  cfg.grid.planes = static_cast<int>(get_int(g, "planes", "grid", cfg.grid.planes));
  cfg.grid.time_extent = get_interval(g, "time_extent", "grid", cfg.grid.time_extent);

  const json& p = section(root, "phantom");
  reject_unknown(p, "phantom", {"kind", "a", "c", "t0", "t1", "x", "y"});
  cfg.phantom.kind = with_context("phantom.kind", [&] { return phantom_kind_from_string(get_string(p, "kind", "phantom")); });
  cfg.phantom.a = get_double(p, "a", "phantom", cfg.phantom.a);
  cfg.phantom.c = get_double(p, "c", "phantom", cfg.phantom.c);
  cfg.phantom.t0 = get_double(p, "t0", "phantom", cfg.phantom.t0);
  cfg.phantom.t1 = get_double(p, "t1", "phantom", cfg.phantom.t1);
  cfg.phantom.x = get_double(p, "x", "phantom", cfg.phantom.x);
  cfg.phantom.y = get_double(p, "y", "phantom", cfg.phantom.y);

  const json& r = section(root, "rays");
  reject_unknown(r, "rays", {"mode", "eps_ray", "scale_by_segment_length"});
  if (r.contains("mode")) {
    cfg.rays.mode = with_context("rays.mode", [&] { return ray_mode_from_string(get_string(r, "mode", "rays")); });
  }
  if (r.contains("eps_ray")) cfg.rays.eps_ray = get_double(r, "eps_ray", "rays");
  cfg.rays.scale_by_segment_length = get_bool(r, "scale_by_segment_length", "rays", false);

  const json& n = section(root, "noise");
  reject_unknown(n, "noise", {"level", "seed"});
  cfg.noise.level = get_double(n, "level", "noise", cfg.noise.level);
  cfg.noise.seed = get_seed(n, "seed", "noise", cfg.noise.seed);

  if (root.contains("solvers")) {
    const json& s = root.at("solvers");
    reject_unknown(s, "solvers", {"landweber", "fista", "tikhonov", "gen_tikhonov"});
    for (Method m : kMethodOrder) {
      if (s.contains(section_name(m))) cfg.solvers.push_back(parse_method(m, s.at(section_name(m))));
    }
  }

  const json& o = section(root, "output");
  reject_unknown(o, "output", {"directory", "formats"});
  if (o.contains("directory")) cfg.output.directory = get_string(o, "directory", "output");
  if (o.contains("formats")) {
    const json& f = o.at("formats");
    if (!f.is_array()) config_error("'output.formats' must be an array");
    cfg.output.formats.clear();
    for (const auto& e : f) {
      if (!e.is_string()) config_error("'output.formats' must hold strings");
      cfg.output.formats.push_back(e.get<std::string>());
    }
  }

  cfg.validate();
  return cfg;
}

json method_to_json(const MethodConfig& mc) {
  const SolverOptions& o = mc.options;
  json s = {
      {"max_iters", o.max_iters},
      {"relaxation_factor", o.relaxation_factor},
      {"dp_tau", o.dp_tau},
      {"dp_enabled", o.dp_enabled},
      {"seed", o.seed},
      {"sigma_iters", o.sigma_iters},
      {"sigma_tol", o.sigma_tol},
      {"stagnation_tol", o.stagnation_tol},
      {"log10_lambda_min", o.log10_lambda_min},
      {"log10_lambda_max", o.log10_lambda_max},
      {"golden_evaluations", o.golden_evaluations},
      {"eta", o.backtracking.eta},
      {"lambda_rule", std::string(to_string(o.lambda_rule.kind))},
  };
  if (o.sigma1) s["sigma1"] = *o.sigma1;
  if (o.backtracking.L0) s["L0"] = *o.backtracking.L0;
  if (o.lambda_rule.kind == LambdaRule::Kind::Fixed) s["lambda"] = o.lambda_rule.value;
  if (o.lambda_rule.kind == LambdaRule::Kind::Sweep) s["lambda_grid"] = o.lambda_rule.grid;
  if (mc.method == Method::GenTikhonov) {
    s["prior"] = {{"nu", mc.prior.nu}, {"ell", mc.prior.ell}, {"sigma2", mc.prior.sigma2}};
  }
  return s;
}

json to_json_value(const ExperimentConfig& cfg) {
  json root;
  root["grid"] = {{"nx", cfg.grid.nx},
                  {"extent", {cfg.grid.extent.min, cfg.grid.extent.max}},
                  {"planes", cfg.grid.planes},
                  {"time_extent", {cfg.grid.time_extent.min, cfg.grid.time_extent.max}}};
  root["phantom"] = {{"kind", std::string(to_string(cfg.phantom.kind))},
                     {"a", cfg.phantom.a},
                     {"c", cfg.phantom.c},
                     {"t0", cfg.phantom.t0},
                     {"t1", cfg.phantom.t1},
                     {"x", cfg.phantom.x},
                     {"y", cfg.phantom.y}};
  root["rays"] = {{"mode", std::string(to_string(cfg.rays.mode))},
                  {"scale_by_segment_length", cfg.rays.scale_by_segment_length}};
  if (cfg.rays.eps_ray) root["rays"]["eps_ray"] = *cfg.rays.eps_ray;
  root["noise"] = {{"level", cfg.noise.level}, {"seed", cfg.noise.seed}};
  json solvers = json::object();
  for (const auto& mc : cfg.solvers) solvers[section_name(mc.method)] = method_to_json(mc);
  root["solvers"] = solvers;
  root["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
  return root;
}

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json obj = json::object();
    for (const auto& [k, v] : *t) obj[std::string(k.str())] = toml_to_json(v);
    return obj;
  }
  if (const auto* a = node.as_array()) {
    json arr = json::array();
    for (const auto& v : *a) arr.push_back(toml_to_json(v));
    return arr;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  config_error("unsupported TOML value type (dates and times are not used)");
}

void insert_toml(toml::table& table, const std::string& key, const json& v);

toml::array json_array_to_toml(const json& arr) {
  toml::array out;
  for (const auto& e : arr) {
    if (e.is_number_integer()) {
      out.push_back(e.get<std::int64_t>());
    } else if (e.is_number()) {
      out.push_back(e.get<double>());
    } else if (e.is_string()) {
      out.push_back(e.get<std::string>());
    } else if (e.is_boolean()) {
      out.push_back(e.get<bool>());
    } else {
      config_error("cannot express nested array value in TOML");
    }
  }
  return out;
}

void insert_toml(toml::table& table, const std::string& key, const json& v) {
  if (v.is_object()) {
    toml::table sub;
    for (const auto& [k, e] : v.items()) insert_toml(sub, k, e);
    table.insert(key, std::move(sub));
  } else if (v.is_array()) {
    table.insert(key, json_array_to_toml(v));
  } else if (v.is_boolean()) {
    table.insert(key, v.get<bool>());
  } else if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) config_error("'" + key + "' does not fit a TOML integer");
    table.insert(key, static_cast<std::int64_t>(u));
  } else if (v.is_number_integer()) {
    table.insert(key, v.get<std::int64_t>());
  } else if (v.is_number()) {
    table.insert(key, v.get<double>());
  } else if (v.is_string()) {
    table.insert(key, v.get<std::string>());
  } else {
    config_error("cannot express '" + key + "' in TOML");
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Landweber: return "landweber";
    case Method::Fista: return "fista";
    case Method::Tikhonov: return "tikhonov";
    case Method::GenTikhonov: return "gen-tikhonov";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (Method m : kMethodOrder) {
    if (name == to_string(m) || name == section_name(m)) return m;
  }
  config_error("unknown method '" + std::string(name) + "'");
}

SpaceTimeGrid GridConfig::build() const { return build_grid(nx, extent, planes, time_extent); }

RayPolicy RayConfig::policy() const {
  return mode == RayMode::NullShell ? RayPolicy::null_shell(eps_ray) : RayPolicy::cone_interior();
}

void ExperimentConfig::validate() const {
  with_context("grid", [&] { return grid.build(); });
  with_context("phantom", [&] {
    phantom.validate(grid.time_extent);
    return 0;
  });
  if (rays.eps_ray && !(*rays.eps_ray >= 0.0)) config_error("'rays.eps_ray' must be nonnegative");
  if (rays.eps_ray && rays.mode != RayMode::NullShell) config_error("'rays.eps_ray' only applies to null-shell rays");
  if (!(noise.level >= 0.0)) config_error("'noise.level' must be nonnegative");
  std::set<Method> seen;
  for (const auto& mc : solvers) {
    const std::string where = "solvers." + section_name(mc.method);
    if (!seen.insert(mc.method).second) config_error("duplicate solver section '" + where + "'");
    with_context(where, [&] {
      mc.options.validate();
      if (mc.method == Method::GenTikhonov) mc.prior.validate();
      return 0;
    });
  }
  if (output.directory.empty()) config_error("'output.directory' must not be empty");
  for (const auto& f : output.formats) {
    if (f != "csv" && f != "pgm" && f != "raw") config_error("unknown output format '" + f + "'");
  }
}

const MethodConfig* ExperimentConfig::find(Method method) const {
  for (const auto& mc : solvers) {
    if (mc.method == method) return &mc;
  }
  return nullptr;
}

ExperimentConfig parse_config_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  return from_json(root);
}

ExperimentConfig parse_config_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "invalid TOML: " << e.description() << " (line " << e.source().begin.line << ")";
    config_error(os.str());
  }
  return from_json(toml_to_json(table));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return path.extension() == ".json" ? parse_config_json(buf.str()) : parse_config_toml(buf.str());
}

std::string to_json(const ExperimentConfig& cfg) { return to_json_value(cfg).dump(2) + "\n"; }

std::string to_toml(const ExperimentConfig& cfg) {
  const json root = to_json_value(cfg);
  toml::table table;
  for (const auto& [k, v] : root.items()) insert_toml(table, k, v);
  std::ostringstream os;
  os << table << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string canonical = to_json_value(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

ExperimentConfig desk_example1(double c, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.grid = {25, {-3.0, 3.0}, 10, {0.0, 4.0}};
  cfg.phantom = Phantom::translating_circle(0.05, c);
  cfg.noise = {5.0, seed};
  for (Method m : {Method::Landweber, Method::Fista, Method::Tikhonov}) {
    MethodConfig mc;
    mc.method = m;
    mc.options.dp_enabled = false;
    cfg.solvers.push_back(mc);
  }
  cfg.output.directory = "out/example1-desk";
  return cfg;
}

}  // namespace lightray
