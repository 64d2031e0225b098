#include "hetcache/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hetcache/errors.hpp"

namespace hetcache {

namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) throw ValidationError(join(path, it.key()), "unknown key");
  }
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, "expected a number");
  return j.get<double>();
}

template <class Int>
Int as_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return static_cast<Int>(j.get<std::uint64_t>());
    const std::int64_t v = j.get<std::int64_t>();
    if constexpr (std::is_unsigned_v<Int>) {
      if (v < 0) throw ValidationError(path, "expected a nonnegative integer");
    }
    return static_cast<Int>(v);
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::nearbyint(v) == v && std::abs(v) < 9.0e15) return static_cast<Int>(v);
  }
  throw ValidationError(path, "expected an integer");
}

std::optional<double> as_radius(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return std::nullopt;
    throw ValidationError(path, "expected a number or \"auto\"");
  }
  return as_double(j, path);
}

json radius_json(const std::optional<double>& r) { return r ? json(*r) : json("auto"); }

template <class Enum>
Enum as_enum(const json& j, const std::string& path,
             std::initializer_list<std::pair<const char*, Enum>> names) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    for (const auto& [name, value] : names)
      if (s == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) allowed += (allowed.empty() ? "" : " | ") + std::string(name);
  throw ValidationError(path, "expected one of " + allowed);
}

const std::initializer_list<std::pair<const char*, DensityUnit>> kDensityUnits = {
    {"per_km2", DensityUnit::PerKm2}, {"per_m2", DensityUnit::PerM2}};
const std::initializer_list<std::pair<const char*, ContentEvaluation>> kEvaluations = {
    {"all_weighted", ContentEvaluation::AllWeighted}, {"sampled", ContentEvaluation::Sampled}};
const std::initializer_list<std::pair<const char*, AlzerArgument>> kAlzer = {
    {"normalized", AlzerArgument::Normalized}, {"as_printed", AlzerArgument::AsPrinted}};

void read_radio(const json& j, const std::string& path, TierRadioParams& r) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"tx_power", "pathloss_exp_los", "pathloss_exp_nlos", "intercept_los",
                  "intercept_nlos", "near_field_dist", "far_field_dist", "nakagami_los",
                  "nakagami_nlos", "sir_threshold"});
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = as_double(j.at(key), join(path, key));
  };
  num("tx_power", r.tx_power);
  num("pathloss_exp_los", r.pathloss_exp_los);
  num("pathloss_exp_nlos", r.pathloss_exp_nlos);
  num("intercept_los", r.intercept_los);
  num("intercept_nlos", r.intercept_nlos);
  num("near_field_dist", r.near_field_dist);
  num("far_field_dist", r.far_field_dist);
  num("sir_threshold", r.sir_threshold);
  if (j.contains("nakagami_los"))
    r.nakagami_los = as_integer<int>(j.at("nakagami_los"), join(path, "nakagami_los"));
  if (j.contains("nakagami_nlos"))
    r.nakagami_nlos = as_integer<int>(j.at("nakagami_nlos"), join(path, "nakagami_nlos"));
}

void read_tier(const json& j, const std::string& path, TierParams& t) {
  expect_object(j, path);
  reject_unknown(j, path, {"density", "range_expansion", "radio", "cache"});
  if (j.contains("density")) t.density = as_double(j.at("density"), join(path, "density"));
  if (j.contains("range_expansion"))
    t.range_expansion = as_double(j.at("range_expansion"), join(path, "range_expansion"));
  if (j.contains("radio")) read_radio(j.at("radio"), join(path, "radio"), t.radio);
  if (j.contains("cache")) {
    const json& c = j.at("cache");
    const std::string cp = join(path, "cache");
    expect_object(c, cp);
    reject_unknown(c, cp, {"cache_size", "mpc_fraction"});
    if (c.contains("cache_size"))
      t.cache.cache_size = as_integer<int>(c.at("cache_size"), join(cp, "cache_size"));
    if (c.contains("mpc_fraction"))
      t.cache.mpc_fraction = as_double(c.at("mpc_fraction"), join(cp, "mpc_fraction"));
  }
}

ScenarioConfig from_json(const json& j) {
  ScenarioConfig cfg = default_scenario();
  expect_object(j, "");
  reject_unknown(j, "",
                 {"density_unit", "rate_log_base", "content", "costs", "protocol", "integration",
                  "tiers"});
  if (j.contains("density_unit"))
    cfg.density_unit = as_enum(j.at("density_unit"), "density_unit", kDensityUnits);
  if (j.contains("rate_log_base"))
    cfg.rate_log_base = as_double(j.at("rate_log_base"), "rate_log_base");

  if (j.contains("content")) {
    const json& c = j.at("content");
    expect_object(c, "content");
    reject_unknown(c, "content", {"library_size", "popularity_exponent"});
    if (c.contains("library_size"))
      cfg.content.library_size = as_integer<int>(c.at("library_size"), "content.library_size");
    if (c.contains("popularity_exponent"))
      cfg.content.popularity_exponent =
          as_double(c.at("popularity_exponent"), "content.popularity_exponent");
  }
  if (j.contains("costs")) {
    const json& c = j.at("costs");
    expect_object(c, "costs");
    reject_unknown(c, "costs", {"backhaul_unit_cost", "cache_unit_cost"});
    if (c.contains("backhaul_unit_cost"))
      cfg.costs.backhaul_unit_cost = as_double(c.at("backhaul_unit_cost"), "costs.backhaul_unit_cost");
    if (c.contains("cache_unit_cost"))
      cfg.costs.cache_unit_cost = as_double(c.at("cache_unit_cost"), "costs.cache_unit_cost");
  }
  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    expect_object(p, "protocol");
    reject_unknown(p, "protocol",
                   {"num_snapshots", "region_radius", "los_region_radius", "auto_min_expected_bs",
                    "auto_support_fraction", "master_seed", "content_evaluation", "workers"});
    SimulationProtocol& out = cfg.protocol;
    if (p.contains("num_snapshots"))
      out.num_snapshots = as_integer<std::int64_t>(p.at("num_snapshots"), "protocol.num_snapshots");
    if (p.contains("region_radius"))
      out.region_radius = as_radius(p.at("region_radius"), "protocol.region_radius");
    if (p.contains("los_region_radius"))
      out.los_region_radius = as_radius(p.at("los_region_radius"), "protocol.los_region_radius");
    if (p.contains("auto_min_expected_bs"))
      out.auto_min_expected_bs =
          as_double(p.at("auto_min_expected_bs"), "protocol.auto_min_expected_bs");
    if (p.contains("auto_support_fraction"))
      out.auto_support_fraction =
          as_double(p.at("auto_support_fraction"), "protocol.auto_support_fraction");
    if (p.contains("master_seed"))
      out.master_seed = as_integer<std::uint64_t>(p.at("master_seed"), "protocol.master_seed");
    if (p.contains("content_evaluation"))
      out.content_evaluation =
          as_enum(p.at("content_evaluation"), "protocol.content_evaluation", kEvaluations);
    if (p.contains("workers")) out.workers = as_integer<int>(p.at("workers"), "protocol.workers");
  }
  if (j.contains("integration")) {
    const json& s = j.at("integration");
    expect_object(s, "integration");
    reject_unknown(s, "integration",
                   {"rel_tol", "abs_tol", "outer_truncation_radius", "inner_truncation_radius",
                    "max_subdivisions", "alzer_argument"});
    IntegrationSettings& out = cfg.integration;
    if (s.contains("rel_tol")) out.rel_tol = as_double(s.at("rel_tol"), "integration.rel_tol");
    if (s.contains("abs_tol")) out.abs_tol = as_double(s.at("abs_tol"), "integration.abs_tol");
    if (s.contains("outer_truncation_radius"))
      out.outer_truncation_radius =
          as_radius(s.at("outer_truncation_radius"), "integration.outer_truncation_radius");
    if (s.contains("inner_truncation_radius"))
      out.inner_truncation_radius =
          as_radius(s.at("inner_truncation_radius"), "integration.inner_truncation_radius");
    if (s.contains("max_subdivisions"))
      out.max_subdivisions = as_integer<int>(s.at("max_subdivisions"), "integration.max_subdivisions");
    if (s.contains("alzer_argument"))
      out.alzer_argument = as_enum(s.at("alzer_argument"), "integration.alzer_argument", kAlzer);
  }
  if (j.contains("tiers")) {
    const json& tiers = j.at("tiers");
    if (!tiers.is_array()) throw ValidationError("tiers", "expected an array");
    const std::vector<TierParams> preset = cfg.tiers;
    cfg.tiers.clear();
    for (std::size_t i = 0; i < tiers.size(); ++i) {
      TierParams t = i < preset.size() ? preset[i] : TierParams{};
      read_tier(tiers[i], "tiers[" + std::to_string(i + 1) + "]", t);
      cfg.tiers.push_back(t);
    }
  }
  cfg.validate();
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["density_unit"] = to_string(cfg.density_unit);
  j["rate_log_base"] = cfg.rate_log_base;
  j["content"] = {{"library_size", cfg.content.library_size},
                  {"popularity_exponent", cfg.content.popularity_exponent}};
  j["costs"] = {{"backhaul_unit_cost", cfg.costs.backhaul_unit_cost},
                {"cache_unit_cost", cfg.costs.cache_unit_cost}};
  const SimulationProtocol& p = cfg.protocol;
  j["protocol"] = {{"num_snapshots", p.num_snapshots},
                   {"region_radius", radius_json(p.region_radius)},
                   {"los_region_radius", radius_json(p.los_region_radius)},
                   {"auto_min_expected_bs", p.auto_min_expected_bs},
                   {"auto_support_fraction", p.auto_support_fraction},
                   {"master_seed", p.master_seed},
                   {"content_evaluation", to_string(p.content_evaluation)},
                   {"workers", p.workers}};
  const IntegrationSettings& s = cfg.integration;
  j["integration"] = {{"rel_tol", s.rel_tol},
                      {"abs_tol", s.abs_tol},
                      {"outer_truncation_radius", radius_json(s.outer_truncation_radius)},
                      {"inner_truncation_radius", radius_json(s.inner_truncation_radius)},
                      {"max_subdivisions", s.max_subdivisions},
                      {"alzer_argument", to_string(s.alzer_argument)}};
  json tiers = json::array();
  for (const TierParams& t : cfg.tiers) {
    const TierRadioParams& r = t.radio;
    tiers.push_back({{"density", t.density},
                     {"range_expansion", t.range_expansion},
                     {"radio",
                      {{"tx_power", r.tx_power},
                       {"pathloss_exp_los", r.pathloss_exp_los},
                       {"pathloss_exp_nlos", r.pathloss_exp_nlos},
                       {"intercept_los", r.intercept_los},
                       {"intercept_nlos", r.intercept_nlos},
                       {"near_field_dist", r.near_field_dist},
                       {"far_field_dist", r.far_field_dist},
                       {"nakagami_los", r.nakagami_los},
                       {"nakagami_nlos", r.nakagami_nlos},
                       {"sir_threshold", r.sir_threshold}}},
                     {"cache",
                      {{"cache_size", t.cache.cache_size},
                       {"mpc_fraction", t.cache.mpc_fraction}}}});
  }
  j["tiers"] = tiers;
  return j;
}

const std::map<std::string, std::string>& tier_aliases() {
  static const std::map<std::string, std::string> m = {
      {"lambda", "density"},
      {"rho", "range_expansion"},
      {"S", "cache.cache_size"},
      {"cache.S", "cache.cache_size"},
      {"cache_size", "cache.cache_size"},
      {"phi", "cache.mpc_fraction"},
      {"cache.phi", "cache.mpc_fraction"},
      {"mpc_fraction", "cache.mpc_fraction"},
      {"beta", "radio.sir_threshold"},
      {"sir_threshold", "radio.sir_threshold"},
      {"P", "radio.tx_power"},
      {"tx_power", "radio.tx_power"},
  };
  return m;
}

const std::map<std::string, std::string>& global_aliases() {
  static const std::map<std::string, std::string> m = {
      {"kappa", "content.popularity_exponent"},
      {"content.kappa", "content.popularity_exponent"},
      {"F", "content.library_size"},
      {"content.F", "content.library_size"},
      {"C_bh", "costs.backhaul_unit_cost"},
      {"costs.C_bh", "costs.backhaul_unit_cost"},
      {"C_s", "costs.cache_unit_cost"},
      {"costs.C_s", "costs.cache_unit_cost"},
      {"seed", "protocol.master_seed"},
      {"snapshots", "protocol.num_snapshots"},
  };
  return m;
}

struct ParsedPath {
  bool tier = false;
  bool all_tiers = false;
  std::size_t tier_index = 0;  // 0-based
  std::vector<std::string> keys;
  std::string canonical;
};

std::vector<std::string> split_dots(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '.')) out.push_back(part);
  return out;
}

ParsedPath parse_path(std::string_view text) {
  const std::string path(text);
  ParsedPath out;
  std::string rest;
  if (path.rfind("tiers[", 0) == 0) {
    const auto close = path.find(']');
    if (close == std::string::npos || close + 1 >= path.size() || path[close + 1] != '.')
      throw ValidationError(path, "malformed tier path; expected tiers[i].field");
    const std::string index = path.substr(6, close - 6);
    out.tier = true;
    if (index == "*") {
      out.all_tiers = true;
    } else {
      std::size_t used = 0;
      long v = 0;
      try {
        v = std::stol(index, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != index.size() || v < 1)
        throw ValidationError(path, "tier index must be a positive integer or *");
      out.tier_index = static_cast<std::size_t>(v - 1);
    }
    rest = path.substr(close + 2);
    const auto alias = tier_aliases().find(rest);
    if (alias != tier_aliases().end()) rest = alias->second;
    out.canonical = "tiers[" + index + "]." + rest;
  } else {
    rest = path;
    const auto alias = global_aliases().find(rest);
    if (alias != global_aliases().end()) rest = alias->second;
    out.canonical = rest;
  }
  out.keys = split_dots(rest);
  if (out.keys.empty()) throw ValidationError(path, "empty parameter path");
  return out;
}

json* resolve(json& root, const std::vector<std::string>& keys, const std::string& path) {
  json* node = &root;
  for (const std::string& k : keys) {
    if (!node->is_object() || !node->contains(k))
      throw ValidationError(path, "parameter path does not resolve in the config");
    node = &(*node)[k];
  }
  if (!node->is_number())
    throw ValidationError(path, "parameter path must address a numeric field");
  return node;
}

json number_like(const json& old, double value) {
  if (old.is_number_integer()) {
    if (std::nearbyint(value) != value)
      throw DomainError("value " + std::to_string(value) + " is not an integer");
    if (old.is_number_unsigned()) return json(static_cast<std::uint64_t>(value));
    return json(static_cast<std::int64_t>(value));
  }
  return json(value);
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text) {
  bool blank = true;
  for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
  if (blank) {
    ScenarioConfig cfg = default_scenario();
    cfg.validate();
    return cfg;
  }
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError("<config>", std::string("parse error: ") + e.what());
  }
  return from_json(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

void set_parameter(ScenarioConfig& cfg, std::string_view path, double value) {
  const ParsedPath p = parse_path(path);
  json j = to_json(cfg);
  const std::string where(path);
  try {
    if (p.tier) {
      json& tiers = j["tiers"];
      if (!p.all_tiers && p.tier_index >= tiers.size())
        throw ValidationError(where, "tier index out of range");
      for (std::size_t i = 0; i < tiers.size(); ++i) {
        if (!p.all_tiers && i != p.tier_index) continue;
        json* node = resolve(tiers[i], p.keys, where);
        *node = number_like(*node, value);
      }
    } else {
      json* node = resolve(j, p.keys, where);
      *node = number_like(*node, value);
    }
  } catch (const DomainError& e) {
    throw ValidationError(where, e.what());
  }
  cfg = from_json(j);
}

double get_parameter(const ScenarioConfig& cfg, std::string_view path) {
  const ParsedPath p = parse_path(path);
  json j = to_json(cfg);
  const std::string where(path);
  if (p.tier) {
    json& tiers = j["tiers"];
    const std::size_t i = p.all_tiers ? 0 : p.tier_index;
    if (i >= tiers.size()) throw ValidationError(where, "tier index out of range");
    return resolve(tiers[i], p.keys, where)->get<double>();
  }
  return resolve(j, p.keys, where)->get<double>();
}

std::string canonical_parameter_path(std::string_view path) { return parse_path(path).canonical; }

}  // namespace hetcache
