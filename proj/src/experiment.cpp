#include "hetcache/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>
#include <omp.h>

#include "hetcache/analytic.hpp"
#include "hetcache/config.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/monte_carlo.hpp"
#include "hetcache/version.hpp"

namespace hetcache {

std::string to_string(Engine e) { return e == Engine::Analytic ? "analytic" : "mc"; }

EngineSelection parse_engine_selection(std::string_view text) {
  if (text == "analytic") return EngineSelection::Analytic;
  if (text == "mc" || text == "monte_carlo") return EngineSelection::MonteCarlo;
  if (text == "both") return EngineSelection::Both;
  throw ValidationError("engine", "expected analytic | mc | both");
}

std::vector<Engine> engines_of(EngineSelection s) {
  switch (s) {
    case EngineSelection::Analytic: return {Engine::Analytic};
    case EngineSelection::MonteCarlo: return {Engine::MonteCarlo};
    case EngineSelection::Both: return {Engine::Analytic, Engine::MonteCarlo};
  }
  return {};
}

namespace {

double parse_number(std::string_view s, std::string_view context) {
  std::string text(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size())
    throw ValidationError("grid", "cannot parse number '" + text + "' in '" + std::string(context) + "'");
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
    const double a = parse_number(parts[1], text);
    const double b = parse_number(parts[2], text);
    const double nd = parse_number(parts[3], text);
    if (nd < 1 || std::nearbyint(nd) != nd)
      throw ValidationError("grid", "point count must be a positive integer in '" + std::string(text) + "'");
    const int n = static_cast<int>(nd);
    const bool log = parts[0] == "log";
    if (log && !(a > 0.0 && b > 0.0))
      throw ValidationError("grid", "log grid bounds must be positive in '" + std::string(text) + "'");
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
      const double u = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
      double v = log ? std::exp(std::log(a) + u * (std::log(b) - std::log(a))) : a + u * (b - a);
      if (k == 0) v = a;
      if (k == n - 1) v = b;
      if (log) {
        // Snap to exact decades so 1e-3 prints as 1e-3.
        const double e = std::log10(v);
        if (std::abs(e - std::nearbyint(e)) < 1e-12) v = std::pow(10.0, std::nearbyint(e));
      } else if (k > 0 && k < n - 1) {
        // Shed interpolation noise so lin:1:100:100 yields exact integers and
        // lin:0.05:0.95:19 yields 0.15 rather than 0.15000000000000002.
        v = a + k * ((b - a) / (n - 1));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        v = std::strtod(buf, nullptr);
      }
      out.push_back(v);
    }
    return out;
  }
  if (parts.size() != 1) throw ValidationError("grid", "expected list, log:a:b:n or lin:a:b:n");
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_number(item, text));
  if (out.empty()) throw ValidationError("grid", "grid must be nonempty");
  return out;
}

void SweepSpec::validate() const {
  for (const SweepAxis& a : axes) {
    if (a.values.empty()) throw ValidationError("sweep." + a.path, "grid must be nonempty");
    canonical_parameter_path(a.path);
    for (const LinkedParameter& l : a.linked) canonical_parameter_path(l.path);
  }
}

bool ResultTable::any_failed() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ResultRow& r) { return r.status != RowStatus::Ok; });
}

int ResultTable::exit_code() const {
  int code = 0;
  for (const ResultRow& r : rows) {
    if (r.status == RowStatus::NumericalFailed) return 2;
    if (r.status == RowStatus::ValidationFailed) code = 1;
  }
  return code;
}

namespace {

struct Failure {
  RowStatus status = RowStatus::Ok;
  std::string message;
};

template <class F>
Failure capture(F&& f) {
  try {
    f();
    return {};
  } catch (const ValidationError& e) {
    return {RowStatus::ValidationFailed, e.what()};
  } catch (const DomainError& e) {
    return {RowStatus::ValidationFailed, e.what()};
  } catch (const NumericalError& e) {
    return {RowStatus::NumericalFailed, e.what()};
  } catch (const std::exception& e) {
    return {RowStatus::NumericalFailed, e.what()};
  }
}

void apply_overrides(ScenarioConfig& cfg, const ParameterOverrides& o) {
  for (const auto& [path, value] : o) set_parameter(cfg, path, value);
}

struct Job {
  std::size_t sweep = 0;
  Engine engine = Engine::Analytic;
  std::vector<double> parameters;
  ScenarioConfig cfg;
  std::optional<ScenarioConfig> baseline;
  Failure setup;
};

// Memoized engine evaluation keyed by the serialized config.
class Evaluator {
 public:
  explicit Evaluator(int workers) : workers_(workers) {}

  // Coverage tables for every analytic config, computed concurrently.
  void prepare_tables(const std::vector<const ScenarioConfig*>& configs) {
    std::vector<const ScenarioConfig*> todo;
    for (const ScenarioConfig* c : configs) {
      const std::uint64_t fp = coverage_fingerprint(*c);
      if (tables_.count(fp) || pending_.count(fp)) continue;
      pending_[fp] = todo.size();
      todo.push_back(c);
    }
    std::vector<CoverageTable> tables(todo.size());
    std::vector<Failure> failures(todo.size());
    const long n = static_cast<long>(todo.size());
    const int threads = workers_ > 0 ? workers_ : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long k = 0; k < n; ++k)
      failures[k] = capture([&] { tables[k] = compute_coverage_table(*todo[k]); });
    for (const auto& [fp, k] : pending_) {
      if (failures[k].status == RowStatus::Ok)
        tables_[fp] = std::move(tables[k]);
      else
        table_failures_[fp] = failures[k];
    }
    pending_.clear();
  }

  Failure evaluate(const ScenarioConfig& cfg, Engine engine, MetricReport& out) {
    if (engine == Engine::Analytic) {
      const std::uint64_t fp = coverage_fingerprint(cfg);
      if (auto f = table_failures_.find(fp); f != table_failures_.end()) return f->second;
      auto t = tables_.find(fp);
      if (t == tables_.end()) {
        CoverageTable table;
        const Failure f = capture([&] { table = compute_coverage_table(cfg); });
        if (f.status != RowStatus::Ok) {
          table_failures_[fp] = f;
          return f;
        }
        t = tables_.emplace(fp, std::move(table)).first;
      }
      return capture([&] { out = analytic_report(cfg, t->second); });
    }
    const std::string key = serialize_config(cfg);
    if (auto m = mc_.find(key); m != mc_.end()) {
      out = m->second.first;
      return m->second.second;
    }
    const Failure f = capture([&] { out = run_simulation(cfg); });
    mc_[key] = {out, f};
    return f;
  }

 private:
  int workers_;
  std::map<std::uint64_t, std::size_t> pending_;
  std::map<std::uint64_t, CoverageTable> tables_;
  std::map<std::uint64_t, Failure> table_failures_;
  std::map<std::string, std::pair<MetricReport, Failure>> mc_;
};

}  // namespace

ResultTable run_experiment(const ScenarioConfig& base, const std::vector<SweepSpec>& sweeps) {
  base.validate();
  ResultTable table;
  table.num_tiers = base.num_tiers();
  std::map<std::string, std::size_t> column;
  for (const SweepSpec& s : sweeps) {
    s.validate();
    for (const SweepAxis& a : s.axes) {
      const std::string name = canonical_parameter_path(a.path);
      if (!column.count(name)) {
        column[name] = table.parameters.size();
        table.parameters.push_back(name);
      }
    }
  }

  std::vector<Job> jobs;
  for (std::size_t si = 0; si < sweeps.size(); ++si) {
    const SweepSpec& s = sweeps[si];
    std::size_t points = 1;
    for (const SweepAxis& a : s.axes) points *= a.values.size();
    for (std::size_t p = 0; p < points; ++p) {
      std::vector<std::size_t> idx(s.axes.size());
      std::size_t rem = p;
      for (std::size_t k = s.axes.size(); k-- > 0;) {
        idx[k] = rem % s.axes[k].values.size();
        rem /= s.axes[k].values.size();
      }
      Job point;
      point.sweep = si;
      point.cfg = base;
      point.parameters.assign(table.parameters.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t k = 0; k < s.axes.size(); ++k)
        point.parameters[column[canonical_parameter_path(s.axes[k].path)]] =
            s.axes[k].values[idx[k]];
      point.setup = capture([&] {
        apply_overrides(point.cfg, s.fixed);
        for (std::size_t k = 0; k < s.axes.size(); ++k) {
          const SweepAxis& a = s.axes[k];
          const double v = a.values[idx[k]];
          set_parameter(point.cfg, a.path, v);
          for (const LinkedParameter& l : a.linked)
            set_parameter(point.cfg, l.path, l.offset + l.scale * v);
        }
        if (s.ratio_baseline) {
          point.baseline = point.cfg;
          apply_overrides(*point.baseline, *s.ratio_baseline);
        }
      });
      for (Engine e : engines_of(s.engines)) {
        Job j = point;
        j.engine = e;
        jobs.push_back(std::move(j));
      }
    }
  }

  Evaluator eval(base.protocol.workers);
  std::vector<const ScenarioConfig*> analytic;
  for (const Job& j : jobs) {
    if (j.engine != Engine::Analytic || j.setup.status != RowStatus::Ok) continue;
    analytic.push_back(&j.cfg);
    if (j.baseline) analytic.push_back(&*j.baseline);
  }
  eval.prepare_tables(analytic);

  for (std::size_t n = 0; n < jobs.size(); ++n) {
    const Job& j = jobs[n];
    ResultRow row;
    row.index = n;
    row.group = sweeps[j.sweep].group;
    row.engine = j.engine;
    row.parameters = j.parameters;
    Failure f = j.setup;
    if (f.status == RowStatus::Ok) f = eval.evaluate(j.cfg, j.engine, row.report);
    if (f.status == RowStatus::Ok && j.baseline) {
      MetricReport ref;
      f = eval.evaluate(*j.baseline, j.engine, ref);
      if (f.status == RowStatus::Ok && ref.efficiency_defined && row.report.efficiency_defined &&
          ref.efficiency > 0.0)
        row.efficiency_ratio = row.report.efficiency / ref.efficiency;
    }
    row.status = f.status;
    row.error = f.message;
    if (f.status != RowStatus::Ok) row.report = MetricReport{};
    table.rows.push_back(std::move(row));
  }
  return table;
}

SearchResult grid_search(const ScenarioConfig& base, const std::vector<SweepAxis>& variables,
                         Engine engine) {
  if (variables.empty() || variables.size() > 3)
    throw ValidationError("search.variables", "1 to 3 variables required");
  SweepSpec spec;
  spec.group = "search";
  spec.engines = engine == Engine::Analytic ? EngineSelection::Analytic : EngineSelection::MonteCarlo;
  for (SweepAxis a : variables) {
    const std::string canon = canonical_parameter_path(a.path);
    const bool allowed = canon.ends_with(".cache.mpc_fraction") ||
                         canon.ends_with(".cache.cache_size") || canon.ends_with(".range_expansion");
    if (!allowed || canon.rfind("tiers[", 0) != 0)
      throw ValidationError("search." + a.path, "search variables are tier phi, S or rho");
    std::sort(a.values.begin(), a.values.end());
    a.values.erase(std::unique(a.values.begin(), a.values.end()), a.values.end());
    spec.axes.push_back(std::move(a));
  }
  SearchResult out;
  out.surface = run_experiment(base, {spec});
  for (const SweepAxis& a : spec.axes) out.variables.push_back(canonical_parameter_path(a.path));
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  for (const ResultRow& r : out.surface.rows) {
    if (r.status == RowStatus::ValidationFailed) throw ValidationError("search", r.error);
    if (r.status == RowStatus::NumericalFailed) throw NumericalError(r.error, 0.0);
    if (!r.report.efficiency_defined) continue;
    if (!found || r.report.efficiency > best) {
      found = true;
      best = r.report.efficiency;
      out.argmax = r.parameters;
      out.best = r.report;
    }
  }
  if (!found) throw UndefinedEfficiencyError("grid_search: efficiency undefined at every point");
  return out;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

Preset make_preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  const std::vector<double> kappas = {0.5, 1.0, 1.5};
  if (name == "fig1") {
    p.description = "coverage bound versus Monte Carlo coverage over the tier-2 SIR threshold";
    SweepSpec s;
    s.group = "fig1";
    s.engines = EngineSelection::Both;
    s.axes = {{"tiers[2].beta", {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}, {}}};
    p.sweeps.push_back(s);
  } else if (name == "fig2") {
    p.description = "backhaul, hit ratio, ASE, cost and efficiency versus small-cell density";
    SweepSpec s;
    s.group = "fig2";
    s.axes = {{"content.kappa", kappas, {}}, {"tiers[2].density", parse_grid("log:1e-4:1e2:7"), {}}};
    p.sweeps.push_back(s);
  } else if (name == "fig3") {
    p.description = "efficiency over the MPC fractions of both tiers";
    SweepSpec s;
    s.group = "fig3";
    const std::vector<double> phi = parse_grid("lin:0:1:5");
    s.axes = {{"content.kappa", kappas, {}}, {"tiers[1].phi", phi, {}}, {"tiers[2].phi", phi, {}}};
    p.sweeps.push_back(s);
  } else if (name == "fig4") {
    p.description = "efficiency over the small-cell cache size";
    SweepSpec s;
    s.group = "fig4";
    s.axes = {{"tiers[2].density", {1e-1, 1e1, 1e2}, {}}, {"tiers[2].S", parse_grid("lin:1:100:100"), {}}};
    p.sweeps.push_back(s);
  } else if (name == "fig5") {
    p.description = "efficiency gain of range expansion with rho_1 = 1 - rho_2, C_s = 0.001 C_bh";
    SweepSpec s;
    s.group = "fig5";
    s.fixed = {{"costs.C_s", 0.001}};
    s.axes = {{"tiers[2].density", {1e-3, 1e-1, 1.0, 1e2}, {}},
              {"tiers[2].rho", parse_grid("lin:0.05:0.95:19"), {{"tiers[1].rho", -1.0, 1.0}}}};
    s.ratio_baseline = ParameterOverrides{{"tiers[1].rho", 1.0}, {"tiers[2].rho", 1.0}};
    p.sweeps.push_back(s);
  } else {
    throw ValidationError("preset", "unknown preset '" + std::string(name) + "'; expected fig1..fig5");
  }
  return p;
}

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

std::string status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::ValidationFailed: return "validation_error";
    case RowStatus::NumericalFailed: return "numerical_error";
  }
  return "";
}

}  // namespace

void write_csv(const ResultTable& table, std::ostream& out) {
  std::vector<std::string> header = {"index", "group", "engine"};
  for (const std::string& p : table.parameters) header.push_back(p);
  for (const char* c :
       {"status", "error", "snapshots", "coverage", "coverage_err", "coverage_bound",
        "coverage_clamped", "coverage_any", "coverage_any_err", "p_hit", "p_hit_err", "p_bh",
        "p_bh_err", "p_bh_operational", "p_bh_operational_err", "ase", "ase_err", "cost",
        "cost_err", "efficiency", "efficiency_err", "efficiency_defined", "efficiency_ratio"})
    header.push_back(c);
  for (std::size_t i = 1; i <= table.num_tiers; ++i) {
    header.push_back("tier" + std::to_string(i) + "_coverage");
    header.push_back("tier" + std::to_string(i) + "_coverage_err");
  }
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << quote(header[k]);
  out << "\n";

  for (const ResultRow& r : table.rows) {
    const MetricReport& m = r.report;
    const MetricUncertainty& u = m.uncertainty;
    const bool ok = r.status == RowStatus::Ok;
    std::vector<std::string> f = {std::to_string(r.index), quote(r.group), to_string(r.engine)};
    for (double v : r.parameters) f.push_back(format_number(v));
    f.push_back(status_name(r.status));
    f.push_back(quote(r.error));
    auto num = [&](double v) { f.push_back(ok ? format_number(v) : ""); };
    auto flag = [&](bool b) { f.push_back(ok ? (b ? "1" : "0") : ""); };
    f.push_back(ok ? std::to_string(m.snapshots) : "");
    num(m.coverage);
    num(u.coverage);
    num(m.coverage_bound);
    flag(m.coverage_clamped);
    num(m.coverage_any);
    num(u.coverage_any);
    num(m.p_hit);
    num(u.p_hit);
    num(m.p_bh);
    num(u.p_bh);
    num(m.p_bh_operational);
    num(u.p_bh_operational);
    num(m.ase);
    num(u.ase);
    num(m.cost);
    num(u.cost);
    f.push_back(ok && m.efficiency_defined ? format_number(m.efficiency) : "");
    f.push_back(ok && m.efficiency_defined ? format_number(u.efficiency) : "");
    flag(m.efficiency_defined);
    f.push_back(r.efficiency_ratio ? format_number(*r.efficiency_ratio) : "");
    for (std::size_t i = 0; i < table.num_tiers; ++i) {
      num(i < m.per_tier_coverage.size() ? m.per_tier_coverage[i] : 0.0);
      num(i < u.per_tier_coverage.size() ? u.per_tier_coverage[i] : 0.0);
    }
    for (std::size_t k = 0; k < f.size(); ++k) out << (k ? "," : "") << f[k];
    out << "\n";
  }
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream ss;
  write_csv(table, ss);
  return ss.str();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string metadata_json(const ResultTable& table, const ScenarioConfig& base,
                          std::string_view experiment) {
  nlohmann::json j;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(base)));
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["hetcache_version"] = kVersion;
  j["engine_versions"] = {{"analytic", kAnalyticEngineVersion},
                          {"monte_carlo", kMonteCarloEngineVersion}};
  j["experiment"] = std::string(experiment);
  j["config_hash"] = hash;
  j["master_seed"] = base.protocol.master_seed;
  j["num_snapshots"] = base.protocol.num_snapshots;
  j["parameters"] = table.parameters;
  j["rows"] = table.rows.size();
  std::size_t failed = 0;
  for (const ResultRow& r : table.rows) failed += r.status != RowStatus::Ok;
  j["failed_rows"] = failed;
  j["config"] = nlohmann::json::parse(serialize_config(base));
  return j.dump(2) + "\n";
}

}  // namespace hetcache
