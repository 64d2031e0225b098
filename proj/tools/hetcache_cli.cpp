// Command-line front end: single runs, sweeps, grid searches and presets.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/errors.hpp"
#include "hetcache/experiment.hpp"
#include "hetcache/version.hpp"

using namespace hetcache;

namespace {

struct CommonOptions {
  std::string config;
  std::string engine = "analytic";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> snapshots;
  std::optional<int> workers;
  std::string out;
  std::string format = "csv";
  std::vector<std::string> params;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool engine) {
  cmd->add_option("--config", o.config, "Scenario file (JSON); defaults when omitted");
  if (engine)
    cmd->add_option("--engine", o.engine, "analytic | mc | both")
        ->check(CLI::IsMember({"analytic", "mc", "both"}));
  cmd->add_option("--seed", o.seed, "Monte Carlo master seed");
  cmd->add_option("--snapshots", o.snapshots, "Monte Carlo snapshot count");
  cmd->add_option("--workers", o.workers, "OpenMP workers (0 = runtime default)");
  cmd->add_option("--out", o.out, "CSV output path (a .meta.json sidecar is written next to it)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv"}));
  cmd->add_option("--param", o.params, "Override PATH=VALUE, e.g. tiers[2].density=10");
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError(what, "expected PATH=VALUE, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

ScenarioConfig build_config(const CommonOptions& o) {
  ScenarioConfig cfg = o.config.empty() ? parse_config_text("") : load_config(o.config);
  if (o.seed) cfg.protocol.master_seed = *o.seed;
  if (o.snapshots) cfg.protocol.num_snapshots = *o.snapshots;
  if (o.workers) cfg.protocol.workers = *o.workers;
  for (const std::string& p : o.params) {
    const auto [path, value] = split_assignment(p, "--param");
    const std::vector<double> v = parse_grid(value);
    if (v.size() != 1) throw ValidationError("--param", "expected a single value for " + path);
    set_parameter(cfg, path, v.front());
  }
  cfg.validate();
  return cfg;
}

// "PATH=GRID" with optional linked parameters "PATH=GRID;LINKED:SCALE:OFFSET".
SweepAxis parse_axis(const std::string& text) {
  const auto semi = text.find(';');
  const auto [path, grid] = split_assignment(text.substr(0, semi), "--var");
  SweepAxis axis{path, parse_grid(grid), {}};
  std::size_t pos = semi;
  while (pos != std::string::npos) {
    const auto next = text.find(';', pos + 1);
    const std::string link = text.substr(pos + 1, next == std::string::npos ? next : next - pos - 1);
    const auto c1 = link.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : link.find(':', c1 + 1);
    if (c2 == std::string::npos)
      throw ValidationError("--var", "linked parameter must read PATH:SCALE:OFFSET, got '" + link + "'");
    axis.linked.push_back({link.substr(0, c1), std::stod(link.substr(c1 + 1, c2 - c1 - 1)),
                           std::stod(link.substr(c2 + 1))});
    pos = next;
  }
  return axis;
}

int emit(const ResultTable& table, const ScenarioConfig& cfg, const CommonOptions& o,
         const std::string& experiment) {
  if (o.out.empty()) {
    write_csv(table, std::cout);
  } else {
    std::ofstream csv(o.out, std::ios::binary);
    if (!csv) throw ValidationError("--out", "cannot write " + o.out);
    write_csv(table, csv);
    std::ofstream meta(o.out + ".meta.json", std::ios::binary);
    meta << metadata_json(table, cfg, experiment);
  }
  for (const ResultRow& r : table.rows)
    if (r.status != RowStatus::Ok) std::cerr << "row " << r.index << ": " << r.error << "\n";
  return table.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-enabled HetNet caching-efficiency simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, search_opts, preset_opts;
  std::vector<std::string> sweep_vars, search_vars, baseline;
  std::string preset_name;

  CLI::App* run = app.add_subcommand("run", "Evaluate one scenario");
  add_common(run, run_opts, true);

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep parameters over grids");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--var", sweep_vars,
                    "PATH=GRID[;LINKED:SCALE:OFFSET]; GRID is a,b,c | log:a:b:n | lin:a:b:n")
      ->required();
  sweep->add_option("--ratio-baseline", baseline,
                    "PATH=VALUE overrides defining the efficiency_ratio reference point");

  CLI::App* search = app.add_subcommand("search", "Maximize efficiency over tier phi / S / rho");
  add_common(search, search_opts, true);
  search->add_option("--var", search_vars, "PATH=GRID (up to three)")->required();

  CLI::App* preset = app.add_subcommand("preset", "Run a figure preset");
  add_common(preset, preset_opts, false);
  preset->add_option("name", preset_name, "fig1 | fig2 | fig3 | fig4 | fig5")
      ->required()
      ->check(CLI::IsMember(preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const ScenarioConfig cfg = build_config(run_opts);
      SweepSpec s;
      s.group = "run";
      s.engines = parse_engine_selection(run_opts.engine);
      return emit(run_experiment(cfg, {s}), cfg, run_opts, "run");
    }
    if (*sweep) {
      const ScenarioConfig cfg = build_config(sweep_opts);
      SweepSpec s;
      s.group = "sweep";
      s.engines = parse_engine_selection(sweep_opts.engine);
      for (const std::string& v : sweep_vars) s.axes.push_back(parse_axis(v));
      if (!baseline.empty()) {
        ParameterOverrides o;
        for (const std::string& b : baseline) {
          const auto [path, value] = split_assignment(b, "--ratio-baseline");
          o.emplace_back(path, std::stod(value));
        }
        s.ratio_baseline = o;
      }
      return emit(run_experiment(cfg, {s}), cfg, sweep_opts, "sweep");
    }
    if (*search) {
      const ScenarioConfig cfg = build_config(search_opts);
      std::vector<SweepAxis> vars;
      for (const std::string& v : search_vars) vars.push_back(parse_axis(v));
      const EngineSelection sel = parse_engine_selection(search_opts.engine);
      if (sel == EngineSelection::Both)
        throw ValidationError("--engine", "search uses a single engine");
      const SearchResult r =
          grid_search(cfg, vars, sel == EngineSelection::Analytic ? Engine::Analytic : Engine::MonteCarlo);
      std::cerr << "argmax";
      for (std::size_t k = 0; k < r.variables.size(); ++k) {
        const auto col = std::find(r.surface.parameters.begin(), r.surface.parameters.end(),
                                   r.variables[k]) - r.surface.parameters.begin();
        std::cerr << " " << r.variables[k] << "=" << r.argmax[col];
      }
      std::cerr << " efficiency=" << r.best.efficiency << "\n";
      return emit(r.surface, cfg, search_opts, "search");
    }
    if (*preset) {
      const ScenarioConfig cfg = build_config(preset_opts);
      const Preset p = make_preset(preset_name);
      std::cerr << p.name << ": " << p.description << "\n";
      return emit(run_experiment(cfg, p.sweeps), cfg, preset_opts, p.name);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const UndefinedEfficiencyError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
