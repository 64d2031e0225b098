#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hetcache/metrics.hpp"
#include "hetcache/scenario.hpp"

namespace hetcache {

enum class Engine { Analytic, MonteCarlo };
enum class EngineSelection { Analytic, MonteCarlo, Both };

std::string to_string(Engine e);
/// "analytic", "mc" (or "monte_carlo"), "both".
EngineSelection parse_engine_selection(std::string_view text);
std::vector<Engine> engines_of(EngineSelection s);

/// Grid text: "1,2,4" (explicit list), "log:a:b:n" (n log-spaced points from a
/// to b inclusive) or "lin:a:b:n".
std::vector<double> parse_grid(std::string_view text);

/// A parameter set to `offset + scale * v` whenever the axis takes value v,
/// e.g. rho_1 = 1 - rho_2.
struct LinkedParameter {
  std::string path;
  double scale = 1.0;
  double offset = 0.0;
};

struct SweepAxis {
  std::string path;
  std::vector<double> values;
  std::vector<LinkedParameter> linked;
};

using ParameterOverrides = std::vector<std::pair<std::string, double>>;

/// Cartesian product of the axes (last axis varies fastest). No axes means a
/// single evaluation of the fixed configuration.
struct SweepSpec {
  std::string group;
  std::vector<SweepAxis> axes;
  EngineSelection engines = EngineSelection::Analytic;
  /// Applied to the base config before the axes.
  ParameterOverrides fixed;
  /// When set, each row also reports efficiency / efficiency(point with these
  /// overrides applied), computed with the same engine.
  std::optional<ParameterOverrides> ratio_baseline;

  void validate() const;
};

enum class RowStatus { Ok, ValidationFailed, NumericalFailed };

struct ResultRow {
  std::size_t index = 0;
  std::string group;
  Engine engine = Engine::Analytic;
  /// Values of ResultTable::parameters; NaN where the sweep lacks that axis.
  std::vector<double> parameters;
  RowStatus status = RowStatus::Ok;
  std::string error;
  MetricReport report;
  std::optional<double> efficiency_ratio;
};

struct ResultTable {
  std::vector<std::string> parameters;
  std::size_t num_tiers = 0;
  std::vector<ResultRow> rows;

  bool any_failed() const;
  /// 0 when every row succeeded, 2 if a numerical failure occurred, else 1.
  int exit_code() const;
};

/// Evaluates every sweep point with every selected engine. Analytic points run
/// concurrently (coverage tables shared between points with identical radio
/// inputs); Monte Carlo points run one after another, each parallel inside.
/// Rows appear in sweep order, then grid order, then engine order. Failures
/// are recorded on the row and the run continues.
ResultTable run_experiment(const ScenarioConfig& base, const std::vector<SweepSpec>& sweeps);

struct SearchResult {
  std::vector<std::string> variables;
  std::vector<double> argmax;
  MetricReport best;
  ResultTable surface;
};

/// Exhaustive maximization of efficiency over up to three variables. Grids are
/// visited in ascending lexicographic order and only a strictly larger value
/// replaces the incumbent, so ties go to the lexicographically smallest point.
/// Any failed point fails the search.
SearchResult grid_search(const ScenarioConfig& base, const std::vector<SweepAxis>& variables,
                         Engine engine = Engine::Analytic);

struct Preset {
  std::string name;
  std::string description;
  std::vector<SweepSpec> sweeps;
};

/// "fig1" .. "fig5".
Preset make_preset(std::string_view name);
std::vector<std::string> preset_names();

/// Fixed column set (see README); numbers in shortest round-trip form.
void write_csv(const ResultTable& table, std::ostream& out);
std::string to_csv(const ResultTable& table);

/// Sidecar JSON: schema and engine versions, config hash, seed, row counts.
std::string metadata_json(const ResultTable& table, const ScenarioConfig& base,
                          std::string_view experiment);

/// FNV-1a over serialize_config(cfg).
std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace hetcache
