#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "hetcache/config.hpp"
#include "hetcache/errors.hpp"

using namespace hetcache;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "<accepted>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults describe the two-tier reference scenario") {
  const ScenarioConfig cfg = default_scenario();
  REQUIRE(cfg.num_tiers() == 2);
  CHECK(cfg.content.library_size == 100);
  CHECK(cfg.content.popularity_exponent == 1.0);
  CHECK(cfg.tiers[0].density == 1e-3);
  CHECK(cfg.tiers[1].density == 1e-1);
  CHECK(cfg.density_unit == DensityUnit::PerKm2);
  CHECK(cfg.density_per_m2(0) == doctest::Approx(1e-9).epsilon(1e-15));
  CHECK(cfg.tiers[0].radio.tx_power == 40.0);
  CHECK(cfg.tiers[1].radio.tx_power == 4.0);
  CHECK(cfg.tiers[0].radio.sir_threshold == 2.0);
  CHECK(cfg.tiers[1].radio.sir_threshold == 4.0);
  CHECK(cfg.tiers[0].radio.near_field_dist == 80.0);
  CHECK(cfg.tiers[0].radio.far_field_dist == 164.0);
  CHECK(cfg.tiers[1].radio.near_field_dist == 16.0);
  CHECK(cfg.tiers[1].radio.far_field_dist == 36.0);
  for (const TierParams& t : cfg.tiers) {
    CHECK(t.radio.pathloss_exp_los == 2.4);
    CHECK(t.radio.pathloss_exp_nlos == 4.0);
    CHECK(t.radio.nakagami_los == 2);
    CHECK(t.radio.nakagami_nlos == 1);
    CHECK(t.cache.mpc_fraction == 1.0);
    CHECK(t.range_expansion == 1.0);
  }
  CHECK(cfg.tiers[0].cache.cache_size == 20);
  CHECK(cfg.tiers[1].cache.cache_size == 5);
  CHECK(cfg.costs.backhaul_unit_cost == 1.0);
  CHECK(cfg.costs.cache_unit_cost == 0.01);
  CHECK(cfg.rate(1) == doctest::Approx(std::log2(5.0)).epsilon(1e-15));
  CHECK_FALSE(cfg.protocol.region_radius.has_value());
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("blank and empty-object configs yield the defaults") {
  CHECK(parse_config_text("") == default_scenario());
  CHECK(parse_config_text("  \n") == default_scenario());
  CHECK(parse_config_text("{}") == default_scenario());
  CHECK(parse_config_text("// just a comment\n{}") == default_scenario());
}

TEST_CASE("serialization round-trips exactly") {
  ScenarioConfig cfg = default_scenario();
  cfg.tiers[1].density = 0.123456789012345;
  cfg.tiers[0].cache.mpc_fraction = 0.3;
  cfg.protocol.region_radius = 12345.5;
  cfg.protocol.master_seed = 0xFFFFFFFFFFFFFFFFULL;
  cfg.protocol.content_evaluation = ContentEvaluation::Sampled;
  cfg.integration.alzer_argument = AlzerArgument::AsPrinted;
  cfg.integration.outer_truncation_radius = 1e7;
  cfg.density_unit = DensityUnit::PerM2;
  cfg.tiers[0].density = 1e-9;
  cfg.tiers[1].density = 1e-7;
  const std::string text = serialize_config(cfg);
  CHECK(parse_config_text(text) == cfg);
  CHECK(serialize_config(parse_config_text(text)) == text);
}

TEST_CASE("partial tiers merge onto the preset at the same index") {
  const ScenarioConfig cfg =
      parse_config_text(R"({"tiers": [{}, {"density": 10, "cache": {"cache_size": 7}}]})");
  CHECK(cfg.tiers[0] == default_scenario().tiers[0]);
  CHECK(cfg.tiers[1].density == 10.0);
  CHECK(cfg.tiers[1].cache.cache_size == 7);
  CHECK(cfg.tiers[1].radio == default_scenario().tiers[1].radio);
  const ScenarioConfig one = parse_config_text(R"({"tiers": [{"density": 2}]})");
  CHECK(one.num_tiers() == 1);
  CHECK(one.tiers[0].density == 2.0);
}

TEST_CASE("a third tier starts from generic parameters") {
  const ScenarioConfig cfg = parse_config_text(
      R"({"tiers": [{}, {}, {"density": 50, "radio": {"tx_power": 0.5, "sir_threshold": 3}, "cache": {"cache_size": 2}}]})");
  REQUIRE(cfg.num_tiers() == 3);
  CHECK(cfg.tiers[2].radio.tx_power == 0.5);
  CHECK(cfg.tiers[2].cache.cache_size == 2);
}

TEST_CASE("auto radii and enum spellings") {
  const ScenarioConfig cfg = parse_config_text(
      R"({"protocol": {"region_radius": "auto", "los_region_radius": "auto", "content_evaluation": "sampled"},
          "integration": {"alzer_argument": "as_printed", "outer_truncation_radius": 5e6},
          "density_unit": "per_m2", "tiers": [{"density": 1e-9}, {"density": 1e-7}]})");
  CHECK_FALSE(cfg.protocol.region_radius.has_value());
  CHECK(cfg.protocol.content_evaluation == ContentEvaluation::Sampled);
  CHECK(cfg.integration.alzer_argument == AlzerArgument::AsPrinted);
  CHECK(*cfg.integration.outer_truncation_radius == 5e6);
  CHECK(cfg.density_per_m2(1) == 1e-7);
}

TEST_CASE("integral floats are accepted for integer fields") {
  CHECK(parse_config_text(R"({"content": {"library_size": 50.0}})").content.library_size == 50);
  CHECK(field_of(R"({"content": {"library_size": 50.5}})") == "content.library_size");
}

TEST_CASE("rejections name the offending field") {
  CHECK(field_of(R"({"foo": 1})") == "foo");
  CHECK(message_of(R"({"foo": 1})") == "foo: unknown key");
  CHECK(field_of(R"({"tiers": [{"radio": {"bar": 1}}]})") == "tiers[1].radio.bar");
  CHECK(field_of(R"({"tiers": [{}, {"density": -1}]})") == "tiers[2].density");
  CHECK(field_of(R"({"tiers": [{"radio": {"pathloss_exp_los": 2}}]})") ==
        "tiers[1].radio.pathloss_exp_los");
  CHECK(message_of(R"({"tiers": [{"radio": {"pathloss_exp_nlos": 9}}]})").find("alpha^N <= 8") !=
        std::string::npos);
  CHECK(field_of(R"({"tiers": [{"cache": {"cache_size": 150}}]})") == "tiers[1].cache.cache_size");
  CHECK(field_of(R"({"tiers": [{"cache": {"mpc_fraction": 1.5}}]})") ==
        "tiers[1].cache.mpc_fraction");
  CHECK(field_of(R"({"tiers": [{"radio": {"nakagami_los": 1, "nakagami_nlos": 2}}]})") != "<accepted>");
  CHECK(field_of(R"({"tiers": [{"range_expansion": 0}]})") == "tiers[1].range_expansion");
  CHECK(field_of(R"({"content": {"library_size": 0}})") == "content.library_size");
  CHECK(field_of(R"({"content": {"popularity_exponent": -0.1}})") == "content.popularity_exponent");
  CHECK(field_of(R"({"costs": {"backhaul_unit_cost": 0}})") == "costs.backhaul_unit_cost");
  CHECK(field_of(R"({"costs": {"cache_unit_cost": -1}})") == "costs.cache_unit_cost");
  CHECK(field_of(R"({"protocol": {"num_snapshots": 0}})") == "protocol.num_snapshots");
  CHECK(field_of(R"({"protocol": {"region_radius": "huge"}})") == "protocol.region_radius");
  CHECK(field_of(R"({"protocol": {"content_evaluation": "some"}})") == "protocol.content_evaluation");
  CHECK(field_of(R"({"integration": {"rel_tol": 0}})") == "integration.rel_tol");
  CHECK(field_of(R"({"density_unit": "per_mile2"})") == "density_unit");
  CHECK(field_of(R"({"tiers": {}})") == "tiers");
  CHECK(field_of(R"({"tiers": []})") != "<accepted>");
  CHECK(field_of("{not json") == "<config>");
}

TEST_CASE("cache size above the library size reports both values") {
  const std::string m = message_of(R"({"tiers": [{"cache": {"cache_size": 150}}]})");
  CHECK(m.find("S = 150") != std::string::npos);
  CHECK(m.find("F = 100") != std::string::npos);
}

TEST_CASE("parameter paths and aliases") {
  ScenarioConfig cfg = default_scenario();
  set_parameter(cfg, "tiers[2].lambda", 3.0);
  CHECK(cfg.tiers[1].density == 3.0);
  set_parameter(cfg, "tiers[2].S", 9);
  CHECK(cfg.tiers[1].cache.cache_size == 9);
  set_parameter(cfg, "tiers[1].phi", 0.25);
  CHECK(cfg.tiers[0].cache.mpc_fraction == 0.25);
  set_parameter(cfg, "tiers[*].beta", 1.5);
  CHECK(cfg.tiers[0].radio.sir_threshold == 1.5);
  CHECK(cfg.tiers[1].radio.sir_threshold == 1.5);
  set_parameter(cfg, "tiers[2].rho", 0.5);
  CHECK(cfg.tiers[1].range_expansion == 0.5);
  set_parameter(cfg, "kappa", 0.7);
  CHECK(cfg.content.popularity_exponent == 0.7);
  set_parameter(cfg, "C_s", 0.001);
  CHECK(cfg.costs.cache_unit_cost == 0.001);
  set_parameter(cfg, "seed", 42);
  CHECK(cfg.protocol.master_seed == 42);
  set_parameter(cfg, "snapshots", 100);
  CHECK(cfg.protocol.num_snapshots == 100);
  set_parameter(cfg, "tiers[1].radio.nakagami_los", 3);
  CHECK(cfg.tiers[0].radio.nakagami_los == 3);
  CHECK(get_parameter(cfg, "tiers[2].density") == 3.0);
  CHECK(get_parameter(cfg, "F") == 100.0);
  CHECK(canonical_parameter_path("tiers[2].S") == "tiers[2].cache.cache_size");
  CHECK(canonical_parameter_path("kappa") == "content.popularity_exponent");
}

TEST_CASE("invalid parameter updates are rejected and leave the config unchanged") {
  ScenarioConfig cfg = default_scenario();
  const ScenarioConfig before = cfg;
  CHECK_THROWS_AS(set_parameter(cfg, "tiers[2].S", 150), ValidationError);
  CHECK_THROWS_AS(set_parameter(cfg, "tiers[3].density", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(cfg, "tiers[0].density", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(cfg, "nonsense", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(cfg, "tiers[2].density", -1.0), ValidationError);
  CHECK_THROWS(set_parameter(cfg, "tiers[2].S", 2.5));
  CHECK(cfg == before);
}

TEST_CASE("config files load from disk") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "hetcache_test_config.json";
  {
    std::ofstream out(path);
    out << "{\n  // dense small cells\n  \"tiers\": [{}, {\"density\": 100}]\n}\n";
  }
  CHECK(load_config(path).tiers[1].density == 100.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(dir / "hetcache_missing_config.json"), ValidationError);
}

}  // TEST_SUITE
