#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "tbmcg/config.hpp"
#include "tbmcg/errors.hpp"

using namespace tbmcg;
using nlohmann::json;

namespace {

const std::filesystem::path kPresets = TBMCG_PRESET_DIR;

json minimal_sysid() {
  return json::parse(R"({
    "schema_version": 1, "experiment": "sysid", "runs": 2, "iterations": 10,
    "filter_length": 4,
    "noise": {"kind": "alpha_stable", "alpha": 1.8, "scale": 1.0},
    "algorithms": [{"label": "a", "kind": "tbmcg", "c": 20},
                   {"label": "b", "kind": "cg"}]
  })");
}

ExperimentConfig parse(const json& j) { return parse_config(j, kPresets); }

}  // namespace

TEST_CASE("every preset parses and round-trips") {
  for (const char* name : {"fig3a", "fig3b", "fig4a", "fig4b", "fig5", "fig6"}) {
    CAPTURE(name);
    const auto cfg = load_config(kPresets / (std::string(name) + ".json"));
    const json resolved = to_json(cfg);
    const auto again = parse(resolved);
    CHECK(to_json(again) == resolved);
    CHECK(experiment_kind(again) == experiment_kind(cfg));
  }
  CHECK(experiment_kind(load_config(kPresets / "fig3a.json")) == "sweep-c");
  CHECK(experiment_kind(load_config(kPresets / "fig5.json")) == "anc");
}

TEST_CASE("preset contents") {
  const auto b = std::get<SysidConfig>(load_config(kPresets / "fig3b.json"));
  CHECK(b.runs == 100);
  CHECK(b.iterations == 5000);
  CHECK(b.filter_length == 10);
  REQUIRE(b.algorithms.size() == 5);
  CHECK(b.algorithms[0].kind == AlgorithmKind::tbmcg);
  CHECK(b.algorithms[0].c == 20.0);

  const auto a = std::get<SweepConfig>(load_config(kPresets / "fig3a.json"));
  CHECK(a.c_values == std::vector<double>{5.0, 20.0, 100.0});

  const auto f5 = std::get<AncConfig>(load_config(kPresets / "fig5.json"));
  CHECK(f5.filter_length == 128);
  REQUIRE(f5.reference.segments.size() == 3);
  CHECK(f5.reference.segments[0].noise.alpha == 1.5);
  CHECK(f5.reference.segments[1].start == 5000);
  CHECK(f5.plant.primary_path == default_anc_plant().primary_path);
}

TEST_CASE("config errors") {
  auto j = minimal_sysid();
  CHECK_NOTHROW(parse(j));

  j["itterations"] = 3;
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["schema_version"] = 2;
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["experiment"] = "kalman";
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["algorithms"][1]["label"] = "a";
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["algorithms"][0]["mu"] = "fast";
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["runs"] = -1;
  CHECK_THROWS_AS(parse(j), ConfigError);

  j = minimal_sysid();
  j["noise"]["alpha"] = 2.5;
  CHECK_THROWS_AS(parse(j), ConfigError);

  auto sweep = minimal_sysid();
  sweep.erase("algorithms");
  sweep["experiment"] = "sweep-c";
  sweep["c_values"] = json::array();
  CHECK_THROWS_AS(parse(sweep), ConfigError);
  sweep["c_values"] = {5, -1};
  CHECK_THROWS_AS(parse(sweep), ConfigError);

  const json anc = {{"experiment", "anc"}, {"algorithms", json::array()}};
  CHECK_THROWS_AS(parse(anc), ConfigError);

  CHECK_THROWS_AS(load_config(kPresets / "no_such_preset.json"), IoError);
}

TEST_CASE("infinite threshold is spelled inf") {
  auto j = minimal_sysid();
  j["algorithms"][0]["c"] = "inf";
  const auto cfg = std::get<SysidConfig>(parse(j));
  CHECK(std::isinf(cfg.algorithms[0].c));
  CHECK(to_json(ExperimentConfig{cfg})["algorithms"][0]["c"] == "inf");
}

TEST_CASE("config hash") {
  const auto r = to_json(parse(minimal_sysid()));
  const auto h = config_hash(r);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(to_json(parse(minimal_sysid()))) == h);

  auto cfg = parse(minimal_sysid());
  override_seed(cfg, 99);
  CHECK(config_hash(to_json(cfg)) != h);

  // Parallelism does not change results, so it stays out of the hash.
  auto par = parse(minimal_sysid());
  override_jobs(par, 7);
  CHECK(config_hash(to_json(par)) == h);
}

TEST_CASE("overrides") {
  auto cfg = parse(minimal_sysid());
  override_runs(cfg, 3);
  override_iterations(cfg, 50);
  const auto& s = std::get<SysidConfig>(cfg);
  CHECK(s.runs == 3);
  CHECK(s.iterations == 50);
  CHECK_THROWS_AS(override_runs(cfg, 0), ConfigError);
  CHECK_THROWS_AS(override_iterations(cfg, 0), ConfigError);
}
