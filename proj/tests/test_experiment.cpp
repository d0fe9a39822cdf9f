// Copyright 2026 The sfsplace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"
#include "sfsplace/experiment.hpp"
#include "sfsplace/verify.hpp"

using namespace sfsplace;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::current_path() / "experiment_scratch" / name;
  fs::remove_all(p);
  return p;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.candidates.center = {0.0, 0.0};
  c.candidates.side = 2.0;
  c.candidates.count = 8;
  c.region_radius = 0.3;
  c.frequencies = {500.0};
  c.sources = 2;
  c.evaluation.grid_spacing = 0.02;
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("config round trip", "[experiment]") {
  for (const auto& cfg : {room_study_config(), verify::toy_config(), tiny_config()}) {
    const json doc = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(doc);
    CHECK(back == cfg);
    CHECK(config_to_json(back) == doc);
  }
}

TEST_CASE("config parsing forms", "[experiment]") {
  const json doc = json::parse(R"({
    "room": {"size": [6, 5], "reflection": [0.9, 0.8, 0.7, 0.6], "max_order": 4},
    "candidates": {"positions": [[-2, 0], [2, 0], [0, 2], [0, -2]]},
    "region": {"center": [0, 0], "radius": 0.4},
    "frequencies": {"start": 200, "stop": 600, "step": 200},
    "gamma": 2.0,
    "sources": 3,
    "method": "pressure-matching",
    "evaluation": {"angles_deg": {"start": -10, "stop": 10, "step": 5}}
  })");
  const auto c = config_from_json(doc);
  CHECK(c.frequencies == std::vector<double>{200.0, 400.0, 600.0});
  CHECK(c.gamma == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(c.evaluation.angles_deg.size() == 5);
  CHECK(c.room->reflection[kTop] == 0.6);
  CHECK(c.candidates.resolve().size() == 4);
  CHECK(c.method == Method::kPressureMatching);
}

TEST_CASE("invalid configurations", "[experiment]") {
  auto base = config_to_json(tiny_config());
  auto bad = [&](auto edit) {
    json d = base;
    edit(d);
    return d;
  };
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["sources"] = 9; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["frequencies"] = json::array(); })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["method"] = "magic"; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["region"]["radius"] = 1.5; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["room"] = {{"size", {1.5, 1.5}}}; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["gamma"] = {1.0, 2.0}; })), ConfigError);
  CHECK_THROWS_AS(config_from_json(bad([](json& d) { d["region"]["center"] = "x"; })), ConfigError);
}

TEST_CASE("environment overrides scalar keys", "[experiment]") {
  const json doc = config_to_json(tiny_config());
  ::setenv("SFSPLACE_REGION_RADIUS", "0.25", 1);
  ::setenv("SFSPLACE_SOURCES", "3", 1);
  ::setenv("SFSPLACE_BROADBAND", "true", 1);
  const auto c = load_config(doc);
  ::unsetenv("SFSPLACE_REGION_RADIUS");
  ::unsetenv("SFSPLACE_SOURCES");
  ::unsetenv("SFSPLACE_BROADBAND");
  CHECK(c.region_radius == 0.25);
  CHECK(c.sources == 3);
  CHECK(c.broadband);
  CHECK(load_config(doc) == tiny_config());
  ::setenv("SFSPLACE_SOURCES", "many", 1);
  CHECK_THROWS_AS(load_config(doc), ConfigError);
  ::unsetenv("SFSPLACE_SOURCES");
}

TEST_CASE("toy placement writes two indices and a three-entry trace", "[experiment]") {
  const auto cfg = tiny_config();
  const auto dir = scratch("place");
  const auto records = cmd_place(cfg, {dir, 1});
  REQUIRE(records.size() == 1);
  CHECK(records[0].indices.size() == 2);
  REQUIRE(records[0].cost_trace.size() == 3);
  CHECK(records[0].cost_trace[1] <= records[0].cost_trace[0]);
  CHECK(records[0].cost_trace[2] <= records[0].cost_trace[1]);
  CHECK(read_placement_csv(dir / "placement.csv") == records[0].indices);
  std::ifstream trace(dir / "cost_trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "step,cost");
  const auto resolved = load_config_file(dir / "config.resolved.json", false);
  CHECK(resolved == cfg);
}

TEST_CASE("empty angle list gives an empty table", "[experiment]") {
  auto cfg = tiny_config();
  cfg.evaluation.angles_deg.clear();
  const auto dir = scratch("empty");
  const auto rows = cmd_evaluate(cfg, run_placement(cfg), {dir, 1});
  CHECK(rows.empty());
  std::ifstream in(dir / "sdr.csv");
  std::string header;
  std::string next;
  std::getline(in, header);
  CHECK(header == "angle_deg,freq_hz,sdr_db,method");
  CHECK_FALSE(std::getline(in, next));
}

TEST_CASE("evaluation table and field files", "[experiment]") {
  auto cfg = tiny_config();
  cfg.evaluation.angles_deg = {-10.0, 0.0, 10.0};
  cfg.evaluation.write_fields = true;
  const auto dir = scratch("eval");
  const auto rows = cmd_evaluate(cfg, run_placement(cfg), {dir, 2});
  CHECK(rows.size() == 9);  // proposed, regular A, regular B
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.sdr_db));
    CHECK(r.sdr_db <= kSdrCapDb);
  }
  CHECK(fs::exists(dir / "field_proposed_500Hz_0deg.csv"));
  CHECK(fs::exists(dir / "field_proposed_500Hz_0deg_error.csv"));
  const auto meta = json::parse(std::ifstream(dir / "field_proposed_500Hz_0deg.json"));
  CHECK(meta.at("grid_spacing") == 0.02);
  CHECK(meta.at("freq_hz") == 500.0);
}

TEST_CASE("out-of-range placement indices are rejected", "[experiment]") {
  const auto cfg = tiny_config();
  std::vector<PlacementRecord> p{{"given", 0.0, {0, 8}, {}}};
  CHECK_THROWS_AS(cmd_evaluate(cfg, p, {scratch("bad"), 1}), ConfigError);
}

TEST_CASE("pressure-matching and mode-matching methods run", "[experiment]") {
  for (const auto m : {Method::kPressureMatching, Method::kModeMatching}) {
    auto cfg = tiny_config();
    cfg.method = m;
    cfg.evaluation.angles_deg = {0.0};
    const auto rows = cmd_evaluate(cfg, run_placement(cfg), {scratch(to_string(m)), 1});
    CHECK(rows.size() == 3);
  }
}

TEST_CASE("monotone traces and deterministic artifacts", "[experiment]") {
  const auto r = verify::check_monotone_deterministic(scratch("determinism"));
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("prior dump", "[experiment]") {
  const auto dir = scratch("priors");
  cmd_priors(tiny_config(), {dir, 1});
  CHECK(fs::exists(dir / "prior_mu_500Hz.csv"));
  CHECK(fs::exists(dir / "prior_sigma_500Hz.csv"));
}
