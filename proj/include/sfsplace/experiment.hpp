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

// Configuration-driven experiments: placement, evaluation and output files.
//
// Configuration documents are JSON. Lengths are meters, frequencies Hz and
// angles degrees; everything is converted to radians on load. Any scalar key
// can be overridden from the environment as SFSPLACE_<PATH>, where PATH is
// the dotted key path upper-cased with '.' replaced by '_' (for example
// SFSPLACE_REGION_RADIUS=0.4 or SFSPLACE_SOURCES=16).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfsplace/baselines.hpp"
#include "sfsplace/error.hpp"
#include "sfsplace/geometry.hpp"
#include "sfsplace/parallel.hpp"
#include "sfsplace/placement.hpp"
#include "sfsplace/room.hpp"
#include "sfsplace/synthesis.hpp"
#include "sfsplace/wavefield.hpp"

namespace sfsplace {

using json = nlohmann::json;

enum class Method { kWeightedModeMatching, kModeMatching, kPressureMatching };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::kWeightedModeMatching: return "wmm";
    case Method::kModeMatching: return "mode-matching";
    case Method::kPressureMatching: return "pressure-matching";
  }
  return "wmm";
}

inline Method parse_method(const std::string& s) {
  if (s == "wmm") return Method::kWeightedModeMatching;
  if (s == "mode-matching") return Method::kModeMatching;
  if (s == "pressure-matching") return Method::kPressureMatching;
  throw ConfigError("unknown method '" + s + "' (expected wmm, mode-matching or pressure-matching)");
}

struct RoomConfig {
  double size_x = 5.0;
  double size_y = 4.0;
  std::array<double, 4> reflection{0.8, 0.8, 0.8, 0.8};
  int max_order = 10;

  RoomModel model() const { return {size_x, size_y, reflection, max_order}; }
  friend bool operator==(const RoomConfig&, const RoomConfig&) = default;
};

struct CandidateConfig {
  // Either a square boundary (side > 0) or an explicit list.
  Point2 center;
  double side = 0.0;
  int count = 0;
  std::vector<Point2> positions;

  std::vector<Point2> resolve() const {
    if (!positions.empty()) return positions;
    return square_boundary_candidates(center, side, count);
  }
  friend bool operator==(const CandidateConfig&, const CandidateConfig&) = default;
};

struct EvaluationConfig {
  std::vector<double> angles_deg;
  std::vector<double> frequencies;  // empty: same as placement frequencies
  double grid_spacing = 0.01;
  bool write_fields = false;
  std::vector<double> field_angles_deg{0.0};
  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

struct ExperimentConfig {
  double sound_speed = kDefaultSoundSpeed;
  std::optional<RoomConfig> room;
  CandidateConfig candidates;
  Point2 region_center;
  double region_radius = 0.5;
  double prior_angle_min_deg = -45.0;
  double prior_angle_max_deg = 45.0;
  double prior_amplitude = 1.0;
  std::vector<double> frequencies;
  std::vector<double> gamma;  // one per frequency; empty means all 1
  bool broadband = false;
  int sources = 20;
  std::optional<double> min_relative_decrease;
  SynthesisConfig lambdas;
  Method method = Method::kWeightedModeMatching;
  double control_spacing = 0.05;  // pressure matching only
  bool regular_a = true;
  bool regular_b = true;
  EvaluationConfig evaluation;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  CircularRegion region() const { return {region_center, region_radius}; }
  DirectionRangePrior prior() const {
    return {deg_to_rad(prior_angle_min_deg), deg_to_rad(prior_angle_max_deg), {prior_amplitude, 0.0}};
  }
  Acoustics acoustics() const { return room ? Acoustics(room->model()) : Acoustics(); }
  double gamma_for(std::size_t i) const { return gamma.empty() ? 1.0 : gamma[i]; }
  const std::vector<double>& evaluation_frequencies() const {
    return evaluation.frequencies.empty() ? frequencies : evaluation.frequencies;
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  void validate() const;
};

namespace detail {

inline std::vector<double> frequency_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_number()) return {j.get<double>()};
  if (j.is_object()) {
    if (j.contains("list")) return j.at("list").get<std::vector<double>>();
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = j.at("step").get<double>();
    if (!(step > 0.0) || stop < start) throw ConfigError("frequency range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
  }
  throw ConfigError("frequencies must be a number, a list or {start, stop, step}");
}

inline std::vector<double> angle_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object()) {
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = j.at("step").get<double>();
    if (!(step > 0.0) || stop < start) throw ConfigError("angle range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
  }
  throw ConfigError("angles must be a list or {start, stop, step}");
}

inline Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("points are written as [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json point_to(Point2 p) { return json::array({p.x, p.y}); }

// Apply SFSPLACE_<PATH> overrides to every scalar leaf of `doc`.
inline void apply_env_overrides(json& doc, const std::string& prefix) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::string key = it.key();
    for (char& c : key) c = (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const std::string name = prefix + "_" + key;
    auto& value = it.value();
    if (value.is_object()) {
      apply_env_overrides(value, name);
      continue;
    }
    if (value.is_array()) continue;
    const char* env = std::getenv(name.c_str());
    if (env == nullptr) continue;
    const std::string text(env);
    try {
      if (value.is_boolean()) {
        value = (text == "1" || text == "true" || text == "TRUE" || text == "yes");
      } else if (value.is_number_integer() || value.is_number_unsigned()) {
        value = std::stoll(text);
      } else if (value.is_number()) {
        value = std::stod(text);
      } else if (value.is_null()) {
        value = json::parse(text);
      } else {
        value = text;
      }
    } catch (const std::exception& e) {
      throw ConfigError("environment override " + name + "='" + text + "': " + e.what());
    }
  }
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  if (!(sound_speed > 0.0)) throw ConfigError("sound_speed must be > 0");
  if (!(region_radius > 0.0)) throw ConfigError("region.radius must be > 0");
  if (frequencies.empty()) throw ConfigError("at least one frequency is required");
  for (double f : frequencies) {
    if (!(f > 0.0)) throw ConfigError("frequencies must be > 0");
  }
  for (double f : evaluation.frequencies) {
    if (!(f > 0.0)) throw ConfigError("evaluation frequencies must be > 0");
  }
  if (!gamma.empty() && gamma.size() != frequencies.size()) {
    throw ConfigError("gamma must have one weight per frequency");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw ConfigError("gamma weights must be > 0");
  }
  if (!(prior_angle_min_deg < prior_angle_max_deg)) throw ConfigError("prior.angle_min_deg must be < angle_max_deg");
  lambdas.validate();
  if (!(evaluation.grid_spacing > 0.0)) throw ConfigError("evaluation.grid_spacing must be > 0");
  if (!(control_spacing > 0.0)) throw ConfigError("control_spacing must be > 0");
  if (!candidates.positions.empty() && (candidates.side != 0.0 || candidates.count != 0)) {
    throw ConfigError("candidates: give either square {side, count} or positions, not both");
  }
  if (candidates.positions.empty() && (!(candidates.side > 0.0) || candidates.count < 1)) {
    throw ConfigError("candidates: square boundary needs side > 0 and count >= 1");
  }
  const auto cands = candidates.resolve();
  if (sources < 0 || sources > static_cast<int>(cands.size())) {
    throw ConfigError("sources must lie in [0, number of candidates]");
  }
  const CircularRegion reg = region();
  for (const auto& c : cands) {
    if (distance(c, region_center) <= region_radius) throw ConfigError("candidate inside the target region");
  }
  if (room) {
    const RoomModel model = room->model();
    for (const auto& c : cands) {
      if (!model.strictly_inside(c)) throw ConfigError("candidate outside the room");
    }
    const double reach = region_radius;
    if (std::abs(region_center.x) + reach >= 0.5 * model.size_x ||
        std::abs(region_center.y) + reach >= 0.5 * model.size_y) {
      throw ConfigError("target region extends outside the room");
    }
  }
  (void)reg;
}

/// Parse a configuration document. Missing keys take their defaults.
inline ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  try {
    c.sound_speed = doc.value("sound_speed", c.sound_speed);
    if (doc.contains("room") && !doc.at("room").is_null()) {
      const auto& r = doc.at("room");
      RoomConfig rc;
      if (r.contains("size")) {
        const Point2 s = detail::point_from(r.at("size"));
        rc.size_x = s.x;
        rc.size_y = s.y;
      }
      if (r.contains("reflection")) {
        const auto& b = r.at("reflection");
        if (b.is_number()) {
          rc.reflection.fill(b.get<double>());
        } else {
          const auto v = b.get<std::vector<double>>();
          if (v.size() != 4) throw ConfigError("room.reflection must be a number or 4 values [left, right, bottom, top]");
          std::copy(v.begin(), v.end(), rc.reflection.begin());
        }
      }
      rc.max_order = r.value("max_order", rc.max_order);
      c.room = rc;
    }
    if (doc.contains("candidates")) {
      const auto& cj = doc.at("candidates");
      if (cj.contains("positions")) {
        for (const auto& p : cj.at("positions")) c.candidates.positions.push_back(detail::point_from(p));
      } else {
        const auto& sq = cj.contains("square") ? cj.at("square") : cj;
        if (sq.contains("center")) c.candidates.center = detail::point_from(sq.at("center"));
        c.candidates.side = sq.value("side", 0.0);
        c.candidates.count = sq.value("count", 0);
      }
    }
    if (doc.contains("region")) {
      const auto& rj = doc.at("region");
      if (rj.contains("center")) c.region_center = detail::point_from(rj.at("center"));
      c.region_radius = rj.value("radius", c.region_radius);
    }
    if (doc.contains("prior")) {
      const auto& pj = doc.at("prior");
      c.prior_angle_min_deg = pj.value("angle_min_deg", c.prior_angle_min_deg);
      c.prior_angle_max_deg = pj.value("angle_max_deg", c.prior_angle_max_deg);
      c.prior_amplitude = pj.value("amplitude", c.prior_amplitude);
    }
    if (doc.contains("frequencies")) c.frequencies = detail::frequency_list(doc.at("frequencies"));
    if (doc.contains("gamma")) {
      const auto& g = doc.at("gamma");
      if (g.is_number()) {
        c.gamma.assign(c.frequencies.size(), g.get<double>());
      } else if (!g.is_null()) {
        c.gamma = g.get<std::vector<double>>();
      }
    }
    c.broadband = doc.value("broadband", c.broadband);
    c.sources = doc.value("sources", c.sources);
    if (doc.contains("min_relative_decrease") && !doc.at("min_relative_decrease").is_null()) {
      c.min_relative_decrease = doc.at("min_relative_decrease").get<double>();
    }
    c.lambdas.lambda_select = doc.value("lambda_select", c.lambdas.lambda_select);
    c.lambdas.lambda_synth_scale = doc.value("lambda_synth_scale", c.lambdas.lambda_synth_scale);
    c.method = parse_method(doc.value("method", to_string(c.method)));
    c.control_spacing = doc.value("control_spacing", c.control_spacing);
    if (doc.contains("baselines")) {
      const auto& b = doc.at("baselines");
      c.regular_a = b.value("regular_a", c.regular_a);
      c.regular_b = b.value("regular_b", c.regular_b);
    }
    if (doc.contains("evaluation")) {
      const auto& e = doc.at("evaluation");
      if (e.contains("angles_deg")) c.evaluation.angles_deg = detail::angle_list(e.at("angles_deg"));
      if (e.contains("frequencies") && !e.at("frequencies").is_null()) {
        c.evaluation.frequencies = detail::frequency_list(e.at("frequencies"));
      }
      c.evaluation.grid_spacing = e.value("grid_spacing", c.evaluation.grid_spacing);
      c.evaluation.write_fields = e.value("write_fields", c.evaluation.write_fields);
      if (e.contains("field_angles_deg")) c.evaluation.field_angles_deg = detail::angle_list(e.at("field_angles_deg"));
    }
    c.output_dir = doc.value("output_dir", c.output_dir);
    c.seed = doc.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  c.validate();
  return c;
}

/// Fully resolved document; parsing it yields an equal configuration.
inline json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["sound_speed"] = c.sound_speed;
  if (c.room) {
    doc["room"] = {{"size", json::array({c.room->size_x, c.room->size_y})},
                   {"reflection", c.room->reflection},
                   {"max_order", c.room->max_order}};
  } else {
    doc["room"] = nullptr;
  }
  if (!c.candidates.positions.empty()) {
    json pts = json::array();
    for (const auto& p : c.candidates.positions) pts.push_back(detail::point_to(p));
    doc["candidates"] = {{"positions", pts}};
  } else {
    doc["candidates"] = {{"square", {{"center", detail::point_to(c.candidates.center)},
                                     {"side", c.candidates.side},
                                     {"count", c.candidates.count}}}};
  }
  doc["region"] = {{"center", detail::point_to(c.region_center)}, {"radius", c.region_radius}};
  doc["prior"] = {{"angle_min_deg", c.prior_angle_min_deg},
                  {"angle_max_deg", c.prior_angle_max_deg},
                  {"amplitude", c.prior_amplitude}};
  doc["frequencies"] = c.frequencies;
  doc["gamma"] = c.gamma.empty() ? json(nullptr) : json(c.gamma);
  doc["broadband"] = c.broadband;
  doc["sources"] = c.sources;
  doc["min_relative_decrease"] = c.min_relative_decrease ? json(*c.min_relative_decrease) : json(nullptr);
  doc["lambda_select"] = c.lambdas.lambda_select;
  doc["lambda_synth_scale"] = c.lambdas.lambda_synth_scale;
  doc["method"] = to_string(c.method);
  doc["control_spacing"] = c.control_spacing;
  doc["baselines"] = {{"regular_a", c.regular_a}, {"regular_b", c.regular_b}};
  doc["evaluation"] = {{"angles_deg", c.evaluation.angles_deg},
                       {"frequencies", c.evaluation.frequencies.empty() ? json(nullptr) : json(c.evaluation.frequencies)},
                       {"grid_spacing", c.evaluation.grid_spacing},
                       {"write_fields", c.evaluation.write_fields},
                       {"field_angles_deg", c.evaluation.field_angles_deg}};
  doc["output_dir"] = c.output_dir;
  doc["seed"] = c.seed;
  return doc;
}

/// Parse, resolve defaults, then apply SFSPLACE_* environment overrides.
inline ExperimentConfig load_config(const json& doc, bool env_overrides = true) {
  ExperimentConfig c = config_from_json(doc);
  if (!env_overrides) return c;
  json resolved = config_to_json(c);
  detail::apply_env_overrides(resolved, "SFSPLACE");
  return config_from_json(resolved);
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path, bool env_overrides = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return load_config(doc, env_overrides);
}

/// The reverberant-room study: 5.0 x 4.0 m room with wall reflection 0.8,
/// 200 candidates on a 3.0 m square, a 0.5 m disc at (0.5, 0.3), 20
/// loudspeakers, plane waves from -45 to 45 degrees, 100..2000 Hz.
inline ExperimentConfig room_study_config() {
  ExperimentConfig c;
  c.room = RoomConfig{};
  c.candidates.center = {0.0, 0.0};
  c.candidates.side = 3.0;
  c.candidates.count = 200;
  c.region_center = {0.5, 0.3};
  c.region_radius = 0.5;
  for (int f = 100; f <= 2000; f += 100) c.frequencies.push_back(f);
  c.gamma.assign(c.frequencies.size(), 1.0);
  c.broadband = true;
  c.sources = 20;
  for (int a = -45; a <= 45; ++a) c.evaluation.angles_deg.push_back(a);
  c.output_dir = "room_study";
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Per-frequency problem data.

/// Everything a placement or evaluation needs at one frequency. Grid
/// transfer columns are computed on demand and cached.
class FrequencyContext {
 public:
  FrequencyContext(const ExperimentConfig& cfg, double hz, int threads = 1)
      : config_(&cfg),
        acoustics_(cfg.acoustics()),
        freq_(hz, cfg.sound_speed),
        expansion_(ExpansionConfig::for_region(cfg.region(), freq_)),
        candidates_(cfg.candidates.resolve()),
        threads_(threads) {
    const CircularRegion region = cfg.region();
    switch (cfg.method) {
      case Method::kWeightedModeMatching:
      case Method::kModeMatching: {
        transfer_ = transfer_coeff_matrix(acoustics_, candidates_, expansion_, freq_, threads).matrix;
        weight_ = cfg.method == Method::kWeightedModeMatching
                      ? weight_matrix_circle(region, expansion_, freq_).entries
                      : Eigen::MatrixXcd::Identity(expansion_.size(), expansion_.size());
        break;
      }
      case Method::kPressureMatching: {
        control_points_ = region_grid(region, cfg.control_spacing);
        transfer_ = transfer_matrix_points(acoustics_, control_points_, candidates_, freq_, threads);
        weight_ = Eigen::MatrixXcd::Identity(transfer_.rows(), transfer_.rows());
        break;
      }
    }
  }

  const Frequency& frequency() const { return freq_; }
  const ExpansionConfig& expansion() const { return expansion_; }
  const std::vector<Point2>& candidates() const { return candidates_; }
  const Eigen::MatrixXcd& transfer() const { return transfer_; }
  const Eigen::MatrixXcd& weight() const { return weight_; }

  /// Desired-field vector b for a plane wave with the given direction.
  Eigen::VectorXcd desired(double angle_rad) const {
    const PlaneWave pw{angle_rad, {config_->prior_amplitude, 0.0}};
    if (config_->method == Method::kPressureMatching) {
      Eigen::VectorXcd b(static_cast<Eigen::Index>(control_points_.size()));
      for (std::size_t i = 0; i < control_points_.size(); ++i) b(i) = pw.value(control_points_[i], freq_);
      return b;
    }
    return planewave_coeffs(pw, expansion_, freq_).values;
  }

  FieldPrior prior() const {
    const DirectionRangePrior p = config_->prior();
    if (config_->method == Method::kPressureMatching) {
      const double extent = freq_.wavenumber() * (config_->region_center.norm() + config_->region_radius);
      const int nodes = static_cast<int>(std::ceil(2.0 * extent)) + 64;
      return prior_from_direction_quadrature(p, [&](double a) { return desired(a); }, nodes);
    }
    return prior_from_direction_range(p, expansion_, freq_);
  }

  CostModel cost_model() const {
    return make_cost_model(transfer_, weight_, prior(), config_->lambdas.lambda_select);
  }

  /// Evaluation grid over the target region.
  const std::vector<Point2>& grid() {
    if (grid_.empty()) grid_ = region_grid(config_->region(), config_->evaluation.grid_spacing);
    return grid_;
  }

  /// G over the evaluation grid for each listed candidate, as columns.
  Eigen::MatrixXcd grid_transfer(std::span<const int> selection) {
    const auto& pts = grid();
    std::vector<int> missing;
    for (int idx : selection) {
      if (!grid_columns_.contains(idx)) missing.push_back(idx);
    }
    if (!missing.empty()) {
      std::vector<Point2> srcs;
      for (int idx : missing) srcs.push_back(candidates_.at(static_cast<std::size_t>(idx)));
      const Eigen::MatrixXcd g = transfer_matrix_points(acoustics_, pts, srcs, freq_, threads_);
      for (std::size_t i = 0; i < missing.size(); ++i) grid_columns_[missing[i]] = g.col(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(selection.size()));
    for (std::size_t i = 0; i < selection.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = grid_columns_.at(selection[i]);
    return out;
  }

  /// Regularized driving signals for a plane-wave direction with the
  /// configured synthesis method and the eigenvalue-scaled lambda.
  DrivingSignals drive(std::span<const int> selection, double angle_rad) const {
    const Eigen::MatrixXcd c_sel = select_columns(selection);
    double lambda = synthesis_lambda(c_sel, weight_, config_->lambdas.lambda_synth_scale);
    if (!(lambda > 0.0)) lambda = config_->lambdas.lambda_select;
    return {solve_weighted(c_sel, weight_, desired(angle_rad), lambda), freq_.hz()};
  }

  Eigen::MatrixXcd select_columns(std::span<const int> selection) const {
    Eigen::MatrixXcd out(transfer_.rows(), static_cast<Eigen::Index>(selection.size()));
    for (std::size_t i = 0; i < selection.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = transfer_.col(selection[i]);
    return out;
  }

 private:
  const ExperimentConfig* config_;
  Acoustics acoustics_;
  Frequency freq_;
  ExpansionConfig expansion_;
  std::vector<Point2> candidates_;
  int threads_ = 1;
  Eigen::MatrixXcd transfer_;
  Eigen::MatrixXcd weight_;
  std::vector<Point2> control_points_;
  std::vector<Point2> grid_;
  std::map<int, Eigen::VectorXcd> grid_columns_;
};

// ---------------------------------------------------------------------------
// Placement.

struct PlacementRecord {
  std::string label;
  double frequency_hz = 0.0;  // 0 for broadband or frequency-independent layouts
  std::vector<int> indices;
  std::vector<double> cost_trace;  // empty for baselines
};

/// Greedy placements: one broadband run, or one narrowband run per
/// frequency. Contexts are reused when supplied.
inline std::vector<PlacementRecord> run_placement(const ExperimentConfig& cfg,
                                                  std::vector<std::unique_ptr<FrequencyContext>>* contexts = nullptr,
                                                  int threads = 1) {
  std::vector<std::unique_ptr<FrequencyContext>> local;
  auto& ctx = contexts ? *contexts : local;
  if (ctx.empty()) {
    for (double f : cfg.frequencies) ctx.push_back(std::make_unique<FrequencyContext>(cfg, f, threads));
  }
  StopRule stop{cfg.sources, cfg.min_relative_decrease};
  std::vector<PlacementRecord> out;
  if (cfg.broadband) {
    std::vector<CostModel> models;
    models.reserve(ctx.size());
    for (const auto& c : ctx) models.push_back(c->cost_model());
    std::vector<WeightedBin> bins;
    for (std::size_t i = 0; i < models.size(); ++i) bins.push_back({&models[i], cfg.gamma_for(i)});
    const auto g = greedy_place(bins, stop);
    out.push_back({"proposed_bb", 0.0, g.order, g.cost_trace});
  } else {
    for (const auto& c : ctx) {
      const auto g = greedy_place(c->cost_model(), stop);
      out.push_back({"proposed", c->frequency().hz(), g.order, g.cost_trace});
    }
  }
  return out;
}

inline std::vector<PlacementRecord> baseline_placements(const ExperimentConfig& cfg) {
  const auto cands = cfg.candidates.resolve();
  std::vector<PlacementRecord> out;
  if (cfg.regular_a) {
    const auto p = cfg.prior();
    out.push_back({"regular_a", 0.0, regular_placement_a(cands, cfg.region(), p.angle_min, p.angle_max, cfg.sources), {}});
  }
  if (cfg.regular_b) {
    out.push_back({"regular_b", 0.0, regular_placement_b(static_cast<int>(cands.size()), cfg.sources), {}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation.

struct SdrRow {
  double angle_deg;
  double frequency_hz;
  double sdr_db;
  std::string method;
};

struct FieldSnapshot {
  std::string method;
  double frequency_hz;
  double angle_deg;
  std::vector<Point2> grid;
  Eigen::VectorXcd desired;
  Eigen::VectorXcd synthesized;
};

/// SDR of one placement at one frequency for each angle.
inline std::vector<SdrRow> evaluate_placement(FrequencyContext& ctx, const ExperimentConfig& cfg,
                                              const PlacementRecord& placement,
                                              std::span<const double> angles_deg, int threads = 1,
                                              std::vector<FieldSnapshot>* fields = nullptr,
                                              std::span<const double> field_angles_deg = {}) {
  std::vector<SdrRow> rows(angles_deg.size());
  if (angles_deg.empty() && field_angles_deg.empty()) return rows;
  const Eigen::MatrixXcd g = ctx.grid_transfer(placement.indices);
  const auto& grid = ctx.grid();
  const Frequency& freq = ctx.frequency();
  const double cell = cfg.evaluation.grid_spacing * cfg.evaluation.grid_spacing;
  auto fields_for = [&](double angle_deg, Eigen::VectorXcd& des, Eigen::VectorXcd& syn) {
    const double a = deg_to_rad(angle_deg);
    const PlaneWave pw{a, {cfg.prior_amplitude, 0.0}};
    des.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) des(i) = pw.value(grid[i], freq);
    syn = g * ctx.drive(placement.indices, a).values;
  };
  parallel_for(angles_deg.size(), threads, [&](std::size_t i) {
    Eigen::VectorXcd des;
    Eigen::VectorXcd syn;
    fields_for(angles_deg[i], des, syn);
    rows[i] = {angles_deg[i], freq.hz(), sdr(des, syn, cell), placement.label};
  });
  if (fields) {
    for (double a : field_angles_deg) {
      FieldSnapshot snap{placement.label, freq.hz(), a, grid, {}, {}};
      fields_for(a, snap.desired, snap.synthesized);
      fields->push_back(std::move(snap));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Files.

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

inline std::string placement_csv(const PlacementRecord& p, std::span<const Point2> candidates) {
  std::ostringstream s;
  s << "rank,index,x,y\n";
  for (std::size_t r = 0; r < p.indices.size(); ++r) {
    const Point2 q = candidates[static_cast<std::size_t>(p.indices[r])];
    s << r + 1 << ',' << p.indices[r] << ',' << detail::fmt_num(q.x) << ',' << detail::fmt_num(q.y) << '\n';
  }
  return s.str();
}

inline std::string cost_trace_csv(const PlacementRecord& p) {
  std::ostringstream s;
  s << "step,cost\n";
  for (std::size_t i = 0; i < p.cost_trace.size(); ++i) s << i << ',' << detail::fmt_num(p.cost_trace[i]) << '\n';
  return s.str();
}

/// Reads the index column of a placement file.
inline std::vector<int> read_placement_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open placement file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("rank,index", 0) != 0) throw ConfigError(path.string() + ": expected header rank,index,x,y");
  std::vector<int> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string rank;
    std::string index;
    std::getline(row, rank, ',');
    std::getline(row, index, ',');
    out.push_back(std::stoi(index));
  }
  return out;
}

inline std::string sdr_csv(std::span<const SdrRow> rows) {
  std::ostringstream s;
  s << "angle_deg,freq_hz,sdr_db,method\n";
  for (const auto& r : rows) {
    s << detail::fmt_num(r.angle_deg) << ',' << detail::fmt_num(r.frequency_hz) << ','
      << detail::fmt_num(r.sdr_db) << ',' << r.method << '\n';
  }
  return s.str();
}

/// Field grid (x, y, re, im). With `error` set, the samples are
/// (u_syn - u_des) / |amplitude|.
inline std::string field_csv(const FieldSnapshot& f, bool error, double amplitude) {
  std::ostringstream s;
  s << "x,y,re,im\n";
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const cplx v = error ? (f.synthesized(idx) - f.desired(idx)) / amplitude : f.synthesized(idx);
    s << detail::fmt_num(f.grid[i].x) << ',' << detail::fmt_num(f.grid[i].y) << ','
      << detail::fmt_num(v.real()) << ',' << detail::fmt_num(v.imag()) << '\n';
  }
  return s.str();
}

inline std::string label_with_frequency(const std::string& label, double hz) {
  return hz > 0.0 ? label + "_" + detail::fmt_num(hz) + "Hz" : label;
}

/// Writes field and error grids for each snapshot with a metadata sidecar.
inline void write_fields(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                         std::span<const FieldSnapshot> fields) {
  for (const auto& f : fields) {
    const std::string stem = "field_" + f.method + "_" + detail::fmt_num(f.frequency_hz) + "Hz_" +
                             detail::fmt_num(f.angle_deg) + "deg";
    detail::write_text(dir / (stem + ".csv"), field_csv(f, false, cfg.prior_amplitude));
    detail::write_text(dir / (stem + "_error.csv"), field_csv(f, true, cfg.prior_amplitude));
    json meta = {{"method", f.method},
                 {"freq_hz", f.frequency_hz},
                 {"angle_deg", f.angle_deg},
                 {"grid_spacing", cfg.evaluation.grid_spacing},
                 {"region", {{"center", detail::point_to(cfg.region_center)}, {"radius", cfg.region_radius}}},
                 {"points", f.grid.size()},
                 {"sdr_db", sdr(f.desired, f.synthesized)}};
    detail::write_text(dir / (stem + ".json"), meta.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// Commands.

struct RunOptions {
  std::filesystem::path out;
  int threads = 1;
};

/// Greedy placement; writes placement and cost-trace CSVs plus the resolved
/// configuration. Returns the placements.
inline std::vector<PlacementRecord> cmd_place(const ExperimentConfig& cfg, const RunOptions& opt) {
  const auto records = run_placement(cfg, nullptr, opt.threads);
  const auto cands = cfg.candidates.resolve();
  detail::write_text(opt.out / "config.resolved.json", config_to_json(cfg).dump(2) + "\n");
  for (const auto& r : records) {
    const bool single = records.size() == 1;
    const std::string suffix = single ? "" : "_" + detail::fmt_num(r.frequency_hz) + "Hz";
    detail::write_text(opt.out / ("placement" + suffix + ".csv"), placement_csv(r, cands));
    detail::write_text(opt.out / ("cost_trace" + suffix + ".csv"), cost_trace_csv(r));
  }
  return records;
}

/// SDR table for the given placements (and the configured baselines) at
/// every evaluation frequency and angle; optional field grids.
inline std::vector<SdrRow> cmd_evaluate(const ExperimentConfig& cfg, std::vector<PlacementRecord> placements,
                                        const RunOptions& opt) {
  for (auto& b : baseline_placements(cfg)) placements.push_back(std::move(b));
  const auto cands = cfg.candidates.resolve();
  for (const auto& p : placements) {
    for (int idx : p.indices) {
      if (idx < 0 || idx >= static_cast<int>(cands.size())) {
        throw ConfigError("placement '" + p.label + "' has index " + std::to_string(idx) + " outside the candidate list");
      }
    }
  }
  std::vector<SdrRow> rows;
  std::vector<FieldSnapshot> fields;
  if (!cfg.evaluation.angles_deg.empty() || cfg.evaluation.write_fields) {
    for (double f : cfg.evaluation_frequencies()) {
      FrequencyContext ctx(cfg, f, opt.threads);
      for (const auto& p : placements) {
        // Narrowband placements are evaluated only at their own frequency.
        if (p.frequency_hz > 0.0 && std::abs(p.frequency_hz - f) > 1e-9) continue;
        const auto r = evaluate_placement(ctx, cfg, p, cfg.evaluation.angles_deg, opt.threads,
                                          cfg.evaluation.write_fields ? &fields : nullptr,
                                          cfg.evaluation.write_fields ? std::span<const double>(cfg.evaluation.field_angles_deg)
                                                                      : std::span<const double>());
        rows.insert(rows.end(), r.begin(), r.end());
      }
    }
  }
  detail::write_text(opt.out / "config.resolved.json", config_to_json(cfg).dump(2) + "\n");
  for (const auto& p : placements) {
    detail::write_text(opt.out / ("placement_" + label_with_frequency(p.label, p.frequency_hz) + ".csv"),
                       placement_csv(p, cands));
  }
  detail::write_text(opt.out / "sdr.csv", sdr_csv(rows));
  if (!fields.empty()) write_fields(opt.out, cfg, fields);
  return rows;
}

/// Mean SDR per (method, frequency).
struct SdrSummary {
  std::string method;
  double frequency_hz;
  double mean_sdr_db;
};

inline std::vector<SdrSummary> summarize(std::span<const SdrRow> rows) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.method, r.frequency_hz);
    auto [it, inserted] = acc.try_emplace(key, 0.0, 0);
    if (inserted) order.push_back(key);
    it->second.first += r.sdr_db;
    it->second.second += 1;
  }
  std::vector<SdrSummary> out;
  for (const auto& key : order) {
    const auto& [sum, n] = acc.at(key);
    out.push_back({key.first, key.second, sum / n});
  }
  return out;
}

inline std::string summary_csv(std::span<const SdrSummary> rows) {
  std::ostringstream s;
  s << "freq_hz,method,mean_sdr_db\n";
  for (const auto& r : rows) {
    s << detail::fmt_num(r.frequency_hz) << ',' << r.method << ',' << detail::fmt_num(r.mean_sdr_db) << '\n';
  }
  return s.str();
}

/// Results of the built-in reverberant-room study.
struct ReproductionResult {
  std::vector<PlacementRecord> placements;
  std::vector<SdrRow> angle_sweep;  // 1000 Hz, every configured angle
  std::vector<SdrRow> broadband;    // every frequency and angle
  std::vector<SdrSummary> broadband_mean;
};

/// Narrowband placement at 1000 Hz and at every bin, broadband placement
/// over 100..2000 Hz, both regular layouts; fields at 1000 Hz / 0 degrees,
/// the 1000 Hz angle sweep and the per-bin sweep.
inline ReproductionResult cmd_reproduce_paper(const ExperimentConfig& cfg, const RunOptions& opt,
                                              double focus_hz = 1000.0) {
  ReproductionResult res;
  const auto cands = cfg.candidates.resolve();
  std::vector<std::unique_ptr<FrequencyContext>> ctx;
  for (double f : cfg.frequencies) ctx.push_back(std::make_unique<FrequencyContext>(cfg, f, opt.threads));

  ExperimentConfig bb_cfg = cfg;
  bb_cfg.broadband = true;
  const auto bb = run_placement(bb_cfg, &ctx, opt.threads).front();
  ExperimentConfig nb_cfg = cfg;
  nb_cfg.broadband = false;
  const auto nb = run_placement(nb_cfg, &ctx, opt.threads);
  const auto baselines = baseline_placements(cfg);

  for (const auto& p : nb) {
    PlacementRecord r = p;
    r.label = "proposed_nb";
    res.placements.push_back(std::move(r));
  }
  res.placements.push_back(bb);
  for (const auto& b : baselines) res.placements.push_back(b);

  detail::write_text(opt.out / "config.resolved.json", config_to_json(cfg).dump(2) + "\n");
  for (const auto& p : res.placements) {
    const std::string stem = label_with_frequency(p.label, p.frequency_hz);
    detail::write_text(opt.out / ("placement_" + stem + ".csv"), placement_csv(p, cands));
    if (!p.cost_trace.empty()) detail::write_text(opt.out / ("cost_trace_" + stem + ".csv"), cost_trace_csv(p));
  }

  std::vector<FieldSnapshot> fields;
  const std::vector<double> zero{0.0};
  for (std::size_t fi = 0; fi < cfg.frequencies.size(); ++fi) {
    const double f = cfg.frequencies[fi];
    FrequencyContext& c = *ctx[fi];
    const bool focus = std::abs(f - focus_hz) < 1e-9;
    for (const auto& p : res.placements) {
      if (p.frequency_hz > 0.0 && std::abs(p.frequency_hz - f) > 1e-9) continue;
      // At the focus frequency the narrowband layout is the headline "proposed".
      PlacementRecord labelled = p;
      if (focus && p.label == "proposed_nb") labelled.label = "proposed";
      auto rows = evaluate_placement(c, cfg, labelled, cfg.evaluation.angles_deg, opt.threads,
                                     focus && p.label != "proposed_bb" ? &fields : nullptr,
                                     focus && p.label != "proposed_bb" ? std::span<const double>(zero) : std::span<const double>());
      if (focus && p.label != "proposed_bb") res.angle_sweep.insert(res.angle_sweep.end(), rows.begin(), rows.end());
      if (focus && p.label == "proposed_nb") {
        for (auto& r : rows) r.method = "proposed_nb";
      }
      res.broadband.insert(res.broadband.end(), rows.begin(), rows.end());
    }
  }
  res.broadband_mean = summarize(res.broadband);

  detail::write_text(opt.out / "sdr_angles_1000Hz.csv", sdr_csv(res.angle_sweep));
  detail::write_text(opt.out / "sdr_broadband.csv", sdr_csv(res.broadband));
  detail::write_text(opt.out / "sdr_broadband_mean.csv", summary_csv(res.broadband_mean));
  write_fields(opt.out, cfg, fields);

  json summary;
  for (const auto& s : summarize(res.angle_sweep)) summary["angle_mean_sdr_db_1000Hz"][s.method] = s.mean_sdr_db;
  for (const auto& r : res.angle_sweep) {
    if (r.angle_deg == 0.0) summary["sdr_db_1000Hz_0deg"][r.method] = r.sdr_db;
  }
  detail::write_text(opt.out / "summary.json", summary.dump(2) + "\n");
  return res;
}

/// Moments of the configured prior at each frequency: mu.csv (m, re, im)
/// and sigma.csv (m, n, re, im) per frequency.
inline void cmd_priors(const ExperimentConfig& cfg, const RunOptions& opt) {
  for (double f : cfg.frequencies) {
    const Frequency freq(f, cfg.sound_speed);
    const auto ex = ExpansionConfig::for_region(cfg.region(), freq);
    const auto prior = prior_from_direction_range(cfg.prior(), ex, freq);
    std::ostringstream mu;
    mu << "m,re,im\n";
    for (int m = -ex.order; m <= ex.order; ++m) {
      const cplx v = prior.mean(ex.index(m));
      mu << m << ',' << detail::fmt_num(v.real()) << ',' << detail::fmt_num(v.imag()) << '\n';
    }
    std::ostringstream sg;
    sg << "m,n,re,im\n";
    for (int m = -ex.order; m <= ex.order; ++m) {
      for (int n = -ex.order; n <= ex.order; ++n) {
        const cplx v = prior.covariance(ex.index(m), ex.index(n));
        sg << m << ',' << n << ',' << detail::fmt_num(v.real()) << ',' << detail::fmt_num(v.imag()) << '\n';
      }
    }
    const std::string tag = detail::fmt_num(f) + "Hz";
    detail::write_text(opt.out / ("prior_mu_" + tag + ".csv"), mu.str());
    detail::write_text(opt.out / ("prior_sigma_" + tag + ".csv"), sg.str());
  }
}

}  // namespace sfsplace
