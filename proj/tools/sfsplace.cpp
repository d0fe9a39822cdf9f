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

// sfsplace command-line driver.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sfsplace/experiment.hpp"
#include "sfsplace/verify.hpp"

namespace {

using sfsplace::ExperimentConfig;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_config) {
  auto* opt = cmd->add_option("--config", f.config, "JSON configuration file");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (default: config output_dir)");
  cmd->add_option("--seed", f.seed, "RNG seed recorded with the run");
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1, 1024));
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv"}));
}

ExperimentConfig resolve(const CommonFlags& f, std::optional<ExperimentConfig> fallback = std::nullopt) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = sfsplace::load_config_file(f.config);
  } else if (fallback) {
    cfg = sfsplace::load_config(sfsplace::config_to_json(*fallback));
  } else {
    throw sfsplace::ConfigError("--config is required");
  }
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  return cfg;
}

sfsplace::RunOptions options(const ExperimentConfig& cfg, const CommonFlags& f) {
  return {cfg.output_dir, f.threads};
}

void print_check(const sfsplace::verify::CheckResult& r) {
  std::printf("[%s] %d %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
              r.seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy loudspeaker placement for weighted mode-matching sound field synthesis"};
  app.require_subcommand(1);

  CommonFlags place_flags;
  auto* place = app.add_subcommand("place", "greedy placement; writes placement and cost-trace CSVs");
  add_common(place, place_flags, true);

  CommonFlags eval_flags;
  std::string placement_file;
  auto* evaluate = app.add_subcommand("evaluate", "SDR per angle and frequency for a placement and the baselines");
  add_common(evaluate, eval_flags, true);
  evaluate->add_option("--placement", placement_file, "placement CSV (default: run greedy placement first)")
      ->check(CLI::ExistingFile);

  CommonFlags study_flags;
  auto* study = app.add_subcommand("reproduce-paper", "reverberant-room study: placements, fields and SDR sweeps");
  add_common(study, study_flags, false);

  CommonFlags prior_flags;
  auto* priors = app.add_subcommand("priors", "dump prior mean and covariance per frequency");
  add_common(priors, prior_flags, true);

  CommonFlags self_flags;
  bool full = false;
  auto* selftest = app.add_subcommand("selftest", "run the oracle checks");
  add_common(selftest, self_flags, false);
  selftest->add_flag("--full", full, "include the reverberant-room study (minutes)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (place->parsed()) {
      const auto cfg = resolve(place_flags);
      const auto records = sfsplace::cmd_place(cfg, options(cfg, place_flags));
      for (const auto& r : records) {
        std::printf("%s: %zu sources, J %.6g -> %.6g\n",
                    sfsplace::label_with_frequency(r.label, r.frequency_hz).c_str(), r.indices.size(),
                    r.cost_trace.front(), r.cost_trace.back());
      }
    } else if (evaluate->parsed()) {
      const auto cfg = resolve(eval_flags);
      const auto opt = options(cfg, eval_flags);
      std::vector<sfsplace::PlacementRecord> placements;
      if (placement_file.empty()) {
        placements = sfsplace::run_placement(cfg, nullptr, opt.threads);
      } else {
        placements.push_back({"given", 0.0, sfsplace::read_placement_csv(placement_file), {}});
      }
      const auto rows = sfsplace::cmd_evaluate(cfg, placements, opt);
      for (const auto& s : sfsplace::summarize(rows)) {
        std::printf("%-18s %8.1f Hz  mean SDR %7.2f dB\n", s.method.c_str(), s.frequency_hz, s.mean_sdr_db);
      }
    } else if (study->parsed()) {
      const auto cfg = resolve(study_flags, sfsplace::room_study_config());
      const auto res = sfsplace::cmd_reproduce_paper(cfg, options(cfg, study_flags));
      for (const auto& s : sfsplace::summarize(res.angle_sweep)) {
        std::printf("1000 Hz %-12s mean SDR %7.2f dB\n", s.method.c_str(), s.mean_sdr_db);
      }
      std::printf("outputs in %s\n", cfg.output_dir.c_str());
    } else if (priors->parsed()) {
      const auto cfg = resolve(prior_flags);
      sfsplace::cmd_priors(cfg, options(cfg, prior_flags));
    } else if (selftest->parsed()) {
      namespace v = sfsplace::verify;
      const std::filesystem::path scratch =
          self_flags.out.empty() ? std::filesystem::temp_directory_path() / "sfsplace_selftest"
                                 : std::filesystem::path(self_flags.out);
      std::vector<std::vector<double>> traces;
      std::vector<v::CheckResult> results;
      results.push_back(v::check_inverse_equivalence(100, &traces));
      print_check(results.back());
      results.push_back(v::check_greedy_vs_exhaustive(50, &traces));
      print_check(results.back());
      results.push_back(v::check_expansion_fidelity());
      print_check(results.back());
      results.push_back(v::check_weight_matrix());
      print_check(results.back());
      results.push_back(v::check_cost_semantics());
      print_check(results.back());
      if (full) {
        auto rc = v::check_room_study(scratch / "room_study", self_flags.threads);
        for (const auto& p : rc.data.placements) {
          if (!p.cost_trace.empty()) traces.push_back(p.cost_trace);
        }
        results.push_back(rc.result);
        print_check(results.back());
      }
      results.push_back(v::check_monotone_deterministic(scratch / "determinism", traces,
                                                        std::max(2, self_flags.threads)));
      print_check(results.back());
      results.push_back(v::check_special_functions());
      print_check(results.back());
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failed, results.size());
      return failed == 0 ? 0 : 1;
    }
  } catch (const sfsplace::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
