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

// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sfsplace/verify.hpp"

namespace v = sfsplace::verify;

namespace {

void report(const v::CheckResult& r) {
  std::printf("criterion %d %s: %s | %s (%.2f s)\n", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(),
              r.detail.c_str(), r.seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sfsplace acceptance suite"};
  std::string out = (std::filesystem::temp_directory_path() / "sfsplace_acceptance").string();
  int threads = 4;
  std::vector<int> expected_failures;
  app.add_option("--out", out, "scratch directory for run artifacts");
  app.add_option("--expect-fail", expected_failures, "criteria known to fail; reported but not fatal");
  app.add_option("--threads", threads, "worker threads for the room study")->check(CLI::Range(1, 1024));
  CLI11_PARSE(app, argc, argv);

  std::vector<std::vector<double>> traces;
  std::vector<v::CheckResult> results;
  results.push_back(v::check_inverse_equivalence(100, &traces));
  report(results.back());
  results.push_back(v::check_greedy_vs_exhaustive(50, &traces));
  report(results.back());
  results.push_back(v::check_expansion_fidelity());
  report(results.back());
  results.push_back(v::check_weight_matrix());
  report(results.back());
  results.push_back(v::check_cost_semantics(100000));
  report(results.back());
  auto room = v::check_room_study(std::filesystem::path(out) / "room_study", threads);
  for (const auto& p : room.data.placements) {
    if (!p.cost_trace.empty()) traces.push_back(p.cost_trace);
  }
  results.push_back(room.result);
  report(results.back());
  results.push_back(v::check_monotone_deterministic(std::filesystem::path(out) / "determinism", traces, threads));
  report(results.back());
  results.push_back(v::check_special_functions(1000));
  report(results.back());

  int failed = 0;
  int unexpected = 0;
  for (const auto& r : results) {
    if (r.passed) continue;
    ++failed;
    const bool known = std::find(expected_failures.begin(), expected_failures.end(), r.id) != expected_failures.end();
    if (!known) ++unexpected;
  }
  std::printf("%d/%zu criteria passed", static_cast<int>(results.size()) - failed, results.size());
  if (failed > 0) std::printf(", %d expected failure(s), %d unexpected", failed - unexpected, unexpected);
  std::printf("\n");
  for (int id : expected_failures) {
    for (const auto& r : results) {
      if (r.id == id && r.passed) std::printf("criterion %d listed as expected failure but passed\n", id);
    }
  }
  return unexpected == 0 ? 0 : 1;
}
