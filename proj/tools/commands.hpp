// Copyright 2026 The qsf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qsf/errors.hpp"

namespace qsf::cli {

/// Process exit codes shared by every verb.
enum ExitCode : int { kOk = 0, kUsage = 1, kNoConvergence = 2, kInfeasible = 3 };

struct AnalyzeOptions {
  std::string spec_path;
  bool timestamp = true;
  long dense_limit = 4096;
  long max_restarts = 200;
  double tol = 1e-8;
};

struct SynthesizeOptions {
  std::string spec_path;
  std::optional<double> f0;
  std::uint64_t seed = 1;
  std::optional<int> max_iters;
  std::string out_dir = ".";
  std::string init = "random";
  bool timestamp = true;
};

struct BoundOptions {
  double horizon = 1.0;
  std::string delta_range;
  std::string jrbst = "0";
};

struct SimulateOptions {
  std::string spec_path = "-";
  std::string circuit;
  std::size_t shots = 100000;
  std::uint64_t seed = 7;
  int steps = 16;
  int qubits = 3;
  long input = 0;
  bool timestamp = true;
};

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int run_synthesize(const SynthesizeOptions& opt, std::ostream& out, std::ostream& err);
int run_bound(const BoundOptions& opt, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);

/// Writes the diagnostic document for a solver that gave up and returns kNoConvergence.
int report_convergence(const ConvergenceError& e, std::ostream& out, std::ostream& err);

/// "a:s:b" -> a, a+s, ..., up to b (inclusive, with a small tolerance).
std::vector<double> parse_range(const std::string& text);
/// "l1,l2,..." -> values.
std::vector<double> parse_list(const std::string& text);

}  // namespace qsf::cli
