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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qsf/lie.hpp"
#include "qsf/robust.hpp"

namespace qsf {

/**
 * Declarative description of a system, read from a JSON document with
 * `"version": 1`. Pauli expressions use the parse_pauli grammar; uncertainty
 * directions carry extra letters for the bath qubits.
 */
struct SystemSpec {
  struct Uncertainty {
    std::vector<std::string> directions;
    double delta = 0.0;
    Index bath_dim = 1;
  };
  struct Schedule {
    double horizon = 1.0;
    Index segments = 4;
  };
  struct Vqa {
    std::vector<double> theta0;
    double step = 0.1;
    int iters = 200;
  };

  int n_qubits = 0;
  std::optional<std::string> drift;
  std::vector<std::string> controls;
  std::vector<std::pair<std::string, std::string>> observables;  ///< in document order
  std::optional<Uncertainty> uncertainty;
  /// Named gate ("hadamard", "identity") or an explicit matrix.
  std::optional<std::variant<std::string, Matrix>> target;
  std::optional<Schedule> schedule;
  std::optional<Vqa> vqa;

  BilinearSystem system() const;
  std::map<std::string, Matrix> observable_matrices() const;
  UncertaintyModel uncertainty_model() const;
  Matrix target_matrix() const;
};

/// Parses and validates a spec document; errors name the offending field (and line for syntax errors).
SystemSpec parse_spec(const std::string& text);
SystemSpec load_spec(const std::string& path);

}  // namespace qsf
