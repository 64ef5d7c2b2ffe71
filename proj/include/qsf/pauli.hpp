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

#include <string>
#include <string_view>
#include <vector>

#include "qsf/linalg.hpp"

namespace qsf {

/** coefficient * (sigma_{letters[0]} (x) sigma_{letters[1]} (x) ...), letters over {1,x,y,z}. */
struct PauliTerm {
  double coefficient = 1.0;
  std::string letters;
};

/** Real-weighted sum of Pauli strings on a fixed number of qubits. */
struct HamiltonianExpr {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;

  /// Dense hermitian realization (2^n x 2^n).
  Matrix matrix() const;
  std::string to_string() const;
};

/// Single Pauli letter: '1' -> I, 'x' -> X, 'y' -> Y, 'z' -> Z.
Matrix pauli_letter(char c);
/// Kronecker product of the letters, leftmost letter is the leftmost factor.
Matrix pauli_string_matrix(std::string_view letters);

/**
 * Parses `[coef *] letters ((+|-) [coef *] letters)*`.
 *
 * Whitespace between tokens is ignored. A leading numeric literal is read as a
 * coefficient only when it is followed by '*', so "11xx" is a string, not 11 * xx.
 * Throws ParseError carrying the 0-based offending offset.
 */
HamiltonianExpr parse_pauli(std::string_view expr, int n_qubits);

}  // namespace qsf
