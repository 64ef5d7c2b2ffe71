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

#include <cstddef>
#include <cstdint>
#include <functional>

#include "qsf/linalg.hpp"

namespace qsf {

/**
 * A linear map on C^dim given matrix-free.
 *
 * `apply` is x -> A x (any output length). `apply_normal` is x -> A^dagger A x;
 * it is required by the iterative path. `normal_matrix`, when present, lets the
 * dense path skip probing and use an explicitly assembled A^dagger A.
 * `scale`, when positive, is an a priori size of A^dagger A (for instance the
 * squared norm of the unrestricted operator). Kernel thresholds are taken
 * relative to max(lambda_max, scale), which matters when the map is zero up to
 * rounding and lambda_max is itself noise.
 */
struct LinearMap {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_normal;
  std::function<Matrix()> normal_matrix;
  double scale = 0.0;
};

struct NullspaceOptions {
  /// Kernel eigenvalues of A^dagger A are those below tol * max(lambda_max, scale).
  double tol = 1e-8;
  /// Dense eigensolve up to this dimension, block Krylov above.
  Index dense_limit = 4096;
  Index block_size = 8;
  /// Largest Krylov basis built between restarts.
  Index krylov_dim = 320;
  Index max_restarts = 200;
  std::uint64_t seed = 0x5eed;
  bool check_linearity = true;
};

/**
 * Dimension of ker A, counted as the number of eigenvalues of A^dagger A
 * below tol * max(lambda_max, map.scale).
 *
 * Throws ValidationError when the probabilistic linearity check fails and
 * ConvergenceError when the block Krylov search runs out of restarts.
 */
Index nullspace_dim(const LinearMap& map, const NullspaceOptions& options = {});

/** Builds the LinearMap for an explicit matrix (used by tests and small problems). */
LinearMap dense_linear_map(const Matrix& a);

}  // namespace qsf
