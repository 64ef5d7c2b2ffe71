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
#include <string>
#include <vector>

#include "qsf/linalg.hpp"
#include "qsf/nullspace.hpp"

namespace qsf {

/**
 * Closed bilinear control system  X' = -i (H_0 + sum_j u_j H_j) X.
 * In the skew-hermitian convention A = iH_0, B_j = iH_j.
 */
class BilinearSystem {
 public:
  BilinearSystem(Matrix drift, std::vector<Matrix> controls);

  Index dim() const { return drift_.rows(); }
  const Matrix& drift() const { return drift_; }
  const std::vector<Matrix>& controls() const { return controls_; }
  /// Drift followed by the controls.
  std::vector<Matrix> hamiltonians() const;

 private:
  Matrix drift_;
  std::vector<Matrix> controls_;
};

/** Orthonormal (Re tr A^dagger B) basis of a real Lie algebra of skew-hermitian traceless matrices. */
struct LieBasis {
  Index dim_space = 0;
  std::vector<Matrix> elements;
  int generation_depth = 0;

  Index dim() const { return Index(elements.size()); }
};

struct LieOptions {
  /// Relative tolerance for accepting a new direction in a real span.
  double rank_tol = 1e-9;
  /// Largest basis lie_closure may build; 0 means dim^2 - 1.
  Index cap = 0;
  NullspaceOptions nullspace;
};

/** Commutator superoperator I (x) H - H^T (x) I acting on column-stacked matrices. */
Matrix adjoint_superop(const Matrix& h);

/**
 * Real Lie closure of skew-hermitian generators (identity components dropped).
 * Worklist sweep: each new element is commuted with every earlier one and the
 * result is orthonormally extended, until nothing new appears or the cap is hit.
 */
LieBasis lie_closure(const std::vector<Matrix>& generators, const LieOptions& options = {});

/// Largest out-of-span residual of [e_i, e_j] over all basis pairs, relative to ||[e_i, e_j]||_F.
double closure_defect(const LieBasis& basis);

struct ControllabilityResult {
  LieBasis basis;
  Index closure_dim = 0;
  Index full_dim = 0;
  bool controllable = false;
};

/// Lie algebra rank condition: closure of {iH_0, iH_j} equals su(N).
ControllabilityResult controllability(const BilinearSystem& sys, const LieOptions& options = {});

/**
 * Dimension of the joint commutant of the adjoint superoperators ad_{H_j} in Mat(N^2).
 * Equals 2 exactly when the system is fully controllable.
 */
Index symmetry_dim(const BilinearSystem& sys, const LieOptions& options = {});

/**
 * Joint commutant dimension of {ad_{H_j}} plus, when `observable` is given,
 * the rank-one projector onto |traceless part of observable>.
 */
Index joint_commutant_dim(const BilinearSystem& sys, const Matrix* observable, const LieOptions& options = {});

/// Traceless part of L_target lies in span(basis) (residual <= 1e-8 ||L||_F).
bool gate_reachable(const LieBasis& basis, const Matrix& target);

/// Literal inclusion span(b) within span(a). Sufficient, not necessary, for simulability up to isomorphism.
bool simulable(const LieBasis& a, const LieBasis& b);

struct ObservabilitySpace {
  Index dim = 0;
  std::vector<Matrix> basis;  ///< i * (traceless hermitian), orthonormal
};

/// Smallest real subspace containing i*C~ and invariant under X -> [iH_j, X] for every j.
ObservabilitySpace observability_space(const BilinearSystem& sys, const Matrix& c, const LieOptions& options = {});

struct ObservabilityVerdict {
  bool observable = false;
  Index obs_space_dim = 0;
  Index commutant_dim = 0;
};

/**
 * Observability by C via two independent routes: the observability space fills
 * su(N), and the joint commutant with P_C is two-dimensional.
 * Throws ConsistencyError if the routes disagree.
 */
ObservabilityVerdict observable_test(const BilinearSystem& sys, const Matrix& c, const LieOptions& options = {});

/// Controllable (accessibility, closed system) and observable by C.
bool tomografiable(const BilinearSystem& sys, const Matrix& c, const LieOptions& options = {});

struct ObservableReport {
  std::string name;
  Index obs_space_dim = 0;
  Index complement_dim = 0;  ///< symmetry-sector diagnosis: dim su(N) - obs_space_dim
  Index commutant_dim = 0;
  bool observable = false;
  bool tomografiable = false;
};

struct AnalysisReport {
  Index dim = 0;
  Index closure_dim = 0;
  Index full_dim = 0;
  bool controllable = false;
  Index symmetry_dim = 0;
  int generation_depth = 0;
  std::vector<ObservableReport> observables;
  std::vector<std::string> notes;
};

/// Full decision run; cross-checks controllable <=> closure_dim == N^2-1 <=> symmetry_dim == 2.
AnalysisReport analyze(const BilinearSystem& sys, const std::map<std::string, Matrix>& observables,
                       const LieOptions& options = {});

}  // namespace qsf
