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

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "qsf/linalg.hpp"

namespace qsf {

/** Normalized pure state of n qubits; qubit 0 is the leftmost Kronecker factor. */
class StateVector {
 public:
  /// Validates length 2^n and unit norm (1e-10).
  explicit StateVector(Vector amplitudes);

  /// Computational basis state |index> on n qubits.
  static StateVector basis(int n_qubits, Index index);
  /// Rescales any nonzero vector to unit norm.
  static StateVector normalized(Vector amplitudes);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }

 private:
  int n_qubits_ = 0;
  Vector amps_;
};

/** Hermitian, positive semidefinite, unit-trace operator. */
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho);

  static DensityMatrix pure(const StateVector& psi);
  /// sum_i p_i |psi_i><psi_i|; the weights must sum to one.
  static DensityMatrix mixture(const std::vector<std::pair<double, StateVector>>& ensemble);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

 private:
  int n_qubits_ = 0;
  Matrix rho_;
};

/** Hermitian observable with its spectral decomposition M = sum_i lambda_i P_i. */
class Observable {
 public:
  struct Component {
    double value;
    Matrix projector;
  };

  /// Eigendecomposition with eigenvalues closer than cluster_tol merged into one projector.
  static Observable from_hermitian(const Matrix& m, double cluster_tol = 1e-8);
  /// Joint per-qubit Z measurement as 2^n rank-one projectors; outcome value = basis index.
  static Observable computational_basis(int n_qubits);

  const Matrix& matrix() const { return m_; }
  const std::vector<Component>& components() const { return components_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  std::vector<Component> components_;
};

StateVector apply_gate(const Matrix& u, const StateVector& s);
DensityMatrix apply_gate(const Matrix& u, const DensityMatrix& rho);

double expectation(const StateVector& s, const Observable& m);
double expectation(const DensityMatrix& rho, const Observable& m);

/// Outcome probabilities, one per spectral component.
std::vector<double> outcome_probabilities(const StateVector& s, const Observable& m);
std::vector<double> outcome_probabilities(const DensityMatrix& rho, const Observable& m);

template <class State>
struct MeasurementResult {
  double outcome;
  std::size_t component;
  State post_state;
};

MeasurementResult<StateVector> measure_projective(const StateVector& s, const Observable& m, std::uint64_t seed);
MeasurementResult<DensityMatrix> measure_projective(const DensityMatrix& rho, const Observable& m,
                                                    std::uint64_t seed);

struct Estimate {
  double value;
  double standard_error;
};

/// Shot-based estimate sum_i lambda_i T_i / T; each shot re-prepares the state.
Estimate estimate_expectation(const StateVector& s, const Observable& m, std::size_t shots, std::uint64_t seed);
Estimate estimate_expectation(const DensityMatrix& rho, const Observable& m, std::size_t shots,
                              std::uint64_t seed);

/// Per-component outcome counts over `shots` fresh preparations (inverse-CDF sampling).
std::vector<std::size_t> sample_counts(const std::vector<double>& probabilities, std::size_t shots,
                                       std::uint64_t seed);

/// Dense QFT: column k is 2^{-n/2} sum_j exp(2 pi i jk / 2^n) |j>. 1 <= n <= 10.
Matrix build_qft(int n_qubits);

/// (prod_k exp(-i H_k t/steps))^steps applied to s, first term acting first.
StateVector trotter_evolve(const std::vector<Matrix>& terms, double t, int steps, const StateVector& s);

/** Parameterized circuit U(theta) = U_1(theta_1) ... U_N(theta_N), U_j = exp(-i theta_j H_j). */
struct ParamCircuit {
  std::vector<Matrix> generators;
  StateVector initial_state;
  Observable observable;

  void validate() const;
  Matrix unitary(const RealVector& theta) const;
};

/// f(theta) = <psi_0| U(theta)^dagger M U(theta) |psi_0>.
double vqa_objective(const ParamCircuit& c, const RealVector& theta);
/// Central finite-difference gradient of vqa_objective.
RealVector vqa_gradient(const ParamCircuit& c, const RealVector& theta, double spacing = 1e-5);

struct VqaResult {
  RealVector theta;
  std::vector<double> trace;  ///< f before each update, then the final value
  bool step_too_large = false;
};

/// Plain gradient descent theta <- theta - step * grad f.
VqaResult vqa_optimize(const ParamCircuit& c, const RealVector& theta0, double step, int iters);

double purity(const DensityMatrix& rho);
/// (tr X rho, tr Y rho, tr Z rho) for a single qubit.
std::array<double, 3> bloch_coordinates(const DensityMatrix& rho);
/// Reduced state on the listed qubits (ascending order kept).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

}  // namespace qsf
