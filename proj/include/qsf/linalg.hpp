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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qsf/errors.hpp"

namespace qsf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/** Structure a matrix is declared (and checked) to have. */
enum class Structure { general, hermitian, skew_hermitian, unitary, projector };

const char* to_string(Structure s);

bool is_hermitian(const Matrix& m, double rel_tol = 1e-10);
bool is_skew_hermitian(const Matrix& m, double rel_tol = 1e-10);
bool is_unitary(const Matrix& m, double tol = 1e-8);
bool is_projector(const Matrix& m, double tol = 1e-8);

/**
 * Dense square complex matrix tagged with its structure.
 *
 * The tag is validated on construction, so holders of an OperatorMatrix can
 * rely on it (e.g. matexp picks the eigendecomposition route for
 * skew-hermitian generators).
 */
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix m, Structure s = Structure::general);

  static OperatorMatrix hermitian(Matrix m) { return OperatorMatrix(std::move(m), Structure::hermitian); }
  static OperatorMatrix skew_hermitian(Matrix m) { return OperatorMatrix(std::move(m), Structure::skew_hermitian); }
  static OperatorMatrix unitary(Matrix m) { return OperatorMatrix(std::move(m), Structure::unitary); }

  const Matrix& matrix() const { return m_; }
  Structure structure() const { return s_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
  Structure s_ = Structure::general;
};

// Paulis and friends.
Matrix identity(Index n);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();

/** Kronecker product; entry (i*dimB+k, j*dimB+l) = A(i,j) B(k,l). */
Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/** Column-stacking vectorization, |X>. */
using VecOperator = Vector;
VecOperator vec(const Matrix& x);
/** Inverse of vec. Throws DimensionError if the length is not a perfect square. */
Matrix unvec(const VecOperator& v);

/**
 * Matrix exponential. Skew-hermitian and hermitian tags go through a
 * hermitian eigendecomposition (exactly unitary for skew-hermitian input);
 * everything else uses Pade scaling-and-squaring.
 */
Matrix matexp(const OperatorMatrix& a);
/** Pade scaling-and-squaring exponential of an arbitrary square matrix. */
Matrix expm(const Matrix& a);
/** exp(-i t H) for hermitian H, via eigendecomposition. */
Matrix expm_hermitian(const Matrix& h, double t = 1.0);
/** Principal logarithm of a unitary matrix (eigenphases in (-pi, pi]). */
Matrix logm_unitary(const Matrix& u);

/** Hilbert-Schmidt inner product tr(A^dagger B). */
Complex hs_inner(const Matrix& a, const Matrix& b);
/** Re tr(A^dagger B): the inner product that makes Mat(N) a real Euclidean space. */
double hs_real_inner(const Matrix& a, const Matrix& b);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix traceless_part(const Matrix& a);
/** Induced two-norm (largest singular value). */
double norm2(const Matrix& a);

/**
 * Adds the component of `x` orthogonal to span(basis) under Re tr(A^dagger B).
 *
 * Gram-Schmidt is run twice. The normalized residual is appended when its
 * Frobenius norm exceeds tol * max(1, ||x||_F). Returns whether the basis grew.
 */
bool orthonormal_extend(std::vector<Matrix>& basis, const Matrix& x, double tol = 1e-9);

/** Frobenius norm of x minus its real-linear projection onto span(basis). */
double projection_residual(const std::vector<Matrix>& basis, const Matrix& x);

}  // namespace qsf
