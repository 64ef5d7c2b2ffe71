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

#include "qsf/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qsf {

const char* to_string(Structure s) {
  switch (s) {
    case Structure::general: return "general";
    case Structure::hermitian: return "hermitian";
    case Structure::skew_hermitian: return "skew_hermitian";
    case Structure::unitary: return "unitary";
    case Structure::projector: return "projector";
  }
  return "unknown";
}

bool is_hermitian(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() < rel_tol * scale;
}

bool is_skew_hermitian(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m + m.adjoint()).cwiseAbs().maxCoeff() < rel_tol * scale;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const auto n = m.rows();
  return (m.adjoint() * m - Matrix::Identity(n, n)).norm() < tol * std::sqrt(double(n));
}

bool is_projector(const Matrix& m, double tol) {
  return is_hermitian(m) && (m * m - m).norm() < tol;
}

OperatorMatrix::OperatorMatrix(Matrix m, Structure s) : m_(std::move(m)), s_(s) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw DimensionError("operator matrix must be square and non-empty, got " +
                         std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  }
  bool ok = true;
  switch (s_) {
    case Structure::general: break;
    case Structure::hermitian: ok = is_hermitian(m_); break;
    case Structure::skew_hermitian: ok = is_skew_hermitian(m_); break;
    case Structure::unitary: ok = is_unitary(m_); break;
    case Structure::projector: ok = is_projector(m_); break;
  }
  if (!ok) throw ValidationError(std::string("matrix is not ") + to_string(s_));
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard() { return (pauli_x() + pauli_z()) / std::sqrt(2.0); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

VecOperator vec(const Matrix& x) {
  // Eigen storage is column-major, so a reshape is exactly column stacking.
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const VecOperator& v) {
  const auto n = static_cast<Index>(std::llround(std::sqrt(double(v.size()))));
  if (n * n != v.size()) {
    throw DimensionError("unvec: length " + std::to_string(v.size()) + " is not a perfect square");
  }
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Matrix expm_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector phases = (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix expm(const Matrix& a) { return a.exp(); }

Matrix matexp(const OperatorMatrix& a) {
  const Matrix& m = a.matrix();
  switch (a.structure()) {
    case Structure::skew_hermitian:
      // A = -iH with H = iA hermitian.
      return expm_hermitian(kI * m, 1.0);
    case Structure::hermitian:
    case Structure::projector: {
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      const Vector d = es.eigenvalues().array().exp().cast<Complex>();
      return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
    }
    default:
      return expm(m);
  }
}

Matrix logm_unitary(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  Vector logs(t.rows());
  for (Index i = 0; i < t.rows(); ++i) logs(i) = Complex(std::log(std::abs(t(i, i))), std::arg(t(i, i)));
  return schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("hs_inner: dimension mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_real_inner(const Matrix& a, const Matrix& b) {
  // Re conj(a) b = a.re b.re + a.im b.im
  const auto n = a.size();
  const double* pa = reinterpret_cast<const double*>(a.data());
  const double* pb = reinterpret_cast<const double*>(b.data());
  double s = 0.0;
  for (Index k = 0; k < 2 * n; ++k) s += pa[k] * pb[k];
  return s;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix traceless_part(const Matrix& a) {
  const auto n = a.rows();
  return a - (a.trace() / double(n)) * Matrix::Identity(n, n);
}

double norm2(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

namespace {

void project_out(const std::vector<Matrix>& basis, Matrix& r) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& e : basis) r -= hs_real_inner(e, r) * e;
}

}  // namespace

bool orthonormal_extend(std::vector<Matrix>& basis, const Matrix& x, double tol) {
  if (!basis.empty() && (basis.front().rows() != x.rows() || basis.front().cols() != x.cols())) {
    throw DimensionError("orthonormal_extend: dimension mismatch");
  }
  Matrix r = x;
  project_out(basis, r);
  const double rn = r.norm();
  if (rn > tol * std::max(1.0, x.norm())) {
    basis.push_back(r / rn);
    return true;
  }
  return false;
}

double projection_residual(const std::vector<Matrix>& basis, const Matrix& x) {
  if (!basis.empty() && (basis.front().rows() != x.rows() || basis.front().cols() != x.cols())) {
    throw DimensionError("projection_residual: dimension mismatch");
  }
  Matrix r = x;
  project_out(basis, r);
  return r.norm();
}

}  // namespace qsf
