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

#include "qsf/nullspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace qsf {

namespace {

Matrix random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) x(i, j) = Complex(g(rng), g(rng));
  return x;
}

void check_linearity(const LinearMap& map, std::mt19937_64& rng) {
  const Vector x = random_block(map.dim, 1, rng).col(0);
  const Vector y = random_block(map.dim, 1, rng).col(0);
  const Complex alpha(0.7, -0.3), beta(-1.1, 0.4);
  const Vector lhs = map.apply(alpha * x + beta * y);
  const Vector rhs = alpha * map.apply(x) + beta * map.apply(y);
  if (lhs.size() != rhs.size()) throw ValidationError("nullspace_dim: map output length is not constant");
  const double scale = std::max(1.0, rhs.norm());
  if ((lhs - rhs).norm() > 1e-8 * scale) throw ValidationError("nullspace_dim: map failed the linearity check");
}

Matrix assemble_normal(const LinearMap& map) {
  if (map.normal_matrix) return map.normal_matrix();
  const Index d = map.dim;
  if (map.apply_normal) {
    Matrix m(d, d);
    for (Index j = 0; j < d; ++j) m.col(j) = map.apply_normal(Vector::Unit(d, j));
    return m;
  }
  Matrix a;
  for (Index j = 0; j < d; ++j) {
    const Vector col = map.apply(Vector::Unit(d, j));
    if (j == 0) a.resize(col.size(), d);
    a.col(j) = col;
  }
  return a.adjoint() * a;
}

Index dense_nullspace_dim(const LinearMap& map, double tol) {
  Matrix m = assemble_normal(map);
  m = (0.5 * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  const double ref = std::max(ev.size() ? ev.maxCoeff() : 0.0, map.scale);
  if (ref <= 0.0) return map.dim;
  return static_cast<Index>((ev.array() < tol * ref).count());
}

/// Orthonormalizes the columns of p against `locked`, `basis` and each other; drops dependent columns.
Matrix orthonormalize(Matrix p, const Matrix& locked, const Matrix& basis) {
  Matrix out(p.rows(), 0);
  for (Index j = 0; j < p.cols(); ++j) {
    Vector v = p.col(j);
    const double before = v.norm();
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols()) v -= locked * (locked.adjoint() * v);
      if (basis.cols()) v -= basis * (basis.adjoint() * v);
      if (out.cols()) v -= out * (out.adjoint() * v);
    }
    const double after = v.norm();
    if (after > 1e-10 * before) {
      out.conservativeResize(Eigen::NoChange, out.cols() + 1);
      out.col(out.cols() - 1) = v / after;
    }
  }
  return out;
}

struct RitzResult {
  RealVector values;
  Matrix vectors;    // Ritz vectors, ascending
  RealVector residuals;
  bool exhausted = false;
};

/// Block Krylov space from `start`, restricted to the complement of `locked`, then Rayleigh-Ritz.
RitzResult block_krylov(const LinearMap& map, const Matrix& start, const Matrix& locked, Index max_dim) {
  const Index d = map.dim;
  Matrix v(d, 0), w(d, 0);
  Matrix p = orthonormalize(start, locked, v);
  while (p.cols() > 0 && v.cols() < max_dim) {
    const Index take = std::min<Index>(p.cols(), max_dim - v.cols());
    Matrix bp(d, take);
    for (Index j = 0; j < take; ++j) bp.col(j) = map.apply_normal(p.col(j));
    v.conservativeResize(Eigen::NoChange, v.cols() + take);
    w.conservativeResize(Eigen::NoChange, w.cols() + take);
    v.rightCols(take) = p.leftCols(take);
    w.rightCols(take) = bp;
    p = orthonormalize(bp, locked, v);
  }
  Matrix h = v.adjoint() * w;
  h = (0.5 * (h + h.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RitzResult r;
  r.values = es.eigenvalues();
  r.vectors = v * es.eigenvectors();
  const Matrix bx = w * es.eigenvectors();
  r.residuals.resize(r.values.size());
  for (Index i = 0; i < r.values.size(); ++i)
    r.residuals(i) = (bx.col(i) - r.values(i) * r.vectors.col(i)).norm();
  r.exhausted = v.cols() + locked.cols() >= d;
  return r;
}

Index iterative_nullspace_dim(const LinearMap& map, const NullspaceOptions& opt, std::mt19937_64& rng) {
  if (!map.apply_normal) throw Error("nullspace_dim: iterative path needs apply_normal");
  const Index d = map.dim;
  const Index b = std::max<Index>(1, std::min(opt.block_size, d));

  // Spectral scale from a short single-vector Lanczos run.
  const Matrix none(d, 0);
  const RitzResult top = block_krylov(map, random_block(d, 1, rng), none, std::min<Index>(d, 80));
  const double ref = std::max(top.values.size() ? top.values.maxCoeff() : 0.0, map.scale);
  if (ref <= 0.0) return d;
  const double threshold = opt.tol * ref;
  const double res_tol = 1e-6 * ref;

  Matrix locked(d, 0);
  Matrix start = random_block(d, b, rng);
  std::vector<double> last_residuals;
  for (Index restart = 0; restart < opt.max_restarts; ++restart) {
    const Index room = d - locked.cols();
    if (room <= 0) return d;
    const RitzResult rr = block_krylov(map, start, locked, std::min(opt.krylov_dim, room));
    if (rr.exhausted) {
      return locked.cols() + static_cast<Index>((rr.values.array() < threshold).count());
    }
    Index n_locked_now = 0;
    bool settled = false;
    Index first_open = 0;
    for (Index i = 0; i < rr.values.size(); ++i) {
      if (rr.values(i) < threshold && rr.residuals(i) <= res_tol) {
        Matrix x = orthonormalize(rr.vectors.col(i), locked, Matrix(d, 0));
        if (x.cols()) {
          locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
          locked.col(locked.cols() - 1) = x.col(0);
          ++n_locked_now;
        }
        first_open = i + 1;
        continue;
      }
      settled = rr.values(i) >= threshold && rr.residuals(i) <= res_tol;
      first_open = i;
      break;
    }
    if (settled && n_locked_now == 0) return locked.cols();

    last_residuals.assign(rr.residuals.data() + first_open,
                          rr.residuals.data() + std::min<Index>(rr.residuals.size(), first_open + b));
    if (n_locked_now > 0) {
      start = random_block(d, b, rng);
    } else {
      const Index keep = std::min<Index>(b, rr.vectors.cols() - first_open);
      start = rr.vectors.middleCols(first_open, keep);
    }
  }
  throw ConvergenceError("nullspace_dim: block Krylov search did not converge after " +
                             std::to_string(opt.max_restarts) + " restarts",
                         last_residuals);
}

}  // namespace

Index nullspace_dim(const LinearMap& map, const NullspaceOptions& options) {
  if (map.dim <= 0) throw DimensionError("nullspace_dim: empty domain");
  if (!map.apply) throw Error("nullspace_dim: map has no apply");
  std::mt19937_64 rng(options.seed);
  if (options.check_linearity) check_linearity(map, rng);
  if (map.dim <= options.dense_limit) return dense_nullspace_dim(map, options.tol);
  return iterative_nullspace_dim(map, options, rng);
}

LinearMap dense_linear_map(const Matrix& a) {
  LinearMap m;
  m.dim = a.cols();
  m.apply = [a](const Vector& x) -> Vector { return a * x; };
  m.apply_normal = [a](const Vector& x) -> Vector { return a.adjoint() * (a * x); };
  m.normal_matrix = [a]() -> Matrix { return a.adjoint() * a; };
  return m;
}

}  // namespace qsf
