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

#include "qsf/lie.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <cmath>
#include <deque>
#include <memory>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "qsf/parallel.hpp"

namespace qsf {

BilinearSystem::BilinearSystem(Matrix drift, std::vector<Matrix> controls)
    : drift_(std::move(drift)), controls_(std::move(controls)) {
  const Index n = drift_.rows();
  if (n == 0 || drift_.cols() != n) throw DimensionError("BilinearSystem: drift must be square and non-empty");
  if (!is_hermitian(drift_)) throw ValidationError("BilinearSystem: drift is not hermitian");
  for (const auto& h : controls_) {
    if (h.rows() != n || h.cols() != n) throw DimensionError("BilinearSystem: control dimension mismatch");
    if (!is_hermitian(h)) throw ValidationError("BilinearSystem: control is not hermitian");
  }
}

std::vector<Matrix> BilinearSystem::hamiltonians() const {
  std::vector<Matrix> hs{drift_};
  hs.insert(hs.end(), controls_.begin(), controls_.end());
  return hs;
}

Matrix adjoint_superop(const Matrix& h) {
  const Index n = h.rows();
  return kron(identity(n), h) - kron(h.transpose(), identity(n));
}

LieBasis lie_closure(const std::vector<Matrix>& generators, const LieOptions& options) {
  LieBasis out;
  if (generators.empty()) return out;
  const Index n = generators.front().rows();
  out.dim_space = n;
  const Index cap = options.cap > 0 ? options.cap : n * n - 1;

  std::vector<int> depth;
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) throw DimensionError("lie_closure: generator dimension mismatch");
    if (!is_skew_hermitian(g)) throw ValidationError("lie_closure: generator is not skew-hermitian");
    if (Index(out.elements.size()) < cap && orthonormal_extend(out.elements, traceless_part(g), options.rank_tol))
      depth.push_back(1);
  }

  // Element i is commuted against every j < i; later elements pick up (i, later) themselves.
  for (std::size_t i = 1; i < out.elements.size() && Index(out.elements.size()) < cap; ++i) {
    std::vector<Matrix> brackets(i);
    parallel_for(i, [&](std::size_t j) { brackets[j] = commutator(out.elements[i], out.elements[j]); });
    for (std::size_t j = 0; j < i && Index(out.elements.size()) < cap; ++j) {
      if (orthonormal_extend(out.elements, brackets[j], options.rank_tol))
        depth.push_back(std::max(depth[i], depth[j]) + 1);
    }
  }
  out.generation_depth = depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());
  return out;
}

double closure_defect(const LieBasis& basis) {
  double worst = 0.0;
  const auto& e = basis.elements;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const Matrix c = commutator(e[i], e[j]);
      const double cn = c.norm();
      if (cn < 1e-14) continue;
      worst = std::max(worst, projection_residual(e, c) / cn);
    }
  return worst;
}

ControllabilityResult controllability(const BilinearSystem& sys, const LieOptions& options) {
  std::vector<Matrix> gens;
  for (const auto& h : sys.hamiltonians()) gens.push_back(kI * h);
  ControllabilityResult r;
  r.basis = lie_closure(gens, options);
  r.closure_dim = r.basis.dim();
  r.full_dim = sys.dim() * sys.dim() - 1;
  r.controllable = r.closure_dim == r.full_dim;
  return r;
}

namespace {

/**
 * Joint commutant of hermitian superoperators B_k (the ad_{H_k}, plus an
 * optional projector), solved in a basis that diagonalizes a generic element
 * G of the generator span.
 *
 * Every commutant element commutes with ad_G, so in that basis it is block
 * diagonal over the eigenvalue clusters of ad_G (differences d_a - d_b). Only
 * those block entries are unknowns.
 *
 * When the basis also diagonalizes a hermitian K that commutes with every
 * H_k, left and right multiplication by K commute with every ad_{H_k}. The
 * B_k then preserve the (row, column) K-labels of matrix units, and the normal
 * operator splits into independent pieces keyed by the labels of both indices
 * of an unknown.
 */
struct CommutantOps {
  Index n2 = 0;                   // superoperator dimension N^2
  std::vector<Matrix> superops;   // hermitian, rotated to the joint eigenbasis
  std::vector<Matrix> squares;    // superops[k]^2
  double scale = 0.0;             // sum of ||superop||_2^2
};

struct CommutantBlock {
  std::shared_ptr<const CommutantOps> ops;
  std::vector<std::pair<Index, Index>> unknowns;  // (row, col) entries of S

  Matrix embed(const Vector& x) const {
    Matrix s = Matrix::Zero(ops->n2, ops->n2);
    for (std::size_t a = 0; a < unknowns.size(); ++a) s(unknowns[a].first, unknowns[a].second) = x(Index(a));
    return s;
  }

  Vector gather(const Matrix& s) const {
    Vector x(Index(unknowns.size()));
    for (std::size_t a = 0; a < unknowns.size(); ++a) x(Index(a)) = s(unknowns[a].first, unknowns[a].second);
    return x;
  }

  Vector apply(const Vector& x) const {
    const Index n2 = ops->n2;
    const Matrix s = embed(x);
    Vector out(Index(ops->superops.size()) * n2 * n2);
    for (std::size_t k = 0; k < ops->superops.size(); ++k) {
      const Matrix c = ops->superops[k] * s - s * ops->superops[k];
      out.segment(Index(k) * n2 * n2, n2 * n2) = vec(c);
    }
    return out;
  }

  Vector apply_normal(const Vector& x) const {
    const Matrix s = embed(x);
    Matrix acc = Matrix::Zero(ops->n2, ops->n2);
    for (const auto& b : ops->superops) {
      const Matrix c = b * s - s * b;
      acc += b * c - c * b;
    }
    return gather(acc);
  }

  // <L(E_pq), L(E_rs)> = sum_B [d_qs (B^2)_pr + d_pr (B^2)_sq - 2 B_pr B_sq]
  Matrix gram() const {
    const Index u = Index(unknowns.size());
    Matrix m = Matrix::Zero(u, u);
    auto row = [&](std::size_t ai) {
      const Index a = Index(ai);
      const auto [p, q] = unknowns[ai];
      for (Index c = 0; c < u; ++c) {
        const auto [r, s] = unknowns[std::size_t(c)];
        Complex v = 0.0;
        for (std::size_t k = 0; k < ops->superops.size(); ++k) {
          const Matrix& b = ops->superops[k];
          const Matrix& b2 = ops->squares[k];
          if (q == s) v += b2(p, r);
          if (p == r) v += b2(s, q);
          v -= 2.0 * b(p, r) * b(s, q);
        }
        m(a, c) = v;
      }
    };
    if (u >= 64) {
      parallel_for(std::size_t(u), row);
    } else {
      for (std::size_t a = 0; a < std::size_t(u); ++a) row(a);
    }
    return m;
  }
};

// Largest N^2 for which the Hilbert-space symmetry K is computed densely.
constexpr Index kSymmetryLimit = 1024;

/**
 * A random hermitian element of {K : [H, K] = 0 for every H in hs}, with unit
 * Frobenius norm, or an empty matrix when N^2 exceeds kSymmetryLimit. The
 * kernel comes from a dense eigensolve of sum_H ad_H^2, which is
 * I (x) H^2 - 2 H^T (x) H + (H^2)^T (x) I.
 */
Matrix generic_symmetry(const std::vector<Matrix>& hs, double scale, double tol, std::mt19937_64& rng) {
  const Index n = hs.front().rows();
  if (n * n > kSymmetryLimit) return {};
  const Matrix id = identity(n);
  Matrix a = Matrix::Zero(n * n, n * n);
  for (const auto& h : hs) {
    const Matrix h2 = h * h;
    a += kron(id, h2) - 2.0 * kron(h.transpose(), h) + kron(h2.transpose(), id);
  }
  a = (0.5 * (a + a.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const double ref = std::max(es.eigenvalues().maxCoeff(), scale);
  std::normal_distribution<double> g;
  Vector x = Vector::Zero(n * n);
  for (Index i = 0; i < n * n; ++i)
    if (es.eigenvalues()(i) < tol * ref) x += g(rng) * es.eigenvectors().col(i);
  const Matrix k = unvec(x);
  Matrix herm = 0.5 * (k + k.adjoint());
  herm -= (herm.trace() / double(n)) * id;
  const double norm = herm.norm();
  if (norm < 1e-12) return {};
  return herm / norm;
}

// Groups sorted values into clusters whose neighbours differ by less than `gap`.
// Returns the cluster index of every value.
std::vector<int> cluster_labels(const RealVector& values, double gap) {
  std::vector<Index> order(std::size_t(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index x, Index y) { return values(x) < values(y); });
  std::vector<int> label(order.size());
  int current = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && values(order[i]) - values(order[i - 1]) >= gap) ++current;
    label[std::size_t(order[i])] = current;
  }
  return label;
}

std::vector<CommutantBlock> make_commutant_blocks(const BilinearSystem& sys, const Matrix* observable,
                                                  const NullspaceOptions& options) {
  const Index n = sys.dim();
  const auto hs = sys.hamiltonians();

  auto ops = std::make_shared<CommutantOps>();
  ops->n2 = n * n;
  for (const auto& h : hs) {
    // ||ad_H||_2 is the spread of the spectrum of H.
    const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
    ops->scale += std::pow(ev.maxCoeff() - ev.minCoeff(), 2);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> g;
  Matrix generic = Matrix::Zero(n, n);
  for (const auto& h : hs) generic += g(rng) * h;

  // A projector onto an observable does not preserve K-labels, so K is only used without one.
  Matrix k = observable ? Matrix() : generic_symmetry(hs, ops->scale, options.tol, rng);
  Matrix v;
  RealVector d(n), kappa = RealVector::Zero(n);
  if (k.size()) {
    const double gn = generic.norm();
    const Matrix m = generic + (gn > 0.0 ? gn * std::uniform_real_distribution<double>(0.5, 1.5)(rng) : 1.0) * k;
    v = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvectors();
    const Matrix gd = v.adjoint() * generic * v, kd = v.adjoint() * k * v;
    d = gd.diagonal().real();
    kappa = kd.diagonal().real();
    // A near-degenerate combination can mix joint eigenspaces; fall back to G alone then.
    const double off_g = (gd - Matrix(d.cast<Complex>().asDiagonal())).norm();
    const double off_k = (kd - Matrix(kappa.cast<Complex>().asDiagonal())).norm();
    if (off_g > 1e-9 * std::max(1.0, gn) || off_k > 1e-9) k.resize(0, 0);
  }
  if (!k.size()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(generic);
    v = es.eigenvectors();
    d = es.eigenvalues();
    kappa.setZero();
  }

  for (const auto& h : hs) ops->superops.push_back(adjoint_superop(v.adjoint() * h * v));
  if (observable) {
    const Matrix ct = traceless_part(*observable);
    const double cn = ct.norm();
    if (cn < 1e-12) throw ValidationError("joint_commutant_dim: observable has no traceless part");
    const Vector w = vec(v.adjoint() * ct * v) / cn;
    ops->superops.push_back(w * w.adjoint());
    ops->scale += 1.0;
  }
  for (const auto& b : ops->superops) ops->squares.push_back(b * b);

  // ad_G eigenvalue of column-stacked index a + n b is d_a - d_b. Clustering
  // merges aggressively: a merged block only adds unknowns, a split one loses solutions.
  RealVector ad_values(ops->n2);
  for (Index idx = 0; idx < ops->n2; ++idx) ad_values(idx) = d(idx % n) - d(idx / n);
  const std::vector<int> ad_cluster = cluster_labels(ad_values, 1e-6 * std::max(1.0, d.cwiseAbs().maxCoeff()));
  const std::vector<int> k_label = cluster_labels(kappa, 1e-6);

  std::vector<std::vector<Index>> members;
  for (Index idx = 0; idx < ops->n2; ++idx) {
    const std::size_t c = std::size_t(ad_cluster[std::size_t(idx)]);
    if (members.size() <= c) members.resize(c + 1);
    members[c].push_back(idx);
  }
  std::map<std::array<int, 4>, std::vector<std::pair<Index, Index>>> pieces;
  for (const auto& cluster : members)
    for (Index a : cluster)
      for (Index b : cluster) {
        const std::array<int, 4> key{k_label[std::size_t(a % n)], k_label[std::size_t(a / n)],
                                     k_label[std::size_t(b % n)], k_label[std::size_t(b / n)]};
        pieces[key].emplace_back(a, b);
      }

  std::vector<CommutantBlock> blocks;
  blocks.reserve(pieces.size());
  for (auto& [key, unknowns] : pieces) blocks.push_back(CommutantBlock{ops, std::move(unknowns)});
  return blocks;
}

}  // namespace

Index joint_commutant_dim(const BilinearSystem& sys, const Matrix* observable, const LieOptions& options) {
  if (observable && (observable->rows() != sys.dim() || observable->cols() != sys.dim()))
    throw DimensionError("joint_commutant_dim: observable dimension mismatch");
  NullspaceOptions opts = options.nullspace;
  // The block maps are linear by construction.
  opts.check_linearity = false;
  Index total = 0;
  for (auto& block : make_commutant_blocks(sys, observable, options.nullspace)) {
    const auto prob = std::make_shared<const CommutantBlock>(std::move(block));
    LinearMap map;
    map.dim = Index(prob->unknowns.size());
    map.apply = [prob](const Vector& x) { return prob->apply(x); };
    map.apply_normal = [prob](const Vector& x) { return prob->apply_normal(x); };
    map.normal_matrix = [prob]() { return prob->gram(); };
    map.scale = prob->ops->scale;
    total += nullspace_dim(map, opts);
  }
  return total;
}

Index symmetry_dim(const BilinearSystem& sys, const LieOptions& options) {
  return joint_commutant_dim(sys, nullptr, options);
}

bool gate_reachable(const LieBasis& basis, const Matrix& target) {
  if (target.rows() != basis.dim_space || target.cols() != basis.dim_space)
    throw DimensionError("gate_reachable: target dimension does not match the basis representation");
  if (!is_skew_hermitian(target)) throw ValidationError("gate_reachable: target is not skew-hermitian");
  return projection_residual(basis.elements, traceless_part(target)) <= 1e-8 * target.norm();
}

bool simulable(const LieBasis& a, const LieBasis& b) {
  if (a.dim_space != b.dim_space) throw DimensionError("simulable: bases live in different representations");
  for (const auto& e : b.elements)
    if (projection_residual(a.elements, e) > 1e-8 * e.norm()) return false;
  return true;
}

ObservabilitySpace observability_space(const BilinearSystem& sys, const Matrix& c, const LieOptions& options) {
  const Index n = sys.dim();
  if (c.rows() != n || c.cols() != n) throw DimensionError("observability_space: observable dimension mismatch");
  if (!is_hermitian(c)) throw ValidationError("observability_space: observable is not hermitian");
  ObservabilitySpace out;
  const Matrix ct = traceless_part(c);
  if (ct.norm() < 1e-12 * std::max(1.0, c.norm())) return out;

  const Index full = n * n - 1;
  std::vector<Matrix> gens;
  for (const auto& h : sys.hamiltonians()) gens.push_back(kI * h);
  orthonormal_extend(out.basis, kI * ct, options.rank_tol);
  std::deque<std::size_t> pending{0};
  while (!pending.empty() && Index(out.basis.size()) < full) {
    const std::size_t i = pending.front();
    pending.pop_front();
    for (const auto& g : gens) {
      if (Index(out.basis.size()) >= full) break;
      if (orthonormal_extend(out.basis, commutator(g, out.basis[i]), options.rank_tol))
        pending.push_back(out.basis.size() - 1);
    }
  }
  out.dim = Index(out.basis.size());
  return out;
}

ObservabilityVerdict observable_test(const BilinearSystem& sys, const Matrix& c, const LieOptions& options) {
  ObservabilityVerdict v;
  v.obs_space_dim = observability_space(sys, c, options).dim;
  const bool by_space = v.obs_space_dim == sys.dim() * sys.dim() - 1;
  if (v.obs_space_dim == 0) {
    // No traceless part: nothing to observe and P_C is undefined.
    v.observable = false;
    return v;
  }
  v.commutant_dim = joint_commutant_dim(sys, &c, options);
  const bool by_commutant = v.commutant_dim == 2;
  if (by_space != by_commutant) {
    throw ConsistencyError("observable_test: observability space has dimension " + std::to_string(v.obs_space_dim) +
                           " but the joint commutant with P_C has dimension " + std::to_string(v.commutant_dim));
  }
  v.observable = by_space;
  return v;
}

bool tomografiable(const BilinearSystem& sys, const Matrix& c, const LieOptions& options) {
  if (!controllability(sys, options).controllable) return false;
  return observable_test(sys, c, options).observable;
}

AnalysisReport analyze(const BilinearSystem& sys, const std::map<std::string, Matrix>& observables,
                       const LieOptions& options) {
  AnalysisReport r;
  r.dim = sys.dim();
  const auto ctrl = controllability(sys, options);
  r.closure_dim = ctrl.closure_dim;
  r.full_dim = ctrl.full_dim;
  r.controllable = ctrl.controllable;
  r.generation_depth = ctrl.basis.generation_depth;
  r.symmetry_dim = symmetry_dim(sys, options);
  if (r.controllable != (r.symmetry_dim == 2)) {
    throw ConsistencyError("analyze: closure dimension " + std::to_string(r.closure_dim) + " of " +
                           std::to_string(r.full_dim) + " disagrees with symmetry dimension " +
                           std::to_string(r.symmetry_dim));
  }
  for (const auto& [name, c] : observables) {
    const auto v = observable_test(sys, c, options);
    ObservableReport o;
    o.name = name;
    o.obs_space_dim = v.obs_space_dim;
    o.complement_dim = r.full_dim - v.obs_space_dim;
    o.commutant_dim = v.commutant_dim;
    o.observable = v.observable;
    o.tomografiable = r.controllable && v.observable;
    r.observables.push_back(o);
  }
  r.notes.push_back(
      "simulability is tested by literal subspace inclusion, which is sufficient but not necessary "
      "for inclusion up to isomorphism");
  if (!r.controllable) {
    r.notes.push_back("system has non-trivial symmetries: closure misses " +
                      std::to_string(r.full_dim - r.closure_dim) + " directions of su(" + std::to_string(r.dim) + ")");
  }
  return r;
}

}  // namespace qsf
