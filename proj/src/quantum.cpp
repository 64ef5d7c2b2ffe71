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

#include "qsf/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace qsf {

namespace {

int qubits_for_dim(Index dim, const char* what) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim || dim < 1) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(dim) + " is not a power of two");
  }
  return n;
}

void require_dims(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t k = static_cast<std::size_t>(std::distance(cdf.begin(), it));
  return std::min(k, cdf.size() - 1);
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());
  // Last outcome with nonzero mass absorbs the rounding slack.
  for (std::size_t k = p.size(); k-- > 0;) {
    if (p[k] > 0.0) {
      for (std::size_t j = k; j < cdf.size(); ++j) cdf[j] = 1.0;
      break;
    }
  }
  return cdf;
}

void check_distribution(const std::vector<double>& p) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total < 1e-14) throw ValidationError("measurement: all outcome probabilities vanish");
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("measurement: probabilities sum to " + std::to_string(total));
  }
}

template <class State>
Estimate estimate_from(const State& s, const Observable& m, std::size_t shots, std::uint64_t seed) {
  if (shots == 0) throw ValidationError("estimate_expectation: shots must be positive");
  const auto p = outcome_probabilities(s, m);
  check_distribution(p);
  const auto counts = sample_counts(p, shots, seed);
  const auto& comps = m.components();
  const double t = double(shots);
  double mean = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) mean += comps[k].value * double(counts[k]);
  mean /= t;
  double ss = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const double d = comps[k].value - mean;
    ss += d * d * double(counts[k]);
  }
  const double sd = shots > 1 ? std::sqrt(ss / (t - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(t)};
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
  n_qubits_ = qubits_for_dim(amps_.size(), "StateVector");
  if (std::abs(amps_.norm() - 1.0) > 1e-10) {
    throw ValidationError("StateVector: amplitudes have norm " + std::to_string(amps_.norm()));
  }
}

StateVector StateVector::basis(int n_qubits, Index index) {
  const Index dim = Index{1} << n_qubits;
  if (index < 0 || index >= dim) throw DimensionError("StateVector::basis: index out of range");
  return StateVector(Vector::Unit(dim, index));
}

StateVector StateVector::normalized(Vector amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw ValidationError("StateVector: zero vector cannot be normalized");
  return StateVector(amplitudes / n);
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw DimensionError("DensityMatrix: matrix must be square");
  n_qubits_ = qubits_for_dim(rho_.rows(), "DensityMatrix");
  if (!is_hermitian(rho_)) throw ValidationError("DensityMatrix: not hermitian");
  if (std::abs(rho_.trace().real() - 1.0) > 1e-10) throw ValidationError("DensityMatrix: trace is not one");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ValidationError("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::mixture(const std::vector<std::pair<double, StateVector>>& ensemble) {
  if (ensemble.empty()) throw ValidationError("DensityMatrix::mixture: empty ensemble");
  const Index d = ensemble.front().second.dim();
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& [p, psi] : ensemble) {
    require_dims(psi.dim(), d, "DensityMatrix::mixture");
    if (p < 0.0) throw ValidationError("DensityMatrix::mixture: negative weight");
    rho += p * psi.amplitudes() * psi.amplitudes().adjoint();
  }
  return DensityMatrix(std::move(rho));
}

Observable Observable::from_hermitian(const Matrix& m, double cluster_tol) {
  if (!is_hermitian(m)) throw ValidationError("Observable: matrix is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector& ev = es.eigenvalues();
  const Matrix& vecs = es.eigenvectors();
  Observable o;
  o.m_ = m;
  Index start = 0;
  while (start < ev.size()) {
    Index stop = start + 1;
    while (stop < ev.size() && ev(stop) - ev(stop - 1) < cluster_tol) ++stop;
    const Matrix block = vecs.middleCols(start, stop - start);
    o.components_.push_back({ev.segment(start, stop - start).mean(), block * block.adjoint()});
    start = stop;
  }
  return o;
}

Observable Observable::computational_basis(int n_qubits) {
  const Index dim = Index{1} << n_qubits;
  Observable o;
  o.m_ = Matrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    o.m_(k, k) = double(k);
    Matrix p = Matrix::Zero(dim, dim);
    p(k, k) = 1.0;
    o.components_.push_back({double(k), std::move(p)});
  }
  return o;
}

StateVector apply_gate(const Matrix& u, const StateVector& s) {
  require_dims(u.rows(), s.dim(), "apply_gate");
  if (!is_unitary(u)) throw ValidationError("apply_gate: gate is not unitary");
  return StateVector::normalized(u * s.amplitudes());
}

DensityMatrix apply_gate(const Matrix& u, const DensityMatrix& rho) {
  require_dims(u.rows(), rho.dim(), "apply_gate");
  if (!is_unitary(u)) throw ValidationError("apply_gate: gate is not unitary");
  Matrix out = u * rho.matrix() * u.adjoint();
  out = (0.5 * (out + out.adjoint())).eval();
  return DensityMatrix(std::move(out));
}

double expectation(const StateVector& s, const Observable& m) {
  require_dims(m.dim(), s.dim(), "expectation");
  const Complex v = s.amplitudes().dot(m.matrix() * s.amplitudes());
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw ValidationError("expectation: imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

double expectation(const DensityMatrix& rho, const Observable& m) {
  require_dims(m.dim(), rho.dim(), "expectation");
  const Complex v = (m.matrix() * rho.matrix()).trace();
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) {
    throw ValidationError("expectation: imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

std::vector<double> outcome_probabilities(const StateVector& s, const Observable& m) {
  require_dims(m.dim(), s.dim(), "outcome_probabilities");
  std::vector<double> p;
  for (const auto& c : m.components())
    p.push_back(std::max(0.0, s.amplitudes().dot(c.projector * s.amplitudes()).real()));
  return p;
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho, const Observable& m) {
  require_dims(m.dim(), rho.dim(), "outcome_probabilities");
  std::vector<double> p;
  for (const auto& c : m.components()) p.push_back(std::max(0.0, (c.projector * rho.matrix()).trace().real()));
  return p;
}

std::vector<std::size_t> sample_counts(const std::vector<double>& probabilities, std::size_t shots,
                                       std::uint64_t seed) {
  check_distribution(probabilities);
  const auto cdf = cumulative(probabilities);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> counts(probabilities.size(), 0);
  for (std::size_t s = 0; s < shots; ++s) ++counts[draw(cdf, unif(rng))];
  return counts;
}

MeasurementResult<StateVector> measure_projective(const StateVector& s, const Observable& m, std::uint64_t seed) {
  const auto p = outcome_probabilities(s, m);
  check_distribution(p);
  std::mt19937_64 rng(seed);
  const std::size_t k = draw(cumulative(p), std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  const auto& c = m.components()[k];
  return {c.value, k, StateVector::normalized(c.projector * s.amplitudes())};
}

MeasurementResult<DensityMatrix> measure_projective(const DensityMatrix& rho, const Observable& m,
                                                    std::uint64_t seed) {
  const auto p = outcome_probabilities(rho, m);
  check_distribution(p);
  std::mt19937_64 rng(seed);
  const std::size_t k = draw(cumulative(p), std::uniform_real_distribution<double>(0.0, 1.0)(rng));
  const auto& c = m.components()[k];
  Matrix post = c.projector * rho.matrix() * c.projector / p[k];
  post = (0.5 * (post + post.adjoint())).eval();
  return {c.value, k, DensityMatrix(std::move(post))};
}

Estimate estimate_expectation(const StateVector& s, const Observable& m, std::size_t shots, std::uint64_t seed) {
  return estimate_from(s, m, shots, seed);
}

Estimate estimate_expectation(const DensityMatrix& rho, const Observable& m, std::size_t shots,
                              std::uint64_t seed) {
  return estimate_from(rho, m, shots, seed);
}

Matrix build_qft(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 10) throw DimensionError("build_qft: n must lie in [1, 10]");
  const Index dim = Index{1} << n_qubits;
  const double norm = 1.0 / std::sqrt(double(dim));
  Matrix q(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index k = 0; k < dim; ++k) {
      // Reduce jk mod 2^n first so the phase argument stays small.
      const double frac = double((j * k) % dim) / double(dim);
      q(j, k) = norm * std::polar(1.0, 2.0 * M_PI * frac);
    }
  return q;
}

StateVector trotter_evolve(const std::vector<Matrix>& terms, double t, int steps, const StateVector& s) {
  if (steps < 1) throw ValidationError("trotter_evolve: steps must be >= 1");
  Matrix step = identity(s.dim());
  for (const auto& h : terms) {
    require_dims(h.rows(), s.dim(), "trotter_evolve");
    if (!is_hermitian(h)) throw ValidationError("trotter_evolve: term is not hermitian");
    step = expm_hermitian(h, t / steps) * step;
  }
  Vector psi = s.amplitudes();
  for (int k = 0; k < steps; ++k) psi = step * psi;
  return StateVector::normalized(std::move(psi));
}

void ParamCircuit::validate() const {
  for (const auto& h : generators) {
    require_dims(h.rows(), initial_state.dim(), "ParamCircuit");
    if (!is_hermitian(h)) throw ValidationError("ParamCircuit: generator is not hermitian");
  }
  require_dims(observable.dim(), initial_state.dim(), "ParamCircuit");
}

Matrix ParamCircuit::unitary(const RealVector& theta) const {
  if (theta.size() != Index(generators.size())) {
    throw DimensionError("ParamCircuit: expected " + std::to_string(generators.size()) + " parameters, got " +
                         std::to_string(theta.size()));
  }
  Matrix u = identity(initial_state.dim());
  for (std::size_t j = 0; j < generators.size(); ++j) u = u * expm_hermitian(generators[j], theta(Index(j)));
  return u;
}

double vqa_objective(const ParamCircuit& c, const RealVector& theta) {
  const Vector psi = c.unitary(theta) * c.initial_state.amplitudes();
  return psi.dot(c.observable.matrix() * psi).real();
}

RealVector vqa_gradient(const ParamCircuit& c, const RealVector& theta, double spacing) {
  RealVector g(theta.size());
  for (Index j = 0; j < theta.size(); ++j) {
    RealVector tp = theta, tm = theta;
    tp(j) += spacing;
    tm(j) -= spacing;
    g(j) = (vqa_objective(c, tp) - vqa_objective(c, tm)) / (2.0 * spacing);
  }
  return g;
}

VqaResult vqa_optimize(const ParamCircuit& c, const RealVector& theta0, double step, int iters) {
  if (step <= 0.0) throw ValidationError("vqa_optimize: step must be positive");
  c.validate();
  VqaResult r;
  r.theta = theta0;
  r.trace.push_back(vqa_objective(c, r.theta));
  for (int it = 0; it < iters; ++it) {
    r.theta -= step * vqa_gradient(c, r.theta);
    r.trace.push_back(vqa_objective(c, r.theta));
    if (it > 0 && r.trace.back() > r.trace[r.trace.size() - 2] + 1e-12) r.step_too_large = true;
  }
  return r;
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

std::array<double, 3> bloch_coordinates(const DensityMatrix& rho) {
  if (rho.n_qubits() != 1) throw DimensionError("bloch_coordinates: expects a single-qubit state");
  const Matrix& r = rho.matrix();
  return {(pauli_x() * r).trace().real(), (pauli_y() * r).trace().real(), (pauli_z() * r).trace().real()};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = rho.n_qubits();
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int q : kept)
    if (q < 0 || q >= n) throw DimensionError("partial_trace: qubit index out of range");
  const int nk = int(kept.size());
  const Index full = rho.dim();
  const Index reduced_dim = Index{1} << nk;

  std::vector<bool> is_kept(n, false);
  for (int q : kept) is_kept[q] = true;
  auto split = [&](Index idx, Index& kept_part, Index& traced_part) {
    kept_part = 0;
    traced_part = 0;
    for (int q = 0; q < n; ++q) {
      const Index bit = (idx >> (n - 1 - q)) & 1;
      if (is_kept[q]) kept_part = (kept_part << 1) | bit;
      else traced_part = (traced_part << 1) | bit;
    }
  };

  Matrix out = Matrix::Zero(reduced_dim, reduced_dim);
  for (Index i = 0; i < full; ++i) {
    Index ki, ti;
    split(i, ki, ti);
    for (Index j = 0; j < full; ++j) {
      Index kj, tj;
      split(j, kj, tj);
      if (ti == tj) out(ki, kj) += rho.matrix()(i, j);
    }
  }
  return DensityMatrix(std::move(out));
}

}  // namespace qsf
