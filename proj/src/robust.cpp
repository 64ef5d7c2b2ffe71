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

#include "qsf/robust.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace qsf {

PulseSchedule PulseSchedule::zeros(Index channels, Index segments, double horizon) {
  return PulseSchedule{horizon, RealMatrix::Zero(channels, segments)};
}

void PulseSchedule::validate(std::optional<double> a_max) const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("PulseSchedule: horizon must be positive");
  if (segments() < 1) throw ValidationError("PulseSchedule: at least one segment required");
  if (!amplitudes.allFinite()) throw ValidationError("PulseSchedule: amplitudes must be finite");
  if (a_max && amplitudes.size() && amplitudes.cwiseAbs().maxCoeff() > *a_max)
    throw ValidationError("PulseSchedule: amplitude exceeds the configured bound");
}

void UncertaintyModel::validate(Index system_dim) const {
  if (!(delta >= 0.0)) throw ValidationError("UncertaintyModel: delta must be non-negative");
  if (bath_dim < 1) throw ValidationError("UncertaintyModel: bath dimension must be positive");
  const Index full = system_dim * bath_dim;
  for (const auto& e : directions) {
    if (e.rows() != full || e.cols() != full) throw DimensionError("UncertaintyModel: direction dimension mismatch");
    if (!is_hermitian(e)) throw ValidationError("UncertaintyModel: direction is not hermitian");
  }
  for (const auto& s : samples) {
    if (s.rows() != full || s.cols() != full) throw DimensionError("UncertaintyModel: sample dimension mismatch");
    if (!is_hermitian(s)) throw ValidationError("UncertaintyModel: sample is not hermitian");
    if (norm2(s) > delta + 1e-9) throw ValidationError("UncertaintyModel: sample exceeds the two-norm bound");
  }
}

namespace {

void check_schedule(const BilinearSystem& sys, const PulseSchedule& p) {
  if (p.channels() != Index(sys.controls().size())) {
    throw DimensionError("schedule has " + std::to_string(p.channels()) + " channels but the system has " +
                         std::to_string(sys.controls().size()) + " controls");
  }
  p.validate();
}

struct GaussLegendre {
  RealVector nodes;    // on [0, 1]
  RealVector weights;  // sum to 1
};

GaussLegendre gauss_legendre(int n) {
  GaussLegendre gl{RealVector(n), RealVector(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      const double pn = n == 1 ? x : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    gl.nodes(i) = 0.5 * (1.0 - x);
    gl.weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);  // 2/((1-x^2)p'^2) scaled to [0,1]
  }
  return gl;
}

double op_norm(const Matrix& m, NormKind kind) { return kind == NormKind::two ? norm2(m) : m.norm(); }

// int_0^tau exp(i w s) ds
Complex phase_integral(double w, double tau) {
  const double x = w * tau;
  if (std::abs(x) < 1e-6) return tau * Complex(1.0 - x * x / 6.0, x / 2.0);
  return (std::polar(1.0, x) - 1.0) / (kI * w);
}

}  // namespace

Matrix segment_hamiltonian(const BilinearSystem& sys, const PulseSchedule& p, Index k) {
  Matrix h = sys.drift();
  for (Index j = 0; j < p.channels(); ++j) h += p.amplitudes(j, k) * sys.controls()[std::size_t(j)];
  return h;
}

std::vector<Matrix> propagate_pwc(const BilinearSystem& sys, const PulseSchedule& p) {
  check_schedule(sys, p);
  std::vector<Matrix> us{identity(sys.dim())};
  const double tau = p.segment_length();
  for (Index k = 0; k < p.segments(); ++k) us.push_back(expm_hermitian(segment_hamiltonian(sys, p, k), tau) * us.back());
  return us;
}

Matrix propagate_perturbed(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& perturbation,
                           Index bath_dim) {
  check_schedule(sys, p);
  const Index full = sys.dim() * bath_dim;
  if (perturbation.rows() != full || perturbation.cols() != full)
    throw DimensionError("propagate_perturbed: perturbation dimension mismatch");
  const double tau = p.segment_length();
  const Matrix ib = identity(bath_dim);
  Matrix u = identity(full);
  for (Index k = 0; k < p.segments(); ++k)
    u = expm_hermitian(kron(segment_hamiltonian(sys, p, k), ib) + perturbation, tau) * u;
  return u;
}

Matrix interaction_unitary(const Matrix& u_nom, const Matrix& u_pert) {
  if (u_nom.rows() != u_pert.rows() || u_nom.cols() != u_pert.cols())
    throw DimensionError("interaction_unitary: dimension mismatch");
  return u_nom.adjoint() * u_pert;
}

Matrix avg_interaction_hamiltonian(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& perturbation,
                                   Index bath_dim, int quad_points) {
  check_schedule(sys, p);
  const Index full = sys.dim() * bath_dim;
  if (perturbation.rows() != full || perturbation.cols() != full)
    throw DimensionError("avg_interaction_hamiltonian: perturbation dimension mismatch");
  if (quad_points < 0) throw ValidationError("avg_interaction_hamiltonian: quad_points must be >= 0");
  const double tau = p.segment_length();
  const Matrix ib = identity(bath_dim);
  const auto gl = quad_points > 0 ? gauss_legendre(quad_points) : GaussLegendre{};

  Matrix acc = Matrix::Zero(full, full);
  Matrix u_start = identity(sys.dim());
  for (Index k = 0; k < p.segments(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(segment_hamiltonian(sys, p, k));
    const Matrix v = kron(es.eigenvectors(), ib);
    const Vector ev = es.eigenvalues().cast<Complex>();
    const RealVector lam = kron(ev, Vector(Vector::Ones(bath_dim))).real();
    const Matrix pk = kron(u_start, ib);
    // Work in the segment eigenbasis: M = V^dagger H~ V, G(s) = P^dagger V e^{i L s} M e^{-i L s} V^dagger P.
    const Matrix m = v.adjoint() * perturbation * v;
    Matrix seg(full, full);
    if (quad_points == 0) {
      for (Index a = 0; a < full; ++a)
        for (Index b = 0; b < full; ++b) seg(a, b) = m(a, b) * phase_integral(lam(a) - lam(b), tau);
    } else {
      seg.setZero();
      for (int q = 0; q < quad_points; ++q) {
        const double s = gl.nodes(q) * tau;
        const Vector ph = (kI * s * lam.cast<Complex>()).array().exp();
        seg += (gl.weights(q) * tau) * (ph.asDiagonal() * m * ph.conjugate().asDiagonal());
      }
    }
    acc += pk.adjoint() * v * seg * v.adjoint() * pk;
    u_start = es.eigenvectors() * (-kI * tau * es.eigenvalues().cast<Complex>()).array().exp().matrix().asDiagonal() *
              es.eigenvectors().adjoint() * u_start;
  }
  acc /= p.horizon;
  return 0.5 * (acc + acc.adjoint());
}

RobustnessMeasure j_robust(const BilinearSystem& sys, const PulseSchedule& p, const UncertaintyModel& unc,
                           int quad_points, NormKind norm, std::uint64_t seed) {
  if (unc.directions.empty() && unc.samples.empty()) throw ValidationError("j_robust: empty uncertainty model");
  RobustnessMeasure out;
  for (const auto& s : unc.samples)
    out.value = std::max(out.value, op_norm(avg_interaction_hamiltonian(sys, p, s, unc.bath_dim, quad_points), norm));
  if (unc.directions.empty() || unc.delta == 0.0) return out;

  // The average is linear in H~, so only the per-direction averages are needed.
  std::vector<Matrix> avg, dirs;
  for (const auto& e : unc.directions) {
    const double en = norm2(e);
    if (en == 0.0) continue;
    dirs.push_back(e / en);
    avg.push_back(avg_interaction_hamiltonian(sys, p, e / en, unc.bath_dim, quad_points));
  }
  if (dirs.empty()) return out;
  if (dirs.size() == 1) {
    out.value = std::max(out.value, unc.delta * op_norm(avg.front(), norm));
    return out;
  }

  // max ||sum c_i avg_i|| / ||sum c_i E_i||_2 over directions c; restarted projected ascent.
  const Index m = Index(dirs.size());
  auto ratio = [&](const RealVector& c) {
    Matrix num = Matrix::Zero(avg.front().rows(), avg.front().cols());
    Matrix den = num;
    for (Index i = 0; i < m; ++i) {
      num += c(i) * avg[std::size_t(i)];
      den += c(i) * dirs[std::size_t(i)];
    }
    const double dn = norm2(den);
    return dn > 1e-14 ? op_norm(num, norm) / dn : 0.0;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double best = 0.0;
  for (int restart = 0; restart < 16; ++restart) {
    RealVector c(m);
    for (Index i = 0; i < m; ++i) c(i) = g(rng);
    c.normalize();
    double f = ratio(c);
    double step = 0.5;
    for (int it = 0; it < 200 && step > 1e-9; ++it) {
      RealVector grad(m);
      for (Index i = 0; i < m; ++i) {
        RealVector cp = c, cm = c;
        cp(i) += 1e-7;
        cm(i) -= 1e-7;
        grad(i) = (ratio(cp) - ratio(cm)) / 2e-7;
      }
      grad -= grad.dot(c) * c;
      if (grad.norm() < 1e-12) break;
      RealVector trial = (c + step * grad).normalized();
      const double ft = ratio(trial);
      if (ft > f) {
        c = trial;
        f = ft;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, f);
  }
  out.value = std::max(out.value, unc.delta * best);
  out.heuristic = true;
  return out;
}

double fidelity_state(const StateVector& psi, const Matrix& u_des, const Matrix& u) {
  if (u_des.rows() != psi.dim() || u.rows() != psi.dim()) throw DimensionError("fidelity_state: dimension mismatch");
  const Complex a = (u_des * psi.amplitudes()).dot(u * psi.amplitudes());
  return std::min(1.0, std::norm(a));
}

double fidelity_nominal_gate(const Matrix& u_s, const Matrix& w) {
  if (u_s.rows() != w.rows() || u_s.cols() != w.cols()) throw DimensionError("fidelity_nominal_gate: dimension mismatch");
  const double n = double(w.rows());
  return std::min(1.0, std::norm((w.adjoint() * u_s).trace()) / (n * n));
}

double fidelity_perturbed(const StateVector& psi, const Matrix& r) {
  if (r.rows() != psi.dim()) throw DimensionError("fidelity_perturbed: dimension mismatch");
  return std::min(1.0, std::norm(psi.amplitudes().dot(r * psi.amplitudes())));
}

double min_fidelity_over_inputs(const Matrix& r) {
  Eigen::ComplexEigenSolver<Matrix> es(r, false);
  std::vector<double> phases;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) phases.push_back(std::arg(es.eigenvalues()(i)));
  std::sort(phases.begin(), phases.end());
  // Smallest arc holding every eigenphase = 2 pi minus the widest gap between neighbours.
  double widest = phases.front() + 2.0 * M_PI - phases.back();
  for (std::size_t i = 1; i < phases.size(); ++i) widest = std::max(widest, phases[i] - phases[i - 1]);
  const double arc = 2.0 * M_PI - widest;
  if (arc >= M_PI) return 0.0;
  const double c = std::cos(arc / 2.0);
  return c * c;
}

double bound_x_max() { return std::sqrt(4.0 * std::log(1.0 + std::sqrt(2.0))); }

double bound_x_for_infidelity(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("bound_x_for_infidelity: 1 - F_lb must lie in [0, 1]");
  // 1 - F = a (2 - a) with a = (e^{x^2/4} - 1)^2 / 2, solved without cancellation.
  const double a = eps / (1.0 + std::sqrt(1.0 - eps));
  return std::sqrt(4.0 * std::log1p(std::sqrt(2.0 * a)));
}

double bound_x_for(double f_lb) {
  if (!(f_lb >= 0.0 && f_lb <= 1.0)) throw ValidationError("bound_x_for: F_lb must lie in [0, 1]");
  return bound_x_for_infidelity(1.0 - f_lb);
}

BoundResult robust_bound(double horizon, double delta, double j_rbst) {
  if (!(horizon >= 0.0 && delta >= 0.0 && j_rbst >= 0.0))
    throw ValidationError("robust_bound: inputs must be non-negative");
  const double x = horizon * (delta + j_rbst);
  if (x > bound_x_max()) return {0.0, false, 1.0};
  const double e = std::expm1(x * x / 4.0);
  const double a = std::min(1.0, e * e / 2.0);
  return {(1.0 - a) * (1.0 - a), true, a * (2.0 - a)};
}

std::vector<Matrix> sample_perturbations(const UncertaintyModel& unc, std::size_t n_samples, std::uint64_t seed) {
  std::vector<Matrix> out = unc.samples;
  std::vector<Matrix> dirs;
  for (const auto& e : unc.directions) {
    const double en = norm2(e);
    if (en > 0.0) dirs.push_back(e / en);
  }
  if (dirs.empty()) return out;
  for (const auto& e : dirs) {
    out.push_back(unc.delta * e);
    out.push_back(-unc.delta * e);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    Matrix h = Matrix::Zero(dirs.front().rows(), dirs.front().cols());
    for (const auto& e : dirs) h += g(rng) * e;
    const double hn = norm2(h);
    const double radius = unc.delta * unif(rng);
    out.push_back(hn > 0.0 ? Matrix(h * (radius / hn)) : h);
  }
  return out;
}

double sample_worst_case(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& w,
                         const UncertaintyModel& unc, std::size_t n_samples, std::uint64_t seed,
                         FidelityReference reference) {
  if (n_samples < 1) throw ValidationError("sample_worst_case: n_samples must be >= 1");
  unc.validate(sys.dim());
  const Index nb = unc.bath_dim;
  const Index full = sys.dim() * nb;
  const Matrix ib = identity(nb);
  const Matrix w_full = kron(w, ib);
  const Matrix u_nom = kron(propagate_pwc(sys, p).back(), ib);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g;
  std::vector<StateVector> inputs;
  for (int k = 0; k < 64; ++k) {
    Vector a(full);
    for (Index i = 0; i < full; ++i) a(i) = Complex(g(rng), g(rng));
    inputs.push_back(StateVector::normalized(std::move(a)));
  }

  auto perturbations = sample_perturbations(unc, n_samples, seed);
  if (perturbations.empty()) perturbations.push_back(Matrix::Zero(full, full));
  double worst = 1.0;
  for (const auto& h : perturbations) {
    const Matrix u = propagate_perturbed(sys, p, h, nb);
    const Matrix r = (reference == FidelityReference::target ? w_full : u_nom).adjoint() * u;
    for (const auto& psi : inputs) worst = std::min(worst, fidelity_perturbed(psi, r));
  }
  return worst;
}

namespace {

class TwoStage {
 public:
  TwoStage(const BilinearSystem& sys, const Matrix& w, const UncertaintyModel& unc, const TwoStageConfig& cfg)
      : sys_(sys), w_(w), unc_(unc), cfg_(cfg) {}

  double fidelity(const PulseSchedule& p) const { return fidelity_nominal_gate(propagate_pwc(sys_, p).back(), w_); }
  double robustness(const PulseSchedule& p) const { return j_robust(sys_, p, unc_, cfg_.quad_points).value; }

  template <class F>
  RealMatrix gradient(const PulseSchedule& p, F&& f) const {
    RealMatrix g(p.channels(), p.segments());
    const double h = cfg_.fd_spacing;
    for (Index j = 0; j < p.channels(); ++j)
      for (Index k = 0; k < p.segments(); ++k) {
        PulseSchedule a = p, b = p;
        a.amplitudes(j, k) += h;
        b.amplitudes(j, k) -= h;
        g(j, k) = (f(a) - f(b)) / (2.0 * h);
      }
    return g;
  }

  void clamp(PulseSchedule& p) const {
    if (cfg_.a_max) p.amplitudes = p.amplitudes.cwiseMax(-*cfg_.a_max).cwiseMin(*cfg_.a_max);
  }

  // One backtracking ascent step on F_nom; false when no improving step exists.
  bool ascend(PulseSchedule& p, double& f, double& step) const {
    const RealMatrix g = gradient(p, [&](const PulseSchedule& q) { return fidelity(q); });
    const double gg = g.squaredNorm();
    if (gg < 1e-30) return false;
    while (step > 1e-12) {
      PulseSchedule trial = p;
      trial.amplitudes += step * g;
      clamp(trial);
      const double ft = fidelity(trial);
      if (ft > f + 1e-4 * step * gg) {
        p = std::move(trial);
        f = ft;
        step = std::min(step * 2.0, 1e3);
        return true;
      }
      step *= 0.5;
    }
    return false;
  }

  // Ascend F_nom until it is back above f0.
  bool restore(PulseSchedule& p, double& f) const {
    double step = restore_step_;
    for (int it = 0; it < cfg_.restore_max_iters && f < cfg_.f0; ++it)
      if (!ascend(p, f, step)) break;
    return f >= cfg_.f0;
  }

  SynthesisResult run(PulseSchedule p) {
    RobustReport rep;
    double f = fidelity(p);
    rep.stage1_trace.push_back(f);
    double step = cfg_.stage1_step;
    for (int it = 0; it < cfg_.stage1_max_iters && f < cfg_.f0; ++it) {
      if (!ascend(p, f, step)) break;
      rep.stage1_trace.push_back(f);
    }
    restore_step_ = std::max(step, 1e-3);
    rep.stage1_reached = f >= cfg_.f0;
    double j = robustness(p);
    rep.j_after_stage1 = j;

    if (rep.stage1_reached) {
      rep.stage2_trace.push_back(j);
      rep.stage2_fnom_trace.push_back(f);
      double beta = cfg_.stage2_step;
      for (int it = 0; it < cfg_.stage2_max_iters && beta > 1e-10 && j > 1e-14; ++it) {
        const RealMatrix gj = gradient(p, [&](const PulseSchedule& q) { return robustness(q); });
        const RealMatrix gf = gradient(p, [&](const PulseSchedule& q) { return fidelity(q); });
        RealMatrix d = -gj;
        // Drop the part of the step that would push F_nom down to first order.
        const double dot = (d.array() * gf.array()).sum();
        const double gff = gf.squaredNorm();
        if (dot < 0.0 && gff > 1e-30) d -= (dot / gff) * gf;
        const double dn = d.norm();
        if (dn < 1e-14) break;
        d /= dn;
        bool accepted = false;
        while (beta > 1e-10) {
          PulseSchedule trial = p;
          trial.amplitudes += beta * d;
          clamp(trial);
          double ft = fidelity(trial);
          if ((ft >= cfg_.f0 || restore(trial, ft)) && ft >= cfg_.f0) {
            const double jt = robustness(trial);
            if (jt < j) {
              p = std::move(trial);
              f = ft;
              j = jt;
              beta *= 1.5;
              accepted = true;
              break;
            }
          }
          beta *= 0.5;
        }
        if (!accepted) break;
        rep.stage2_trace.push_back(j);
        rep.stage2_fnom_trace.push_back(f);
      }
    } else {
      rep.notes.push_back("stage 1 did not reach f0; returning the best schedule found");
    }

    rep.f_nom = f;
    const auto jr = j_robust(sys_, p, unc_, cfg_.quad_points);
    rep.j_rbst = jr.value;
    rep.heuristic = jr.heuristic;
    const auto b = robust_bound(p.horizon, unc_.delta, rep.j_rbst);
    rep.f_lb = b.f_lb;
    rep.bound_feasible = b.feasible;
    const std::size_t n_samples = std::max<std::size_t>(1, cfg_.worst_case_samples);
    rep.sampled_worst_fidelity =
        sample_worst_case(sys_, p, w_, unc_, n_samples, cfg_.seed, FidelityReference::nominal);
    rep.sampled_worst_gate_fidelity =
        sample_worst_case(sys_, p, w_, unc_, n_samples, cfg_.seed, FidelityReference::target);
    return {std::move(p), std::move(rep)};
  }

 private:
  const BilinearSystem& sys_;
  const Matrix& w_;
  const UncertaintyModel& unc_;
  const TwoStageConfig& cfg_;
  double restore_step_ = 1.0;
};

}  // namespace

SynthesisResult optimize_two_stage_from(const BilinearSystem& sys, const Matrix& target, const UncertaintyModel& unc,
                                        PulseSchedule start, const TwoStageConfig& config) {
  if (target.rows() != sys.dim() || target.cols() != sys.dim())
    throw DimensionError("optimize_two_stage: target acts on a different space than the system");
  if (!is_unitary(target)) throw ValidationError("optimize_two_stage: target is not unitary");
  unc.validate(sys.dim());
  check_schedule(sys, start);
  std::vector<std::string> pre_notes;
  Matrix generator = logm_unitary(target);
  generator = 0.5 * (generator - generator.adjoint());
  if (!gate_reachable(controllability(sys).basis, generator)) {
    pre_notes.push_back("target generator is not in the system algebra; the gate may be unreachable");
  }
  TwoStage opt(sys, target, unc, config);
  auto result = opt.run(std::move(start));
  result.report.notes.insert(result.report.notes.begin(), pre_notes.begin(), pre_notes.end());
  return result;
}

SynthesisResult optimize_two_stage(const BilinearSystem& sys, const Matrix& target, const UncertaintyModel& unc,
                                   const TwoStageConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-config.init_scale, config.init_scale);
  PulseSchedule p = PulseSchedule::zeros(Index(sys.controls().size()), config.segments, config.horizon);
  for (Index k = 0; k < p.segments(); ++k)
    for (Index j = 0; j < p.channels(); ++j) p.amplitudes(j, k) = unif(rng);
  return optimize_two_stage_from(sys, target, unc, std::move(p), config);
}

}  // namespace qsf
