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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsf/lie.hpp"
#include "qsf/linalg.hpp"
#include "qsf/quantum.hpp"

namespace qsf {

/** Piecewise-constant amplitudes: amplitudes(j, k) drives control j on segment k of length T/K. */
struct PulseSchedule {
  double horizon = 1.0;
  RealMatrix amplitudes;

  static PulseSchedule zeros(Index channels, Index segments, double horizon);

  Index channels() const { return amplitudes.rows(); }
  Index segments() const { return amplitudes.cols(); }
  double segment_length() const { return horizon / double(segments()); }
  /// Finite amplitudes, positive horizon, and |a| <= a_max when given.
  void validate(std::optional<double> a_max = std::nullopt) const;
};

/**
 * Set-membership uncertainty on the system (x) bath space: the real span of
 * `directions` cut down to ||H~||_2 <= delta, and/or explicit samples.
 */
struct UncertaintyModel {
  std::vector<Matrix> directions;
  double delta = 0.0;
  std::vector<Matrix> samples;
  Index bath_dim = 1;

  void validate(Index system_dim) const;
};

/// H_0 + sum_j u_{jk} H_j on segment k.
Matrix segment_hamiltonian(const BilinearSystem& sys, const PulseSchedule& p, Index k);

/// Cumulative nominal propagators U_0 = I, U_k = exp(-i (T/K) Hbar_k) U_{k-1}; K+1 entries.
std::vector<Matrix> propagate_pwc(const BilinearSystem& sys, const PulseSchedule& p);

/// Final propagator of (Hbar(t) (x) I_B + H~) on the system (x) bath space.
Matrix propagate_perturbed(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& perturbation,
                           Index bath_dim);

/// R = U_nom^dagger U_pert.
Matrix interaction_unitary(const Matrix& u_nom, const Matrix& u_pert);

/**
 * Time average (1/T) int_0^T U_nom(t)^dagger H~ U_nom(t) dt for constant H~.
 *
 * quad_points >= 1 selects composite Gauss-Legendre quadrature with that many
 * nodes per segment; quad_points == 0 integrates each segment in closed form
 * in the segment eigenbasis.
 */
Matrix avg_interaction_hamiltonian(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& perturbation,
                                   Index bath_dim, int quad_points = 0);

enum class NormKind { two, frobenius };

struct RobustnessMeasure {
  double value = 0.0;
  bool heuristic = false;  ///< true when the max over several directions came from restarted ascent
};

/// J_rbst = max over the uncertainty set of ||avg G||.
RobustnessMeasure j_robust(const BilinearSystem& sys, const PulseSchedule& p, const UncertaintyModel& unc,
                           int quad_points = 0, NormKind norm = NormKind::two, std::uint64_t seed = 17);

/// |psi^dagger U_des^dagger U psi|^2.
double fidelity_state(const StateVector& psi, const Matrix& u_des, const Matrix& u);
/// |tr(W^dagger U_S)|^2 / n_S^2.
double fidelity_nominal_gate(const Matrix& u_s, const Matrix& w);
/// |psi^dagger R psi|^2.
double fidelity_perturbed(const StateVector& psi, const Matrix& r);
/// min over unit psi of |psi^dagger R psi|^2 from the smallest arc holding the eigenphases of R.
double min_fidelity_over_inputs(const Matrix& r);

struct BoundResult {
  double f_lb = 0.0;
  bool feasible = false;
  double infidelity = 1.0;  ///< 1 - f_lb, evaluated without cancellation
};

/// Largest time-bandwidth product x = T (delta + J) at which the bound is still positive: sqrt(4 ln(1 + sqrt 2)).
double bound_x_max();
/// Forward form: the x admitted for a given F_lb, sqrt(4 ln(1 + sqrt(2 (1 - sqrt F_lb)))).
double bound_x_for(double f_lb);
/// Same inversion from the infidelity 1 - F_lb, accurate when F_lb is close to 1.
double bound_x_for_infidelity(double eps);
/// Fidelity lower bound guaranteed at x = T (delta + J_rbst).
BoundResult robust_bound(double horizon, double delta, double j_rbst);

/// Perturbations used by the worst-case sampler: +-delta along each direction, then random ones.
std::vector<Matrix> sample_perturbations(const UncertaintyModel& unc, std::size_t n_samples, std::uint64_t seed);

/// Which unitary the perturbed propagator is compared against.
enum class FidelityReference {
  target,   ///< R = (W (x) I_B)^dagger U_pert
  nominal,  ///< R = U_nom^dagger U_pert
};

/// Minimum perturbed fidelity over the sampled perturbations and 64 seeded input states.
double sample_worst_case(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& w,
                         const UncertaintyModel& unc, std::size_t n_samples, std::uint64_t seed,
                         FidelityReference reference = FidelityReference::target);

struct TwoStageConfig {
  double f0 = 0.999;
  Index segments = 4;
  double horizon = 1.0;
  /// Initial trial steps of the stage 1 and stage 2 line searches.
  double stage1_step = 1.0;
  double stage2_step = 1.0;
  int stage1_max_iters = 2000;
  int stage2_max_iters = 2000;
  /// Feasibility-restoring ascent steps allowed per stage 2 trial.
  int restore_max_iters = 50;
  double fd_spacing = 1e-6;
  /// Initial amplitudes are uniform in [-init_scale, init_scale].
  double init_scale = 3.0;
  std::optional<double> a_max;
  int quad_points = 0;
  std::uint64_t seed = 1;
  std::size_t worst_case_samples = 16;
};

struct RobustReport {
  double f_nom = 0.0;
  double j_rbst = 0.0;
  double f_lb = 0.0;
  double sampled_worst_fidelity = 0.0;       ///< against the nominal propagator, comparable to f_lb
  double sampled_worst_gate_fidelity = 0.0;  ///< against the target gate
  bool bound_feasible = false;
  bool stage1_reached = false;
  bool heuristic = false;
  double j_after_stage1 = 0.0;
  std::vector<double> stage1_trace;        ///< F_nom at accepted stage 1 steps
  std::vector<double> stage2_trace;        ///< J_rbst at accepted stage 2 steps
  std::vector<double> stage2_fnom_trace;   ///< F_nom at the same steps
  std::vector<std::string> notes;
};

struct SynthesisResult {
  PulseSchedule schedule;
  RobustReport report;
};

/**
 * Two-stage robust synthesis: ascend F_nom until it reaches f0, then descend
 * J_rbst while keeping F_nom >= f0 (each trial step is followed by F_nom
 * ascent until feasible again). Never throws on failure to reach f0; the
 * report's stage1_reached is false instead.
 */
SynthesisResult optimize_two_stage(const BilinearSystem& sys, const Matrix& target, const UncertaintyModel& unc,
                                   const TwoStageConfig& config = {});

/// Same, starting from a given schedule instead of a seeded random one.
SynthesisResult optimize_two_stage_from(const BilinearSystem& sys, const Matrix& target,
                                        const UncertaintyModel& unc, PulseSchedule start,
                                        const TwoStageConfig& config = {});

}  // namespace qsf
