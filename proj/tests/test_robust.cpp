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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qsf/errors.hpp"
#include "qsf/pauli.hpp"
#include "qsf/robust.hpp"

using namespace qsf;

namespace {

const double kPi = std::numbers::pi;

BilinearSystem hadamard_system() { return BilinearSystem(Matrix::Zero(2, 2), {pauli_x(), pauli_z()}); }

UncertaintyModel z_uncertainty(double delta) {
  UncertaintyModel u;
  u.directions = {pauli_z()};
  u.delta = delta;
  return u;
}

PulseSchedule random_schedule(Index channels, Index segments, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  PulseSchedule p = PulseSchedule::zeros(channels, segments, 1.0);
  for (Index j = 0; j < channels; ++j)
    for (Index k = 0; k < segments; ++k) p.amplitudes(j, k) = u(rng);
  return p;
}

// Brute-force average of U(t)^dagger H U(t) with a fine composite Simpson rule.
Matrix simpson_average(const BilinearSystem& sys, const PulseSchedule& p, const Matrix& h, int per_segment) {
  const double dt = p.segment_length();
  Matrix acc = Matrix::Zero(h.rows(), h.cols());
  Matrix u0 = Matrix::Identity(sys.dim(), sys.dim());
  const Index nb = h.rows() / sys.dim();
  for (Index k = 0; k < p.segments(); ++k) {
    Matrix hk = sys.drift();
    for (Index j = 0; j < p.channels(); ++j) hk += p.amplitudes(j, k) * sys.controls()[std::size_t(j)];
    for (int i = 0; i <= 2 * per_segment; ++i) {
      const double s = dt * double(i) / double(2 * per_segment);
      const Matrix u = oracle::kron(oracle::taylor_expm(-kI * s * hk) * u0, Matrix::Identity(nb, nb));
      const double w = (i == 0 || i == 2 * per_segment) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * (u.adjoint() * h * u) * dt / (6.0 * per_segment);
    }
    u0 = oracle::taylor_expm(-kI * dt * hk) * u0;
  }
  return acc / p.horizon;
}

// Minimum of |psi^dagger R psi|^2 over many random unit vectors.
double sampled_min_fidelity(const Matrix& r, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double best = 1.0;
  for (int t = 0; t < samples; ++t) {
    Vector v(r.rows());
    for (Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();
    best = std::min(best, std::norm(v.dot(r * v)));
  }
  return best;
}

}  // namespace

TEST_CASE("schedule and uncertainty validation") {
  PulseSchedule p = PulseSchedule::zeros(2, 4, 1.0);
  CHECK_NOTHROW(p.validate());
  p.amplitudes(0, 0) = 3.0;
  CHECK_THROWS_AS(p.validate(2.0), ValidationError);
  p.amplitudes(0, 0) = std::nan("");
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_THROWS_AS(PulseSchedule::zeros(1, 4, 0.0).validate(), ValidationError);

  UncertaintyModel u = z_uncertainty(0.1);
  CHECK_NOTHROW(u.validate(2));
  CHECK_THROWS_AS(u.validate(4), DimensionError);
  u.samples = {0.2 * pauli_x()};
  CHECK_THROWS_AS(u.validate(2), ValidationError);
  u.samples = {0.1 * pauli_x()};
  CHECK_NOTHROW(u.validate(2));
  u.delta = -1.0;
  CHECK_THROWS_AS(u.validate(2), ValidationError);
}

TEST_CASE("piecewise-constant propagation") {
  const BilinearSystem zero(Matrix::Zero(2, 2), {pauli_x()});
  for (const Matrix& u : propagate_pwc(zero, PulseSchedule::zeros(1, 3, 1.0))) CHECK((u - identity(2)).norm() == 0.0);

  PulseSchedule pi = PulseSchedule::zeros(1, 1, 1.0);
  pi.amplitudes(0, 0) = kPi;
  const auto us = propagate_pwc(zero, pi);
  REQUIRE(us.size() == 2);
  CHECK((us.back() + identity(2)).norm() < 1e-12);

  PulseSchedule four = PulseSchedule::zeros(1, 4, 1.0);
  four.amplitudes.setConstant(0.7);
  PulseSchedule one = PulseSchedule::zeros(1, 1, 1.0);
  one.amplitudes(0, 0) = 0.7;
  CHECK((propagate_pwc(zero, four).back() - propagate_pwc(zero, one).back()).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(3);
  const BilinearSystem sys(pauli_z(), {pauli_x(), pauli_y()});
  const PulseSchedule p = random_schedule(2, 5, rng);
  const auto cum = propagate_pwc(sys, p);
  Matrix u = identity(2);
  for (Index k = 0; k < 5; ++k) {
    u = oracle::taylor_expm(-kI * p.segment_length() * segment_hamiltonian(sys, p, k)) * u;
    CHECK((cum[std::size_t(k + 1)] - u).norm() < 1e-12);
    CHECK(is_unitary(cum[std::size_t(k + 1)], 1e-10));
  }
  CHECK_THROWS_AS(propagate_pwc(sys, PulseSchedule::zeros(1, 2, 1.0)), DimensionError);
}

TEST_CASE("interaction unitary") {
  std::mt19937_64 rng(8);
  const BilinearSystem sys(pauli_z(), {pauli_x(), pauli_y()});
  const PulseSchedule p = random_schedule(2, 4, rng);
  const Matrix u = propagate_pwc(sys, p).back();
  CHECK((interaction_unitary(u, u) - identity(2)).norm() < 1e-12);
  CHECK((interaction_unitary(identity(2), u) - u).norm() == 0.0);
  CHECK((interaction_unitary(u, propagate_perturbed(sys, p, Matrix::Zero(2, 2), 1)) - identity(2)).norm() < 1e-12);

  const BilinearSystem xs(Matrix::Zero(2, 2), {pauli_x()});
  PulseSchedule pi = PulseSchedule::zeros(1, 1, 1.0);
  pi.amplitudes(0, 0) = kPi;
  const double eps = 0.01;
  const Matrix r = interaction_unitary(propagate_pwc(xs, pi).back(), propagate_perturbed(xs, pi, eps * pauli_x(), 1));
  CHECK((r - oracle::taylor_expm(-kI * eps * pauli_x())).norm() < 1e-12);

  // U_pert = (U_nom (x) I_B) R for random perturbations, with and without a bath.
  for (Index nb : {1, 2, 4}) {
    std::normal_distribution<double> g;
    Matrix h(2 * nb, 2 * nb);
    for (Index i = 0; i < h.rows(); ++i)
      for (Index j = 0; j < h.cols(); ++j) h(i, j) = Complex(g(rng), g(rng));
    h = (0.05 * (h + h.adjoint())).eval();
    const Matrix up = propagate_perturbed(sys, p, h, nb);
    const Matrix un = kron(u, identity(nb));
    const Matrix rr = interaction_unitary(un, up);
    CHECK((up - un * rr).norm() < 1e-9);
  }
}

TEST_CASE("time-averaged interaction Hamiltonian") {
  std::mt19937_64 rng(5);
  const BilinearSystem sys(pauli_z(), {pauli_x(), pauli_y()});
  const PulseSchedule p = random_schedule(2, 4, rng);
  CHECK(avg_interaction_hamiltonian(sys, p, Matrix::Zero(2, 2), 1).norm() == 0.0);

  const BilinearSystem idle(Matrix::Zero(2, 2), {pauli_x()});
  const Matrix h = 0.3 * pauli_y() + 0.1 * pauli_z();
  CHECK((avg_interaction_hamiltonian(idle, PulseSchedule::zeros(1, 4, 1.0), h, 1) - h).norm() == 0.0);

  // Constant nominal Hamiltonian commuting with the perturbation.
  PulseSchedule c = PulseSchedule::zeros(1, 4, 1.0);
  c.amplitudes.setConstant(1.3);
  const Matrix hx = 0.2 * pauli_x();
  for (int q : {0, 1, 8}) CHECK((avg_interaction_hamiltonian(idle, c, hx, 1, q) - hx).norm() < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const PulseSchedule pr = random_schedule(2, 4, rng);
    const Matrix hz = 0.1 * pauli_z() + 0.05 * pauli_x();
    const Matrix exact = avg_interaction_hamiltonian(sys, pr, hz, 1, 0);
    const Matrix q8 = avg_interaction_hamiltonian(sys, pr, hz, 1, 8);
    const Matrix q64 = avg_interaction_hamiltonian(sys, pr, hz, 1, 64);
    CHECK((q8 - q64).norm() < 1e-8);
    CHECK((exact - q64).norm() < 1e-10);
    CHECK(is_hermitian(exact, 1e-10));
    CHECK((exact - simpson_average(sys, pr, hz, 400)).norm() < 1e-9);
  }

  // Bath-coupled perturbation.
  const Matrix zb = kron(pauli_z(), pauli_x());
  CHECK((avg_interaction_hamiltonian(sys, p, zb, 2) - simpson_average(sys, p, zb, 400)).norm() < 1e-9);
}

TEST_CASE("robustness measure") {
  std::mt19937_64 rng(9);
  const BilinearSystem idle(Matrix::Zero(2, 2), {pauli_x()});
  const PulseSchedule zero = PulseSchedule::zeros(1, 4, 1.0);
  CHECK(j_robust(idle, zero, z_uncertainty(0.0)).value == 0.0);
  CHECK(j_robust(idle, zero, z_uncertainty(0.1)).value == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(j_robust(idle, zero, UncertaintyModel{}), ValidationError);

  const BilinearSystem sys = hadamard_system();
  const PulseSchedule p = random_schedule(2, 4, rng);
  const double j1 = j_robust(sys, p, z_uncertainty(0.05)).value;
  const double j2 = j_robust(sys, p, z_uncertainty(0.1)).value;
  CHECK(std::abs(j2 - 2.0 * j1) < 1e-12);
  CHECK(j_robust(sys, p, z_uncertainty(0.1), 0, NormKind::frobenius).value >= j2 - 1e-15);

  // Explicit samples contribute their own averages.
  UncertaintyModel samples;
  samples.delta = 0.1;
  samples.samples = {0.1 * pauli_z(), 0.05 * pauli_x()};
  const double js = j_robust(sys, p, samples).value;
  const double expect = std::max(norm2(avg_interaction_hamiltonian(sys, p, 0.1 * pauli_z(), 1)),
                                 norm2(avg_interaction_hamiltonian(sys, p, 0.05 * pauli_x(), 1)));
  CHECK(js == doctest::Approx(expect).epsilon(1e-12));

  // Several directions: heuristic, never below a brute-force scan of the coefficient circle.
  UncertaintyModel two;
  two.directions = {pauli_z(), pauli_x()};
  two.delta = 0.1;
  const RobustnessMeasure jm = j_robust(sys, p, two);
  CHECK(jm.heuristic);
  double scan = 0.0;
  const Matrix az = avg_interaction_hamiltonian(sys, p, pauli_z(), 1);
  const Matrix ax = avg_interaction_hamiltonian(sys, p, pauli_x(), 1);
  for (int i = 0; i < 3600; ++i) {
    const double th = kPi * i / 3600.0;
    const double c = std::cos(th), s = std::sin(th);
    scan = std::max(scan, 0.1 * norm2(c * az + s * ax) / norm2(c * pauli_z() + s * pauli_x()));
  }
  CHECK(jm.value >= scan - 1e-6);
  CHECK(jm.value <= scan + 1e-6);
  CHECK(j_robust(idle, zero, two).value == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("fidelities") {
  std::mt19937_64 rng(2);
  const Matrix w = hadamard();
  const StateVector psi = StateVector::basis(1, 0);
  CHECK(fidelity_state(psi, w, w) == doctest::Approx(1.0));
  CHECK(fidelity_state(psi, w, std::polar(1.0, 0.7) * w) == doctest::Approx(1.0));
  CHECK(fidelity_state(psi, identity(2), pauli_x()) == doctest::Approx(0.0));

  CHECK(fidelity_nominal_gate(w, w) == doctest::Approx(1.0));
  CHECK(fidelity_nominal_gate(std::polar(1.0, -1.1) * w, w) == doctest::Approx(1.0));
  CHECK(fidelity_nominal_gate(identity(2), pauli_x()) == doctest::Approx(0.0));

  CHECK(fidelity_perturbed(psi, identity(2)) == doctest::Approx(1.0));
  CHECK(min_fidelity_over_inputs(identity(3)) == doctest::Approx(1.0));
  Matrix r = Matrix::Zero(2, 2);
  r(0, 0) = 1.0;
  r(1, 1) = kI;
  CHECK(fidelity_perturbed(psi, r) == doctest::Approx(1.0));
  CHECK(min_fidelity_over_inputs(r) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sampled_min_fidelity(r, 10000, 1) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(min_fidelity_over_inputs(pauli_z()) == doctest::Approx(0.0));

  // Eigenphase-arc formula against sampling on random unitaries.
  for (int t = 0; t < 10; ++t) {
    std::normal_distribution<double> g;
    Matrix h(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) h(i, j) = Complex(g(rng), g(rng));
    h = (0.15 * (h + h.adjoint())).eval();
    const Matrix u = expm_hermitian(h);
    const double exact = min_fidelity_over_inputs(u);
    const double sampled = sampled_min_fidelity(u, 10000, std::uint64_t(t));
    CHECK(exact <= sampled + 1e-12);
    CHECK(sampled - exact < 0.02);
    CHECK(min_fidelity_over_inputs(std::polar(1.0, 2.0) * u) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("robust bound") {
  CHECK(robust_bound(1.0, 0.0, 0.0).f_lb == 1.0);
  CHECK(robust_bound(0.0, 5.0, 5.0).f_lb == 1.0);
  CHECK(bound_x_max() == doctest::Approx(std::sqrt(4.0 * std::log(1.0 + std::sqrt(2.0)))).epsilon(1e-15));
  CHECK(bound_x_for(0.99) == doctest::Approx(0.6178).epsilon(1e-4));
  for (double x = 0.0; x <= 1.87; x += 0.01) {
    const BoundResult b = robust_bound(1.0, x, 0.0);
    REQUIRE(b.feasible);
    CHECK(std::abs(bound_x_for_infidelity(b.infidelity) - x) < 1e-12);
    CHECK(b.infidelity == doctest::Approx(1.0 - b.f_lb).epsilon(1e-6));
    if (x >= 0.1) CHECK(std::abs(bound_x_for(b.f_lb) - x) < 1e-10);
  }
  const BoundResult beyond = robust_bound(1.0, 2.0, 0.0);
  CHECK_FALSE(beyond.feasible);
  CHECK(beyond.f_lb == 0.0);
  CHECK_THROWS_AS(robust_bound(1.0, -0.1, 0.0), ValidationError);
}

TEST_CASE("worst-case sampling") {
  const BilinearSystem xs(Matrix::Zero(2, 2), {pauli_x()});
  PulseSchedule half = PulseSchedule::zeros(1, 1, 1.0);
  half.amplitudes(0, 0) = kPi / 2;
  const Matrix w = -kI * pauli_x();
  const double eps = 0.05;
  UncertaintyModel u;
  u.delta = eps;
  u.samples = {eps * pauli_x()};
  const double f = sample_worst_case(xs, half, w, u, 1, 3);
  const double closed = std::pow(std::cos(eps), 2);
  CHECK(f >= closed - 1e-12);
  CHECK(1.0 - f >= 0.9 * (1.0 - closed));
  CHECK(min_fidelity_over_inputs(interaction_unitary(propagate_pwc(xs, half).back(),
                                                     propagate_perturbed(xs, half, eps * pauli_x(), 1))) ==
        doctest::Approx(closed).epsilon(1e-12));

  // delta = 0 leaves only the nominal mismatch.
  std::mt19937_64 rng(4);
  const BilinearSystem sys = hadamard_system();
  const PulseSchedule p = random_schedule(2, 4, rng);
  const Matrix un = propagate_pwc(sys, p).back();
  CHECK(sample_worst_case(sys, p, un, z_uncertainty(0.0), 20, 1) == doctest::Approx(1.0).epsilon(1e-12));
  const double nominal = sample_worst_case(sys, p, hadamard(), z_uncertainty(0.0), 20, 1);
  CHECK(nominal >= min_fidelity_over_inputs(hadamard().adjoint() * un) - 1e-12);

  double prev = 1.0;
  for (double d : {0.01, 0.05, 0.1}) {
    const double v = sample_worst_case(sys, p, hadamard(), z_uncertainty(d), 40, 11);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }

  for (const Matrix& s : sample_perturbations(z_uncertainty(0.1), 200, 5)) CHECK(norm2(s) <= 0.1 + 1e-9);
}

TEST_CASE("nominal fidelity gradients are smooth") {
  std::mt19937_64 rng(12);
  const BilinearSystem sys = hadamard_system();
  for (int t = 0; t < 5; ++t) {
    const PulseSchedule p = random_schedule(2, 4, rng);
    auto grad = [&](double h) {
      RealMatrix g(2, 4);
      for (Index j = 0; j < 2; ++j)
        for (Index k = 0; k < 4; ++k) {
          PulseSchedule a = p, b = p;
          a.amplitudes(j, k) += h;
          b.amplitudes(j, k) -= h;
          g(j, k) = (fidelity_nominal_gate(propagate_pwc(sys, a).back(), hadamard()) -
                     fidelity_nominal_gate(propagate_pwc(sys, b).back(), hadamard())) /
                    (2.0 * h);
        }
      return g;
    };
    const RealMatrix g5 = grad(1e-5), g7 = grad(1e-7);
    CHECK((g5 - g7).norm() <= 1e-3 * g5.norm());
  }
}

TEST_CASE("two-stage synthesis") {
  const BilinearSystem sys = hadamard_system();
  TwoStageConfig cfg;
  const SynthesisResult a = optimize_two_stage(sys, hadamard(), z_uncertainty(0.1), cfg);
  const RobustReport& r = a.report;
  CHECK(r.stage1_reached);
  CHECK(r.f_nom >= 0.999);
  CHECK(r.j_after_stage1 >= 5.0 * r.j_rbst);
  CHECK_FALSE(r.heuristic);
  for (std::size_t i = 1; i < r.stage1_trace.size(); ++i) CHECK(r.stage1_trace[i] >= r.stage1_trace[i - 1]);
  for (std::size_t i = 1; i < r.stage2_trace.size(); ++i) CHECK(r.stage2_trace[i] <= r.stage2_trace[i - 1]);
  for (double f : r.stage2_fnom_trace) CHECK(f >= 0.999);
  CHECK(r.j_rbst == doctest::Approx(j_robust(sys, a.schedule, z_uncertainty(0.1)).value));
  CHECK(r.f_nom == doctest::Approx(fidelity_nominal_gate(propagate_pwc(sys, a.schedule).back(), hadamard())));
  CHECK(r.sampled_worst_fidelity >= r.f_lb - 1e-6);

  const SynthesisResult b = optimize_two_stage(sys, hadamard(), z_uncertainty(0.1), cfg);
  CHECK(a.schedule.amplitudes == b.schedule.amplitudes);
  CHECK(a.report.stage2_trace == b.report.stage2_trace);

  // No controls: the zero schedule is all there is.
  const BilinearSystem bare(Matrix::Zero(2, 2), {});
  TwoStageConfig c2;
  const SynthesisResult id = optimize_two_stage(bare, identity(2), z_uncertainty(0.1), c2);
  CHECK(id.schedule.channels() == 0);
  CHECK(id.report.f_nom == doctest::Approx(1.0));
  CHECK(id.report.j_rbst == doctest::Approx(0.1));

  TwoStageConfig few;
  few.stage1_max_iters = 1;
  const SynthesisResult short_run = optimize_two_stage(sys, hadamard(), z_uncertainty(0.1), few);
  CHECK_FALSE(short_run.report.stage1_reached);

  CHECK_THROWS_AS(optimize_two_stage(sys, 2.0 * identity(2), z_uncertainty(0.1)), ValidationError);
  CHECK_THROWS_AS(optimize_two_stage(sys, identity(4), z_uncertainty(0.1)), DimensionError);
}
