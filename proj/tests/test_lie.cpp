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

#include <map>
#include <random>

#include "oracles.hpp"
#include "qsf/errors.hpp"
#include "qsf/lie.hpp"
#include "qsf/pauli.hpp"

using namespace qsf;

namespace {

BilinearSystem make_system(int n, const std::string& drift, const std::vector<std::string>& controls) {
  const Index dim = Index(1) << n;
  Matrix h0 = drift.empty() ? Matrix(Matrix::Zero(dim, dim)) : parse_pauli(drift, n).matrix();
  std::vector<Matrix> hs;
  for (const auto& c : controls) hs.push_back(parse_pauli(c, n).matrix());
  return BilinearSystem(h0, hs);
}

BilinearSystem xx_chain() {
  return make_system(4, "xx11+yy11+1xx1+1yy1+11xx+11yy", {"x111", "y111", "111x", "111y"});
}

Matrix random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a.householderQr().householderQ();
}

struct Case {
  int n;
  std::string drift;
  std::vector<std::string> controls;
};

const std::vector<Case>& suite() {
  static const std::vector<Case> cases{
      {1, "z", {"x"}},
      {1, "z", {"z"}},
      {1, "", {"x", "y"}},
      {2, "zz", {"x1", "z1", "1x", "1z"}},
      {2, "zz", {"z1", "1z"}},
      {2, "", {"x1", "1x"}},
      {2, "xx+yy+zz", {"x1"}},
      {2, "xx", {"z1"}},
      {3, "zz1+1zz", {"x11", "11x"}},
      {3, "z11+1z1", {"zzz"}},
      {3, "xx1+yy1+1xx+1yy", {"x11", "y11"}},
      {3, "zz1+1zz+z1z", {"x11", "1x1", "11x"}},
  };
  return cases;
}

}  // namespace

TEST_CASE("bilinear systems require hermitian operators of one size") {
  CHECK_THROWS_AS(BilinearSystem(pauli_z(), {kI * pauli_x()}), ValidationError);
  CHECK_THROWS_AS(BilinearSystem(pauli_z(), {identity(4)}), DimensionError);
  const BilinearSystem s = make_system(1, "z", {"x"});
  REQUIRE(s.hamiltonians().size() == 2);
  CHECK(s.hamiltonians()[0] == pauli_z());
}

TEST_CASE("adjoint superoperator") {
  CHECK(adjoint_superop(identity(3)).norm() == 0.0);
  const Matrix z_hat = adjoint_superop(pauli_z());
  CHECK((z_hat * vec(pauli_x()) - vec(2.0 * kI * pauli_y())).norm() < 1e-12);
  CHECK(oracle::commutant_dim({pauli_z()}) == 6);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    Matrix h(3, 3), rho(3, 3);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) {
        h(i, j) = Complex(g(rng), g(rng));
        rho(i, j) = Complex(g(rng), g(rng));
      }
    h = 0.5 * (h + h.adjoint()).eval();
    CHECK((adjoint_superop(h) * vec(rho) - vec(h * rho - rho * h)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("small closures") {
  CHECK(lie_closure({kI * pauli_x()}).dim() == 1);
  const LieBasis su2 = lie_closure({kI * pauli_x(), kI * pauli_z()});
  CHECK(su2.dim() == 3);
  CHECK(oracle::closure_dim({pauli_x(), pauli_z()}) == 3);
  CHECK(lie_closure({kI * identity(2)}).dim() == 0);
  CHECK_THROWS_AS(lie_closure({pauli_x()}), ValidationError);
}

TEST_CASE("closure bases are orthonormal, traceless and closed") {
  for (const Case& c : suite()) {
    const LieBasis b = controllability(make_system(c.n, c.drift, c.controls)).basis;
    for (std::size_t i = 0; i < b.elements.size(); ++i) {
      const Matrix& e = b.elements[i];
      CHECK(is_skew_hermitian(e, 1e-10));
      CHECK(std::abs(e.trace()) < 1e-10);
      for (std::size_t j = 0; j < b.elements.size(); ++j)
        CHECK(std::abs(hs_real_inner(e, b.elements[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);
    }
    CHECK(closure_defect(b) < 1e-7);
  }
}

TEST_CASE("controllability matches a nested-commutator oracle and the symmetry test") {
  for (const Case& c : suite()) {
    const BilinearSystem sys = make_system(c.n, c.drift, c.controls);
    const auto ctrl = controllability(sys);
    const Index sym = symmetry_dim(sys);
    CAPTURE(c.drift);
    CAPTURE(c.n);
    CHECK(ctrl.closure_dim == oracle::closure_dim(sys.hamiltonians()));
    CHECK(ctrl.full_dim == sys.dim() * sys.dim() - 1);
    CHECK(ctrl.controllable == (ctrl.closure_dim == ctrl.full_dim));
    CHECK(ctrl.controllable == (sym == 2));
    if (c.n <= 2) CHECK(sym == oracle::commutant_dim(sys.hamiltonians()));
  }
}

TEST_CASE("commutant of commuting diagonal generators counts equal difference vectors") {
  // ad_H E_ab = (h_a - h_b) E_ab for diagonal H, so the commutant is block diagonal over
  // classes of (a, b) with equal difference vectors, one full matrix algebra per class.
  const std::vector<std::pair<int, std::vector<std::string>>> cases{
      {2, {"zz", "z1"}},       {3, {"z11+1z1", "zzz"}},        {3, {"zz1", "1zz"}},
      {4, {"z111", "zz11"}},   {4, {"zz11+11zz", "1zz1", "z1z1"}}, {4, {"0.5*z111+z1z1"}},
  };
  for (const auto& [n, terms] : cases) {
    std::vector<Matrix> hs;
    for (const auto& t : terms) hs.push_back(parse_pauli(t, n).matrix());
    const BilinearSystem sys(hs.front(), std::vector<Matrix>(hs.begin() + 1, hs.end()));
    const Index dim = sys.dim();
    std::map<std::vector<long>, long> classes;
    for (Index a = 0; a < dim; ++a)
      for (Index b = 0; b < dim; ++b) {
        std::vector<long> key;
        for (const Matrix& h : hs) key.push_back(std::lround(2.0 * (h(a, a) - h(b, b)).real()));
        ++classes[key];
      }
    long expected = 0;
    for (const auto& [key, size] : classes) expected += size * size;
    CAPTURE(terms.front());
    CHECK(symmetry_dim(sys) == expected);
  }
}

TEST_CASE("idle qubits multiply the symmetry dimension by m^4") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  auto random_hermitian = [&](Index n) {
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    return Matrix(a + a.adjoint());
  };
  for (const auto& [n, count] : std::vector<std::pair<Index, int>>{{2, 1}, {2, 2}, {4, 1}, {4, 2}}) {
    std::vector<Matrix> hs;
    for (int i = 0; i < count; ++i) hs.push_back(random_hermitian(n));
    const Index base = symmetry_dim(BilinearSystem(hs.front(), {hs.begin() + 1, hs.end()}));
    for (Index m : {2, 4}) {
      std::vector<Matrix> wide;
      for (const Matrix& h : hs) wide.push_back(kron(h, identity(m)));
      CAPTURE(n);
      CAPTURE(m);
      CHECK(symmetry_dim(BilinearSystem(wide.front(), {wide.begin() + 1, wide.end()})) == base * m * m * m * m);
    }
  }
}

TEST_CASE("named small systems") {
  const auto zx = make_system(1, "z", {"x"});
  CHECK(controllability(zx).controllable);
  CHECK(controllability(zx).closure_dim == 3);
  CHECK(symmetry_dim(zx) == 2);

  const auto zz = make_system(1, "z", {"z"});
  CHECK_FALSE(controllability(zz).controllable);
  CHECK(controllability(zz).closure_dim == 1);
  CHECK(symmetry_dim(zz) == 6);

  const auto two = make_system(2, "zz", {"x1", "z1", "1x", "1z"});
  CHECK(controllability(two).closure_dim == 15);
  CHECK(symmetry_dim(two) == 2);
}

TEST_CASE("defining and adjoint representations give the same closure dimension") {
  for (const Case& c : suite()) {
    const BilinearSystem sys = make_system(c.n, c.drift, c.controls);
    std::vector<Matrix> adj;
    for (const Matrix& h : sys.hamiltonians()) adj.push_back(kI * adjoint_superop(h));
    CAPTURE(c.drift);
    CHECK(lie_closure(adj).dim() == controllability(sys).closure_dim);
  }
}

TEST_CASE("gate reachability and simulability") {
  const LieBasis su2 = lie_closure({kI * pauli_x(), kI * pauli_z()});
  CHECK(gate_reachable(su2, su2.elements.front()));
  const Matrix xz = kI * (pauli_x() + pauli_z());
  CHECK(gate_reachable(su2, xz / xz.norm()));
  const LieBasis zonly = lie_closure({kI * pauli_z()});
  CHECK_FALSE(gate_reachable(zonly, kI * pauli_x()));
  CHECK_THROWS_AS(gate_reachable(su2, pauli_x()), ValidationError);

  CHECK(simulable(su2, su2));
  CHECK(simulable(su2, zonly));
  CHECK_FALSE(simulable(zonly, su2));
}

TEST_CASE("observability on small systems") {
  const auto zx = make_system(1, "z", {"x"});
  CHECK(observability_space(zx, identity(2)).dim == 0);
  CHECK(observability_space(zx, pauli_z()).dim == 3);
  CHECK(observable_test(zx, pauli_z()).observable);
  CHECK(tomografiable(zx, pauli_z()));
  CHECK_FALSE(tomografiable(zx, identity(2)));
  CHECK_FALSE(observable_test(zx, identity(2)).observable);

  for (const Case& c : suite()) {
    const BilinearSystem sys = make_system(c.n, c.drift, c.controls);
    const std::vector<std::string> cs{std::string(std::size_t(c.n), 'z'), "x" + std::string(std::size_t(c.n - 1), '1')};
    for (const auto& cexpr : cs) {
      const Matrix cm = parse_pauli(cexpr, c.n).matrix();
      const ObservabilityVerdict v = observable_test(sys, cm);
      CAPTURE(c.drift);
      CAPTURE(cexpr);
      CHECK(v.obs_space_dim == oracle::observability_dim(sys.hamiltonians(), cm));
      CHECK(v.observable == (v.obs_space_dim == sys.dim() * sys.dim() - 1));
      CHECK(v.observable == (v.commutant_dim == 2));
      if (c.n <= 2) {
        const Matrix id = identity(sys.dim());
        const Vector ct = vec(traceless_part(cm));
        const Matrix pc = ct * ct.adjoint() / ct.squaredNorm();
        CHECK(v.commutant_dim == oracle::commutant_dim(sys.hamiltonians(), &pc));
      }
      // Rescaling C by any nonzero real leaves the space alone.
      CHECK(observability_space(sys, -2.5 * cm).dim == v.obs_space_dim);
      CHECK(observability_space(sys, 1e-3 * cm).dim == v.obs_space_dim);
    }
  }
}

TEST_CASE("dimensions are invariant under a change of basis") {
  std::mt19937_64 rng(2024);
  for (const Case& c : suite()) {
    if (c.n < 2) continue;
    const BilinearSystem sys = make_system(c.n, c.drift, c.controls);
    const Matrix v = random_unitary(sys.dim(), rng);
    std::vector<Matrix> ctrl;
    for (const Matrix& h : sys.controls()) ctrl.push_back(v * h * v.adjoint());
    Matrix drift = v * sys.drift() * v.adjoint();
    drift = 0.5 * (drift + drift.adjoint()).eval();
    for (Matrix& h : ctrl) h = 0.5 * (h + h.adjoint()).eval();
    const BilinearSystem rot(drift, ctrl);
    const Matrix cm = parse_pauli(std::string(std::size_t(c.n), 'z'), c.n).matrix();
    Matrix cr = v * cm * v.adjoint();
    cr = 0.5 * (cr + cr.adjoint()).eval();
    CAPTURE(c.drift);
    CHECK(controllability(rot).closure_dim == controllability(sys).closure_dim);
    CHECK(symmetry_dim(rot) == symmetry_dim(sys));
    CHECK(observability_space(rot, cr).dim == observability_space(sys, cm).dim);
  }
}

TEST_CASE("iterative kernel search matches the dense one on the commutant") {
  LieOptions iter;
  iter.nullspace.dense_limit = 0;
  for (const Case& c : suite()) {
    const BilinearSystem sys = make_system(c.n, c.drift, c.controls);
    CAPTURE(c.drift);
    CHECK(symmetry_dim(sys, iter) == symmetry_dim(sys));
  }
}

TEST_CASE("four-qubit XX chain") {
  const BilinearSystem sys = xx_chain();
  const auto ctrl = controllability(sys);
  CHECK(ctrl.closure_dim == 45);
  CHECK(ctrl.full_dim == 255);
  CHECK_FALSE(ctrl.controllable);
  CHECK(ctrl.closure_dim == oracle::closure_dim(sys.hamiltonians()));
  CHECK(closure_defect(ctrl.basis) < 1e-7);

  // Structure constants f_ijk = <e_k, [e_i, e_j]> are totally antisymmetric.
  const auto& e = ctrl.basis.elements;
  double worst = 0.0;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      for (std::size_t k = 0; k < 12; ++k) {
        const double fijk = hs_real_inner(e[k], commutator(e[i], e[j]));
        const double fjki = hs_real_inner(e[i], commutator(e[j], e[k]));
        const double fjik = hs_real_inner(e[k], commutator(e[j], e[i]));
        worst = std::max({worst, std::abs(fijk - fjki), std::abs(fijk + fjik)});
      }
  CHECK(worst < 1e-10);

  CHECK_FALSE(gate_reachable(ctrl.basis, kI * pauli_string_matrix("xxx1")));
  CHECK(projection_residual(ctrl.basis.elements, kI * pauli_string_matrix("xxx1")) ==
        doctest::Approx(pauli_string_matrix("xxx1").norm()).epsilon(1e-9));
  CHECK(simulable(ctrl.basis, ctrl.basis));
  CHECK_FALSE(simulable(ctrl.basis, lie_closure({kI * pauli_string_matrix("x111"), kI * pauli_string_matrix("zz11"),
                                                 kI * pauli_string_matrix("1zz1"), kI * pauli_string_matrix("11zz"),
                                                 kI * pauli_string_matrix("1x11")})));

  const AnalysisReport r = analyze(sys, {{"C1", pauli_string_matrix("xxx1")},
                                         {"C2", pauli_string_matrix("xxx1") + pauli_string_matrix("1z11")}});
  CHECK(r.closure_dim == 45);
  CHECK(r.symmetry_dim == 3);
  CHECK(r.generation_depth >= 1);
  REQUIRE(r.observables.size() == 2);
  CHECK(r.observables[0].name == "C1");
  CHECK(r.observables[0].obs_space_dim == 210);
  CHECK(r.observables[0].complement_dim == 45);
  CHECK_FALSE(r.observables[0].observable);
  CHECK(r.observables[1].obs_space_dim == 255);
  CHECK(r.observables[1].observable);
  CHECK_FALSE(r.observables[1].tomografiable);
}
