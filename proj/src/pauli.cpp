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

#include "qsf/pauli.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

namespace qsf {

Matrix pauli_letter(char c) {
  switch (c) {
    case '1': return identity(2);
    case 'x': return pauli_x();
    case 'y': return pauli_y();
    case 'z': return pauli_z();
    default: throw ParseError(std::string("illegal Pauli letter '") + c + "'", 0);
  }
}

Matrix pauli_string_matrix(std::string_view letters) {
  Matrix m = identity(1);
  for (char c : letters) m = kron(m, pauli_letter(c));
  return m;
}

Matrix HamiltonianExpr::matrix() const {
  const Index dim = Index{1} << n_qubits;
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& t : terms) h += t.coefficient * pauli_string_matrix(t.letters);
  return h;
}

std::string HamiltonianExpr::to_string() const {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].coefficient;
    if (k > 0) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    if (std::abs(c) != 1.0) os << std::abs(c) << "*";
    os << terms[k].letters;
  }
  return os.str();
}

namespace {

class Parser {
 public:
  Parser(std::string_view s, int n) : s_(s), n_(n) {}

  HamiltonianExpr run() {
    if (n_ < 1) throw ParseError("number of qubits must be positive", 0);
    HamiltonianExpr e{n_, {}};
    skip_ws();
    if (at_end()) throw ParseError("empty Pauli expression", pos_);
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    e.terms.push_back(term(sign));
    for (;;) {
      skip_ws();
      if (at_end()) break;
      const char c = peek();
      if (c != '+' && c != '-') throw ParseError(std::string("expected '+' or '-' but found '") + c + "'", pos_);
      ++pos_;
      e.terms.push_back(term(c == '-' ? -1.0 : 1.0));
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  PauliTerm term(double sign) {
    skip_ws();
    if (at_end()) throw ParseError("expected a Pauli term", pos_);
    PauliTerm t;
    t.coefficient = sign;
    if (auto coef = try_coefficient()) t.coefficient *= *coef;
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (c == '1' || c == 'x' || c == 'y' || c == 'z') {
        ++pos_;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_') {
        throw ParseError(std::string("illegal character '") + c + "' in Pauli string", pos_);
      } else {
        break;
      }
    }
    t.letters = std::string(s_.substr(start, pos_ - start));
    if (t.letters.empty()) {
      if (at_end()) throw ParseError("expected a Pauli string", pos_);
      throw ParseError(std::string("illegal character '") + peek() + "'", pos_);
    }
    if (int(t.letters.size()) != n_) {
      throw ParseError("Pauli string '" + t.letters + "' has length " + std::to_string(t.letters.size()) +
                           ", expected " + std::to_string(n_),
                       start);
    }
    return t;
  }

  // A numeric literal followed by '*'; otherwise leaves the position untouched.
  std::optional<double> try_coefficient() {
    const std::size_t save = pos_;
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) return std::nullopt;
    pos_ += std::size_t(ptr - first);
    skip_ws();
    if (!at_end() && peek() == '*') {
      ++pos_;
      if (!std::isfinite(v)) throw ParseError("coefficient is not finite", save);
      return v;
    }
    pos_ = save;
    return std::nullopt;
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

HamiltonianExpr parse_pauli(std::string_view expr, int n_qubits) { return Parser(expr, n_qubits).run(); }

}  // namespace qsf
