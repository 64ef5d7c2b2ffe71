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

#include "qsf/spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qsf/pauli.hpp"

namespace qsf {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ParseError("spec field '" + field + "': " + msg, 0);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where.empty() ? key : where + "." + key, "missing");
  return obj.at(key);
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

Matrix parse_expr(const std::string& text, int n, const std::string& field) {
  try {
    return parse_pauli(text, n).matrix();
  } catch (const ParseError& e) {
    fail(field, std::string(e.what()) + " (at offset " + std::to_string(e.position()) + ")");
  }
}

Complex parse_entry(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(field, "matrix entries are numbers or [re, im] pairs");
}

int bath_qubits(Index bath_dim, const std::string& field) {
  int k = 0;
  while ((Index{1} << k) < bath_dim) ++k;
  if ((Index{1} << k) != bath_dim) fail(field, "bath_dim must be a power of two");
  return k;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(byte), '\n'));
}

}  // namespace

BilinearSystem SystemSpec::system() const {
  const Index dim = Index{1} << n_qubits;
  Matrix h0 = drift ? parse_expr(*drift, n_qubits, "drift") : Matrix(Matrix::Zero(dim, dim));
  std::vector<Matrix> hs;
  for (std::size_t j = 0; j < controls.size(); ++j)
    hs.push_back(parse_expr(controls[j], n_qubits, "controls[" + std::to_string(j) + "]"));
  return BilinearSystem(std::move(h0), std::move(hs));
}

std::map<std::string, Matrix> SystemSpec::observable_matrices() const {
  std::map<std::string, Matrix> out;
  for (const auto& [name, text] : observables) out[name] = parse_expr(text, n_qubits, "observables." + name);
  return out;
}

UncertaintyModel SystemSpec::uncertainty_model() const {
  if (!uncertainty) fail("uncertainty", "missing");
  UncertaintyModel u;
  u.delta = uncertainty->delta;
  u.bath_dim = uncertainty->bath_dim;
  const int nq = n_qubits + bath_qubits(u.bath_dim, "uncertainty.bath_dim");
  for (std::size_t i = 0; i < uncertainty->directions.size(); ++i)
    u.directions.push_back(parse_expr(uncertainty->directions[i], nq, "uncertainty.directions[" + std::to_string(i) + "]"));
  return u;
}

Matrix SystemSpec::target_matrix() const {
  if (!target) fail("target", "missing");
  const Index dim = Index{1} << n_qubits;
  if (const auto* m = std::get_if<Matrix>(&*target)) return *m;
  const auto& name = std::get<std::string>(*target);
  if (name == "identity") return identity(dim);
  if (name == "hadamard") {
    if (n_qubits != 1) fail("target", "hadamard is a single-qubit gate");
    return hadamard();
  }
  fail("target", "unknown gate '" + name + "'");
}

SystemSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t line = line_of(text, e.byte);
    throw ParseError("spec syntax error at line " + std::to_string(line) + ": " + e.what(), line);
  }
  if (!doc.is_object()) fail("<root>", "expected an object");
  reject_unknown(doc, "", {"version", "n_qubits", "drift", "controls", "observables", "uncertainty", "target",
                           "schedule", "vqa", "description"});

  const json& version = require(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) fail("version", "only version 1 is supported");

  SystemSpec s;
  const json& nq = require(doc, "n_qubits", "");
  if (!nq.is_number_integer() || nq.get<int>() < 1 || nq.get<int>() > 6) fail("n_qubits", "expected an integer in [1, 6]");
  s.n_qubits = nq.get<int>();

  if (doc.contains("drift") && !doc["drift"].is_null()) s.drift = as_string(doc["drift"], "drift");
  if (doc.contains("controls")) {
    if (!doc["controls"].is_array()) fail("controls", "expected an array");
    for (std::size_t j = 0; j < doc["controls"].size(); ++j)
      s.controls.push_back(as_string(doc["controls"][j], "controls[" + std::to_string(j) + "]"));
  }
  if (doc.contains("observables")) {
    const json& obs = doc["observables"];
    if (!obs.is_object()) fail("observables", "expected an object of name: expression");
    for (const auto& [name, v] : obs.items()) s.observables.emplace_back(name, as_string(v, "observables." + name));
  }
  if (doc.contains("uncertainty")) {
    const json& u = doc["uncertainty"];
    if (!u.is_object()) fail("uncertainty", "expected an object");
    reject_unknown(u, "uncertainty", {"directions", "delta", "bath_dim"});
    SystemSpec::Uncertainty unc;
    unc.delta = as_number(require(u, "delta", "uncertainty"), "uncertainty.delta");
    if (unc.delta < 0.0) fail("uncertainty.delta", "must be >= 0");
    if (u.contains("bath_dim")) {
      if (!u["bath_dim"].is_number_integer() || u["bath_dim"].get<long>() < 1 || u["bath_dim"].get<long>() > 4)
        fail("uncertainty.bath_dim", "expected an integer in [1, 4]");
      unc.bath_dim = u["bath_dim"].get<Index>();
    }
    const json& dirs = require(u, "directions", "uncertainty");
    if (!dirs.is_array()) fail("uncertainty.directions", "expected an array");
    for (std::size_t i = 0; i < dirs.size(); ++i)
      unc.directions.push_back(as_string(dirs[i], "uncertainty.directions[" + std::to_string(i) + "]"));
    s.uncertainty = unc;
  }
  if (doc.contains("target")) {
    const json& t = doc["target"];
    if (t.is_string()) {
      s.target = t.get<std::string>();
    } else if (t.is_array()) {
      const Index dim = Index{1} << s.n_qubits;
      if (Index(t.size()) != dim) fail("target", "matrix must have " + std::to_string(dim) + " rows");
      Matrix m(dim, dim);
      for (Index i = 0; i < dim; ++i) {
        const json& row = t[std::size_t(i)];
        const std::string rf = "target[" + std::to_string(i) + "]";
        if (!row.is_array() || Index(row.size()) != dim) fail(rf, "row must have " + std::to_string(dim) + " entries");
        for (Index j = 0; j < dim; ++j) m(i, j) = parse_entry(row[std::size_t(j)], rf + "[" + std::to_string(j) + "]");
      }
      if (!is_unitary(m)) fail("target", "matrix is not unitary");
      s.target = m;
    } else {
      fail("target", "expected a gate name or a matrix");
    }
  }
  if (doc.contains("schedule")) {
    const json& sc = doc["schedule"];
    if (!sc.is_object()) fail("schedule", "expected an object");
    reject_unknown(sc, "schedule", {"T", "segments"});
    SystemSpec::Schedule sched;
    if (sc.contains("T")) sched.horizon = as_number(sc["T"], "schedule.T");
    if (!(sched.horizon > 0.0)) fail("schedule.T", "must be positive");
    if (sc.contains("segments")) {
      if (!sc["segments"].is_number_integer() || sc["segments"].get<long>() < 1)
        fail("schedule.segments", "expected a positive integer");
      sched.segments = sc["segments"].get<Index>();
    }
    s.schedule = sched;
  }
  if (doc.contains("vqa")) {
    const json& v = doc["vqa"];
    if (!v.is_object()) fail("vqa", "expected an object");
    reject_unknown(v, "vqa", {"theta0", "step", "iters"});
    SystemSpec::Vqa q;
    if (v.contains("theta0")) {
      if (!v["theta0"].is_array()) fail("vqa.theta0", "expected an array");
      for (std::size_t i = 0; i < v["theta0"].size(); ++i)
        q.theta0.push_back(as_number(v["theta0"][i], "vqa.theta0[" + std::to_string(i) + "]"));
    }
    if (v.contains("step")) q.step = as_number(v["step"], "vqa.step");
    if (v.contains("iters")) {
      if (!v["iters"].is_number_integer() || v["iters"].get<int>() < 0) fail("vqa.iters", "expected a non-negative integer");
      q.iters = v["iters"].get<int>();
    }
    s.vqa = q;
  }

  // Construct everything once so dimension problems surface at load time.
  s.system();
  s.observable_matrices();
  if (s.uncertainty) s.uncertainty_model();
  if (s.target) s.target_matrix();
  return s;
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace qsf
