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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qsf/errors.hpp"
#include "qsf/lie.hpp"
#include "qsf/quantum.hpp"
#include "qsf/robust.hpp"
#include "qsf/spec.hpp"

namespace qsf::cli {
namespace {

using nlohmann::ordered_json;

std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rounded to 12 significant digits, so the shortest-form JSON writer prints at most 12.
double r12(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::strtod(fmt12(v).c_str(), nullptr);
  return r == 0.0 ? 0.0 : r;
}

ordered_json r12(const std::vector<double>& xs) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(r12(x));
  return a;
}

ordered_json complex_list(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back({r12(v(i).real()), r12(v(i).imag())});
  return a;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void emit(std::ostream& out, ordered_json doc, bool timestamp) {
  if (timestamp) doc["timestamp"] = utc_now();
  out << doc.dump(2) << "\n";
}

std::string bits(Index value, int n) {
  std::string s(std::size_t(n), '0');
  for (int q = 0; q < n; ++q)
    if ((value >> (n - 1 - q)) & 1) s[std::size_t(q)] = '1';
  return s;
}

ordered_json analysis_json(const AnalysisReport& r) {
  ordered_json doc;
  doc["command"] = "analyze";
  doc["dim"] = r.dim;
  doc["closure_dim"] = r.closure_dim;
  doc["full_dim"] = r.full_dim;
  doc["controllable"] = r.controllable;
  doc["symmetry_dim"] = r.symmetry_dim;
  doc["generation_depth"] = r.generation_depth;
  ordered_json obs = ordered_json::object();
  for (const auto& o : r.observables) {
    obs[o.name] = {{"dim", o.obs_space_dim},
                   {"complement_dim", o.complement_dim},
                   {"commutant_dim", o.commutant_dim},
                   {"observable", o.observable},
                   {"tomografiable", o.tomografiable}};
  }
  doc["observables"] = obs;
  doc["notes"] = r.notes;
  return doc;
}

int bell(const SimulateOptions& opt, std::ostream& out) {
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  StateVector psi = StateVector::basis(2, 0);
  psi = apply_gate(kron(hadamard(), identity(2)), psi);
  psi = apply_gate(cnot, psi);
  const auto probs = outcome_probabilities(psi, Observable::computational_basis(2));
  const auto counts = sample_counts(probs, opt.shots, opt.seed);
  ordered_json c = ordered_json::object(), p = ordered_json::object();
  for (Index k = 0; k < 4; ++k) {
    c[bits(k, 2)] = counts[std::size_t(k)];
    p[bits(k, 2)] = r12(probs[std::size_t(k)]);
  }
  emit(out, {{"command", "simulate"}, {"circuit", "bell"}, {"shots", opt.shots}, {"seed", opt.seed},
             {"probabilities", p}, {"counts", c}},
       opt.timestamp);
  return kOk;
}

int qft(const SimulateOptions& opt, const std::optional<SystemSpec>& spec, std::ostream& out) {
  const int n = spec ? spec->n_qubits : opt.qubits;
  if (opt.input < 0 || opt.input >= (Index(1) << n))
    throw ValidationError("--input must name a basis state of " + std::to_string(n) + " qubits");
  const StateVector in = StateVector::basis(n, opt.input);
  const StateVector res = apply_gate(build_qft(n), in);
  emit(out, {{"command", "simulate"}, {"circuit", "qft"}, {"n_qubits", n}, {"input", opt.input},
             {"amplitudes", complex_list(res.amplitudes())}},
       opt.timestamp);
  return kOk;
}

int trotter(const SimulateOptions& opt, const std::optional<SystemSpec>& spec, std::ostream& out) {
  std::vector<Matrix> terms;
  double t = 1.0;
  int n = 1;
  if (spec) {
    n = spec->n_qubits;
    for (const Matrix& h : spec->system().hamiltonians())
      if (h.norm() > 0) terms.push_back(h);
    if (spec->schedule) t = spec->schedule->horizon;
  } else {
    terms = {pauli_x(), pauli_z()};
  }
  if (terms.empty()) throw ValidationError("trotter: the spec has no nonzero Hamiltonian terms");
  if (opt.steps < 1) throw ValidationError("--steps must be positive");
  Matrix total = Matrix::Zero(terms[0].rows(), terms[0].cols());
  for (const Matrix& h : terms) total += h;
  const StateVector psi0 = StateVector::basis(n, 0);
  const StateVector approx = trotter_evolve(terms, t, opt.steps, psi0);
  const Vector exact = expm_hermitian(total, t) * psi0.amplitudes();
  emit(out, {{"command", "simulate"}, {"circuit", "trotter"}, {"n_qubits", n}, {"t", r12(t)},
             {"steps", opt.steps}, {"state", complex_list(approx.amplitudes())},
             {"exact", complex_list(exact)}, {"error", r12((approx.amplitudes() - exact).norm())}},
       opt.timestamp);
  return kOk;
}

int vqa(const SimulateOptions& opt, const std::optional<SystemSpec>& spec, std::ostream& out) {
  std::vector<Matrix> generators;
  Matrix observable;
  SystemSpec::Vqa settings;
  int n = 1;
  if (spec) {
    n = spec->n_qubits;
    generators = spec->system().controls();
    if (spec->observables.empty()) throw ValidationError("vqa: the spec needs an observable");
    observable = spec->observable_matrices().at(spec->observables.front().first);
    if (spec->vqa) settings = *spec->vqa;
  } else {
    generators = {pauli_y()};
    observable = pauli_z();
    settings.theta0 = {0.3};
  }
  if (settings.theta0.empty()) settings.theta0.assign(generators.size(), 0.0);
  if (settings.theta0.size() != generators.size())
    throw DimensionError("vqa: theta0 needs one entry per control generator");
  ParamCircuit circuit{generators, StateVector::basis(n, 0), Observable::from_hermitian(observable)};
  circuit.validate();
  const RealVector theta0 = Eigen::Map<const RealVector>(settings.theta0.data(), Index(settings.theta0.size()));
  const VqaResult res = vqa_optimize(circuit, theta0, settings.step, settings.iters);
  std::vector<double> theta(res.theta.data(), res.theta.data() + res.theta.size());
  emit(out, {{"command", "simulate"}, {"circuit", "vqa"}, {"step", r12(settings.step)},
             {"iters", settings.iters}, {"theta", r12(theta)}, {"final", r12(res.trace.back())},
             {"step_too_large", res.step_too_large}, {"trace", r12(res.trace)}},
       opt.timestamp);
  return kOk;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  for (int field = 0; field < 3; ++field) {
    const std::size_t colon = text.find(':', start);
    if ((field < 2) != (colon != std::string::npos))
      throw ParseError("range must look like start:step:end", colon == std::string::npos ? text.size() : colon);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (piece.empty() || used != piece.size() || !std::isfinite(v))
      throw ParseError("range field '" + piece + "' is not a number", start);
    parts.push_back(v);
    start = colon + 1;
  }
  const double a = parts[0], s = parts[1], b = parts[2];
  if (s <= 0.0 || b < a) throw ParseError("range needs step > 0 and end >= start", 0);
  std::vector<double> out;
  const long n = long(std::floor((b - a) / s + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a + double(i) * s);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (piece.empty() || used != piece.size() || !std::isfinite(v))
      throw ParseError("list entry '" + piece + "' is not a number", start);
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int report_convergence(const ConvergenceError& e, std::ostream& out, std::ostream& err) {
  ordered_json doc;
  doc["error"] = "convergence";
  doc["message"] = e.what();
  doc["residuals"] = r12(e.residuals());
  out << doc.dump(2) << "\n";
  err << "qsf: " << e.what() << "\n";
  return kNoConvergence;
}

int run_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream&) {
  const SystemSpec spec = load_spec(opt.spec_path);
  LieOptions lie;
  lie.nullspace.tol = opt.tol;
  lie.nullspace.dense_limit = opt.dense_limit;
  lie.nullspace.max_restarts = opt.max_restarts;
  const AnalysisReport report = analyze(spec.system(), spec.observable_matrices(), lie);
  ordered_json doc = analysis_json(report);
  // Keep the spec's observable order rather than the map's.
  ordered_json ordered = ordered_json::object();
  for (const auto& [name, expr] : spec.observables) ordered[name] = doc["observables"][name];
  doc["observables"] = ordered;
  emit(out, doc, opt.timestamp);
  return kOk;
}

int run_synthesize(const SynthesizeOptions& opt, std::ostream& out, std::ostream& err) {
  const SystemSpec spec = load_spec(opt.spec_path);
  if (!spec.target) throw ValidationError("spec field 'target': required by synthesize");
  if (!spec.uncertainty) throw ValidationError("spec field 'uncertainty': required by synthesize");
  if (opt.init != "random" && opt.init != "zero") throw ValidationError("--init must be 'random' or 'zero'");
  const BilinearSystem sys = spec.system();
  const UncertaintyModel unc = spec.uncertainty_model();
  TwoStageConfig cfg;
  if (spec.schedule) {
    cfg.horizon = spec.schedule->horizon;
    cfg.segments = spec.schedule->segments;
  }
  if (opt.f0) cfg.f0 = *opt.f0;
  if (!(cfg.f0 > 0.0 && cfg.f0 <= 1.0)) throw ValidationError("--f0 must lie in (0, 1]");
  if (opt.max_iters) {
    if (*opt.max_iters < 0) throw ValidationError("--max-iters must be non-negative");
    cfg.stage1_max_iters = cfg.stage2_max_iters = *opt.max_iters;
  }
  cfg.seed = opt.seed;

  const Matrix target = spec.target_matrix();
  const SynthesisResult res =
      opt.init == "zero"
          ? optimize_two_stage_from(sys, target, unc,
                                    PulseSchedule::zeros(Index(sys.controls().size()), cfg.segments, cfg.horizon), cfg)
          : optimize_two_stage(sys, target, unc, cfg);
  const RobustReport& r = res.report;

  std::filesystem::create_directories(opt.out_dir);
  const auto dir = std::filesystem::path(opt.out_dir);
  {
    std::ofstream csv(dir / "schedule.csv");
    csv << "segment_index,channel,amplitude\n";
    for (Index k = 0; k < res.schedule.segments(); ++k)
      for (Index j = 0; j < res.schedule.channels(); ++j)
        csv << k << "," << j << "," << fmt12(res.schedule.amplitudes(j, k)) << "\n";
    if (!csv) throw Error("could not write " + (dir / "schedule.csv").string());
  }
  ordered_json doc;
  doc["command"] = "synthesize";
  doc["seed"] = cfg.seed;
  doc["init"] = opt.init;
  doc["f0"] = r12(cfg.f0);
  doc["horizon"] = r12(cfg.horizon);
  doc["segments"] = cfg.segments;
  doc["F_nom"] = r12(r.f_nom);
  doc["J_rbst"] = r12(r.j_rbst);
  doc["F_lb"] = r12(r.f_lb);
  doc["bound_feasible"] = r.bound_feasible;
  doc["sampled_worst_fidelity"] = r12(r.sampled_worst_fidelity);
  doc["sampled_worst_gate_fidelity"] = r12(r.sampled_worst_gate_fidelity);
  doc["stage1_reached"] = r.stage1_reached;
  doc["heuristic"] = r.heuristic;
  doc["J_after_stage1"] = r12(r.j_after_stage1);
  doc["stage1_trace"] = r12(r.stage1_trace);
  doc["stage2_trace"] = r12(r.stage2_trace);
  doc["stage2_fnom_trace"] = r12(r.stage2_fnom_trace);
  doc["notes"] = r.notes;
  if (opt.timestamp) doc["timestamp"] = utc_now();
  {
    std::ofstream js(dir / "report.json");
    js << doc.dump(2) << "\n";
    if (!js) throw Error("could not write " + (dir / "report.json").string());
  }
  out << "F_nom=" << fmt12(r.f_nom) << " J_rbst=" << fmt12(r.j_rbst) << " F_lb=" << fmt12(r.f_lb) << "\n";
  if (!r.stage1_reached) {
    err << "qsf: stage 1 did not reach F_nom >= " << fmt12(cfg.f0) << "\n";
    return kInfeasible;
  }
  return kOk;
}

int run_bound(const BoundOptions& opt, std::ostream& out, std::ostream&) {
  if (!(opt.horizon >= 0.0) || !std::isfinite(opt.horizon)) throw ValidationError("--T must be finite and >= 0");
  const auto deltas = parse_range(opt.delta_range);
  const auto js = parse_list(opt.jrbst);
  for (double d : deltas)
    if (d < 0.0) throw ValidationError("delta values must be >= 0");
  for (double j : js)
    if (j < 0.0) throw ValidationError("J_rbst values must be >= 0");
  out << "T_delta,J_rbst,F_lb,feasible,log10_fidelity_error\n";
  for (double j : js) {
    for (double d : deltas) {
      const BoundResult b = robust_bound(opt.horizon, d, j);
      out << fmt12(opt.horizon * d) << "," << fmt12(j) << "," << fmt12(b.f_lb) << ","
          << (b.feasible ? "true" : "false") << ",";
      if (b.infidelity > 0.0) out << fmt12(std::log10(b.infidelity));
      out << "\n";
    }
  }
  return kOk;
}

int run_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream&) {
  std::optional<SystemSpec> spec;
  if (opt.spec_path != "-") spec = load_spec(opt.spec_path);
  if (opt.circuit == "bell") return bell(opt, out);
  if (opt.circuit == "qft") return qft(opt, spec, out);
  if (opt.circuit == "trotter") return trotter(opt, spec, out);
  if (opt.circuit == "vqa") return vqa(opt, spec, out);
  throw ValidationError("unknown circuit '" + opt.circuit + "' (expected bell, qft, trotter or vqa)");
}

}  // namespace qsf::cli
