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

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qsf/errors.hpp"

using namespace qsf::cli;

int main(int argc, char** argv) {
  CLI::App app{"qsf: analysis, robust pulse synthesis and simulation of small quantum systems"};
  app.require_subcommand(1);

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Controllability, symmetry and observability report");
  analyze->add_option("spec", an.spec_path, "System spec (JSON)")->required();
  analyze->add_option("--tol", an.tol, "Relative kernel tolerance");
  analyze->add_option("--dense-limit", an.dense_limit, "Largest kernel problem solved densely");
  analyze->add_option("--max-restarts", an.max_restarts, "Restart budget of the iterative kernel search");
  bool an_no_ts = false;
  analyze->add_flag("--no-timestamp", an_no_ts, "Omit the timestamp field");

  SynthesizeOptions sy;
  auto* synth = app.add_subcommand("synthesize", "Two-stage robust pulse synthesis");
  synth->add_option("spec", sy.spec_path, "System spec (JSON) with target, schedule and uncertainty")->required();
  synth->add_option("--f0", sy.f0, "Nominal fidelity threshold");
  synth->add_option("--seed", sy.seed, "Seed of the initial schedule");
  synth->add_option("--max-iters", sy.max_iters, "Iteration cap of each stage");
  synth->add_option("--out", sy.out_dir, "Directory for schedule.csv and report.json");
  synth->add_option("--init", sy.init, "Initial schedule: random or zero");
  bool sy_no_ts = false;
  synth->add_flag("--no-timestamp", sy_no_ts, "Omit the timestamp field");

  BoundOptions bo;
  auto* bound = app.add_subcommand("bound", "Fidelity lower-bound curves as CSV");
  bound->add_option("--T", bo.horizon, "Time horizon")->required();
  bound->add_option("--delta-range", bo.delta_range, "start:step:end")->required();
  bound->add_option("--jrbst", bo.jrbst, "Comma-separated J_rbst values");

  SimulateOptions si;
  auto* simulate = app.add_subcommand("simulate", "Run a demo circuit");
  simulate->add_option("spec", si.spec_path, "System spec (JSON), or - for the built-in defaults")->required();
  simulate->add_option("--circuit", si.circuit, "bell, qft, trotter or vqa")->required();
  simulate->add_option("--shots", si.shots, "Shots for sampling circuits");
  simulate->add_option("--seed", si.seed, "Sampling seed");
  simulate->add_option("--steps", si.steps, "Trotter steps");
  simulate->add_option("--qubits", si.qubits, "QFT width when no spec is given");
  simulate->add_option("--input", si.input, "QFT input basis index");
  bool si_no_ts = false;
  simulate->add_flag("--no-timestamp", si_no_ts, "Omit the timestamp field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  an.timestamp = !an_no_ts;
  sy.timestamp = !sy_no_ts;
  si.timestamp = !si_no_ts;

  try {
    if (*analyze) return run_analyze(an, std::cout, std::cerr);
    if (*synth) return run_synthesize(sy, std::cout, std::cerr);
    if (*bound) return run_bound(bo, std::cout, std::cerr);
    if (*simulate) return run_simulate(si, std::cout, std::cerr);
  } catch (const qsf::ConvergenceError& e) {
    return report_convergence(e, std::cout, std::cerr);
  } catch (const qsf::ParseError& e) {
    std::cerr << "qsf: " << e.what() << "\n";
    return kUsage;
  } catch (const qsf::Error& e) {
    std::cerr << "qsf: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "qsf: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
