// Copyright 2026 The mbverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// mbv: verifies isolation invariants of networks with stateful middleboxes.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mbv/cli/commands.h"

namespace {

using mbv::cli::RunConfig;

void AddNetworkOptions(CLI::App* app, RunConfig& cfg) {
  app->add_option("--topology", cfg.topology, "Topology JSON file")->required();
  app->add_option("--models", cfg.models, "Directory of .mbx middlebox models")
      ->capture_default_str();
  app->add_option("--out", cfg.out, "Directory for report files");
}

void AddSolverOptions(CLI::App* app, RunConfig& cfg) {
  app->add_option("--solver", cfg.solver, "SMT solver executable (default $MBV_SOLVER, then z3)");
  app->add_option("--timeout-sec", cfg.timeout_sec, "Per-query solver timeout")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--jobs", cfg.jobs, "Parallel solver sessions (default: available cores)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--encoding", cfg.encoding, "Query text sent to the solver")
      ->capture_default_str()
      ->check(CLI::IsMember({"relational", "eprf", "both"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier for networks with stateful middleboxes"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* check = app.add_subcommand("check-network", "Report forwarding loops and black holes");
  AddNetworkOptions(check, cfg);

  CLI::App* classify =
      app.add_subcommand("classify", "Classify middleboxes and judge pipelines RONO");
  AddNetworkOptions(classify, cfg);

  CLI::App* verify = app.add_subcommand("verify", "Check invariants with the SMT solver");
  AddNetworkOptions(verify, cfg);
  AddSolverOptions(verify, cfg);
  verify->add_option("--invariants", cfg.invariants, "Invariant JSON file")->required();
  verify->add_option("--mode", cfg.mode, "Verification scope")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "per-pipeline", "whole-network"}));
  verify->add_flag("--allow-unknown", cfg.allow_unknown, "Exit 0 when verdicts are Unknown");

  CLI::App* bench = app.add_subcommand("bench", "Time a generated fixture family");
  bench->add_option("--models", cfg.models, "Directory of .mbx middlebox models")
      ->capture_default_str();
  bench->add_option("--out", cfg.out, "Directory for report files");
  AddSolverOptions(bench, cfg);
  bench->add_option("--family", cfg.family, "Fixture family")
      ->capture_default_str()
      ->check(CLI::IsMember({"permutation", "permutation_shared", "enterprise"}));
  bench->add_option("--sizes", cfg.sizes, "Host counts")->capture_default_str()->delimiter(',');

  CLI::App* enforce =
      app.add_subcommand("enforce", "Check an observed middlebox trace against its model");
  AddNetworkOptions(enforce, cfg);
  enforce->add_option("--instance", cfg.instance, "Middlebox instance name")->required();
  enforce->add_option("--trace", cfg.trace, "Trace file (JSON lines {in, out})")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "Run injected packets through the network");
  AddNetworkOptions(simulate, cfg);
  simulate->add_option("--trace", cfg.trace, "Injection file (JSON lines {host, packet})")
      ->required();

  CLI::App* exhaust =
      app.add_subcommand("exhaust", "Decide invariants by bounded exhaustive simulation");
  AddNetworkOptions(exhaust, cfg);
  exhaust->add_option("--invariants", cfg.invariants, "Invariant JSON file")->required();
  exhaust->add_option("--bound", cfg.bound, "Maximum injected packets")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mbv::cli::kExitInputError;
  }

  using namespace mbv::cli;
  auto run = [&](auto cmd) { return Guarded([&] { return cmd(cfg, std::cout, std::cerr); }, std::cerr); };
  if (*check) return run(CmdCheckNetwork);
  if (*classify) return run(CmdClassify);
  if (*verify) return run(CmdVerify);
  if (*bench) return run(CmdBench);
  if (*enforce) return run(CmdEnforce);
  if (*simulate) return run(CmdSimulate);
  if (*exhaust) return run(CmdExhaust);
  return kExitInputError;
}
