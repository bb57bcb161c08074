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


#ifndef MBV_CLI_COMMANDS_H_
#define MBV_CLI_COMMANDS_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mbv/enforcement/enforcement.h"
#include "mbv/error.h"
#include "mbv/fixtures/scenarios.h"
#include "mbv/network/forwarding.h"
#include "mbv/network/spec.h"
#include "mbv/oracle/oracle.h"
#include "mbv/rono/rono.h"
#include "mbv/verifier/invariant.h"
#include "mbv/verifier/verifier.h"

namespace mbv::cli {

using nlohmann::json;

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,        // some invariant Violated or Unknown, or a deviation
  kExitInadmissible = 2,  // forwarding loops or black holes
  kExitInputError = 3,
};

struct RunConfig {
  std::string topology;
  std::string models = "fixtures/models";
  std::string invariants;
  std::string mode = "auto";  // auto | per-pipeline | whole-network
  std::string solver;         // empty: $MBV_SOLVER, then z3
  double timeout_sec = 60;
  int jobs = 0;               // 0: available cores
  std::string out;            // output directory; empty writes nothing
  std::string encoding = "relational";
  bool allow_unknown = false;
  // enforce / simulate / exhaust
  std::string instance;
  std::string trace;
  int bound = 3;
  // bench
  std::string family = "permutation";
  std::vector<int> sizes = {5, 10, 20};
};

inline std::optional<rono::Mode> ParseMode(std::string_view s) {
  if (s == "auto") return rono::Mode::kAuto;
  if (s == "per-pipeline") return rono::Mode::kPerPipeline;
  if (s == "whole-network") return rono::Mode::kWhole;
  return std::nullopt;
}

// An admissible network with its pipelines and RONO judgments.
struct Prepared {
  network::NetworkSpec net;
  network::ForwardingReport report;
  std::vector<network::Pipeline> pipelines;
  rono::Classifications classes;
  std::vector<rono::RonoJudgment> judgments;

  bool admissible() const { return report.admissible(); }
};

inline Prepared Prepare(network::NetworkSpec net) {
  Prepared p;
  p.net = std::move(net);
  p.report = network::CheckForwarding(p.net);
  if (!p.admissible()) return p;
  p.pipelines = network::ExtractPipelines(p.net);
  p.classes = rono::ClassifyNetwork(p.net);
  for (const network::Pipeline& pl : p.pipelines) {
    p.judgments.push_back(rono::JudgeRono(pl, p.classes));
  }
  return p;
}

inline Prepared LoadPrepared(const RunConfig& cfg) {
  if (cfg.topology.empty()) throw Error(ErrorCode::kIo, "--topology is required");
  return Prepare(network::LoadNetworkFile(cfg.topology, network::LoadModelDirectory(cfg.models)));
}

inline std::vector<verifier::Invariant> LoadInvariants(const RunConfig& cfg) {
  if (cfg.invariants.empty()) throw Error(ErrorCode::kIo, "--invariants is required");
  return verifier::ParseInvariants(network::ReadFile(cfg.invariants));
}

inline verifier::VerifierOptions MakeVerifierOptions(const RunConfig& cfg) {
  verifier::VerifierOptions o;
  o.session.solver_path = solver::ResolveSolverPath(cfg.solver);
  o.session.timeout_sec = cfg.timeout_sec;
  std::optional<verifier::Encoding> enc = verifier::ParseEncoding(cfg.encoding);
  if (!enc) throw Error(ErrorCode::kIo, "unknown encoding '" + cfg.encoding + "'");
  o.encoding = *enc;
  return o;
}

inline int Jobs(const RunConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void WriteOutput(const RunConfig& cfg, const std::string& name, const std::string& text) {
  if (cfg.out.empty()) return;
  std::filesystem::create_directories(cfg.out);
  const std::string path = (std::filesystem::path(cfg.out) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  f << text;
}

inline void ReportInadmissible(const Prepared& p, std::ostream& err) {
  err << "network is not admissible:\n";
  for (const network::Finding& f : p.report.findings) {
    err << "  " << f.kind << " for";
    for (const std::string& a : f.header_class) err << " " << a;
    err << ":";
    for (const std::string& n : f.path) err << " " << n;
    err << "\n";
  }
}

inline json ClassificationJson(const Prepared& p) {
  json boxes = json::array();
  for (const auto& [name, c] : p.classes) {
    boxes.push_back({{"name", name},
                     {"model", p.net.middleboxes.at(name).model},
                     {"flowParallel", dsl::TriName(c.flow_parallel)},
                     {"flowPreserving", dsl::TriName(c.flow_preserving)},
                     {"evidence", c.evidence}});
  }
  json pipes = json::array();
  for (const rono::RonoJudgment& j : p.judgments) pipes.push_back(j.ToJson());
  return {{"middleboxes", boxes}, {"pipelines", pipes}};
}

struct Tally {
  size_t holds = 0, violated = 0, unknown = 0;

  explicit Tally(const std::vector<verifier::Verdict>& vs) {
    for (const verifier::Verdict& v : vs) {
      if (v.status == verifier::Status::kHolds) ++holds;
      if (v.status == verifier::Status::kViolated) ++violated;
      if (v.status == verifier::Status::kUnknown) ++unknown;
    }
  }

  std::string Line() const {
    return std::to_string(holds + violated + unknown) + " invariants: " + std::to_string(holds) +
           " holds, " + std::to_string(violated) + " violated, " + std::to_string(unknown) +
           " unknown\n";
  }
};

// Outcome of planning and checking a set of invariants.
struct VerifyRun {
  rono::VerificationPlan plan;
  std::vector<verifier::Verdict> verdicts;
  std::vector<std::string> refusals;  // non-empty: nothing was checked
};

inline VerifyRun RunVerification(const Prepared& p, const std::vector<verifier::Invariant>& invs,
                                 rono::Mode mode, const verifier::VerifierOptions& opts,
                                 int jobs) {
  VerifyRun r;
  r.plan = rono::PlanVerification(p.net, p.pipelines, p.judgments, invs, mode);
  for (const rono::PlanEntry& e : r.plan.entries) {
    if (e.refused) r.refusals.push_back(e.invariant.Label() + ": " + e.scope.reason);
  }
  if (r.refusals.empty()) r.verdicts = verifier::RunPlan(p.net, p.pipelines, r.plan, opts, jobs);
  return r;
}

inline int CmdCheckNetwork(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Prepared p = LoadPrepared(cfg);
  const std::string text = p.report.ToJson().dump(2) + "\n";
  out << text;
  WriteOutput(cfg, "network.json", text);
  if (!p.admissible()) {
    ReportInadmissible(p, err);
    return kExitInadmissible;
  }
  return kExitOk;
}

inline int CmdClassify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Prepared p = LoadPrepared(cfg);
  if (!p.admissible()) {
    ReportInadmissible(p, err);
    return kExitInadmissible;
  }
  const std::string text = ClassificationJson(p).dump(2) + "\n";
  out << text;
  WriteOutput(cfg, "classification.json", text);
  return kExitOk;
}

inline int CmdVerify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::optional<rono::Mode> mode = ParseMode(cfg.mode);
  if (!mode) throw Error(ErrorCode::kIo, "unknown mode '" + cfg.mode + "'");
  Prepared p = LoadPrepared(cfg);
  const std::vector<verifier::Invariant> invs = LoadInvariants(cfg);
  if (!p.admissible()) {
    ReportInadmissible(p, err);
    WriteOutput(cfg, "results.json", json{{"network", p.report.ToJson()}}.dump(2) + "\n");
    return kExitInadmissible;
  }
  VerifyRun r = RunVerification(p, invs, *mode, MakeVerifierOptions(cfg), Jobs(cfg));
  if (!r.refusals.empty()) {
    err << "per-pipeline mode refused; these invariants need whole-network scope:\n";
    for (const std::string& s : r.refusals) err << "  " << s << "\n";
    return kExitInputError;
  }
  const Tally t(r.verdicts);
  json results{{"network", p.report.ToJson()},
               {"mode", cfg.mode},
               {"classification", ClassificationJson(p)},
               {"verdicts", verifier::VerdictsToJson(r.verdicts)},
               {"summary",
                {{"total", r.verdicts.size()},
                 {"holds", t.holds},
                 {"violated", t.violated},
                 {"unknown", t.unknown}}}};
  const std::string summary = verifier::SummaryTable(r.verdicts) + t.Line();
  out << summary;
  WriteOutput(cfg, "results.json", results.dump(2) + "\n");
  WriteOutput(cfg, "summary.txt", summary);
  if (t.violated > 0 || (t.unknown > 0 && !cfg.allow_unknown)) return kExitFailed;
  return kExitOk;
}

// Generated scenario of `family` with about `size` hosts.
inline fixtures::Scenario BenchScenario(const std::string& family, int size) {
  if (size < 2) throw Error(ErrorCode::kIo, "bench sizes must be at least 2");
  if (family == "permutation") return fixtures::Permutation({size, true});
  if (family == "permutation_shared") return fixtures::Permutation({size, false});
  if (family == "enterprise") return fixtures::Enterprise({std::max(1, size / 3), 0});
  throw Error(ErrorCode::kIo, "unknown bench family '" + family +
                                  "' (permutation, permutation_shared, enterprise)");
}

struct BenchRow {
  int size = 0;
  size_t queries = 0;
  size_t per_pipeline_scoped = 0;  // auto-mode queries that ran per pipeline
  double per_pipeline_mean_ms = 0;
  double whole_mean_ms = 0;
  bool agree = true;      // both modes gave the same verdicts
  bool all_holds = true;

  json ToJson() const {
    return {{"size", size},
            {"queries", queries},
            {"perPipelineScoped", per_pipeline_scoped},
            {"perPipelineMeanMs", per_pipeline_mean_ms},
            {"wholeNetworkMeanMs", whole_mean_ms},
            {"verdictsAgree", agree},
            {"allHold", all_holds}};
  }
};

inline double MeanMs(const std::vector<verifier::Verdict>& vs) {
  if (vs.empty()) return 0;
  double sum = 0;
  for (const verifier::Verdict& v : vs) sum += v.solver_seconds;
  return 1000 * sum / static_cast<double>(vs.size());
}

inline std::vector<BenchRow> RunBench(const RunConfig& cfg) {
  const network::ModelLibrary lib = network::LoadModelDirectory(cfg.models);
  const verifier::VerifierOptions opts = MakeVerifierOptions(cfg);
  std::vector<BenchRow> rows;
  for (int size : cfg.sizes) {
    const fixtures::Scenario s = BenchScenario(cfg.family, size);
    Prepared p = Prepare(network::LoadNetwork(s.topology.dump(), lib));
    if (!p.admissible()) throw Error(ErrorCode::kInvalidTopology, s.name + " is not admissible");
    const std::vector<verifier::Invariant> invs = verifier::ParseInvariants(s.invariants.dump());
    // Queries run one at a time so the solver times are comparable.
    VerifyRun scoped = RunVerification(p, invs, rono::Mode::kAuto, opts, 1);
    VerifyRun whole = RunVerification(p, invs, rono::Mode::kWhole, opts, 1);
    BenchRow row;
    row.size = size;
    row.queries = invs.size();
    for (const rono::PlanEntry& e : scoped.plan.entries) row.per_pipeline_scoped += !e.scope.whole;
    row.per_pipeline_mean_ms = MeanMs(scoped.verdicts);
    row.whole_mean_ms = MeanMs(whole.verdicts);
    for (size_t i = 0; i < invs.size(); ++i) {
      row.agree = row.agree && scoped.verdicts[i].status == whole.verdicts[i].status;
      row.all_holds = row.all_holds && scoped.verdicts[i].status == verifier::Status::kHolds &&
                      whole.verdicts[i].status == verifier::Status::kHolds;
    }
    rows.push_back(row);
  }
  return rows;
}

inline int CmdBench(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::vector<BenchRow> rows = RunBench(cfg);
  json j{{"family", cfg.family}, {"rows", json::array()}};
  std::ostringstream table;
  table << "size  queries  per-pipeline-ms  whole-network-ms\n";
  bool ok = true;
  for (const BenchRow& r : rows) {
    j["rows"].push_back(r.ToJson());
    char line[96];
    std::snprintf(line, sizeof line, "%4d  %7zu  %15.1f  %16.1f\n", r.size, r.queries,
                  r.per_pipeline_mean_ms, r.whole_mean_ms);
    table << line;
    ok = ok && r.agree && r.all_holds;
  }
  out << table.str();
  WriteOutput(cfg, "bench.json", j.dump(2) + "\n");
  WriteOutput(cfg, "bench.txt", table.str());
  return ok ? kExitOk : kExitFailed;
}

inline int CmdEnforce(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.instance.empty()) throw Error(ErrorCode::kIo, "--instance is required");
  if (cfg.trace.empty()) throw Error(ErrorCode::kIo, "--trace is required");
  const network::NetworkSpec net =
      network::LoadNetworkFile(cfg.topology, network::LoadModelDirectory(cfg.models));
  auto it = net.middleboxes.find(cfg.instance);
  if (it == net.middleboxes.end()) {
    throw Error(ErrorCode::kUnknownIdentifier, "no middlebox named '" + cfg.instance + "'");
  }
  const std::vector<enforcement::TraceRecord> trace =
      enforcement::ParseTrace(network::ReadFile(cfg.trace));
  const enforcement::ConformanceReport r = enforcement::CheckConformance(
      net.models.at(it->second.model), it->second.config, cfg.instance, trace);
  const std::string text = r.ToJson().dump(2) + "\n";
  out << text;
  WriteOutput(cfg, "conformance.json", text);
  return r.conforming() ? kExitOk : kExitFailed;
}

// Injection file: JSON lines {"host": name, "packet": packet}.
inline std::vector<oracle::Injection> ParseInjections(std::string_view text) {
  std::vector<oracle::Injection> out;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "injection line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("host") || !j["host"].is_string() || !j.contains("packet")) {
      throw Error(ErrorCode::kParseError, where + ": expected {\"host\": ..., \"packet\": ...}");
    }
    oracle::Injection inj{j["host"].get<std::string>(),
                          enforcement::PacketFromJson(j["packet"], where)};
    if (inj.packet.origin.empty()) inj.packet.origin = inj.host;
    out.push_back(std::move(inj));
  }
  return out;
}

inline int CmdSimulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.trace.empty()) throw Error(ErrorCode::kIo, "--trace is required");
  Prepared p = LoadPrepared(cfg);
  if (!p.admissible()) {
    ReportInadmissible(p, err);
    return kExitInadmissible;
  }
  const std::string text =
      oracle::LogToJsonLines(oracle::Simulate(p.net, ParseInjections(network::ReadFile(cfg.trace))));
  out << text;
  WriteOutput(cfg, "delivery.jsonl", text);
  return kExitOk;
}

inline int CmdExhaust(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Prepared p = LoadPrepared(cfg);
  const std::vector<verifier::Invariant> invs = LoadInvariants(cfg);
  if (!p.admissible()) {
    ReportInadmissible(p, err);
    return kExitInadmissible;
  }
  if (cfg.bound < 1) throw Error(ErrorCode::kIo, "--bound must be at least 1");
  oracle::TraceBound bound;
  bound.max_packets = cfg.bound;
  json verdicts = json::array();
  bool ok = true;
  for (const verifier::Invariant& inv : invs) {
    const oracle::OracleVerdict v = oracle::DecideByExhaustion(p.net, inv, bound);
    verdicts.push_back(v.ToJson());
    out << inv.Label() << "  " << v.StatusLabel() << "  (" << v.sequences << " sequences)\n";
    ok = ok && v.holds;
  }
  WriteOutput(cfg, "exhaust.json", json{{"bound", cfg.bound}, {"verdicts", verdicts}}.dump(2) + "\n");
  return ok ? kExitOk : kExitFailed;
}

// Runs `fn`, mapping library errors to the input-error exit code.
template <typename Fn>
int Guarded(Fn fn, std::ostream& err) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace mbv::cli

#endif  // MBV_CLI_COMMANDS_H_
