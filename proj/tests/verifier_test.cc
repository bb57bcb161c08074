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


#include <map>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "mbv/error.h"
#include "mbv/fixtures/scenarios.h"
#include "mbv/oracle/oracle.h"
#include "mbv/rono/rono.h"
#include "mbv/verifier/verifier.h"
#include "test_util.h"

namespace mbv::verifier {
namespace {

using json = nlohmann::json;
using ::mbv::testing::Invariants;
using ::mbv::testing::LoadNet;
using ::mbv::testing::ScenarioNamed;
using ::mbv::testing::ScenarioNet;
using ::mbv::testing::SolverOptions;
using ::mbv::testing::Verify;
using ::mbv::testing::WitnessTrace;

std::map<std::string, Status> ByLabel(const std::vector<Verdict>& vs) {
  std::map<std::string, Status> out;
  for (const Verdict& v : vs) out[v.invariant.Label()] = v.status;
  return out;
}

Status One(const network::NetworkSpec& net, const json& inv,
           rono::Mode mode = rono::Mode::kAuto) {
  const std::vector<Verdict> vs = Verify(net, Invariants(json::array({inv})), mode).verdicts;
  EXPECT_EQ(vs.size(), 1u);
  return vs.empty() ? Status::kUnknown : vs[0].status;
}

json Inv(const char* kind, const char* a, const char* b) {
  return {{"kind", kind}, {"a", a}, {"b", b}};
}

TEST(VerifierTest, QuarantineIsolationHolds) {
  const network::NetworkSpec net = ScenarioNet("enterprise");
  EXPECT_EQ(One(net, Inv("NodeIsolation", "q1", "ext")), Status::kHolds);
  EXPECT_EQ(One(net, Inv("NodeIsolation", "ext", "q1")), Status::kHolds);
}

TEST(VerifierTest, ExternalFacingHostsAreReachable) {
  const network::NetworkSpec net = ScenarioNet("enterprise");
  EXPECT_EQ(One(net, Inv("NodeReachability", "ext", "e1")), Status::kHolds);
  EXPECT_EQ(One(net, Inv("NodeReachability", "e2", "ext")), Status::kHolds);
  EXPECT_EQ(One(net, Inv("NodeIsolation", "ext", "h1")), Status::kViolated);
  EXPECT_EQ(One(net, Inv("FlowIsolation", "ext", "h1")), Status::kHolds);
}

TEST(VerifierTest, DroppedQuarantineRuleIsViolatedWithReplayableWitness) {
  const network::NetworkSpec net = ScenarioNet("enterprise_leak");
  const std::vector<Invariant> invs = Invariants(json::array({Inv("NodeIsolation", "q1", "ext")}));
  const std::vector<Verdict> vs = Verify(net, invs).verdicts;
  ASSERT_EQ(vs.size(), 1u);
  ASSERT_EQ(vs[0].status, Status::kViolated);
  ASSERT_TRUE(vs[0].witness.has_value());
  EXPECT_TRUE(vs[0].witness->parsed) << vs[0].witness->detail;
  EXPECT_TRUE(oracle::Replays(net, invs[0], WitnessTrace(net, *vs[0].witness)));
  const json j = vs[0].ToJson();
  EXPECT_EQ(j["status"], "Violated");
  EXPECT_EQ(j["scope"], "per-pipeline");
  EXPECT_FALSE(j["witness"]["events"].empty());
}

// Isolation and reachability of the same endpoints are complementary.
TEST(VerifierTest, IsolationAndReachabilityAreDual) {
  for (const char* name : {"open_acl", "closed_acl", "one_way_acl", "hole_punch", "dpi"}) {
    const network::NetworkSpec net = ScenarioNet(name);
    for (auto [a, b] : {std::pair{"a", "b"}, std::pair{"b", "a"}}) {
      const Status iso = One(net, Inv("NodeIsolation", a, b));
      const Status reach = One(net, Inv("NodeReachability", a, b));
      ASSERT_NE(iso, Status::kUnknown) << name;
      EXPECT_EQ(iso == Status::kHolds, reach == Status::kViolated) << name << " " << a << b;
    }
  }
}

TEST(VerifierTest, AclConfigurationDecidesIsolation) {
  EXPECT_EQ(One(ScenarioNet("open_acl"), Inv("NodeIsolation", "a", "b")), Status::kViolated);
  EXPECT_EQ(One(ScenarioNet("closed_acl"), Inv("NodeIsolation", "a", "b")), Status::kHolds);
  const network::NetworkSpec one_way = ScenarioNet("one_way_acl");
  EXPECT_EQ(One(one_way, Inv("NodeIsolation", "a", "b")), Status::kViolated);
  EXPECT_EQ(One(one_way, Inv("NodeIsolation", "b", "a")), Status::kHolds);
}

TEST(VerifierTest, HolePunchingAllowsOnlyReplies) {
  const network::NetworkSpec net = ScenarioNet("hole_punch");
  EXPECT_EQ(One(net, Inv("NodeIsolation", "b", "a")), Status::kViolated);
  EXPECT_EQ(One(net, Inv("FlowIsolation", "b", "a")), Status::kHolds);
  EXPECT_EQ(One(net, Inv("FlowIsolation", "a", "b")), Status::kViolated);
}

TEST(VerifierTest, CacheDataIsolationDependsOnAcl) {
  const std::vector<Invariant> invs = Invariants(json::array(
      {Inv("DataIsolation", "h2", "s2"), Inv("DataReachability", "h1", "s2")}));
  const std::map<std::string, Status> with =
      ByLabel(Verify(ScenarioNet("mini_cache"), invs).verdicts);
  EXPECT_EQ(with.at("DataIsolation(h2,s2)"), Status::kHolds);
  EXPECT_EQ(with.at("DataReachability(h1,s2)"), Status::kHolds);
  const network::NetworkSpec noacl = ScenarioNet("mini_cache_noacl");
  const std::vector<Verdict> without = Verify(noacl, invs).verdicts;
  ASSERT_EQ(without[0].status, Status::kViolated);
  ASSERT_TRUE(without[0].witness);
  EXPECT_TRUE(oracle::Replays(noacl, invs[0], WitnessTrace(noacl, *without[0].witness)));
}

TEST(VerifierTest, DataQueriesRejectBoxesWithoutOriginThreading) {
  const network::NetworkSpec net = ScenarioNet("constant");
  const rono::Scope whole = rono::WholeScope(net, "test");
  const std::vector<network::Pipeline> ps = network::ExtractPipelines(net);
  try {
    CheckDataIsolation(net, ps, "b", "a", whole, SolverOptions());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedQuery);
  }
}

TEST(VerifierTest, InvalidEndpointsAreRejected) {
  const network::NetworkSpec net = ScenarioNet("open_acl");
  const rono::Scope whole = rono::WholeScope(net, "test");
  EXPECT_THROW(CheckNodeIsolation(net, {}, "a", "m", whole, SolverOptions()), Error);
  EXPECT_THROW(CheckNodeIsolation(net, {}, "a", "a", whole, SolverOptions()), Error);
  EXPECT_THROW(CheckNodeIsolation(net, {}, "a", "zz", whole, SolverOptions()), Error);
}

// Per-pipeline scoping never changes a verdict on RONO networks.
TEST(VerifierTest, PerPipelineScopeAgreesWithWholeNetwork) {
  for (const char* name : {"mini_enterprise", "mini_enterprise_leak", "one_way_acl",
                           "hole_punch", "permutation_5"}) {
    const fixtures::Scenario s = ScenarioNamed(name);
    const network::NetworkSpec net = LoadNet(s.topology);
    const std::vector<Invariant> invs = Invariants(s.invariants);
    const cli::VerifyRun scoped = Verify(net, invs);
    size_t per_pipeline = 0;
    for (const Verdict& v : scoped.verdicts) per_pipeline += v.scope == "per-pipeline";
    EXPECT_GT(per_pipeline, 0u) << name;
    ASSERT_EQ(scoped.verdicts.size(), invs.size()) << name;
    EXPECT_EQ(ByLabel(scoped.verdicts), ByLabel(Verify(net, invs, rono::Mode::kWhole).verdicts))
        << name;
  }
}

// Each encoding answers some queries the others time out on; wherever two
// answer they agree, and racing both answers everything the relational does.
TEST(VerifierTest, EncodingsAgreeWhereDefinite) {
  for (const char* name : {"open_acl", "closed_acl", "one_way_acl", "hole_punch"}) {
    const network::NetworkSpec net = ScenarioNet(name);
    const std::vector<Invariant> invs = Invariants(json::array(
        {Inv("NodeIsolation", "a", "b"), Inv("NodeIsolation", "b", "a")}));
    std::map<Encoding, std::vector<Verdict>> runs;
    for (Encoding enc : {Encoding::kRelational, Encoding::kEprF, Encoding::kBoth}) {
      VerifierOptions o = SolverOptions(20);
      o.encoding = enc;
      runs[enc] = Verify(net, invs, rono::Mode::kWhole, o).verdicts;
    }
    for (size_t i = 0; i < invs.size(); ++i) {
      const Status rel = runs[Encoding::kRelational][i].status;
      const Status eprf = runs[Encoding::kEprF][i].status;
      const Verdict& both = runs[Encoding::kBoth][i];
      ASSERT_NE(rel, Status::kUnknown) << name;
      if (eprf != Status::kUnknown) EXPECT_EQ(eprf, rel) << name << " " << i;
      EXPECT_EQ(both.status, rel) << name << " " << i;
      if (both.witness) {
        EXPECT_TRUE(oracle::Replays(net, invs[i], WitnessTrace(net, *both.witness)))
            << name << " " << i;
      }
    }
  }
  EXPECT_EQ(ParseEncoding("eprf"), Encoding::kEprF);
  EXPECT_FALSE(ParseEncoding("smt").has_value());
}

TEST(VerifierTest, ParallelRunKeepsPlanOrder) {
  const fixtures::Scenario s = ScenarioNamed("mini_enterprise_leak");
  const network::NetworkSpec net = LoadNet(s.topology);
  const cli::Prepared p = cli::Prepare(net);
  const rono::VerificationPlan plan =
      rono::PlanVerification(net, p.pipelines, p.judgments, Invariants(s.invariants));
  const std::vector<Verdict> serial = RunPlan(net, p.pipelines, plan, SolverOptions(), 1);
  const std::vector<Verdict> parallel = RunPlan(net, p.pipelines, plan, SolverOptions(), 3);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].invariant.Label(), plan.entries[i].invariant.Label());
    EXPECT_EQ(serial[i].invariant.Label(), parallel[i].invariant.Label());
    EXPECT_EQ(serial[i].status, parallel[i].status);
  }
  const std::string table = SummaryTable(serial);
  EXPECT_NE(table.find("NodeIsolation"), std::string::npos);
  EXPECT_EQ(VerdictsToJson(serial).size(), serial.size());
}

TEST(VerifierTest, NodeTraversal) {
  const network::NetworkSpec net = ScenarioNet("traversal");
  const std::vector<network::Pipeline> ps = network::ExtractPipelines(net);
  EXPECT_EQ(CheckNodeTraversal(net, ps, "e4", "e1", "c", SolverOptions()).status, Status::kHolds);
  EXPECT_EQ(CheckNodeTraversal(net, ps, "e1", "e4", "c", SolverOptions()).status,
            Status::kViolated);
}

TEST(VerifierTest, LinkTraversalCountsCrossingPairs) {
  const network::NetworkSpec net = ScenarioNet("traversal");
  const std::vector<network::Pipeline> ps = network::ExtractPipelines(net);
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"e3", "e0"}, {"e0", "e4"}, {"e1", "e2"}, {"e5", "e3"}};
  EXPECT_EQ(CheckLinkTraversal(net, ps, {"a", "c"}, pairs, SolverOptions()), 2);
  EXPECT_EQ(CheckLinkTraversal(net, ps, {"d", "b"}, pairs, SolverOptions()), 2);
}

// Every shipped query compiles to a program that passes the EPR-F scan.
TEST(VerifierTest, EveryShippedQueryIsEprF) {
  size_t checked = 0;
  for (const fixtures::Scenario& s : fixtures::ShippedScenarios()) {
    const network::NetworkSpec net = LoadNet(s.topology);
    const cli::Prepared p = cli::Prepare(net);
    for (const rono::PlanEntry& e : rono::PlanVerification(net, p.pipelines, p.judgments,
                                                           Invariants(s.invariants))
                                        .entries) {
      const logic::LogicProgram prog =
          BuildQueryProgram(net, p.pipelines, e.invariant, e.scope.nodes);
      EXPECT_TRUE(encoder::CheckEprF(prog).ok()) << s.name << " " << e.invariant.Label();
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(VerifierTest, ProgramTextIsReported) {
  const network::NetworkSpec net = ScenarioNet("closed_acl");
  std::string text;
  VerifierOptions o = SolverOptions();
  o.program_text = &text;
  CheckNodeIsolation(net, network::ExtractPipelines(net), "a", "b", rono::WholeScope(net, "t"), o);
  EXPECT_NE(text.find("; query\n"), std::string::npos);
  EXPECT_NE(text.find("(check-sat)"), std::string::npos);
}

TEST(WitnessTest, UnparsableModelIsFlagged) {
  const Witness w = ExtractRelationalWitness("(model (define-fun", {"a"});
  EXPECT_FALSE(w.parsed);
  EXPECT_TRUE(w.events.empty());
  EXPECT_FALSE(ExtractWitness("((").parsed);
}

}  // namespace
}  // namespace mbv::verifier
