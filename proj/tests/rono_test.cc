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


#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mbv/error.h"
#include "mbv/network/forwarding.h"
#include "mbv/rono/rono.h"
#include "mbv/verifier/invariant.h"
#include "test_util.h"

namespace mbv::rono {
namespace {

using dsl::Tri;
using ::mbv::testing::ScenarioNamed;
using ::mbv::testing::ScenarioNet;
using verifier::Invariant;
using verifier::InvariantKind;

struct Judged {
  network::NetworkSpec net;
  std::vector<network::Pipeline> pipelines;
  Classifications cls;
  std::vector<RonoJudgment> judgments;
  std::vector<Invariant> invariants;
};

Judged Judge(const std::string& scenario) {
  Judged j{ScenarioNet(scenario), {}, {}, {}, {}};
  j.pipelines = network::ExtractPipelines(j.net);
  j.cls = ClassifyNetwork(j.net);
  for (const network::Pipeline& p : j.pipelines) j.judgments.push_back(JudgeRono(p, j.cls));
  j.invariants = verifier::ParseInvariants(ScenarioNamed(scenario).invariants.dump());
  return j;
}

const RonoJudgment& JudgmentOf(const Judged& j, const std::string& a, const std::string& b) {
  for (const RonoJudgment& r : j.judgments) {
    if (r.pipeline.src == a && r.pipeline.dst == b) return r;
  }
  throw std::runtime_error("no pipeline " + a + "->" + b);
}

TEST(JudgeRonoTest, LearningFirewallIsSingleFlowParallel) {
  const Judged j = Judge("enterprise");
  EXPECT_EQ(j.cls.at("f").flow_parallel, Tri::kYes);
  const RonoJudgment& r = JudgmentOf(j, "q1", "ext");
  EXPECT_EQ(r.rono, Rono::kYes);
  EXPECT_EQ(r.rule, "single-flow-parallel");
  EXPECT_EQ(r.ToJson()["rono"], "Yes");
}

TEST(JudgeRonoTest, DirectPipeline) {
  const Judged j = Judge("enterprise");
  bool seen = false;
  for (const RonoJudgment& r : j.judgments) {
    if (!r.pipeline.stages.empty()) continue;
    seen = true;
    EXPECT_EQ(r.rono, Rono::kYes);
    EXPECT_EQ(r.rule, "direct");
  }
  EXPECT_TRUE(seen);
}

TEST(JudgeRonoTest, PermutationThroughFirewallComposes) {
  const Judged j = Judge("permutation_5");
  const RonoJudgment& r = JudgmentOf(j, "l2", "r1");
  EXPECT_EQ(r.pipeline.stages, (std::vector<std::string>{"p0", "f"}));
  EXPECT_EQ(r.rono, Rono::kYes);
  EXPECT_EQ(r.rule, "flow-preserving-composition");
}

TEST(JudgeRonoTest, ConstantSourceIsNotGuaranteed) {
  const Judged j = Judge("constant");
  EXPECT_NE(j.cls.at("k").flow_preserving, Tri::kYes);
  const RonoJudgment& r = JudgmentOf(j, "a", "b");
  EXPECT_EQ(r.rono, Rono::kNotGuaranteed);
  EXPECT_NE(r.evidence.find("k is not known to be flow-preserving"), std::string::npos)
      << r.evidence;
}

TEST(JudgeRonoTest, SharedPermutationIsNotGuaranteed) {
  const Judged j = Judge("permutation_shared_5");
  EXPECT_NE(j.cls.at("p0").flow_parallel, Tri::kYes);
  EXPECT_EQ(JudgmentOf(j, "l2", "r1").rono, Rono::kNotGuaranteed);
}

TEST(JudgeRonoTest, MissingClassification) {
  network::Pipeline p;
  p.src = "a";
  p.dst = "b";
  p.stages = {"m"};
  try {
    JudgeRono(p, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingClassification);
  }
}

bool Expected(const std::vector<dsl::Classification>& cs) {
  if (cs.empty()) return true;
  if (cs.size() == 1 && cs[0].flow_parallel == Tri::kYes) return true;
  for (const dsl::Classification& c : cs) {
    if (c.flow_parallel != Tri::kYes || c.flow_preserving != Tri::kYes) return false;
  }
  return true;
}

// Random stage classifications: the judgment matches the rules, and
// improving any stage's classification never withdraws a Yes.
TEST(JudgeRonoTest, RulesAndMonotonicity) {
  std::mt19937 rng(11);
  const Tri tris[] = {Tri::kYes, Tri::kNo, Tri::kUnknown};
  for (int iter = 0; iter < 2000; ++iter) {
    const size_t n = rng() % 4;
    network::Pipeline p;
    p.src = "a";
    p.dst = "b";
    Classifications cls;
    std::vector<dsl::Classification> cs;
    for (size_t i = 0; i < n; ++i) {
      const std::string s = "m" + std::to_string(i);
      p.stages.push_back(s);
      cls[s] = {tris[rng() % 3], tris[rng() % 3], "random"};
      cs.push_back(cls[s]);
    }
    const RonoJudgment r = JudgeRono(p, cls);
    ASSERT_EQ(r.rono == Rono::kYes, Expected(cs)) << iter;
    ASSERT_NE(r.rono, Rono::kNo);
    if (n == 0) continue;
    const std::string s = p.stages[rng() % n];
    Classifications better = cls;
    if (rng() % 2) {
      better[s].flow_parallel = Tri::kYes;
    } else {
      better[s].flow_preserving = Tri::kYes;
    }
    if (r.rono == Rono::kYes) ASSERT_EQ(JudgeRono(p, better).rono, Rono::kYes) << iter;
  }
}

const PlanEntry& EntryFor(const VerificationPlan& plan, const std::string& label) {
  for (const PlanEntry& e : plan.entries) {
    if (e.invariant.Label() == label) return e;
  }
  throw std::runtime_error("no plan entry " + label);
}

TEST(PlanVerificationTest, EnterpriseIsPerPipeline) {
  const Judged j = Judge("enterprise");
  const VerificationPlan plan =
      PlanVerification(j.net, j.pipelines, j.judgments, j.invariants);
  ASSERT_EQ(plan.entries.size(), j.invariants.size());
  for (const PlanEntry& e : plan.entries) {
    EXPECT_FALSE(e.scope.whole) << e.invariant.Label() << ": " << e.scope.reason;
    EXPECT_FALSE(e.refused);
  }
  const PlanEntry& q = EntryFor(plan, "NodeIsolation(q1,ext)");
  EXPECT_EQ(q.scope.nodes, (std::vector<std::string>{"ext", "f", "q1"}));
  ASSERT_EQ(q.scope.pipelines.size(), 2u);
  for (size_t i : q.scope.pipelines) {
    const network::Pipeline& p = j.pipelines[i];
    EXPECT_TRUE((p.src == "q1" && p.dst == "ext") || (p.src == "ext" && p.dst == "q1"));
  }
}

TEST(PlanVerificationTest, ScopeContainsEndpointsAndStages) {
  for (const char* name : {"enterprise", "cache", "permutation_10", "mini_cache"}) {
    const Judged j = Judge(name);
    for (const PlanEntry& e :
         PlanVerification(j.net, j.pipelines, j.judgments, j.invariants).entries) {
      const std::vector<std::string>& nodes = e.scope.nodes;
      auto has = [&](const std::string& n) {
        return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
      };
      EXPECT_TRUE(has(e.invariant.a) && has(e.invariant.b)) << name;
      for (size_t i : e.scope.pipelines) {
        for (const std::string& s : j.pipelines[i].stages) EXPECT_TRUE(has(s)) << name;
      }
    }
  }
}

TEST(PlanVerificationTest, SharedStateFallsBackToWholeNetwork) {
  const Judged j = Judge("permutation_shared_5");
  for (const PlanEntry& e :
       PlanVerification(j.net, j.pipelines, j.judgments, j.invariants).entries) {
    EXPECT_TRUE(e.scope.whole);
  }
  const std::vector<Invariant> inv{{InvariantKind::kNodeReachability, "l2", "r1", "", {}}};
  const PlanEntry e = PlanVerification(j.net, j.pipelines, j.judgments, inv).entries[0];
  EXPECT_TRUE(e.scope.whole);
  EXPECT_FALSE(e.refused);
  EXPECT_NE(e.scope.reason.find("NotGuaranteed"), std::string::npos) << e.scope.reason;
  EXPECT_EQ(e.scope.nodes.size(), j.net.HostNames().size() + 2);
}

TEST(PlanVerificationTest, TraversalIsAlwaysWholeNetwork) {
  const Judged j = Judge("traversal");
  for (const PlanEntry& e :
       PlanVerification(j.net, j.pipelines, j.judgments, j.invariants).entries) {
    EXPECT_TRUE(e.scope.whole);
    EXPECT_FALSE(e.refused);
  }
  for (const PlanEntry& e : PlanVerification(j.net, j.pipelines, j.judgments, j.invariants,
                                             Mode::kPerPipeline)
                                .entries) {
    EXPECT_TRUE(e.refused);
  }
}

TEST(PlanVerificationTest, PerPipelineRefusedOnConstantComposition) {
  const Judged j = Judge("constant");
  const VerificationPlan forced =
      PlanVerification(j.net, j.pipelines, j.judgments, j.invariants, Mode::kPerPipeline);
  for (const PlanEntry& e : forced.entries) EXPECT_TRUE(e.refused);
  const VerificationPlan automatic =
      PlanVerification(j.net, j.pipelines, j.judgments, j.invariants);
  for (const PlanEntry& e : automatic.entries) {
    EXPECT_FALSE(e.refused);
    EXPECT_TRUE(e.scope.whole);
  }
}

TEST(PlanVerificationTest, WholeModeOverridesRono) {
  const Judged j = Judge("enterprise");
  for (const PlanEntry& e :
       PlanVerification(j.net, j.pipelines, j.judgments, j.invariants, Mode::kWhole).entries) {
    EXPECT_TRUE(e.scope.whole);
    EXPECT_EQ(e.scope.Label(), "whole-network");
  }
}

TEST(PlanVerificationTest, NoPipelineMeansWholeNetwork) {
  network::NetworkSpec net = ScenarioNet("enterprise");
  const std::vector<network::Pipeline> none;
  const std::vector<Invariant> inv{{InvariantKind::kNodeIsolation, "q1", "ext", "", {}}};
  const PlanEntry e = PlanVerification(net, none, {}, inv).entries[0];
  EXPECT_TRUE(e.scope.whole);
  EXPECT_EQ(e.scope.reason, "no pipeline between the endpoints");
}

}  // namespace
}  // namespace mbv::rono
