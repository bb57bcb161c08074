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


#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "mbv/error.h"
#include "mbv/oracle/oracle.h"
#include "mbv/verifier/invariant.h"
#include "test_util.h"

namespace mbv::oracle {
namespace {

using json = nlohmann::json;
using ::mbv::testing::Invariants;
using ::mbv::testing::ScenarioNet;
using verifier::Invariant;
using verifier::InvariantKind;

Injection Inject(const network::NetworkSpec& net, const std::string& from, const std::string& to,
                 std::int64_t sport = 1, std::int64_t dport = 1, const std::string& body = "x") {
  return {from, {net.hosts.at(from)[0], net.hosts.at(to)[0], sport, dport, from, body}};
}

std::vector<LogEvent> ReceivesAt(const DeliveryLog& log, const std::string& node) {
  std::vector<LogEvent> out;
  for (const LogEvent& e : log) {
    if (!e.send && e.to == node) out.push_back(e);
  }
  return out;
}

Invariant Inv(InvariantKind k, const char* a, const char* b) { return {k, a, b, "", {}}; }

TEST(SimulateTest, DenyAllDeliversNothing) {
  const network::NetworkSpec net = ScenarioNet("closed_acl");
  const DeliveryLog log = Simulate(net, {Inject(net, "a", "b")});
  EXPECT_TRUE(ReceivesAt(log, "b").empty());
  ASSERT_EQ(ReceivesAt(log, "m").size(), 1u);
}

TEST(SimulateTest, HolePunchedReplyIsDelivered) {
  const network::NetworkSpec net = ScenarioNet("hole_punch");
  EXPECT_TRUE(ReceivesAt(Simulate(net, {Inject(net, "b", "a", 2, 1)}), "a").empty());
  const DeliveryLog log = Simulate(net, {Inject(net, "a", "b", 1, 2), Inject(net, "b", "a", 2, 1)});
  EXPECT_EQ(ReceivesAt(log, "b").size(), 1u);
  const std::vector<LogEvent> at_a = ReceivesAt(log, "a");
  ASSERT_EQ(at_a.size(), 1u);
  EXPECT_EQ(at_a[0].packet.src, "10.0.0.2");
  EXPECT_GT(at_a[0].time, ReceivesAt(log, "b")[0].time);
}

TEST(SimulateTest, CacheWithoutAclLeaksServerContent) {
  const network::NetworkSpec net = ScenarioNet("mini_cache_noacl");
  const std::vector<Injection> trace{Inject(net, "h1", "s2"), Inject(net, "s2", "h1"),
                                     Inject(net, "h2", "s2")};
  const std::vector<LogEvent> at_h2 = ReceivesAt(Simulate(net, trace), "h2");
  ASSERT_EQ(at_h2.size(), 1u);
  EXPECT_EQ(at_h2[0].packet.origin, "s2");
  EXPECT_EQ(at_h2[0].packet.src, "192.168.0.2");
  EXPECT_EQ(at_h2[0].from, "cache");
  EXPECT_TRUE(ReceivesAt(Simulate(ScenarioNet("mini_cache"), trace), "h2").empty());
}

TEST(SimulateTest, DpiBranchesOnClassifier) {
  const network::NetworkSpec net = ScenarioNet("dpi");
  const std::vector<DeliveryLog> logs = SimulateAll(net, {Inject(net, "a", "b")});
  ASSERT_EQ(logs.size(), 2u);
  std::multiset<size_t> delivered;
  for (const DeliveryLog& l : logs) delivered.insert(ReceivesAt(l, "b").size());
  EXPECT_EQ(delivered, (std::multiset<size_t>{0, 1}));
}

TEST(SimulateTest, Deterministic) {
  const network::NetworkSpec net = ScenarioNet("mini_enterprise");
  std::mt19937 rng(3);
  const std::vector<std::string> hosts = net.HostNames();
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<Injection> trace;
    for (int i = 0; i < 5; ++i) {
      const std::string a = hosts[rng() % hosts.size()];
      std::string b = a;
      while (b == a) b = hosts[rng() % hosts.size()];
      trace.push_back(Inject(net, a, b, 1 + rng() % 2, 1 + rng() % 2));
    }
    EXPECT_EQ(LogToJsonLines(Simulate(net, trace)), LogToJsonLines(Simulate(net, trace)));
  }
}

TEST(SimulateTest, LogIsJsonLines) {
  const network::NetworkSpec net = ScenarioNet("open_acl");
  const std::string text = LogToJsonLines(Simulate(net, {Inject(net, "a", "b")}));
  size_t lines = 0;
  for (size_t at = 0, nl; (nl = text.find('\n', at)) != std::string::npos; at = nl + 1) {
    const json j = json::parse(text.substr(at, nl - at));
    EXPECT_TRUE(j.contains("kind") && j.contains("time") && j["packet"].contains("body_token"));
    ++lines;
  }
  EXPECT_EQ(lines, 4u);  // a->m, m->b, each a send and a receive
}

TEST(SimulateTest, RejectsDishonestInjections) {
  const network::NetworkSpec net = ScenarioNet("open_acl");
  Injection spoofed = Inject(net, "a", "b");
  spoofed.packet.src = "10.0.0.2";
  Injection self = Inject(net, "a", "b");
  self.packet.dst = "10.0.0.1";
  Injection origin = Inject(net, "a", "b");
  origin.packet.origin = "b";
  const Injection unknown{"m", Inject(net, "a", "b").packet};
  for (const Injection& bad : {spoofed, self, origin, unknown}) {
    try {
      Simulate(net, {bad});
      ADD_FAILURE() << bad.packet.ToString();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kPreconditionViolated);
    }
  }
}

TEST(DecideByExhaustionTest, QuarantineHoldsUpToBound) {
  const network::NetworkSpec net = ScenarioNet("mini_enterprise");
  const OracleVerdict v =
      DecideByExhaustion(net, Inv(InvariantKind::kNodeIsolation, "q1", "ext"), {3});
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(v.bounded);
  EXPECT_EQ(v.StatusLabel(), "Holds-up-to-bound");
  EXPECT_GT(v.sequences, 1000u);
  EXPECT_EQ(v.ToJson()["bound"], 3);
}

TEST(DecideByExhaustionTest, OpenAclViolatedByOnePacket) {
  const network::NetworkSpec net = ScenarioNet("open_acl");
  const OracleVerdict v =
      DecideByExhaustion(net, Inv(InvariantKind::kNodeIsolation, "a", "b"), {1});
  EXPECT_FALSE(v.holds);
  EXPECT_FALSE(v.bounded);
  EXPECT_EQ(v.StatusLabel(), "Violated");
  ASSERT_EQ(v.trace.size(), 1u);
  EXPECT_EQ(v.trace[0].host, "a");
  EXPECT_EQ(v.ToJson()["trace"].size(), 1u);
}

TEST(DecideByExhaustionTest, NormalHostFlowIsolatedFromExternal) {
  const network::NetworkSpec net = ScenarioNet("mini_enterprise");
  EXPECT_TRUE(DecideByExhaustion(net, Inv(InvariantKind::kFlowIsolation, "ext", "h1"), {3}).holds);
  // The reply direction is open: h1 may initiate toward ext.
  EXPECT_FALSE(DecideByExhaustion(net, Inv(InvariantKind::kFlowIsolation, "h1", "ext"), {3}).holds);
  EXPECT_FALSE(DecideByExhaustion(net, Inv(InvariantKind::kNodeIsolation, "ext", "h1"), {3}).holds);
}

TEST(DecideByExhaustionTest, ReachabilityHoldsOnWitness) {
  const network::NetworkSpec net = ScenarioNet("mini_enterprise");
  const OracleVerdict v =
      DecideByExhaustion(net, Inv(InvariantKind::kNodeReachability, "ext", "h1"), {2});
  EXPECT_TRUE(v.holds);
  EXPECT_FALSE(v.bounded);
  EXPECT_EQ(v.StatusLabel(), "Holds");
  EXPECT_TRUE(Replays(net, v.invariant, v.trace));
}

TEST(DecideByExhaustionTest, DataIsolationOnCache) {
  const Invariant inv = Inv(InvariantKind::kDataIsolation, "h2", "s2");
  EXPECT_TRUE(DecideByExhaustion(ScenarioNet("mini_cache"), inv, {3}).holds);
  const OracleVerdict leak = DecideByExhaustion(ScenarioNet("mini_cache_noacl"), inv, {3});
  EXPECT_FALSE(leak.holds);
  EXPECT_EQ(leak.trace.size(), 3u);
}

TEST(DecideByExhaustionTest, TraversalSilencesTarget) {
  const network::NetworkSpec net = ScenarioNet("traversal");
  Invariant via_c{InvariantKind::kNodeTraversal, "e4", "e1", "c", {}};
  Invariant via_d{InvariantKind::kNodeTraversal, "e1", "e4", "c", {}};
  EXPECT_TRUE(DecideByExhaustion(net, via_c, {TraceBound{1, {1}, {"x"}}}).holds);
  EXPECT_FALSE(DecideByExhaustion(net, via_d, {TraceBound{1, {1}, {"x"}}}).holds);
}

TEST(DecideByExhaustionTest, BoundGuards) {
  const network::NetworkSpec net = ScenarioNet("enterprise");
  const Invariant inv = Inv(InvariantKind::kNodeIsolation, "q1", "ext");
  for (int bound : {0, 5}) {
    try {
      DecideByExhaustion(net, inv, {bound});
      ADD_FAILURE() << bound;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBoundTooLarge);
    }
  }
}

TEST(DecideByExhaustionTest, InjectionUniverseIsHonest) {
  const network::NetworkSpec net = ScenarioNet("mini_enterprise");
  const std::vector<Injection> u = InjectionUniverse(net, {});
  // hosts x other addresses x ports^2 x bodies
  const size_t hosts = net.HostNames().size();
  EXPECT_EQ(u.size(), hosts * (hosts - 1) * 4);
  for (const Injection& i : u) EXPECT_NO_THROW(CheckHonest(net, i));
}

TEST(ReplaysTest, ReordersInjections) {
  const network::NetworkSpec net = ScenarioNet("hole_punch");
  const Invariant reach = Inv(InvariantKind::kNodeReachability, "b", "a");
  const Injection reply = Inject(net, "b", "a", 2, 1), open = Inject(net, "a", "b", 1, 2);
  EXPECT_TRUE(Replays(net, reach, {reply, open}));
  EXPECT_FALSE(Replays(net, reach, {reply}));
}

using FlowId = std::set<std::pair<std::string, std::int64_t>>;

FlowId FlowOf(const dsl::Packet& p) { return {{p.src, p.src_port}, {p.dst, p.dst_port}}; }

// Boxes classified flow-parallel treat each flow the same whether or not
// other flows' packets are interleaved with it.
TEST(FlowParallelTest, OtherFlowsDoNotAffectAFlow) {
  std::mt19937 rng(5);
  for (const char* name : {"mini_enterprise", "hole_punch", "one_way_acl"}) {
    const network::NetworkSpec net = ScenarioNet(name);
    for (const auto& [box, c] : rono::ClassifyNetwork(net)) {
      ASSERT_EQ(c.flow_parallel, dsl::Tri::kYes) << name << " " << box;
    }
    const std::vector<std::string> hosts = net.HostNames();
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<Injection> trace;
      for (int i = 0; i < 3; ++i) {
        const std::string a = hosts[rng() % hosts.size()];
        std::string b = a;
        while (b == a) b = hosts[rng() % hosts.size()];
        trace.push_back(Inject(net, a, b, 1 + rng() % 2, 1 + rng() % 2));
      }
      const DeliveryLog full = Simulate(net, trace);
      for (const Injection& pick : trace) {
        const FlowId f = FlowOf(pick.packet);
        std::vector<Injection> alone;
        for (const Injection& i : trace) {
          if (FlowOf(i.packet) == f) alone.push_back(i);
        }
        auto deliveries = [&](const DeliveryLog& log) {
          std::vector<std::pair<std::string, dsl::Packet>> out;
          for (const LogEvent& e : log) {
            if (!e.send && net.IsKind(e.to, network::NodeKind::kHost) && FlowOf(e.packet) == f) {
              out.push_back({e.to, e.packet});
            }
          }
          return out;
        };
        ASSERT_EQ(deliveries(full), deliveries(Simulate(net, alone))) << name << " " << iter;
      }
    }
  }
}

}  // namespace
}  // namespace mbv::oracle
