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
#include "json.hpp"
#include "mbv/dsl/interp.h"
#include "mbv/enforcement/enforcement.h"
#include "mbv/error.h"
#include "test_util.h"

namespace mbv::enforcement {
namespace {

using dsl::Packet;
using ::mbv::testing::LoadModel;
using ::mbv::testing::ScenarioNet;

Packet Pkt(const std::string& s, const std::string& d, int sp, int dp,
           const std::string& body = "x") {
  Packet p;
  p.src = s;
  p.dst = d;
  p.src_port = sp;
  p.dst_port = dp;
  p.body = body;
  return p;
}

dsl::InstanceConfig AclAllowing(const char* src, const char* dst) {
  dsl::InstanceConfig cfg;
  cfg.tables["acl"].entries[{dsl::Value(std::string(src)), dsl::Value(std::string(dst))}] =
      dsl::Value(true);
  return cfg;
}

TEST(EnumerateOutputsTest, DpiForwardsOrDrops) {
  const std::vector<Alternative> alts =
      EnumerateOutputs(LoadModel("dpi"), {}, "m", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(alts.size(), 2u);
  size_t forwarding = 0;
  for (const Alternative& a : alts) {
    if (!a.outputs.empty()) {
      ++forwarding;
      EXPECT_EQ(a.outputs, std::vector<Packet>{Pkt("a", "b", 1, 2)});
    }
  }
  EXPECT_EQ(forwarding, 1u);
}

TEST(EnumerateOutputsTest, AllowedPacketOpensFlow) {
  const std::vector<Alternative> alts = EnumerateOutputs(
      LoadModel("learning_firewall"), AclAllowing("a", "b"), "m", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(alts.size(), 1u);
  EXPECT_EQ(alts[0].outputs, std::vector<Packet>{Pkt("a", "b", 1, 2)});
  EXPECT_EQ(alts[0].next.maps.at("flows").size(), 1u);
}

TEST(EnumerateOutputsTest, DeniedPacketWithoutFlowIsDropped) {
  const std::vector<Alternative> alts =
      EnumerateOutputs(LoadModel("learning_firewall"), {}, "m", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(alts.size(), 1u);
  EXPECT_TRUE(alts[0].outputs.empty());
}

TEST(CheckConformanceTest, FirewallTraceConforms) {
  const dsl::MiddleboxModel m = LoadModel("learning_firewall");
  const dsl::InstanceConfig cfg = AclAllowing("a", "b");
  const std::vector<TraceRecord> trace{
      {Pkt("a", "b", 1, 2), {Pkt("a", "b", 1, 2)}},
      {Pkt("b", "a", 2, 1), {Pkt("b", "a", 2, 1)}},
      {Pkt("b", "a", 2, 7), {}},
  };
  const ConformanceReport r = CheckConformance(m, cfg, "m", trace);
  EXPECT_TRUE(r.conforming());
  EXPECT_EQ(r.records, 3u);
}

TEST(CheckConformanceTest, ForwardedDeniedPacketIsADeviation) {
  const dsl::MiddleboxModel m = LoadModel("learning_firewall");
  const dsl::InstanceConfig cfg = AclAllowing("a", "b");
  const std::vector<TraceRecord> trace{
      {Pkt("a", "b", 1, 2), {Pkt("a", "b", 1, 2)}},
      {Pkt("b", "a", 5, 5), {Pkt("b", "a", 5, 5)}},
      {Pkt("b", "a", 2, 1), {Pkt("b", "a", 2, 1)}},
  };
  const ConformanceReport r = CheckConformance(m, cfg, "m", trace);
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_EQ(r.deviations[0].index, 1u);
  EXPECT_EQ(r.deviations[0].allowed, std::vector<std::vector<Packet>>{{}});
  const nlohmann::json j = r.ToJson();
  EXPECT_EQ(j["deviations"][0]["index"], 1);
  EXPECT_EQ(j["deviations"][0]["observed"][0]["src"], "b");
}

TEST(CheckConformanceTest, DpiForwardingEverythingConforms) {
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 20; ++i) {
    const Packet p = Pkt("a", "b", i, 1, "body" + std::to_string(i % 3));
    trace.push_back({p, {p}});
  }
  EXPECT_TRUE(CheckConformance(LoadModel("dpi"), {}, "m", trace).conforming());
}

// A classification, once observed, binds later packets with the same body.
TEST(CheckConformanceTest, CandidateStatesRememberClassification) {
  const Packet p = Pkt("a", "b", 1, 1);
  const Packet q = Pkt("a", "b", 2, 2);
  const ConformanceReport r =
      CheckConformance(LoadModel("dpi"), {}, "m", {{p, {}}, {q, {q}}, {q, {}}});
  ASSERT_EQ(r.deviations.size(), 1u);
  EXPECT_EQ(r.deviations[0].index, 1u);
}

// Traces produced by running the model itself, along randomly chosen
// alternatives, always conform.
TEST(CheckConformanceTest, ModelExecutionsConform) {
  const network::NetworkSpec cache = ScenarioNet("mini_cache");
  struct Case {
    dsl::MiddleboxModel model;
    dsl::InstanceConfig cfg;
    std::vector<std::string> addrs;
  };
  const std::vector<Case> cases{
      {LoadModel("learning_firewall"), AclAllowing("a", "b"), {"a", "b", "c"}},
      {LoadModel("dpi"), {}, {"a", "b"}},
      {cache.models.at("content_cache"), cache.middleboxes.at("cache").config,
       {"10.0.0.1", "10.0.0.2", "192.168.0.2"}},
  };
  std::mt19937 rng(17);
  for (const Case& c : cases) {
    for (int iter = 0; iter < 100; ++iter) {
      dsl::ModelState st;
      std::vector<TraceRecord> trace;
      for (int i = 0; i < 12; ++i) {
        const std::string s = c.addrs[rng() % c.addrs.size()];
        std::string d = s;
        while (d == s) d = c.addrs[rng() % c.addrs.size()];
        Packet p = Pkt(s, d, 1 + rng() % 2, 1 + rng() % 2, rng() % 2 ? "x" : "y");
        p.origin = "h";
        std::vector<Alternative> alts = EnumerateOutputs(c.model, c.cfg, "m", st, p);
        ASSERT_FALSE(alts.empty());
        Alternative& pick = alts[rng() % alts.size()];
        trace.push_back({p, pick.outputs});
        st = pick.next;
      }
      const ConformanceReport r = CheckConformance(c.model, c.cfg, "m", trace);
      ASSERT_TRUE(r.conforming()) << c.model.name << " " << iter << "\n"
                                  << TraceToJsonLines(trace);
    }
  }
}

TEST(TraceTest, RoundTrip) {
  std::vector<TraceRecord> trace{{Pkt("a", "b", 1, 2, "tok"), {Pkt("a", "b", 1, 2, "tok")}},
                                 {Pkt("b", "a", 2, 1), {}}};
  trace[0].in.origin = "h1";
  const std::vector<TraceRecord> back = ParseTrace(TraceToJsonLines(trace) + "\n  \n");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].in, trace[0].in);
  EXPECT_EQ(back[0].out, trace[0].out);
  EXPECT_TRUE(back[1].out.empty());
}

TEST(TraceTest, OptionalFieldsDefault) {
  const std::vector<TraceRecord> t = ParseTrace(
      R"({"in": {"src": "a", "dst": "b", "src_port": 1, "dst_port": 2}, "out": []})");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].in.origin, "");
  EXPECT_EQ(t[0].in.body, dsl::kNilBody);
}

TEST(TraceTest, MalformedLinesAreParseErrors) {
  for (const char* bad : {"{", R"({"in": {}})", R"({"in": {"src": "a"}, "out": []})",
                          R"({"in": {"src": "a", "dst": "b", "src_port": "x", "dst_port": 2},
                              "out": []})",
                          "[1, 2]"}) {
    try {
      ParseTrace(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError) << bad;
    }
  }
}

}  // namespace
}  // namespace mbv::enforcement
