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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mbv/dsl/classify.h"
#include "mbv/dsl/interp.h"
#include "test_util.h"

namespace mbv::dsl {
namespace {

using ::mbv::testing::LoadModel;

Packet Pkt(const std::string& s, const std::string& d, int sp, int dp,
           const std::string& body = "x", const std::string& origin = "") {
  Packet p;
  p.src = s;
  p.dst = d;
  p.src_port = sp;
  p.dst_port = dp;
  p.body = body;
  p.origin = origin;
  return p;
}

std::vector<Value> Key(std::initializer_list<Value> v) { return v; }
Value S(const char* s) { return Value(std::string(s)); }

InstanceConfig AclAllowing(const char* src, const char* dst) {
  InstanceConfig cfg;
  cfg.tables["acl"].entries[Key({S(src), S(dst)})] = Value(true);
  return cfg;
}

TEST(ExecuteTest, DpiHasTwoAlternatives) {
  MiddleboxModel m = LoadModel("dpi");
  auto alts = Execute(m, {}, "f", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(alts.size(), 2u);
  EXPECT_EQ(alts[0].outputs.size(), 1u);
  EXPECT_TRUE(alts[1].outputs.empty());
  // The chosen classification is remembered for later packets.
  EXPECT_EQ(alts[0].next.uf_memo.at("dpi").at(Key({S("x")})), Value(true));
  auto again = Execute(m, {}, "f", alts[1].next, Pkt("a", "b", 1, 2));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_TRUE(again[0].outputs.empty());
}

TEST(ExecuteTest, LearningFirewallPunchesHole) {
  MiddleboxModel m = LoadModel("learning_firewall");
  InstanceConfig cfg = AclAllowing("a", "b");
  auto out = Execute(m, cfg, "f", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].outputs.size(), 1u);
  EXPECT_EQ(out[0].outputs[0], Pkt("a", "b", 1, 2));
  EXPECT_EQ(out[0].next.maps.at("flows").size(), 1u);
  auto reply = Execute(m, cfg, "f", out[0].next, Pkt("b", "a", 2, 1));
  EXPECT_EQ(reply[0].outputs.size(), 1u);
  auto stray = Execute(m, cfg, "f", out[0].next, Pkt("b", "a", 2, 9));
  EXPECT_TRUE(stray[0].outputs.empty());
}

TEST(ExecuteTest, DeniedWithoutFlowDrops) {
  auto out = Execute(LoadModel("learning_firewall"), {}, "f", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].outputs.empty());
  EXPECT_TRUE(out[0].next.maps.empty());
}

TEST(ExecuteTest, CacheAnswersFromStore) {
  MiddleboxModel m = LoadModel("content_cache");
  InstanceConfig cfg;
  cfg.tables["servers"].entries[Key({S("s")})] = Value(true);
  auto stored = Execute(m, cfg, "c", {}, Pkt("s", "h", 80, 5, "page", "srv"));
  ASSERT_EQ(stored[0].outputs.size(), 1u);
  auto hit = Execute(m, cfg, "c", stored[0].next, Pkt("g", "s", 7, 80, "page", "g"));
  ASSERT_EQ(hit[0].outputs.size(), 1u);
  EXPECT_EQ(hit[0].outputs[0], Pkt("s", "g", 80, 7, "page", "srv"));
  cfg.tables["deny"].entries[Key({S("g"), S("srv")})] = Value(true);
  auto denied = Execute(m, cfg, "c", stored[0].next, Pkt("g", "s", 7, 80, "page", "g"));
  EXPECT_EQ(denied[0].outputs[0], Pkt("g", "s", 7, 80, "page", "g"));
}

TEST(ExecuteTest, ConstantSourceSetsOriginToItself) {
  InstanceConfig cfg;
  cfg.tables["out_src"].default_value = S("c1");
  cfg.tables["out_dst"].default_value = S("c2");
  cfg.tables["out_src_port"].default_value = Value(std::int64_t{4});
  cfg.tables["out_dst_port"].default_value = Value(std::int64_t{5});
  auto out = Execute(LoadModel("constant_source"), cfg, "m", {}, Pkt("a", "b", 1, 2));
  ASSERT_EQ(out[0].outputs.size(), 1u);
  EXPECT_EQ(out[0].outputs[0], Pkt("c1", "c2", 4, 5, kNilBody, "m"));
}

TEST(ExecuteTest, AlternativesBoundedByCodomainProduct) {
  MiddleboxModel m = ParseModel(
      "model m { func f: (Body) -> {1, 2, 3}; func g: (Port) -> {true, false};"
      " recv p; if f(p.body) == 2 and g(p.src_port) { send p; }"
      " elif g(p.dst_port) { send p; } }");
  auto out = Execute(m, {}, "m", {}, Pkt("a", "b", 1, 2));
  EXPECT_LE(out.size(), 3u * 2u * 2u);
  // f=2: g(1) true -> 1 run; g(1) false -> g(2) both. f in {1,3}: g(2) both.
  EXPECT_EQ(out.size(), 3u + 2u + 2u);
}

// Behaviour toward one flow must not change when packets of another flow are
// interleaved, for every model the classifier calls flow-parallel.
struct FpCase {
  const char* model;
  FlowKeySpec key;
  InstanceConfig cfg;
  std::vector<Packet> flow1;
  std::vector<Packet> flow2;
};

// Deterministic valuation for uninterpreted functions.
size_t Valuation(const std::string& f, const std::vector<Value>& args, size_t n) {
  std::string k = f;
  for (const Value& v : args) k += "|" + ValueToString(v);
  return std::hash<std::string>{}(k) % n;
}

std::vector<std::vector<Packet>> RunTrace(const MiddleboxModel& m,
                                          const InstanceConfig& cfg,
                                          const std::vector<Packet>& trace) {
  ModelState state;
  std::vector<std::vector<Packet>> out;
  for (const Packet& p : trace) {
    bool found = false;
    for (Execution& e : Execute(m, cfg, "m", state, p)) {
      bool agrees = true;
      for (const auto& [f, table] : e.next.uf_memo) {
        const FuncDecl& decl = *m.FindFunc(f);
        for (const auto& [args, v] : table) {
          agrees = agrees && v == decl.codomain[Valuation(f, args, decl.codomain.size())];
        }
      }
      if (agrees) {
        out.push_back(e.outputs);
        state = e.next;
        found = true;
        break;
      }
    }
    EXPECT_TRUE(found);
  }
  return out;
}

// Calls `f(trace, membership)` for every interleaving of sequences of length
// <= 3 drawn from each flow's packet alphabet.
void ForEachInterleaving(
    const std::vector<Packet>& a1, const std::vector<Packet>& a2,
    const std::function<void(const std::vector<Packet>&, const std::vector<bool>&)>& f) {
  std::vector<std::vector<Packet>> seqs1 = {{}}, seqs2 = {{}};
  auto grow = [](const std::vector<Packet>& alpha, std::vector<std::vector<Packet>>& seqs) {
    std::vector<std::vector<Packet>> frontier = {{}};
    for (int len = 1; len <= 3; ++len) {
      std::vector<std::vector<Packet>> next;
      for (const auto& s : frontier) {
        for (const Packet& p : alpha) {
          auto t = s;
          t.push_back(p);
          next.push_back(t);
        }
      }
      seqs.insert(seqs.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
  };
  grow(a1, seqs1);
  grow(a2, seqs2);
  for (const auto& s1 : seqs1) {
    for (const auto& s2 : seqs2) {
      const size_t n = s1.size() + s2.size();
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<size_t>(__builtin_popcount(mask)) != s1.size()) continue;
        std::vector<Packet> trace;
        std::vector<bool> first;
        size_t i = 0, j = 0;
        for (size_t k = 0; k < n; ++k) {
          const bool one = (mask >> k) & 1u;
          trace.push_back(one ? s1[i++] : s2[j++]);
          first.push_back(one);
        }
        f(trace, first);
      }
    }
  }
}

std::vector<FpCase> FpCases() {
  std::vector<FpCase> out;
  auto fw = AclAllowing("a", "b");
  fw.tables["acl"].entries[Key({S("c"), S("b")})] = Value(true);
  out.push_back({"learning_firewall", FlowKeySpec{}, fw,
                 {Pkt("a", "b", 1, 2), Pkt("b", "a", 2, 1)},
                 {Pkt("c", "b", 3, 2), Pkt("b", "c", 2, 3)}});
  out.push_back({"acl_firewall", FlowKeySpec{}, AclAllowing("a", "b"),
                 {Pkt("a", "b", 1, 2), Pkt("b", "a", 2, 1)},
                 {Pkt("c", "b", 3, 2)}});
  out.push_back({"dpi", FlowKeySpec{}, {},
                 {Pkt("a", "b", 1, 2, "x"), Pkt("a", "b", 1, 2, "y")},
                 {Pkt("c", "b", 3, 2, "x"), Pkt("c", "b", 3, 2, "z")}});
  InstanceConfig perm;
  for (auto [s, d, ns, nd] : {std::tuple{"a", "b", "a2", "b2"}, std::tuple{"c", "b", "c2", "b3"}}) {
    perm.tables["rule"].entries[Key({S(s), S(d)})] = Value(true);
    perm.tables["new_src"].entries[Key({S(s), S(d)})] = S(ns);
    perm.tables["new_dst"].entries[Key({S(s), S(d)})] = S(nd);
  }
  perm.tables["new_src"].default_value = S("a");
  perm.tables["new_dst"].default_value = S("b");
  out.push_back({"permutation", FlowKeySpec{{Field::kSrc, Field::kDst}}, perm,
                 {Pkt("a", "b", 1, 2), Pkt("b", "a", 2, 1)},
                 {Pkt("c", "b", 3, 2), Pkt("b", "c", 4, 1)}});
  out.push_back({"forwarder", FlowKeySpec{}, {}, {Pkt("a", "b", 1, 2)}, {Pkt("c", "b", 3, 2)}});
  return out;
}

TEST(FlowParallelEmpiricalTest, ClassifiedModelsIgnoreOtherFlows) {
  for (const FpCase& c : FpCases()) {
    MiddleboxModel m = LoadModel(c.model);
    ASSERT_EQ(ClassifyModel(m, c.key).flow_parallel, Tri::kYes) << c.model;
    int checked = 0;
    ForEachInterleaving(c.flow1, c.flow2, [&](const auto& trace, const auto& first) {
      std::vector<Packet> only;
      for (size_t i = 0; i < trace.size(); ++i) {
        if (first[i]) only.push_back(trace[i]);
      }
      auto full = RunTrace(m, c.cfg, trace);
      auto alone = RunTrace(m, c.cfg, only);
      size_t k = 0;
      for (size_t i = 0; i < trace.size(); ++i) {
        if (!first[i]) continue;
        ASSERT_EQ(full[i], alone[k]) << c.model << " packet " << i;
        ++k;
      }
      ++checked;
    });
    EXPECT_GT(checked, 50) << c.model;
  }
}

// The check has teeth: models outside the sufficient condition do leak.
TEST(FlowParallelEmpiricalTest, SharedStateModelsDependOnOtherFlows) {
  MiddleboxModel m = LoadModel("permutation_shared");
  InstanceConfig cfg;
  cfg.tables["rule"].entries[Key({S("a"), S("b")})] = Value(true);
  cfg.tables["rule"].entries[Key({S("c"), S("b")})] = Value(true);
  cfg.tables["new_src"].default_value = S("a2");
  cfg.tables["new_dst"].default_value = S("b2");
  auto full = RunTrace(m, cfg, {Pkt("c", "b", 3, 2), Pkt("a", "b", 1, 2)});
  auto alone = RunTrace(m, cfg, {Pkt("a", "b", 1, 2)});
  EXPECT_NE(full[1], alone[0]);
}

}  // namespace
}  // namespace mbv::dsl
