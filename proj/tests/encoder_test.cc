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
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mbv/dsl/actions.h"
#include "mbv/dsl/parser.h"
#include "mbv/encoder/encode.h"
#include "mbv/encoder/epr.h"
#include "mbv/error.h"
#include "test_util.h"

namespace mbv::encoder {
namespace {

namespace L = ::mbv::logic;
using ::mbv::testing::LoadModel;
using K = L::Formula::Kind;

const char* const kModels[] = {"acl_firewall", "constant_source", "content_cache",
                               "dpi",          "forwarder",       "learning_firewall",
                               "permutation",  "permutation_shared"};

std::vector<std::string> Texts(const std::vector<L::Assertion>& as) {
  std::vector<std::string> out;
  for (const L::Assertion& a : as) out.push_back(a.provenance + ": " + L::ToText(a.formula));
  return out;
}

const L::Assertion* Find(const std::vector<L::Assertion>& as, const std::string& tag) {
  for (const L::Assertion& a : as) {
    if (a.provenance == tag) return &a;
  }
  return nullptr;
}

// Program holding one instance plus the network axioms, in EPR-F form.
L::LogicProgram EprProgram(const dsl::MiddleboxModel& m, const std::string& inst) {
  L::LogicProgram p;
  L::DeclareCore(p);
  for (const L::FunDecl& f : ModelDeclarations(m, inst)) p.Declare(f);
  p.assertions = EncodeModel(m, inst);
  for (const L::Assertion& a : NetworkAxioms()) p.assertions.push_back(a);
  ToEprF(p);
  return p;
}

TEST(EncodeModelTest, LearningFirewallGolden) {
  const std::vector<std::string> got = Texts(EncodeModel(LoadModel("learning_firewall"), "f"));
  const std::vector<std::string> want = {
      "model.f.send: forall n:Node, p:Packet, t:Time. send(n.f, n, p, t) -> (exists n0:Node, "
      "t0:Time. recv(n0, n.f, p, t0) & t0 < t & (m.f.acl(p_src(p), p_dst(p)) | "
      "(!m.f.acl(p_src(p), p_dst(p)) & m.f.flows(p_dst(p), p_src(p), p_dport(p), p_sport(p), "
      "t0))))",
      "model.f.state.flows: forall k0:Address, k1:Address, k2:Port, k3:Port, t:Time. "
      "m.f.flows(k0, k1, k2, k3, t) -> (exists n0:Node, q:Packet, t0:Time. recv(n0, n.f, q, t0) "
      "& t0 < t & m.f.acl(p_src(q), p_dst(q)) & k0 = p_src(q) & k1 = p_dst(q) & k2 = p_sport(q) "
      "& k3 = p_dport(q))",
  };
  EXPECT_EQ(got, want);
}

TEST(EncodeModelTest, LearningFirewallEprFGolden) {
  std::vector<L::FunDecl> skolems;
  const std::vector<L::Assertion> enc = EncodeModel(LoadModel("learning_firewall"), "f");
  const L::Assertion* send = Find(enc, "model.f.send");
  ASSERT_NE(send, nullptr);
  const std::vector<std::string> got = Texts(ToEprF(*send, skolems));
  const std::vector<std::string> want = {
      "model.f.send: forall e0:Event. (snd(e0) & ev_src(e0) = n.f) -> "
      "(rcv(cause_model_f_send_0(e0)) & ev_dst(cause_model_f_send_0(e0)) = n.f & "
      "ev_pkt(cause_model_f_send_0(e0)) = ev_pkt(e0) & ev_time(cause_model_f_send_0(e0)) < "
      "ev_time(e0) & (m.f.acl(p_src(ev_pkt(e0)), p_dst(ev_pkt(e0))) | "
      "(!m.f.acl(p_src(ev_pkt(e0)), p_dst(ev_pkt(e0))) & m.f.flows(p_dst(ev_pkt(e0)), "
      "p_src(ev_pkt(e0)), p_dport(ev_pkt(e0)), p_sport(ev_pkt(e0)), "
      "ev_time(cause_model_f_send_0(e0))))))",
      "model_f_send.idempotence: forall e0:Event. !(snd(e0) & ev_src(e0) = n.f) -> "
      "cause_model_f_send_0(e0) = e0",
  };
  EXPECT_EQ(got, want);
  ASSERT_EQ(skolems.size(), 1u);
  EXPECT_EQ(skolems[0].name, "cause_model_f_send_0");
  EXPECT_EQ(skolems[0].args, std::vector<L::Sort>{L::Sort::kEvent});
  EXPECT_EQ(skolems[0].result, L::Sort::kEvent);
}

TEST(EncodeModelTest, HolePunchBranchNegatesTheAcl) {
  const std::vector<L::Assertion> enc = EncodeModel(LoadModel("learning_firewall"), "f");
  const L::Assertion* send = Find(enc, "model.f.send");
  ASSERT_NE(send, nullptr);
  const std::string text = L::ToText(send->formula);
  EXPECT_NE(text.find("!m.f.acl(p_src(p), p_dst(p)) & m.f.flows("), std::string::npos);
}

TEST(EncodeModelTest, ModelWithoutActionsCannotSend) {
  dsl::MiddleboxModel sink = dsl::ParseModel("model sink { recv p; }");
  const std::vector<L::Assertion> enc = EncodeModel(sink, "s");
  EXPECT_EQ(Find(enc, "model.s.send"), nullptr);
  ASSERT_EQ(enc.size(), 1u);
  EXPECT_EQ(Texts(enc)[0], "model.s.no_send: forall n:Node, p:Packet, t:Time. !send(n.s, n, p, t)");
}

TEST(EncodeModelTest, DpiConsultsTheBody) {
  const std::vector<std::string> got = Texts(EncodeModel(LoadModel("dpi"), "f"));
  ASSERT_FALSE(got.empty());
  EXPECT_EQ(got[0],
            "model.f.send: forall n:Node, p:Packet, t:Time. send(n.f, n, p, t) -> (exists "
            "n0:Node, t0:Time. recv(n0, n.f, p, t0) & t0 < t & m.f.dpi(p_body(p)))");
}

TEST(EncodeModelTest, AclFirewallEprFPair) {
  std::vector<L::FunDecl> skolems;
  const std::vector<L::Assertion> enc = EncodeModel(LoadModel("acl_firewall"), "f");
  const L::Assertion* send = Find(enc, "model.f.send");
  ASSERT_NE(send, nullptr);
  const std::vector<L::Assertion> pair = ToEprF(*send, skolems);
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_EQ(pair[1].provenance, "model_f_send.idempotence");
  EXPECT_EQ(L::ToText(pair[1].formula),
            "forall e0:Event. !(snd(e0) & ev_src(e0) = n.f) -> cause_model_f_send_0(e0) = e0");
}

// One send family with a disjunct per send site, one family per state map
// with a disjunct per set site (step counts exclude trivially true paths).
size_t Disjuncts(const L::FormulaPtr& family) {
  L::FormulaPtr f = family;
  while (f->kind == K::kForall || f->kind == K::kExists) f = f->kids[0];
  if (f->kind == K::kImplies) f = f->kids[1];
  while (f->kind == K::kExists) f = f->kids[0];
  if (f->kind != K::kAnd) return 1;
  const L::FormulaPtr last = f->kids.back();
  if (last->kind == K::kOr) return last->kids.size();
  return 1;
}

TEST(EncodeModelTest, ActionCompleteness) {
  for (const char* name : kModels) {
    SCOPED_TRACE(name);
    const dsl::MiddleboxModel m = LoadModel(name);
    const std::vector<L::Assertion> enc = EncodeModel(m, "x");
    size_t sends = 0;
    std::map<std::string, size_t> sets;
    for (const dsl::ActionSite& s : dsl::EnumerateActions(m)) {
      if (s.is_send()) {
        ++sends;
      } else {
        ++sets[s.stmt->name];
      }
    }
    const L::Assertion* send = Find(enc, "model.x.send");
    ASSERT_EQ(send != nullptr, sends > 0);
    size_t families = send ? 1 : 0;
    if (send && sends > 1) EXPECT_EQ(Disjuncts(send->formula), sends);
    for (const auto& [map, count] : sets) {
      const L::Assertion* fam = Find(enc, "model.x.state." + map);
      ASSERT_NE(fam, nullptr) << map;
      ++families;
      if (count > 1) EXPECT_EQ(Disjuncts(fam->formula), count) << map;
    }
    size_t action_families = 0;
    for (const L::Assertion& a : enc) {
      if (a.provenance == "model.x.send" || a.provenance.rfind("model.x.state.", 0) == 0) {
        ++action_families;
      }
    }
    EXPECT_EQ(action_families, families);
  }
}

TEST(NetworkAxiomsTest, FiveClosedSchemata) {
  const std::vector<L::Assertion> ax = NetworkAxioms();
  ASSERT_EQ(ax.size(), 5u);
  for (size_t i = 0; i < ax.size(); ++i) {
    EXPECT_TRUE(L::FreeVars(ax[i].formula).empty()) << ax[i].provenance;
    EXPECT_EQ(ax[i].formula->kind, K::kForall);
    const bool has_exists =
        L::ToText(ax[i].formula).find("exists") != std::string::npos;
    EXPECT_EQ(has_exists, i == 2) << ax[i].provenance;
  }
  EXPECT_EQ(ax[2].provenance, "axiom.recv_after_send");
}

TEST(ToEprFTest, ReceiveCausality) {
  std::vector<L::FunDecl> skolems;
  const std::vector<std::string> got = Texts(ToEprF(NetworkAxioms()[2], skolems));
  const std::vector<std::string> want = {
      "axiom.recv_after_send: forall e0:Event. rcv(e0) -> "
      "(snd(cause_axiom_recv_after_send_0(e0)) & ev_src(cause_axiom_recv_after_send_0(e0)) = "
      "ev_src(e0) & ev_dst(cause_axiom_recv_after_send_0(e0)) = ev_dst(e0) & "
      "ev_pkt(cause_axiom_recv_after_send_0(e0)) = ev_pkt(e0) & "
      "ev_time(cause_axiom_recv_after_send_0(e0)) < ev_time(e0))",
      "axiom_recv_after_send.idempotence: forall e0:Event. !rcv(e0) -> "
      "cause_axiom_recv_after_send_0(e0) = e0",
  };
  EXPECT_EQ(got, want);
  ASSERT_EQ(skolems.size(), 1u);
}

TEST(ToEprFTest, UniversalAssertionAllocatesNoSkolem) {
  std::vector<L::FunDecl> skolems;
  const std::vector<L::Assertion> out = ToEprF(NetworkAxioms()[0], skolems);
  EXPECT_TRUE(skolems.empty());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(L::ToText(out[0].formula), "forall e0:Event. snd(e0) -> !ev_src(e0) = ev_dst(e0)");
}

TEST(ToEprFTest, AlternationBeyondTheFragmentIsRejected) {
  const L::VarDecl x{"x", L::Sort::kNode}, y{"y", L::Sort::kNode}, z{"z", L::Sort::kNode};
  const L::FormulaPtr f = L::Exists(
      {x}, L::Forall({y}, L::Exists({z}, L::Pred("r", {L::Var(x), L::Var(y), L::Var(z)}))));
  std::vector<L::FunDecl> skolems;
  try {
    ToEprF(L::Assertion{f, "bad"}, skolems);
    FAIL() << "expected NotSkolemizable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotSkolemizable);
  }
}

TEST(CheckEprFTest, EveryModelProgramPasses) {
  for (const char* name : kModels) {
    const L::LogicProgram p = EprProgram(LoadModel(name), "x");
    const EprReport r = CheckEprF(p);
    EXPECT_TRUE(r.ok()) << name << ": " << (r.ok() ? "" : r.problems.front());
    EXPECT_EQ(r.compliant, r.assertions);
    for (const L::FunDecl& f : p.functions) {
      EXPECT_NE(f.role, L::FunRole::kRelation) << f.name;
    }
  }
}

TEST(CheckEprFTest, EveryCauseFunctionHasACompanion) {
  for (const char* name : kModels) {
    const L::LogicProgram p = EprProgram(LoadModel(name), "x");
    for (const L::FunDecl& f : p.functions) {
      if (f.name.rfind("cause_", 0) != 0) continue;
      const std::string tag = f.name.substr(6, f.name.rfind('_') - 6) + ".idempotence";
      bool found = false;
      for (const L::Assertion& a : p.assertions) found = found || a.provenance == tag;
      EXPECT_TRUE(found) << name << " " << f.name;
    }
  }
}

TEST(CheckEprFTest, FlagsRemainingExistential) {
  L::LogicProgram p;
  L::DeclareCore(p);
  L::DeclareEvents(p);
  const L::VarDecl e{"e", L::Sort::kEvent};
  p.assertions.push_back({L::Exists({e}, L::Pred(L::kSnd, {L::Var(e)})), "demo"});
  const EprReport r = CheckEprF(p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.problems[0].find("existential"), std::string::npos);
}

TEST(CheckEprFTest, FlagsUninterpretedFunctionOnEvents) {
  L::LogicProgram p;
  L::DeclareEvents(p);
  const L::VarDecl e{"e", L::Sort::kEvent};
  p.Declare({"g", {L::Sort::kEvent}, L::Sort::kBool, L::FunRole::kUninterpreted, ""});
  p.assertions.push_back({L::Forall({e}, L::Pred("g", {L::Var(e)})), "demo"});
  EXPECT_FALSE(CheckEprF(p).ok());
}

TEST(CheckEprFTest, FlagsCauseWithoutCompanion) {
  L::LogicProgram p;
  L::DeclareCore(p);
  p.assertions = {NetworkAxioms()[2]};
  ToEprF(p);
  ASSERT_TRUE(CheckEprF(p).ok());
  std::vector<L::Assertion> kept;
  for (const L::Assertion& a : p.assertions) {
    if (a.provenance.find("idempotence") == std::string::npos) kept.push_back(a);
  }
  p.assertions = kept;
  const EprReport r = CheckEprF(p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.problems[0].find("no idempotence companion"), std::string::npos);
}

}  // namespace
}  // namespace mbv::encoder
