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

#ifndef MBV_ENCODER_ENCODE_H_
#define MBV_ENCODER_ENCODE_H_

#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mbv/dsl/actions.h"
#include "mbv/dsl/ast.h"
#include "mbv/dsl/printer.h"
#include "mbv/error.h"
#include "mbv/logic/formula.h"
#include "mbv/logic/program.h"

namespace mbv::encoder {

using logic::Assertion;
using logic::FormulaPtr;
using logic::TermPtr;
using logic::VarDecl;
namespace L = ::mbv::logic;

namespace encode_internal {

// Translation context for one action site.
struct Ctx {
  const dsl::MiddleboxModel* model = nullptr;
  std::string inst;
  TermPtr pkt;   // the received packet
  TermPtr time;  // snapshot time at which state is read
  std::map<std::string, TermPtr> bound;  // printed value-map read -> witness
  int* fresh = nullptr;
};

inline std::string ReadKey(const dsl::Expr& e) { return dsl::PrintExpr(e); }

inline TermPtr ToTerm(const dsl::Expr& e, const Ctx& c);
inline FormulaPtr ToFormula(const dsl::Expr& e, const Ctx& c);

inline std::vector<TermPtr> Terms(const std::vector<dsl::ExprPtr>& es, const Ctx& c) {
  std::vector<TermPtr> out;
  for (const dsl::ExprPtr& a : es) out.push_back(ToTerm(*a, c));
  return out;
}

inline TermPtr ToTerm(const dsl::Expr& e, const Ctx& c) {
  const L::Sort sort = L::ToLogicSort(e.sort);
  switch (e.kind) {
    case dsl::ExprKind::kLiteral:
      switch (e.sort) {
        case dsl::Sort::kPort: return L::IntLit(std::get<std::int64_t>(e.literal));
        case dsl::Sort::kAddress: return L::AddrConst(std::get<std::string>(e.literal));
        case dsl::Sort::kNode: return L::NodeConst(std::get<std::string>(e.literal));
        case dsl::Sort::kBody: return L::BodyConst(std::get<std::string>(e.literal));
        default: break;
      }
      break;
    case dsl::ExprKind::kPacketVar: return c.pkt;
    case dsl::ExprKind::kField: return L::FieldOf(e.field, c.pkt);
    case dsl::ExprKind::kConfigRead:
      return L::App(L::InstSym(c.inst, e.name), sort, Terms(e.args, c));
    case dsl::ExprKind::kCall:
      return L::App(L::InstSym(c.inst, e.name), sort, Terms(e.args, c));
    case dsl::ExprKind::kStateRead: {
      auto it = c.bound.find(ReadKey(e));
      if (it == c.bound.end()) {
        throw Error(ErrorCode::kPreconditionViolated,
                    "value-map read outside its has guard: " + ReadKey(e));
      }
      return it->second;
    }
    default: break;
  }
  throw Error(ErrorCode::kTypeError, "expression has no term form: " + ReadKey(e));
}

inline FormulaPtr Chain(const std::vector<std::pair<dsl::ExprPtr, bool>>& items, size_t i,
                        Ctx c, const std::function<FormulaPtr(const Ctx&)>& tail);

inline FormulaPtr HasFormula(const dsl::Expr& e, const Ctx& c,
                             const std::function<FormulaPtr(const Ctx&)>& tail) {
  dsl::Expr read = e;
  read.kind = dsl::ExprKind::kStateRead;
  const dsl::TableDecl* decl = c.model->FindState(read.name);
  if (!decl) throw Error(ErrorCode::kUnknownIdentifier, "no state map '" + read.name + "'");
  VarDecl v{"v" + std::to_string((*c.fresh)++), L::ToLogicSort(decl->value_sort)};
  std::vector<TermPtr> args = Terms(read.args, c);
  args.push_back(L::Var(v));
  args.push_back(c.time);
  Ctx inner = c;
  inner.bound[ReadKey(read)] = L::Var(v);
  return L::Exists({v}, L::And({L::Pred(L::InstSym(c.inst, read.name), args), tail(inner)}));
}

inline FormulaPtr ToFormula(const dsl::Expr& e, const Ctx& c) {
  switch (e.kind) {
    case dsl::ExprKind::kLiteral: return L::BoolConst(std::get<bool>(e.literal));
    case dsl::ExprKind::kConfigRead:
    case dsl::ExprKind::kCall:
      return L::Atom(L::App(L::InstSym(c.inst, e.name), L::Sort::kBool, Terms(e.args, c)));
    case dsl::ExprKind::kStateRead: {
      std::vector<TermPtr> args = Terms(e.args, c);
      args.push_back(c.time);
      return L::Pred(L::InstSym(c.inst, e.name), args);
    }
    case dsl::ExprKind::kHas:
      return HasFormula(e, c, [](const Ctx&) { return L::True(); });
    case dsl::ExprKind::kNot: return L::Not(ToFormula(*e.args[0], c));
    case dsl::ExprKind::kAnd: return Chain({{e.args[0], true}, {e.args[1], true}}, 0, c,
                                           [](const Ctx&) { return L::True(); });
    case dsl::ExprKind::kOr:
      return L::Or({ToFormula(*e.args[0], c), ToFormula(*e.args[1], c)});
    case dsl::ExprKind::kEq:
    case dsl::ExprKind::kNe: {
      FormulaPtr eq;
      if (e.args[0]->sort == dsl::Sort::kBool) {
        eq = L::Iff(ToFormula(*e.args[0], c), ToFormula(*e.args[1], c));
      } else {
        eq = L::Eq(ToTerm(*e.args[0], c), ToTerm(*e.args[1], c));
      }
      return e.kind == dsl::ExprKind::kEq ? eq : L::Not(eq);
    }
    case dsl::ExprKind::kLt: return L::Lt(ToTerm(*e.args[0], c), ToTerm(*e.args[1], c));
    case dsl::ExprKind::kGt: return L::Lt(ToTerm(*e.args[1], c), ToTerm(*e.args[0], c));
    case dsl::ExprKind::kLe: return L::Not(L::Lt(ToTerm(*e.args[1], c), ToTerm(*e.args[0], c)));
    case dsl::ExprKind::kGe: return L::Not(L::Lt(ToTerm(*e.args[0], c), ToTerm(*e.args[1], c)));
    default: break;
  }
  throw Error(ErrorCode::kTypeError, "expression is not a formula: " + ReadKey(e));
}

// Conjunction of `items` followed by `tail`. Positive `has` literals bind a
// witness whose scope extends over the rest of the chain.
inline FormulaPtr Chain(const std::vector<std::pair<dsl::ExprPtr, bool>>& items, size_t i,
                        Ctx c, const std::function<FormulaPtr(const Ctx&)>& tail) {
  if (i == items.size()) return tail(c);
  const auto& [expr, positive] = items[i];
  if (positive && expr->kind == dsl::ExprKind::kAnd) {
    std::vector<std::pair<dsl::ExprPtr, bool>> flat(items.begin(), items.begin() + i);
    flat.push_back({expr->args[0], true});
    flat.push_back({expr->args[1], true});
    flat.insert(flat.end(), items.begin() + i + 1, items.end());
    return Chain(flat, i, c, tail);
  }
  if (positive && expr->kind == dsl::ExprKind::kHas) {
    return HasFormula(*expr, c,
                      [&](const Ctx& inner) { return Chain(items, i + 1, inner, tail); });
  }
  FormulaPtr lit = ToFormula(*expr, c);
  if (!positive) lit = L::Not(lit);
  return L::And({lit, Chain(items, i + 1, c, tail)});
}

inline std::vector<std::pair<dsl::ExprPtr, bool>> PathItems(const dsl::ActionSite& s) {
  std::vector<std::pair<dsl::ExprPtr, bool>> out;
  for (const dsl::PathLiteral& l : s.path) out.push_back({l.guard, l.positive});
  return out;
}

// Output packet `out` equals the packet produced by send statement `s`.
inline FormulaPtr SendOutput(const dsl::Stmt& s, const TermPtr& out, const Ctx& c) {
  const dsl::Expr& e = *s.expr;
  if (e.kind == dsl::ExprKind::kPacketVar) return L::Eq(out, c.pkt);
  std::vector<FormulaPtr> parts;
  for (dsl::Field f : dsl::kAllFields) {
    TermPtr value;
    for (const auto& [field, ov] : e.overrides) {
      if (field == f) value = ToTerm(*ov, c);
    }
    if (!value) {
      if (e.base) {
        value = L::FieldOf(f, c.pkt);
      } else if (f == dsl::Field::kOrigin) {
        value = L::NodeConst(c.inst);
      } else if (f == dsl::Field::kBody) {
        value = L::BodyConst(dsl::kNilBodyToken);
      } else {
        throw Error(ErrorCode::kTypeError, "packet construction misses a header field");
      }
    }
    parts.push_back(L::Eq(L::FieldOf(f, out), value));
  }
  return L::And(parts);
}

inline void CollectPolarity(const dsl::Expr& e, bool positive,
                            std::set<std::pair<std::string, bool>>& out) {
  switch (e.kind) {
    case dsl::ExprKind::kStateRead:
      if (e.sort == dsl::Sort::kBool) out.insert({e.name, positive});
      break;
    case dsl::ExprKind::kHas: out.insert({e.name, positive}); break;
    case dsl::ExprKind::kNot: CollectPolarity(*e.args[0], !positive, out); break;
    case dsl::ExprKind::kEq:
    case dsl::ExprKind::kNe:
      if (e.args[0]->sort == dsl::Sort::kBool) {
        for (const auto& a : e.args) {
          CollectPolarity(*a, true, out);
          CollectPolarity(*a, false, out);
        }
        break;
      }
      [[fallthrough]];
    default:
      for (const auto& a : e.args) CollectPolarity(*a, positive, out);
  }
}

}  // namespace encode_internal

// Bool maps read under negative polarity somewhere on an action path.
inline std::set<std::string> NegativelyReadMaps(const dsl::MiddleboxModel& model) {
  std::set<std::pair<std::string, bool>> pol;
  for (const dsl::ActionSite& s : dsl::EnumerateActions(model)) {
    for (const dsl::PathLiteral& l : s.path) {
      encode_internal::CollectPolarity(*l.guard, l.positive, pol);
    }
  }
  std::set<std::string> out;
  for (const auto& [name, positive] : pol) {
    const dsl::TableDecl* d = model.FindState(name);
    if (!positive && d && d->value_sort == dsl::Sort::kBool) out.insert(name);
  }
  return out;
}

// Function symbols an instance of `model` contributes, without definitions.
inline std::vector<L::FunDecl> ModelDeclarations(const dsl::MiddleboxModel& model,
                                                 const std::string& inst) {
  std::vector<L::FunDecl> out;
  for (const dsl::TableDecl& d : model.config) {
    L::FunDecl f{L::InstSym(inst, d.name), {}, L::ToLogicSort(d.value_sort),
                 L::FunRole::kConfig, ""};
    for (dsl::Sort s : d.key_sorts) f.args.push_back(L::ToLogicSort(s));
    out.push_back(f);
  }
  for (const dsl::TableDecl& d : model.state) {
    L::FunDecl f{L::InstSym(inst, d.name), {}, L::Sort::kBool, L::FunRole::kStateRelation, ""};
    for (dsl::Sort s : d.key_sorts) f.args.push_back(L::ToLogicSort(s));
    if (d.value_sort != dsl::Sort::kBool) f.args.push_back(L::ToLogicSort(d.value_sort));
    f.args.push_back(L::Sort::kTime);
    out.push_back(f);
  }
  for (const dsl::FuncDecl& d : model.funcs) {
    L::FunDecl f{L::InstSym(inst, d.name), {}, L::ToLogicSort(d.result_sort),
                 L::FunRole::kUninterpreted, ""};
    for (dsl::Sort s : d.arg_sorts) f.args.push_back(L::ToLogicSort(s));
    out.push_back(f);
  }
  return out;
}

// Assertions for one instance: a send family, one family per state map, a
// persistence converse for negatively read Bool maps, and codomain axioms.
inline std::vector<Assertion> EncodeModel(const dsl::MiddleboxModel& model,
                                          const std::string& inst) {
  using encode_internal::Chain;
  using encode_internal::Ctx;
  using encode_internal::PathItems;
  std::vector<Assertion> out;
  const std::vector<dsl::ActionSite> sites = dsl::EnumerateActions(model);
  const TermPtr self = L::NodeConst(inst);
  int fresh = 0;

  // Send family.
  std::vector<const dsl::ActionSite*> sends;
  bool passthrough = true;
  for (const dsl::ActionSite& s : sites) {
    if (!s.is_send()) continue;
    sends.push_back(&s);
    passthrough = passthrough && s.stmt->expr->kind == dsl::ExprKind::kPacketVar;
  }
  {
    const VarDecl n{"n", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t{"t", L::Sort::kTime};
    const VarDecl n0{"n0", L::Sort::kNode}, t0{"t0", L::Sort::kTime}, q{"q", L::Sort::kPacket};
    Ctx c{&model, inst, passthrough ? L::Var(p) : L::Var(q), L::Var(t0), {}, &fresh};
    std::vector<FormulaPtr> disj;
    for (const dsl::ActionSite* s : sends) {
      const dsl::Stmt* stmt = s->stmt;
      disj.push_back(Chain(PathItems(*s), 0, c, [&](const Ctx& inner) {
        return passthrough ? L::True() : encode_internal::SendOutput(*stmt, L::Var(p), inner);
      }));
    }
    const FormulaPtr sent = L::Pred(L::kSend, {self, L::Var(n), L::Var(p), L::Var(t)});
    if (sends.empty()) {
      // Not an action assertion: it closes the instance's send relation.
      out.push_back({L::Forall({n, p, t}, L::Not(sent)), "model." + inst + ".no_send"});
    }
    std::vector<VarDecl> ex{n0, t0};
    if (!passthrough) ex.push_back(q);
    FormulaPtr body = L::Exists(
        ex, L::And({L::Pred(L::kRecv, {L::Var(n0), self, c.pkt, L::Var(t0)}),
                    L::Lt(L::Var(t0), L::Var(t)), L::Or(disj)}));
    if (!sends.empty()) {
      out.push_back({L::Forall({n, p, t}, L::Implies(sent, body)), "model." + inst + ".send"});
    }
  }

  const std::set<std::string> negative = NegativelyReadMaps(model);
  for (const dsl::TableDecl& decl : model.state) {
    const std::string rel = L::InstSym(inst, decl.name);
    std::vector<const dsl::ActionSite*> sets;
    for (const dsl::ActionSite& s : sites) {
      if (!s.is_send() && s.stmt->name == decl.name) sets.push_back(&s);
    }
    std::vector<VarDecl> keys;
    for (size_t i = 0; i < decl.key_sorts.size(); ++i) {
      keys.push_back({"k" + std::to_string(i), L::ToLogicSort(decl.key_sorts[i])});
    }
    const bool value_map = decl.value_sort != dsl::Sort::kBool;
    const VarDecl val{"v", L::ToLogicSort(decl.value_sort)}, t{"t", L::Sort::kTime};
    const VarDecl n0{"n0", L::Sort::kNode}, q{"q", L::Sort::kPacket}, t0{"t0", L::Sort::kTime};
    Ctx c{&model, inst, L::Var(q), L::Var(t0), {}, &fresh};

    std::vector<TermPtr> head;
    for (const VarDecl& k : keys) head.push_back(L::Var(k));
    if (value_map) head.push_back(L::Var(val));
    head.push_back(L::Var(t));
    std::vector<FormulaPtr> disj;
    for (const dsl::ActionSite* s : sets) {
      const dsl::Stmt* stmt = s->stmt;
      disj.push_back(Chain(PathItems(*s), 0, c, [&](const Ctx& inner) {
        std::vector<FormulaPtr> eqs;
        for (size_t i = 0; i < keys.size(); ++i) {
          eqs.push_back(L::Eq(L::Var(keys[i]), encode_internal::ToTerm(*stmt->keys[i], inner)));
        }
        if (value_map) eqs.push_back(L::Eq(L::Var(val), encode_internal::ToTerm(*stmt->expr, inner)));
        return L::And(eqs);
      }));
    }
    std::vector<VarDecl> univ = keys;
    if (value_map) univ.push_back(val);
    univ.push_back(t);
    FormulaPtr body = L::Exists(
        {n0, q, t0}, L::And({L::Pred(L::kRecv, {L::Var(n0), self, L::Var(q), L::Var(t0)}),
                             L::Lt(L::Var(t0), L::Var(t)), L::Or(disj)}));
    out.push_back({L::Forall(univ, L::Implies(L::Pred(rel, head), body)),
                   "model." + inst + ".state." + decl.name});

    if (value_map || !negative.count(decl.name)) continue;
    // Writes persist: a justified set makes the map true at every later time.
    std::vector<FormulaPtr> conj;
    for (const dsl::ActionSite* s : sets) {
      const dsl::Stmt* stmt = s->stmt;
      conj.push_back(L::Not(Chain(PathItems(*s), 0, c, [&](const Ctx& inner) {
        std::vector<TermPtr> args;
        for (const dsl::ExprPtr& k : stmt->keys) args.push_back(encode_internal::ToTerm(*k, inner));
        args.push_back(L::Var(t));
        return L::Not(L::Pred(rel, args));
      })));
    }
    out.push_back(
        {L::Forall({n0, q, t0, t},
                   L::Implies(L::And({L::Pred(L::kRecv, {L::Var(n0), self, L::Var(q), L::Var(t0)}),
                                      L::Lt(L::Var(t0), L::Var(t))}),
                              L::And(conj))),
         "model." + inst + ".persist." + decl.name});
  }

  for (const dsl::FuncDecl& f : model.funcs) {
    if (f.result_sort == dsl::Sort::kBool) continue;
    std::vector<VarDecl> xs;
    std::vector<TermPtr> args;
    for (size_t i = 0; i < f.arg_sorts.size(); ++i) {
      xs.push_back({"x" + std::to_string(i), L::ToLogicSort(f.arg_sorts[i])});
      args.push_back(L::Var(xs.back()));
    }
    const TermPtr call = L::App(L::InstSym(inst, f.name), L::ToLogicSort(f.result_sort), args);
    std::vector<TermPtr> values;
    for (const dsl::Value& v : f.codomain) {
      switch (f.result_sort) {
        case dsl::Sort::kPort: values.push_back(L::IntLit(std::get<std::int64_t>(v))); break;
        case dsl::Sort::kAddress: values.push_back(L::AddrConst(std::get<std::string>(v))); break;
        case dsl::Sort::kNode: values.push_back(L::NodeConst(std::get<std::string>(v))); break;
        case dsl::Sort::kBody: values.push_back(L::BodyConst(std::get<std::string>(v))); break;
        default: break;
      }
    }
    out.push_back({L::Forall(xs, L::In(call, values)), "model." + inst + ".codomain." + f.name});
  }
  return out;
}

// The five basic network axioms.
inline std::vector<Assertion> NetworkAxioms() {
  const VarDecl n{"n", L::Sort::kNode}, n1{"n1", L::Sort::kNode}, p{"p", L::Sort::kPacket},
      t{"t", L::Sort::kTime}, t0{"t0", L::Sort::kTime};
  const std::vector<VarDecl> all{n, n1, p, t};
  auto rel = [&](const char* r, const VarDecl& time) {
    return L::Pred(r, {L::Var(n), L::Var(n1), L::Var(p), L::Var(time)});
  };
  const TermPtr zero = L::IntLit(0, L::Sort::kTime);
  return {
      {L::Forall(all, L::Implies(rel(L::kSend, t), L::Not(L::Eq(L::Var(n), L::Var(n1))))),
       "axiom.no_self_send"},
      {L::Forall(all, L::Implies(rel(L::kSend, t),
                                 L::Not(L::Eq(L::FieldOf(dsl::Field::kSrc, L::Var(p)),
                                              L::FieldOf(dsl::Field::kDst, L::Var(p)))))),
       "axiom.no_local_loop"},
      {L::Forall(all, L::Implies(rel(L::kRecv, t),
                                 L::Exists({t0}, L::And({rel(L::kSend, t0),
                                                         L::Lt(L::Var(t0), L::Var(t))})))),
       "axiom.recv_after_send"},
      {L::Forall(all, L::Implies(rel(L::kSend, t), L::Lt(zero, L::Var(t)))), "axiom.send_time"},
      {L::Forall(all, L::Implies(rel(L::kRecv, t), L::Lt(zero, L::Var(t)))), "axiom.recv_time"},
  };
}

// Honest end host: packets it sends carry one of its own addresses as source,
// a foreign destination, and itself as origin.
inline Assertion HostAssertion(const std::string& host, const std::vector<std::string>& own) {
  const VarDecl n{"n", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t{"t", L::Sort::kTime};
  std::vector<TermPtr> addrs;
  for (const std::string& a : own) addrs.push_back(L::AddrConst(a));
  const TermPtr pv = L::Var(p);
  return {L::Forall({n, p, t},
                    L::Implies(L::Pred(L::kSend, {L::NodeConst(host), L::Var(n), pv, L::Var(t)}),
                               L::And({L::In(L::FieldOf(dsl::Field::kSrc, pv), addrs),
                                       L::Not(L::In(L::FieldOf(dsl::Field::kDst, pv), addrs)),
                                       L::Eq(L::FieldOf(dsl::Field::kOrigin, pv),
                                             L::NodeConst(host))}))),
          "host." + host};
}

// A node that neither sends nor receives anything.
inline std::vector<Assertion> SilenceAssertions(const std::string& node,
                                                const std::string& tag = "traversal") {
  const VarDecl n{"n", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t{"t", L::Sort::kTime};
  const TermPtr m = L::NodeConst(node);
  return {{L::Forall({n, p, t}, L::Not(L::Pred(L::kSend, {m, L::Var(n), L::Var(p), L::Var(t)}))),
           tag + ".silent_send." + node},
          {L::Forall({n, p, t}, L::Not(L::Pred(L::kRecv, {L::Var(n), m, L::Var(p), L::Var(t)}))),
           tag + ".silent_recv." + node}};
}

}  // namespace mbv::encoder

#endif  // MBV_ENCODER_ENCODE_H_
