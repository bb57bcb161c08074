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

#ifndef MBV_ENCODER_EPR_H_
#define MBV_ENCODER_EPR_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mbv/error.h"
#include "mbv/logic/formula.h"
#include "mbv/logic/program.h"

namespace mbv::encoder {

namespace epr_internal {

namespace L = ::mbv::logic;
using L::FormulaPtr;
using L::TermPtr;
using L::VarDecl;
using K = L::Formula::Kind;

inline bool IsRelational(const FormulaPtr& f) {
  return f->kind == K::kAtom && f->atom->args.size() == 4 &&
         (f->atom->name == L::kSend || f->atom->name == L::kRecv);
}

inline const char* EventPredicate(const std::string& rel) {
  return rel == L::kSend ? L::kSnd : L::kRcv;
}

inline TermPtr EventField(size_t i, const TermPtr& e) {
  static const char* const kNames[] = {L::kEvSrc, L::kEvDst, L::kEvPkt, L::kEvTime};
  static const L::Sort kSorts[] = {L::Sort::kNode, L::Sort::kNode, L::Sort::kPacket,
                                   L::Sort::kTime};
  return L::App(kNames[i], kSorts[i], {e});
}

// Rewrites relational send/recv atoms into event form.
class EventRewriter {
 public:
  FormulaPtr Rewrite(const FormulaPtr& f) {
    switch (f->kind) {
      case K::kAtom: return IsRelational(f) ? Generic(f) : f;
      case K::kNot: return L::Not(Rewrite(f->kids[0]));
      case K::kAnd:
      case K::kOr: {
        std::vector<FormulaPtr> kids;
        for (const FormulaPtr& k : f->kids) kids.push_back(Rewrite(k));
        return L::Junction(f->kind, kids);
      }
      case K::kImplies: return L::Implies(Rewrite(f->kids[0]), Rewrite(f->kids[1]));
      case K::kForall:
      case K::kExists: return Quantifier(f);
      default: return f;
    }
  }

 private:
  int counter_ = 0;

  VarDecl FreshEvent() { return {"e" + std::to_string(counter_++), L::Sort::kEvent}; }

  // R(a) is equivalent to exists e. snd(e) & fields(e) = a.
  FormulaPtr Generic(const FormulaPtr& atom) {
    const VarDecl e = FreshEvent();
    std::vector<FormulaPtr> parts{L::Pred(EventPredicate(atom->atom->name), {L::Var(e)})};
    for (size_t i = 0; i < 4; ++i) {
      parts.push_back(L::Eq(EventField(i, L::Var(e)), atom->atom->args[i]));
    }
    return L::Exists({e}, L::And(parts));
  }

  static void GuardCandidates(const FormulaPtr& body, bool universal,
                              std::vector<const L::Formula*>& out) {
    auto add_conj = [&](const FormulaPtr& f) {
      if (f->kind == K::kAnd) {
        for (const FormulaPtr& k : f->kids) {
          if (IsRelational(k)) out.push_back(k.get());
        }
      } else if (IsRelational(f)) {
        out.push_back(f.get());
      }
    };
    if (!universal) {
      add_conj(body);
      return;
    }
    if (body->kind == K::kImplies) {
      add_conj(body->kids[0]);
    } else if (body->kind == K::kNot) {
      add_conj(body->kids[0]);
    } else if (body->kind == K::kOr) {
      for (const FormulaPtr& k : body->kids) {
        if (k->kind == K::kNot && IsRelational(k->kids[0])) out.push_back(k->kids[0].get());
      }
    }
  }

  static FormulaPtr Replace(const FormulaPtr& f,
                            const std::map<const L::Formula*, FormulaPtr>& repl) {
    auto it = repl.find(f.get());
    if (it != repl.end()) return it->second;
    switch (f->kind) {
      case K::kNot: return L::Not(Replace(f->kids[0], repl));
      case K::kAnd:
      case K::kOr: {
        std::vector<FormulaPtr> kids;
        for (const FormulaPtr& k : f->kids) kids.push_back(Replace(k, repl));
        return L::Junction(f->kind, kids);
      }
      case K::kImplies: return L::Implies(Replace(f->kids[0], repl), Replace(f->kids[1], repl));
      default: return f;
    }
  }

  FormulaPtr Quantifier(const FormulaPtr& f) {
    const FormulaPtr& body = f->kids[0];
    std::vector<const L::Formula*> guards;
    GuardCandidates(body, f->kind == K::kForall, guards);
    std::set<std::string> bound;
    for (const VarDecl& v : f->vars) bound.insert(v.name);

    L::Substitution map;
    std::map<const L::Formula*, FormulaPtr> repl;
    std::vector<VarDecl> events;
    for (const L::Formula* g : guards) {
      const auto& args = g->atom->args;
      bool eliminates = false;
      for (const TermPtr& a : args) {
        eliminates = eliminates || (a->kind == L::Term::Kind::kVar && bound.count(a->name) &&
                                    !map.count(a->name));
      }
      if (!eliminates) continue;
      const VarDecl e = FreshEvent();
      events.push_back(e);
      std::vector<FormulaPtr> parts{L::Pred(EventPredicate(g->atom->name), {L::Var(e)})};
      for (size_t i = 0; i < 4; ++i) {
        const TermPtr& a = args[i];
        if (a->kind == L::Term::Kind::kVar && bound.count(a->name) && !map.count(a->name)) {
          map[a->name] = EventField(i, L::Var(e));
        } else {
          parts.push_back(L::Eq(EventField(i, L::Var(e)), a));
        }
      }
      repl[g] = L::And(parts);
    }
    std::vector<VarDecl> vars;
    for (const VarDecl& v : f->vars) {
      if (!map.count(v.name)) vars.push_back(v);
    }
    vars.insert(vars.end(), events.begin(), events.end());
    FormulaPtr rewritten = L::Subst(Replace(body, repl), map);
    return L::Quant(f->kind, vars, Rewrite(rewritten));
  }
};

class Skolemizer {
 public:
  explicit Skolemizer(std::string tag) : tag_(L::SanitizeTag(tag)) {}

  std::vector<L::FunDecl> decls;
  std::vector<L::Assertion> companions;

  FormulaPtr Go(const FormulaPtr& f, bool pos, const std::vector<VarDecl>& univ,
                const std::vector<FormulaPtr>& guards, bool outer_exists, bool forall_after) {
    switch (f->kind) {
      case K::kNot:
        return L::Not(Go(f->kids[0], !pos, univ, guards, outer_exists, forall_after));
      case K::kAnd:
      case K::kOr: {
        std::vector<FormulaPtr> kids;
        for (const FormulaPtr& k : f->kids) {
          kids.push_back(Go(k, pos, univ, guards, outer_exists, forall_after));
        }
        return L::Junction(f->kind, kids);
      }
      case K::kImplies: {
        FormulaPtr a = Go(f->kids[0], !pos, univ, guards, outer_exists, forall_after);
        std::vector<FormulaPtr> g = guards;
        g.push_back(a);
        return L::Implies(a, Go(f->kids[1], pos, univ, g, outer_exists, forall_after));
      }
      case K::kForall:
      case K::kExists: break;
      default: return f;
    }
    const bool universal = (f->kind == K::kForall) == pos;
    if (universal) {
      std::vector<VarDecl> u = univ;
      u.insert(u.end(), f->vars.begin(), f->vars.end());
      return L::Quant(f->kind, f->vars,
                      Go(f->kids[0], pos, u, guards, outer_exists, forall_after || outer_exists));
    }
    if (forall_after) {
      throw Error(ErrorCode::kNotSkolemizable,
                  "existential under a universal under an existential in " + tag_);
    }
    L::Substitution s;
    std::vector<TermPtr> args;
    for (const VarDecl& u : univ) args.push_back(L::Var(u));
    for (const VarDecl& v : f->vars) {
      L::FunDecl d;
      d.role = L::FunRole::kSkolem;
      d.result = v.sort;
      for (const VarDecl& u : univ) d.args.push_back(u.sort);
      const bool cause = v.sort == L::Sort::kEvent && univ.size() == 1 &&
                         univ[0].sort == L::Sort::kEvent;
      if (univ.empty()) {
        d.name = "sk_" + tag_ + "_" + v.name;
      } else {
        d.name = std::string(cause ? "cause_" : "wit_") + tag_ + "_" + std::to_string(index_++);
      }
      decls.push_back(d);
      const TermPtr term = L::App(d.name, v.sort, args);
      s[v.name] = term;
      if (cause && !guards.empty()) {
        companions.push_back(
            {L::Forall(univ, L::Implies(L::Not(L::And(guards)), L::Eq(term, L::Var(univ[0])))),
             tag_ + ".idempotence"});
      }
    }
    return Go(L::Subst(f->kids[0], s), pos, univ, guards, outer_exists || univ.empty(),
              forall_after);
  }

 private:
  std::string tag_;
  int index_ = 0;
};

inline void CollectApps(const TermPtr& t, std::vector<const L::Term*>& out) {
  if (t->kind == L::Term::Kind::kApp) out.push_back(t.get());
  for (const TermPtr& a : t->args) CollectApps(a, out);
}

// Visits every term, tracking whether the enclosing scope is existential.
inline void Scan(const FormulaPtr& f, bool pos, std::vector<const L::Term*>& apps,
                 int& existential) {
  switch (f->kind) {
    case K::kAtom: CollectApps(f->atom, apps); break;
    case K::kEq:
    case K::kLt:
      CollectApps(f->lhs, apps);
      CollectApps(f->rhs, apps);
      break;
    case K::kNot: Scan(f->kids[0], !pos, apps, existential); break;
    case K::kAnd:
    case K::kOr:
      for (const FormulaPtr& k : f->kids) Scan(k, pos, apps, existential);
      break;
    case K::kImplies:
      Scan(f->kids[0], !pos, apps, existential);
      Scan(f->kids[1], pos, apps, existential);
      break;
    case K::kForall:
    case K::kExists:
      if ((f->kind == K::kExists) == pos) ++existential;
      Scan(f->kids[0], pos, apps, existential);
      break;
    default: break;
  }
}

inline bool IsVarTerm(const TermPtr& t, const std::string& name) {
  return t->kind == L::Term::Kind::kVar && t->name == name;
}

inline bool IsCompanion(const FormulaPtr& f, const std::string& fn) {
  if (f->kind != K::kForall || f->vars.size() != 1 || f->vars[0].sort != L::Sort::kEvent) {
    return false;
  }
  const FormulaPtr& b = f->kids[0];
  if (b->kind != K::kImplies) return false;
  const FormulaPtr& eq = b->kids[1];
  const std::string& x = f->vars[0].name;
  return eq->kind == K::kEq && eq->lhs->kind == L::Term::Kind::kApp && eq->lhs->name == fn &&
         eq->lhs->args.size() == 1 && IsVarTerm(eq->lhs->args[0], x) && IsVarTerm(eq->rhs, x);
}

inline bool HasTimeDecrease(const FormulaPtr& f, const std::string& fn) {
  if (f->kind == K::kLt) {
    const TermPtr& l = f->lhs;
    const TermPtr& r = f->rhs;
    return l->kind == L::Term::Kind::kApp && l->name == L::kEvTime && r->kind == L::Term::Kind::kApp &&
           r->name == L::kEvTime && l->args[0]->kind == L::Term::Kind::kApp &&
           l->args[0]->name == fn && l->args[0]->args.size() == 1 &&
           l->args[0]->args[0]->kind == L::Term::Kind::kVar &&
           IsVarTerm(r->args[0], l->args[0]->args[0]->name);
  }
  for (const FormulaPtr& k : f->kids) {
    if (HasTimeDecrease(k, fn)) return true;
  }
  return false;
}

}  // namespace epr_internal

// Event reformulation followed by Skolemization of one assertion. Skolem
// declarations and idempotence companions are appended to the outputs.
inline std::vector<logic::Assertion> ToEprF(const logic::Assertion& a,
                                            std::vector<logic::FunDecl>& skolems) {
  epr_internal::EventRewriter rw;
  logic::FormulaPtr ev = rw.Rewrite(a.formula);
  epr_internal::Skolemizer sk(a.provenance);
  logic::FormulaPtr out = sk.Go(ev, true, {}, {}, false, false);
  skolems.insert(skolems.end(), sk.decls.begin(), sk.decls.end());
  std::vector<logic::Assertion> result{{out, a.provenance}};
  result.insert(result.end(), sk.companions.begin(), sk.companions.end());
  return result;
}

// Rewrites every assertion of `p` into EPR-F form and swaps the relational
// declarations for event projectors.
inline void ToEprF(logic::LogicProgram& p) {
  namespace L = ::mbv::logic;
  std::vector<L::Assertion> out;
  std::vector<L::FunDecl> skolems;
  for (const L::Assertion& a : p.assertions) {
    std::vector<L::Assertion> r = ToEprF(a, skolems);
    out.insert(out.end(), r.begin(), r.end());
  }
  const L::VarDecl e{"e", L::Sort::kEvent};
  out.push_back({L::Forall({e}, L::Not(L::And({L::Pred(L::kSnd, {L::Var(e)}),
                                              L::Pred(L::kRcv, {L::Var(e)})}))),
                 "event.exclusive"});
  p.assertions = std::move(out);
  std::vector<L::FunDecl> fns;
  for (const L::FunDecl& f : p.functions) {
    if (f.role != L::FunRole::kRelation) fns.push_back(f);
  }
  p.functions = std::move(fns);
  L::DeclareEvents(p);
  for (const L::FunDecl& f : skolems) p.Declare(f);
}

struct EprReport {
  size_t assertions = 0;
  size_t compliant = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Structural scan: no existential left, only projectors and Skolem functions
// take Event arguments, and every Event-to-Event Skolem is idempotent outside
// its trigger and strictly decreases time inside it.
inline EprReport CheckEprF(const logic::LogicProgram& p) {
  namespace L = ::mbv::logic;
  using namespace epr_internal;
  EprReport r;
  std::set<std::string> cause_fns;
  for (const L::FunDecl& f : p.functions) {
    if (f.role == L::FunRole::kSkolem && f.result == L::Sort::kEvent) {
      bool event_domain = false;
      for (L::Sort s : f.args) event_domain = event_domain || s == L::Sort::kEvent;
      if (!event_domain) continue;
      if (f.args.size() != 1) {
        r.problems.push_back(f.name + ": Event-valued function is not unary");
      } else {
        cause_fns.insert(f.name);
      }
    }
  }
  for (const L::Assertion& a : p.assertions) {
    ++r.assertions;
    const size_t before = r.problems.size();
    std::vector<const L::Term*> apps;
    int existential = 0;
    Scan(a.formula, true, apps, existential);
    if (existential) r.problems.push_back(a.provenance + ": existential quantifier remains");
    for (const L::Term* t : apps) {
      bool event_arg = false;
      for (const TermPtr& x : t->args) event_arg = event_arg || x->sort == L::Sort::kEvent;
      if (!event_arg) continue;
      const L::FunDecl* d = p.Find(t->name);
      if (!d || (d->role != L::FunRole::kProjector && d->role != L::FunRole::kSkolem)) {
        r.problems.push_back(a.provenance + ": " + t->name + " applied to an event");
      }
    }
    if (r.problems.size() == before) ++r.compliant;
  }
  for (const std::string& fn : cause_fns) {
    bool companion = false;
    bool decreasing = false;
    for (const L::Assertion& a : p.assertions) {
      companion = companion || IsCompanion(a.formula, fn);
      decreasing = decreasing || HasTimeDecrease(a.formula, fn);
    }
    if (!companion) r.problems.push_back(fn + ": no idempotence companion");
    if (!decreasing) r.problems.push_back(fn + ": time does not decrease along " + fn);
  }
  return r;
}

}  // namespace mbv::encoder

#endif  // MBV_ENCODER_EPR_H_
