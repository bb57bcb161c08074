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

#ifndef MBV_LOGIC_FORMULA_H_
#define MBV_LOGIC_FORMULA_H_

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbv/error.h"

namespace mbv::logic {

enum class Sort { kBool, kInt, kPort, kTime, kNode, kAddress, kPacket, kEvent, kBody };

inline std::string_view SortName(Sort s) {
  switch (s) {
    case Sort::kBool: return "Bool";
    case Sort::kInt: return "Int";
    case Sort::kPort: return "Port";
    case Sort::kTime: return "Time";
    case Sort::kNode: return "Node";
    case Sort::kAddress: return "Address";
    case Sort::kPacket: return "Packet";
    case Sort::kEvent: return "Event";
    case Sort::kBody: return "Body";
  }
  return "?";
}

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { kVar, kApp, kInt };
  Kind kind = Kind::kVar;
  std::string name;
  Sort sort = Sort::kBool;
  std::vector<TermPtr> args;
  std::int64_t value = 0;
};

inline TermPtr Var(std::string name, Sort sort) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::kVar;
  t->name = std::move(name);
  t->sort = sort;
  return t;
}

inline TermPtr App(std::string fn, Sort sort, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::kApp;
  t->name = std::move(fn);
  t->sort = sort;
  t->args = std::move(args);
  return t;
}

inline TermPtr IntLit(std::int64_t v, Sort sort = Sort::kPort) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::kInt;
  t->value = v;
  t->sort = sort;
  return t;
}

struct VarDecl {
  std::string name;
  Sort sort = Sort::kBool;
  bool operator==(const VarDecl&) const = default;
};

inline TermPtr Var(const VarDecl& v) { return Var(v.name, v.sort); }

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { kTrue, kFalse, kAtom, kEq, kLt, kNot, kAnd, kOr, kImplies, kForall, kExists };
  Kind kind = Kind::kTrue;
  TermPtr atom;
  TermPtr lhs;
  TermPtr rhs;
  std::vector<FormulaPtr> kids;
  std::vector<VarDecl> vars;
};

inline FormulaPtr Make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

inline FormulaPtr True() {
  Formula f;
  f.kind = Formula::Kind::kTrue;
  return Make(std::move(f));
}

inline FormulaPtr False() {
  Formula f;
  f.kind = Formula::Kind::kFalse;
  return Make(std::move(f));
}
inline FormulaPtr BoolConst(bool b) { return b ? True() : False(); }

inline FormulaPtr Atom(TermPtr t) {
  Formula f;
  f.kind = Formula::Kind::kAtom;
  f.atom = std::move(t);
  return Make(std::move(f));
}

inline FormulaPtr Pred(std::string name, std::vector<TermPtr> args) {
  return Atom(App(std::move(name), Sort::kBool, std::move(args)));
}

inline FormulaPtr Eq(TermPtr a, TermPtr b) {
  Formula f;
  f.kind = Formula::Kind::kEq;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return Make(std::move(f));
}

inline FormulaPtr Lt(TermPtr a, TermPtr b) {
  Formula f;
  f.kind = Formula::Kind::kLt;
  f.lhs = std::move(a);
  f.rhs = std::move(b);
  return Make(std::move(f));
}

inline FormulaPtr Not(FormulaPtr a) {
  if (a->kind == Formula::Kind::kTrue) return False();
  if (a->kind == Formula::Kind::kFalse) return True();
  if (a->kind == Formula::Kind::kNot) return a->kids[0];
  Formula f;
  f.kind = Formula::Kind::kNot;
  f.kids = {std::move(a)};
  return Make(std::move(f));
}

inline FormulaPtr Junction(Formula::Kind kind, const std::vector<FormulaPtr>& parts) {
  const bool is_and = kind == Formula::Kind::kAnd;
  const Formula::Kind unit = is_and ? Formula::Kind::kTrue : Formula::Kind::kFalse;
  const Formula::Kind zero = is_and ? Formula::Kind::kFalse : Formula::Kind::kTrue;
  Formula f;
  f.kind = kind;
  for (const FormulaPtr& p : parts) {
    if (p->kind == unit) continue;
    if (p->kind == zero) return p;
    if (p->kind == kind) {
      f.kids.insert(f.kids.end(), p->kids.begin(), p->kids.end());
    } else {
      f.kids.push_back(p);
    }
  }
  if (f.kids.empty()) return is_and ? True() : False();
  if (f.kids.size() == 1) return f.kids[0];
  return Make(std::move(f));
}

inline FormulaPtr And(const std::vector<FormulaPtr>& parts) {
  return Junction(Formula::Kind::kAnd, parts);
}
inline FormulaPtr Or(const std::vector<FormulaPtr>& parts) {
  return Junction(Formula::Kind::kOr, parts);
}

inline FormulaPtr Implies(FormulaPtr a, FormulaPtr b) {
  if (a->kind == Formula::Kind::kTrue) return b;
  if (a->kind == Formula::Kind::kFalse) return True();
  Formula f;
  f.kind = Formula::Kind::kImplies;
  f.kids = {std::move(a), std::move(b)};
  return Make(std::move(f));
}

inline FormulaPtr Quant(Formula::Kind kind, std::vector<VarDecl> vars, FormulaPtr body) {
  if (vars.empty()) return body;
  if (body->kind == kind) {
    vars.insert(vars.end(), body->vars.begin(), body->vars.end());
    body = body->kids[0];
  }
  Formula f;
  f.kind = kind;
  f.vars = std::move(vars);
  f.kids = {std::move(body)};
  return Make(std::move(f));
}

inline FormulaPtr Forall(std::vector<VarDecl> vars, FormulaPtr body) {
  return Quant(Formula::Kind::kForall, std::move(vars), std::move(body));
}
inline FormulaPtr Exists(std::vector<VarDecl> vars, FormulaPtr body) {
  return Quant(Formula::Kind::kExists, std::move(vars), std::move(body));
}

inline FormulaPtr In(const TermPtr& t, const std::vector<TermPtr>& values) {
  std::vector<FormulaPtr> eqs;
  for (const TermPtr& v : values) eqs.push_back(Eq(t, v));
  return Or(eqs);
}

inline FormulaPtr Iff(const FormulaPtr& a, const FormulaPtr& b) {
  return Or({And({a, b}), And({Not(a), Not(b)})});
}

// ---- Traversal helpers -------------------------------------------------

inline void TermFreeVars(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::kVar) out.insert(t->name);
  for (const TermPtr& a : t->args) TermFreeVars(a, out);
}

inline std::set<std::string> FreeVars(const FormulaPtr& f) {
  std::set<std::string> out;
  switch (f->kind) {
    case Formula::Kind::kTrue:
    case Formula::Kind::kFalse: break;
    case Formula::Kind::kAtom: TermFreeVars(f->atom, out); break;
    case Formula::Kind::kEq:
    case Formula::Kind::kLt:
      TermFreeVars(f->lhs, out);
      TermFreeVars(f->rhs, out);
      break;
    case Formula::Kind::kForall:
    case Formula::Kind::kExists: {
      out = FreeVars(f->kids[0]);
      for (const VarDecl& v : f->vars) out.erase(v.name);
      break;
    }
    default:
      for (const FormulaPtr& k : f->kids) {
        auto s = FreeVars(k);
        out.insert(s.begin(), s.end());
      }
  }
  return out;
}

using Substitution = std::map<std::string, TermPtr>;

inline TermPtr SubstTerm(const TermPtr& t, const Substitution& s) {
  if (t->kind == Term::Kind::kVar) {
    auto it = s.find(t->name);
    return it == s.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  std::vector<TermPtr> args;
  bool changed = false;
  for (const TermPtr& a : t->args) {
    args.push_back(SubstTerm(a, s));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  return App(t->name, t->sort, std::move(args));
}

// Replaces free variables. Bound names in `f` must not occur in the images.
inline FormulaPtr Subst(const FormulaPtr& f, const Substitution& s) {
  if (s.empty()) return f;
  switch (f->kind) {
    case Formula::Kind::kTrue:
    case Formula::Kind::kFalse: return f;
    case Formula::Kind::kAtom: return Atom(SubstTerm(f->atom, s));
    case Formula::Kind::kEq: return Eq(SubstTerm(f->lhs, s), SubstTerm(f->rhs, s));
    case Formula::Kind::kLt: return Lt(SubstTerm(f->lhs, s), SubstTerm(f->rhs, s));
    case Formula::Kind::kNot: return Not(Subst(f->kids[0], s));
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      std::vector<FormulaPtr> kids;
      for (const FormulaPtr& k : f->kids) kids.push_back(Subst(k, s));
      return Junction(f->kind, kids);
    }
    case Formula::Kind::kImplies:
      return Implies(Subst(f->kids[0], s), Subst(f->kids[1], s));
    case Formula::Kind::kForall:
    case Formula::Kind::kExists: {
      Substitution inner = s;
      for (const VarDecl& v : f->vars) inner.erase(v.name);
      std::set<std::string> image_vars;
      for (const auto& [k, t] : inner) TermFreeVars(t, image_vars);
      for (const VarDecl& v : f->vars) {
        if (image_vars.count(v.name)) {
          throw Error(ErrorCode::kPreconditionViolated, "variable capture on " + v.name);
        }
      }
      return Quant(f->kind, f->vars, Subst(f->kids[0], inner));
    }
  }
  return f;
}

// ---- Printing ------------------------------------------------------------

inline std::string ToSmt(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::kVar: return t->name;
    case Term::Kind::kInt:
      return t->value < 0 ? "(- " + std::to_string(-t->value) + ")" : std::to_string(t->value);
    case Term::Kind::kApp: {
      if (t->args.empty()) return t->name;
      std::string out = "(" + t->name;
      for (const TermPtr& a : t->args) out += " " + ToSmt(a);
      return out + ")";
    }
  }
  return "?";
}

inline std::string ToSmt(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::kTrue: return "true";
    case Formula::Kind::kFalse: return "false";
    case Formula::Kind::kAtom: return ToSmt(f->atom);
    case Formula::Kind::kEq: return "(= " + ToSmt(f->lhs) + " " + ToSmt(f->rhs) + ")";
    case Formula::Kind::kLt: return "(< " + ToSmt(f->lhs) + " " + ToSmt(f->rhs) + ")";
    case Formula::Kind::kNot: return "(not " + ToSmt(f->kids[0]) + ")";
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      std::string out = f->kind == Formula::Kind::kAnd ? "(and" : "(or";
      for (const FormulaPtr& k : f->kids) out += " " + ToSmt(k);
      return out + ")";
    }
    case Formula::Kind::kImplies:
      return "(=> " + ToSmt(f->kids[0]) + " " + ToSmt(f->kids[1]) + ")";
    case Formula::Kind::kForall:
    case Formula::Kind::kExists: {
      std::string out = f->kind == Formula::Kind::kForall ? "(forall (" : "(exists (";
      for (size_t i = 0; i < f->vars.size(); ++i) {
        if (i) out += " ";
        out += "(" + f->vars[i].name + " " + std::string(SortName(f->vars[i].sort)) + ")";
      }
      return out + ") " + ToSmt(f->kids[0]) + ")";
    }
  }
  return "?";
}

inline std::string ToText(const TermPtr& t) {
  if (t->kind != Term::Kind::kApp || t->args.empty()) return ToSmt(t);
  std::string out = t->name + "(";
  for (size_t i = 0; i < t->args.size(); ++i) {
    if (i) out += ", ";
    out += ToText(t->args[i]);
  }
  return out + ")";
}

// Infix rendering for listings and golden tests.
inline std::string ToText(const FormulaPtr& f) {
  auto wrap = [](const FormulaPtr& k) {
    const std::string s = ToText(k);
    switch (k->kind) {
      case Formula::Kind::kAnd:
      case Formula::Kind::kOr:
      case Formula::Kind::kImplies:
      case Formula::Kind::kForall:
      case Formula::Kind::kExists: return "(" + s + ")";
      default: return s;
    }
  };
  switch (f->kind) {
    case Formula::Kind::kTrue: return "true";
    case Formula::Kind::kFalse: return "false";
    case Formula::Kind::kAtom: return ToText(f->atom);
    case Formula::Kind::kEq: return ToText(f->lhs) + " = " + ToText(f->rhs);
    case Formula::Kind::kLt: return ToText(f->lhs) + " < " + ToText(f->rhs);
    case Formula::Kind::kNot: return "!" + wrap(f->kids[0]);
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      std::string out;
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += f->kind == Formula::Kind::kAnd ? " & " : " | ";
        out += wrap(f->kids[i]);
      }
      return out;
    }
    case Formula::Kind::kImplies: return wrap(f->kids[0]) + " -> " + wrap(f->kids[1]);
    case Formula::Kind::kForall:
    case Formula::Kind::kExists: {
      std::string out = f->kind == Formula::Kind::kForall ? "forall " : "exists ";
      for (size_t i = 0; i < f->vars.size(); ++i) {
        if (i) out += ", ";
        out += f->vars[i].name + ":" + std::string(SortName(f->vars[i].sort));
      }
      return out + ". " + ToText(f->kids[0]);
    }
  }
  return "?";
}

}  // namespace mbv::logic

#endif  // MBV_LOGIC_FORMULA_H_
