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

#ifndef MBV_SOLVER_MODEL_H_
#define MBV_SOLVER_MODEL_H_

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mbv/error.h"
#include "mbv/solver/sexpr.h"

namespace mbv::solver {

// Evaluator for models printed as define-fun lists. Values are atoms:
// constructors, universe elements, integers, true or false.
class Model {
 public:
  static constexpr const char* kUndefined = "?";

  std::vector<std::string> Universe(const std::string& sort) const {
    auto it = universes_.find(sort);
    return it == universes_.end() ? std::vector<std::string>{} : it->second;
  }

  bool Defines(const std::string& fn) const { return defs_.count(fn) > 0; }

  std::string Apply(const std::string& fn, const std::vector<std::string>& args) const {
    auto it = defs_.find(fn);
    if (it == defs_.end()) return args.empty() ? fn : kUndefined;
    const Def& d = it->second;
    if (d.params.size() != args.size()) {
      throw Error(ErrorCode::kParseError, "arity mismatch applying " + fn);
    }
    Env env;
    for (size_t i = 0; i < args.size(); ++i) env[d.params[i]] = args[i];
    return Eval(d.body, env);
  }

  std::string Eval(const SExpr& e) const { return Eval(e, {}); }

  // Values of every nullary definition.
  std::map<std::string, std::string> Constants() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, d] : defs_) {
      if (d.params.empty()) out[name] = Eval(d.body, {});
    }
    return out;
  }

  // Every integer constant occurring in a definition body.
  std::set<std::int64_t> IntLiterals() const {
    std::set<std::int64_t> out;
    std::function<void(const SExpr&)> walk = [&](const SExpr& e) {
      if (e.is_atom) {
        if (IsInt(e.atom)) out.insert(ToInt(e.atom));
        return;
      }
      if (e.size() == 2 && e[0].IsAtom("-") && e[1].is_atom && IsInt(e[1].atom)) {
        out.insert(-ToInt(e[1].atom));
        return;
      }
      for (const SExpr& k : e.list) walk(k);
    };
    for (const auto& [name, d] : defs_) walk(d.body);
    return out;
  }

  static Model Parse(const std::string& text) {
    Model m;
    std::vector<SExpr> top = ParseSExprs(text);
    std::vector<SExpr> items;
    for (const SExpr& t : top) {
      if (t.is_atom) continue;
      size_t start = (!t.list.empty() && t.list[0].IsAtom("model")) ? 1 : 0;
      if (!t.list.empty() && t.list[0].is_atom && !t.list[0].IsAtom("model")) {
        items.push_back(t);
        continue;
      }
      for (size_t i = start; i < t.list.size(); ++i) items.push_back(t.list[i]);
    }
    for (const SExpr& it : items) {
      if (it.is_atom || it.size() < 4) continue;
      if (it[0].IsAtom("declare-fun") && it[2].size() == 0 && !it[2].is_atom) {
        m.universes_[it[3].atom].push_back(it[1].atom);
        continue;
      }
      if (!it[0].IsAtom("define-fun") || it.size() < 5) continue;
      Def d;
      for (const SExpr& p : it[2].list) d.params.push_back(p[0].atom);
      d.body = it[4];
      m.defs_[it[1].atom] = std::move(d);
    }
    return m;
  }

 private:
  using Env = std::map<std::string, std::string>;
  struct Def {
    std::vector<std::string> params;
    SExpr body;
  };

  static bool IsInt(const std::string& s) {
    if (s.empty()) return false;
    size_t i = s[0] == '-' ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
  }

  static std::int64_t ToInt(const std::string& s) {
    std::int64_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc()) throw Error(ErrorCode::kParseError, "not an integer: " + s);
    return v;
  }

  static std::string B(bool b) { return b ? "true" : "false"; }

  std::string Eval(const SExpr& e, const Env& env) const {
    if (e.is_atom) {
      auto it = env.find(e.atom);
      if (it != env.end()) return it->second;
      if (IsInt(e.atom) || e.atom == "true" || e.atom == "false") return e.atom;
      auto d = defs_.find(e.atom);
      if (d != defs_.end() && d->second.params.empty()) return Eval(d->second.body, {});
      return e.atom;
    }
    if (e.list.empty()) throw Error(ErrorCode::kParseError, "empty application in model");
    const SExpr& head = e[0];
    if (!head.is_atom) {
      if (head.size() == 3 && head[0].IsAtom("as")) {
        SExpr call = e;
        call.list[0] = head[1];
        return Eval(call, env);
      }
      throw Error(ErrorCode::kParseError, "unsupported model term " + e.ToString());
    }
    const std::string& op = head.atom;
    if (op == "ite") return Eval(e[1], env) == "true" ? Eval(e[2], env) : Eval(e[3], env);
    if (op == "as") return Eval(e[1], env);
    if (op == "let") {
      Env inner = env;
      for (const SExpr& b : e[1].list) inner[b[0].atom] = Eval(b[1], env);
      return Eval(e[2], inner);
    }
    if (op == "forall" || op == "exists" || op == "lambda" || op == "_") {
      throw Error(ErrorCode::kParseError, "unsupported model term " + e.ToString());
    }
    std::vector<std::string> args;
    for (size_t i = 1; i < e.size(); ++i) args.push_back(Eval(e[i], env));
    if (op == "not") return B(args.at(0) != "true");
    if (op == "and") {
      for (const auto& a : args) {
        if (a != "true") return "false";
      }
      return "true";
    }
    if (op == "or") {
      for (const auto& a : args) {
        if (a == "true") return "true";
      }
      return "false";
    }
    if (op == "=>") return B(args.at(0) != "true" || args.at(1) == "true");
    if (op == "=") {
      for (size_t i = 1; i < args.size(); ++i) {
        if (args[i] != args[0]) return "false";
      }
      return "true";
    }
    if (op == "distinct") {
      for (size_t i = 0; i < args.size(); ++i) {
        for (size_t j = i + 1; j < args.size(); ++j) {
          if (args[i] == args[j]) return "false";
        }
      }
      return "true";
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      const std::int64_t a = ToInt(args.at(0)), b = ToInt(args.at(1));
      if (op == "<") return B(a < b);
      if (op == "<=") return B(a <= b);
      if (op == ">") return B(a > b);
      return B(a >= b);
    }
    if (op == "+" || op == "*") {
      std::int64_t acc = op == "+" ? 0 : 1;
      for (const auto& a : args) acc = op == "+" ? acc + ToInt(a) : acc * ToInt(a);
      return std::to_string(acc);
    }
    if (op == "-") {
      if (args.size() == 1) return std::to_string(-ToInt(args[0]));
      std::int64_t acc = ToInt(args.at(0));
      for (size_t i = 1; i < args.size(); ++i) acc -= ToInt(args[i]);
      return std::to_string(acc);
    }
    return Apply(op, args);
  }

  std::map<std::string, Def> defs_;
  std::map<std::string, std::vector<std::string>> universes_;
};

}  // namespace mbv::solver

#endif  // MBV_SOLVER_MODEL_H_
