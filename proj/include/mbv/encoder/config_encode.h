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

#ifndef MBV_ENCODER_CONFIG_ENCODE_H_
#define MBV_ENCODER_CONFIG_ENCODE_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbv/dsl/ast.h"
#include "mbv/dsl/config.h"
#include "mbv/logic/formula.h"
#include "mbv/logic/program.h"

namespace mbv::encoder {

// Values of the enumerated sorts available in one program.
struct ValueScope {
  std::set<std::string> nodes;
  std::set<std::string> addresses;
  std::set<std::string> bodies;

  bool Contains(dsl::Sort s, const dsl::Value& v) const {
    switch (s) {
      case dsl::Sort::kNode: return nodes.count(std::get<std::string>(v)) > 0;
      case dsl::Sort::kAddress: return addresses.count(std::get<std::string>(v)) > 0;
      case dsl::Sort::kBody: return bodies.count(std::get<std::string>(v)) > 0;
      default: return true;
    }
  }
};

inline logic::TermPtr ValueTerm(dsl::Sort s, const dsl::Value& v) {
  namespace L = ::mbv::logic;
  switch (s) {
    case dsl::Sort::kPort: return L::IntLit(std::get<std::int64_t>(v));
    case dsl::Sort::kAddress: return L::AddrConst(std::get<std::string>(v));
    case dsl::Sort::kNode: return L::NodeConst(std::get<std::string>(v));
    case dsl::Sort::kBody: return L::BodyConst(std::get<std::string>(v));
    default: return nullptr;
  }
}

inline std::string ValueSmt(dsl::Sort s, const dsl::Value& v) {
  if (s == dsl::Sort::kBool) return std::get<bool>(v) ? "true" : "false";
  return logic::ToSmt(ValueTerm(s, v));
}

// Config parameters as SMT-LIB definitions. Entries whose keys fall outside
// `scope` cannot be queried and are left out. Tables without a default are
// declared and pinned by equalities on their entries instead.
inline void EncodeConfig(const dsl::MiddleboxModel& model, const std::string& inst,
                         const dsl::InstanceConfig& cfg, const ValueScope& scope,
                         logic::LogicProgram& program) {
  namespace L = ::mbv::logic;
  for (const dsl::TableDecl& d : model.config) {
    L::FunDecl f{L::InstSym(inst, d.name), {}, L::ToLogicSort(d.value_sort), L::FunRole::kConfig,
                 ""};
    for (dsl::Sort s : d.key_sorts) f.args.push_back(L::ToLogicSort(s));
    auto it = cfg.tables.find(d.name);
    const dsl::ConfigTable empty;
    const dsl::ConfigTable& t = it == cfg.tables.end() ? empty : it->second;
    std::optional<dsl::Value> fallback = t.default_value;
    if (!fallback && d.value_sort == dsl::Sort::kBool) fallback = dsl::Value(false);

    std::vector<std::pair<std::vector<dsl::Value>, dsl::Value>> live;
    for (const auto& [key, value] : t.entries) {
      bool ok = true;
      for (size_t i = 0; i < key.size(); ++i) ok = ok && scope.Contains(d.key_sorts[i], key[i]);
      if (ok) live.push_back({key, value});
    }
    if (fallback) {
      std::string body = ValueSmt(d.value_sort, *fallback);
      for (auto e = live.rbegin(); e != live.rend(); ++e) {
        if (e->second == *fallback) continue;
        std::string cond;
        for (size_t i = 0; i < e->first.size(); ++i) {
          cond += " (= x" + std::to_string(i) + " " + ValueSmt(d.key_sorts[i], e->first[i]) + ")";
        }
        cond = e->first.size() == 1 ? cond.substr(1) : "(and" + cond + ")";
        body = "(ite " + cond + " " + ValueSmt(d.value_sort, e->second) + " " + body + ")";
      }
      f.definition = body;
      program.Declare(f);
      continue;
    }
    program.Declare(f);
    for (const auto& [key, value] : live) {
      std::vector<L::TermPtr> args;
      for (size_t i = 0; i < key.size(); ++i) args.push_back(ValueTerm(d.key_sorts[i], key[i]));
      program.assertions.push_back(
          {L::Eq(L::App(f.name, f.result, args), ValueTerm(d.value_sort, value)),
           "config." + inst + "." + d.name});
    }
  }
}

}  // namespace mbv::encoder

#endif  // MBV_ENCODER_CONFIG_ENCODE_H_
