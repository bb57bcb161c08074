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

#ifndef MBV_VERIFIER_SCOPE_H_
#define MBV_VERIFIER_SCOPE_H_

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "mbv/dsl/actions.h"
#include "mbv/dsl/ast.h"
#include "mbv/encoder/config_encode.h"
#include "mbv/encoder/encode.h"
#include "mbv/logic/program.h"
#include "mbv/network/forwarding.h"
#include "mbv/network/spec.h"

namespace mbv::verifier {

namespace scope_internal {

inline void CollectLiterals(const dsl::Expr& e, encoder::ValueScope& vs) {
  if (e.kind == dsl::ExprKind::kLiteral) {
    if (e.sort == dsl::Sort::kBody) vs.bodies.insert(std::get<std::string>(e.literal));
    if (e.sort == dsl::Sort::kAddress) vs.addresses.insert(std::get<std::string>(e.literal));
    if (e.sort == dsl::Sort::kNode) vs.nodes.insert(std::get<std::string>(e.literal));
  }
  for (const auto& a : e.args) CollectLiterals(*a, vs);
  if (e.base) CollectLiterals(*e.base, vs);
  for (const auto& [f, v] : e.overrides) CollectLiterals(*v, vs);
}

inline void CollectBlock(const dsl::Block& b, encoder::ValueScope& vs) {
  for (const dsl::Stmt& s : b) {
    if (s.expr) CollectLiterals(*s.expr, vs);
    for (const auto& k : s.keys) CollectLiterals(*k, vs);
    for (const auto& br : s.branches) {
      CollectLiterals(*br.guard, vs);
      CollectBlock(br.body, vs);
    }
    if (s.else_block) CollectBlock(*s.else_block, vs);
  }
}

inline void NoteValue(dsl::Sort s, const dsl::Value& v, encoder::ValueScope& vs) {
  if (s == dsl::Sort::kAddress) vs.addresses.insert(std::get<std::string>(v));
  if (s == dsl::Sort::kNode) vs.nodes.insert(std::get<std::string>(v));
  if (s == dsl::Sort::kBody) vs.bodies.insert(std::get<std::string>(v));
}

inline std::vector<std::string> Ordered(const std::set<std::string>& members,
                                 const std::vector<std::string>& order) {
  std::vector<std::string> out;
  for (const std::string& x : order) {
    if (members.count(x)) out.push_back(x);
  }
  for (const std::string& x : members) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

}  // namespace scope_internal

// Relational program for the hosts and middleboxes in `members`: axioms,
// host honesty, instance models and configs, composition constraints of the
// pipelines inside the scope, and destination-based egress for every member.
inline logic::LogicProgram BuildScopeProgram(const network::NetworkSpec& net,
                                             const std::vector<std::string>& members,
                                             const std::vector<network::Pipeline>& pipelines) {
  namespace L = ::mbv::logic;
  using scope_internal::NoteValue;
  const std::set<std::string> in(members.begin(), members.end());
  encoder::ValueScope vs;
  vs.bodies.insert(dsl::kNilBodyToken);
  for (const std::string& m : members) {
    vs.nodes.insert(m);
    if (net.hosts.count(m)) {
      for (const std::string& a : net.hosts.at(m)) vs.addresses.insert(a);
    }
  }
  for (const std::string& m : members) {
    if (!net.middleboxes.count(m)) continue;
    const network::MiddleboxInstance& mi = net.middleboxes.at(m);
    const dsl::MiddleboxModel& model = net.models.at(mi.model);
    scope_internal::CollectBlock(model.body, vs);
    for (const dsl::FuncDecl& f : model.funcs) {
      for (const dsl::Value& v : f.codomain) NoteValue(f.result_sort, v, vs);
    }
    for (const dsl::TableDecl& d : model.config) {
      auto it = mi.config.tables.find(d.name);
      if (it == mi.config.tables.end()) continue;
      if (it->second.default_value) NoteValue(d.value_sort, *it->second.default_value, vs);
      for (const auto& [key, value] : it->second.entries) {
        for (size_t i = 0; i < key.size(); ++i) {
          if (d.key_sorts[i] == dsl::Sort::kBody) NoteValue(dsl::Sort::kBody, key[i], vs);
        }
        bool live = true;
        for (size_t i = 0; i < key.size(); ++i) {
          live = live && (d.key_sorts[i] != dsl::Sort::kAddress || vs.addresses.count(std::get<std::string>(key[i]))) &&
                 (d.key_sorts[i] != dsl::Sort::kNode || in.count(std::get<std::string>(key[i])));
        }
        if (live) NoteValue(d.value_sort, value, vs);
      }
    }
  }

  L::LogicProgram p;
  p.nodes = scope_internal::Ordered(vs.nodes, net.node_order);
  p.addresses = scope_internal::Ordered(vs.addresses, net.Addresses());
  p.bodies.assign(vs.bodies.begin(), vs.bodies.end());
  L::DeclareCore(p);

  for (const encoder::Assertion& a : encoder::NetworkAxioms()) p.assertions.push_back(a);
  for (const std::string& m : members) {
    if (net.hosts.count(m)) p.assertions.push_back(encoder::HostAssertion(m, net.hosts.at(m)));
  }
  // Nodes named by configs or models but outside the scope stay silent.
  for (const std::string& n : p.nodes) {
    if (in.count(n)) continue;
    for (const encoder::Assertion& a : encoder::SilenceAssertions(n, "outside")) p.assertions.push_back(a);
  }
  for (const std::string& m : members) {
    if (!net.middleboxes.count(m)) continue;
    const network::MiddleboxInstance& mi = net.middleboxes.at(m);
    const dsl::MiddleboxModel& model = net.models.at(mi.model);
    for (const L::FunDecl& f : encoder::ModelDeclarations(model, m)) {
      if (f.role != L::FunRole::kConfig) p.Declare(f);
    }
    encoder::EncodeConfig(model, m, mi.config, vs, p);
    for (const encoder::Assertion& a : encoder::EncodeModel(model, m)) p.assertions.push_back(a);
  }
  std::vector<network::Pipeline> inside;
  for (const network::Pipeline& pl : pipelines) {
    bool ok = in.count(pl.src) && in.count(pl.dst);
    for (const std::string& s : pl.stages) ok = ok && in.count(s);
    if (ok) inside.push_back(pl);
  }
  for (const encoder::Assertion& a : network::CompositionConstraints(net, inside)) {
    p.assertions.push_back(a);
  }
  for (const std::string& m : members) {
    for (const encoder::Assertion& a : network::EgressClosure(net, m, in, p.addresses)) {
      p.assertions.push_back(a);
    }
  }
  return p;
}

}  // namespace mbv::verifier

#endif  // MBV_VERIFIER_SCOPE_H_
