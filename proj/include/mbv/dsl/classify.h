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

#ifndef MBV_DSL_CLASSIFY_H_
#define MBV_DSL_CLASSIFY_H_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mbv/dsl/actions.h"
#include "mbv/dsl/ast.h"
#include "mbv/dsl/config.h"
#include "mbv/dsl/printer.h"

namespace mbv::dsl {

enum class Tri { kYes, kNo, kUnknown };

inline std::string_view TriName(Tri t) {
  switch (t) {
    case Tri::kYes: return "Yes";
    case Tri::kNo: return "No";
    case Tri::kUnknown: return "Unknown";
  }
  return "?";
}

// Header fields identifying a flow. Forward and reverse tuples are one flow.
struct FlowKeySpec {
  std::vector<Field> fields = {Field::kSrc, Field::kDst, Field::kSrcPort,
                               Field::kDstPort};

  bool Contains(Field f) const {
    return std::find(fields.begin(), fields.end(), f) != fields.end();
  }
};

struct Classification {
  Tri flow_parallel = Tri::kUnknown;
  Tri flow_preserving = Tri::kUnknown;
  std::string evidence;
};

namespace classify_internal {

using Slots = std::vector<size_t>;

inline bool IsPacketField(const ExprPtr& e, Field f) {
  return e->kind == ExprKind::kField && e->field == f;
}

// Positions of each flow-key field within `keys`, for one orientation.
inline std::set<Slots> SlotChoices(const std::vector<ExprPtr>& keys,
                                   const FlowKeySpec& fk, bool reverse) {
  std::set<Slots> out;
  Slots cur;
  std::vector<bool> used(keys.size(), false);
  auto rec = [&](auto&& self, size_t idx) -> void {
    if (idx == fk.fields.size()) {
      out.insert(cur);
      return;
    }
    const Field want = reverse ? ReverseField(fk.fields[idx]) : fk.fields[idx];
    for (size_t i = 0; i < keys.size(); ++i) {
      if (used[i] || !IsPacketField(keys[i], want)) continue;
      used[i] = true;
      cur.push_back(i);
      self(self, idx + 1);
      cur.pop_back();
      used[i] = false;
    }
  };
  rec(rec, 0);
  return out;
}

inline std::map<std::string, std::vector<std::vector<ExprPtr>>> StateAccesses(
    const MiddleboxModel& m) {
  std::map<std::string, std::vector<std::vector<ExprPtr>>> out;
  auto visit_expr = [&](const ExprPtr& root) {
    VisitExpr(root, [&](const Expr& e) {
      if (e.kind == ExprKind::kStateRead || e.kind == ExprKind::kHas) {
        out[e.name].push_back(e.args);
      }
    });
  };
  VisitStmts(m.body, [&](const Stmt& s) {
    visit_expr(s.expr);
    for (const ExprPtr& k : s.keys) visit_expr(k);
    for (const Branch& b : s.branches) visit_expr(b.guard);
    if (s.kind == StmtKind::kSet) out[s.name].push_back(s.keys);
  });
  return out;
}

inline bool MentionsPacket(const ExprPtr& root) {
  bool found = false;
  VisitExpr(root, [&](const Expr& e) {
    found = found || e.kind == ExprKind::kField || e.kind == ExprKind::kPacketVar;
  });
  return found;
}

inline bool MentionsStateOrFunc(const ExprPtr& root) {
  bool found = false;
  VisitExpr(root, [&](const Expr& e) {
    found = found || e.kind == ExprKind::kStateRead || e.kind == ExprKind::kHas ||
            e.kind == ExprKind::kCall;
  });
  return found;
}

enum class SiteVerdict { kPreserving, kConfigDependent, kConstant, kUnknown };

struct SiteResult {
  SiteVerdict verdict = SiteVerdict::kUnknown;
  std::string why;
};

inline SiteResult JudgeSend(const Stmt& send, const FlowKeySpec& fk) {
  const Expr& e = *send.expr;
  if (e.kind == ExprKind::kPacketVar) {
    return {SiteVerdict::kPreserving, "forwards the received packet"};
  }
  std::map<Field, ExprPtr> fk_over;
  for (const auto& [f, v] : e.overrides) {
    if (fk.Contains(f)) fk_over[f] = v;
  }
  if (e.base && fk_over.empty()) {
    return {SiteVerdict::kPreserving, "rewrites only fields outside the flow key"};
  }
  // Flow-key fields copied (possibly permuted) from the received packet.
  std::map<Field, Field> source;
  bool pure_copy = true;
  for (Field f : fk.fields) {
    auto it = fk_over.find(f);
    if (it == fk_over.end()) {
      if (!e.base) pure_copy = false;
      source[f] = f;
    } else if (it->second->kind == ExprKind::kField && fk.Contains(it->second->field)) {
      source[f] = it->second->field;
    } else {
      pure_copy = false;
    }
  }
  if (pure_copy) {
    std::set<Field> image;
    for (const auto& [f, g] : source) image.insert(g);
    if (image.size() == fk.fields.size()) {
      return {SiteVerdict::kPreserving, "permutes the packet's own flow-key fields"};
    }
    return {SiteVerdict::kUnknown, "copies flow-key fields non-injectively"};
  }
  bool any_packet = false;
  bool stateful = false;
  for (const auto& [f, v] : fk_over) {
    any_packet = any_packet || MentionsPacket(v);
    stateful = stateful || MentionsStateOrFunc(v);
  }
  if (!e.base && !any_packet) {
    return {SiteVerdict::kConstant,
            "constructs a packet whose flow key ignores the received packet"};
  }
  if (stateful) {
    return {SiteVerdict::kUnknown,
            "flow-key rewrite depends on state or uninterpreted functions"};
  }
  return {SiteVerdict::kConfigDependent,
          "flow-key rewrite is a config lookup; injectivity depends on the instance"};
}

// Three-valued evaluation over a flow-key tuple; nullopt when the value
// depends on anything besides the tuple and config.
inline std::optional<Value> PartialEval(const MiddleboxModel& m,
                                        const InstanceConfig& cfg,
                                        const std::map<Field, Value>& tuple,
                                        const Expr& e) {
  switch (e.kind) {
    case ExprKind::kLiteral: return e.literal;
    case ExprKind::kField: {
      auto it = tuple.find(e.field);
      if (it == tuple.end()) return std::nullopt;
      return it->second;
    }
    case ExprKind::kConfigRead: {
      std::vector<Value> key;
      for (const ExprPtr& a : e.args) {
        auto v = PartialEval(m, cfg, tuple, *a);
        if (!v) return std::nullopt;
        key.push_back(*v);
      }
      return cfg.Lookup(*m.FindConfig(e.name), key);
    }
    case ExprKind::kNot: {
      auto v = PartialEval(m, cfg, tuple, *e.args[0]);
      if (!v) return std::nullopt;
      return Value(!std::get<bool>(*v));
    }
    case ExprKind::kAnd:
    case ExprKind::kOr: {
      const bool is_and = e.kind == ExprKind::kAnd;
      bool unknown = false;
      for (const ExprPtr& a : e.args) {
        auto v = PartialEval(m, cfg, tuple, *a);
        if (!v) {
          unknown = true;
        } else if (std::get<bool>(*v) != is_and) {
          return Value(!is_and);
        }
      }
      if (unknown) return std::nullopt;
      return Value(is_and);
    }
    case ExprKind::kEq:
    case ExprKind::kNe:
    case ExprKind::kLt:
    case ExprKind::kLe:
    case ExprKind::kGt:
    case ExprKind::kGe: {
      auto l = PartialEval(m, cfg, tuple, *e.args[0]);
      auto r = PartialEval(m, cfg, tuple, *e.args[1]);
      if (!l || !r) return std::nullopt;
      switch (e.kind) {
        case ExprKind::kEq: return Value(*l == *r);
        case ExprKind::kNe: return Value(*l != *r);
        case ExprKind::kLt: return Value(*l < *r);
        case ExprKind::kLe: return Value(*l <= *r);
        case ExprKind::kGt: return Value(*l > *r);
        default: return Value(*l >= *r);
      }
    }
    default: return std::nullopt;
  }
}

inline void Append(std::string& evidence, const std::string& part) {
  if (!evidence.empty()) evidence += "; ";
  evidence += part;
}

}  // namespace classify_internal

// Static sufficient check. flow_parallel is Yes only when every access to
// every state map puts the flow key in one fixed set of key slots, in forward
// or reverse orientation.
inline Classification ClassifyModel(const MiddleboxModel& model,
                                    const FlowKeySpec& flow_key) {
  using namespace classify_internal;
  Classification c;
  std::string fp_evidence;
  c.flow_parallel = Tri::kYes;
  for (const auto& [map, accesses] : StateAccesses(model)) {
    std::optional<std::set<Slots>> common;
    std::string bad;
    for (const auto& keys : accesses) {
      std::set<Slots> choices = SlotChoices(keys, flow_key, false);
      std::set<Slots> rev = SlotChoices(keys, flow_key, true);
      choices.insert(rev.begin(), rev.end());
      if (!common) {
        common = choices;
      } else {
        std::set<Slots> both;
        std::set_intersection(common->begin(), common->end(), choices.begin(),
                              choices.end(), std::inserter(both, both.end()));
        common = std::move(both);
      }
      if (common->empty()) {
        bad = map + "[" + PrintList(keys) + "]";
        break;
      }
    }
    if (!common || common->empty()) {
      c.flow_parallel = Tri::kUnknown;
      Append(fp_evidence, "state access " + bad +
                              " is not keyed by the flow key in consistent positions");
    } else {
      Append(fp_evidence, "state map '" + map + "' is keyed by the flow key");
    }
  }
  if (model.state.empty()) fp_evidence = "no state";

  c.flow_preserving = Tri::kYes;
  std::string fpres_evidence;
  int index = 0;
  for (const ActionSite& site : EnumerateActions(model)) {
    if (!site.is_send()) continue;
    SiteResult r = JudgeSend(*site.stmt, flow_key);
    const std::string label = "send #" + std::to_string(index++) + " " + r.why;
    switch (r.verdict) {
      case SiteVerdict::kPreserving: break;
      case SiteVerdict::kConstant:
        c.flow_preserving = Tri::kNo;
        Append(fpres_evidence, label);
        break;
      case SiteVerdict::kConfigDependent:
      case SiteVerdict::kUnknown:
        if (c.flow_preserving == Tri::kYes) c.flow_preserving = Tri::kUnknown;
        Append(fpres_evidence, label);
        break;
    }
  }
  if (fpres_evidence.empty()) {
    fpres_evidence = index == 0 ? "never sends" : "every send keeps the flow";
  }
  c.evidence = "flow-parallel: " + fp_evidence + ". flow-preserving: " + fpres_evidence;
  return c;
}

// Refines config-dependent sends using concrete tables: a rewrite is
// flow-preserving when the output flow key is injective over every input
// tuple for which the site's config-only guards can hold.
inline Classification ClassifyInstance(const MiddleboxModel& model,
                                       const InstanceConfig& cfg,
                                       const FlowKeySpec& flow_key,
                                       const std::vector<std::string>& addresses) {
  using namespace classify_internal;
  Classification c = ClassifyModel(model, flow_key);
  if (c.flow_preserving != Tri::kUnknown) return c;

  std::set<std::int64_t> port_set = {0};
  for (const auto& [name, table] : cfg.tables) {
    auto note = [&](const Value& v) {
      if (auto* i = std::get_if<std::int64_t>(&v)) port_set.insert(*i);
    };
    for (const auto& [k, v] : table.entries) {
      for (const Value& x : k) note(x);
      note(v);
    }
    if (table.default_value) note(*table.default_value);
  }
  std::vector<std::vector<Value>> domains;
  for (Field f : flow_key.fields) {
    std::vector<Value> d;
    if (FieldSort(f) == Sort::kAddress) {
      for (const std::string& a : addresses) d.push_back(Value(a));
    } else {
      for (std::int64_t p : port_set) d.push_back(Value(p));
    }
    domains.push_back(std::move(d));
  }

  Tri result = Tri::kYes;
  std::string evidence;
  int index = 0;
  for (const ActionSite& site : EnumerateActions(model)) {
    if (!site.is_send()) continue;
    SiteResult r = JudgeSend(*site.stmt, flow_key);
    const std::string label = "send #" + std::to_string(index++);
    if (r.verdict == SiteVerdict::kPreserving) continue;
    if (r.verdict == SiteVerdict::kConstant) {
      result = Tri::kNo;
      Append(evidence, label + " " + r.why);
      continue;
    }
    if (r.verdict == SiteVerdict::kUnknown) {
      if (result == Tri::kYes) result = Tri::kUnknown;
      Append(evidence, label + " " + r.why);
      continue;
    }
    std::map<std::vector<Value>, std::vector<Value>> seen;
    std::optional<std::string> problem;
    std::vector<size_t> idx(domains.size(), 0);
    bool empty = std::any_of(domains.begin(), domains.end(),
                             [](const auto& d) { return d.empty(); });
    while (!empty && !problem) {
      std::map<Field, Value> tuple;
      std::vector<Value> in;
      for (size_t i = 0; i < domains.size(); ++i) {
        tuple[flow_key.fields[i]] = domains[i][idx[i]];
        in.push_back(domains[i][idx[i]]);
      }
      bool feasible = true;
      for (const PathLiteral& lit : site.path) {
        auto v = PartialEval(model, cfg, tuple, *lit.guard);
        if (v && std::get<bool>(*v) != lit.positive) feasible = false;
      }
      if (feasible) {
        std::vector<Value> out;
        for (Field f : flow_key.fields) {
          ExprPtr over;
          for (const auto& [g, v] : site.stmt->expr->overrides) {
            if (g == f) over = v;
          }
          if (!over) {
            out.push_back(tuple[f]);
            continue;
          }
          auto v = PartialEval(model, cfg, tuple, *over);
          if (!v) {
            problem = "rewrite of " + std::string(FieldName(f)) + " is not determined by the flow key";
            break;
          }
          out.push_back(*v);
        }
        if (!problem) {
          auto [it, fresh] = seen.emplace(out, in);
          if (!fresh) problem = "two input flows are rewritten to the same flow";
        }
      }
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == domains[k].size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    if (problem) {
      result = Tri::kNo;
      Append(evidence, label + " " + *problem);
    } else {
      Append(evidence, label + " rewrite is injective over " +
                           std::to_string(seen.size()) + " configured flows");
    }
  }
  c.flow_preserving = result;
  const size_t cut = c.evidence.find(". flow-preserving: ");
  c.evidence = c.evidence.substr(0, cut) + ". flow-preserving: " + evidence;
  return c;
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_CLASSIFY_H_
