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

#ifndef MBV_DSL_INTERP_H_
#define MBV_DSL_INTERP_H_

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mbv/dsl/ast.h"
#include "mbv/dsl/config.h"
#include "mbv/error.h"

namespace mbv::dsl {

// Body token carried by constructed packets that do not set one.
inline constexpr const char* kNilBody = kNilBodyToken;

struct Packet {
  std::string src;
  std::string dst;
  std::int64_t src_port = 0;
  std::int64_t dst_port = 0;
  std::string origin;
  std::string body;

  auto operator<=>(const Packet&) const = default;

  Value Get(Field f) const {
    switch (f) {
      case Field::kSrc: return Value(src);
      case Field::kDst: return Value(dst);
      case Field::kSrcPort: return Value(src_port);
      case Field::kDstPort: return Value(dst_port);
      case Field::kOrigin: return Value(origin);
      case Field::kBody: return Value(body);
    }
    return Value(false);
  }

  void Set(Field f, const Value& v) {
    switch (f) {
      case Field::kSrc: src = std::get<std::string>(v); break;
      case Field::kDst: dst = std::get<std::string>(v); break;
      case Field::kSrcPort: src_port = std::get<std::int64_t>(v); break;
      case Field::kDstPort: dst_port = std::get<std::int64_t>(v); break;
      case Field::kOrigin: origin = std::get<std::string>(v); break;
      case Field::kBody: body = std::get<std::string>(v); break;
    }
  }

  std::string ToString() const {
    return src + ":" + std::to_string(src_port) + "->" + dst + ":" +
           std::to_string(dst_port) + " origin=" + origin + " body=" + body;
  }
};

using Table = std::map<std::vector<Value>, Value>;

// Concrete state of one instance: its state maps plus the values already
// fixed for uninterpreted-function applications.
struct ModelState {
  std::map<std::string, Table> maps;
  std::map<std::string, Table> uf_memo;

  auto operator<=>(const ModelState&) const = default;
};

struct Execution {
  std::vector<Packet> outputs;
  ModelState next;
};

namespace interp_internal {

class Run {
 public:
  Run(const MiddleboxModel& model, const InstanceConfig& cfg, const std::string& self,
      const ModelState& pre, const Packet& packet, const std::vector<size_t>& forced)
      : model_(model), cfg_(cfg), self_(self), pre_(pre), packet_(packet),
        forced_(forced), next_(pre) {}

  Execution Go() {
    Exec(model_.body);
    for (auto& [map, key, value] : writes_) next_.maps[map][key] = value;
    return {std::move(outputs_), std::move(next_)};
  }

  const std::vector<size_t>& taken() const { return taken_; }
  const std::vector<size_t>& counts() const { return counts_; }

 private:
  void Exec(const Block& block) {
    for (const Stmt& s : block) {
      switch (s.kind) {
        case StmtKind::kRecv: break;
        case StmtKind::kSend: outputs_.push_back(EvalPacket(*s.expr)); break;
        case StmtKind::kSet: {
          std::vector<Value> key;
          for (const ExprPtr& k : s.keys) key.push_back(Eval(*k));
          writes_.emplace_back(s.name, std::move(key), Eval(*s.expr));
          break;
        }
        case StmtKind::kIf: {
          bool fired = false;
          for (const Branch& b : s.branches) {
            if (std::get<bool>(Eval(*b.guard))) {
              Exec(b.body);
              fired = true;
              break;
            }
          }
          if (!fired && s.else_block) Exec(*s.else_block);
          break;
        }
      }
    }
  }

  Packet EvalPacket(const Expr& e) {
    if (e.kind == ExprKind::kPacketVar) return packet_;
    Packet out;
    if (e.base) {
      out = packet_;
    } else {
      out.origin = self_;
      out.body = kNilBody;
    }
    for (const auto& [f, v] : e.overrides) out.Set(f, Eval(*v));
    return out;
  }

  std::vector<Value> EvalArgs(const Expr& e) {
    std::vector<Value> out;
    for (const ExprPtr& a : e.args) out.push_back(Eval(*a));
    return out;
  }

  Value Eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kLiteral: return e.literal;
      case ExprKind::kField: return packet_.Get(e.field);
      case ExprKind::kConfigRead:
        return cfg_.Lookup(*model_.FindConfig(e.name), EvalArgs(e));
      case ExprKind::kStateRead: {
        const std::vector<Value> key = EvalArgs(e);
        auto m = pre_.maps.find(e.name);
        const bool present = m != pre_.maps.end() && m->second.count(key);
        if (e.sort == Sort::kBool) return Value(present);
        if (!present) {
          throw Error(ErrorCode::kPreconditionViolated,
                      "read of absent entry in '" + e.name + "'");
        }
        return m->second.at(key);
      }
      case ExprKind::kHas: {
        const std::vector<Value> key = EvalArgs(e);
        auto m = pre_.maps.find(e.name);
        return Value(m != pre_.maps.end() && m->second.count(key) > 0);
      }
      case ExprKind::kCall: {
        const std::vector<Value> args = EvalArgs(e);
        Table& memo = next_.uf_memo[e.name];
        auto it = memo.find(args);
        if (it != memo.end()) return it->second;
        const FuncDecl& f = *model_.FindFunc(e.name);
        const size_t point = taken_.size();
        const size_t choice = point < forced_.size() ? forced_[point] : 0;
        taken_.push_back(choice);
        counts_.push_back(f.codomain.size());
        memo[args] = f.codomain[choice];
        return f.codomain[choice];
      }
      case ExprKind::kNot: return Value(!std::get<bool>(Eval(*e.args[0])));
      case ExprKind::kAnd:
        for (const ExprPtr& a : e.args) {
          if (!std::get<bool>(Eval(*a))) return Value(false);
        }
        return Value(true);
      case ExprKind::kOr:
        for (const ExprPtr& a : e.args) {
          if (std::get<bool>(Eval(*a))) return Value(true);
        }
        return Value(false);
      case ExprKind::kEq: return Value(Eval(*e.args[0]) == Eval(*e.args[1]));
      case ExprKind::kNe: return Value(Eval(*e.args[0]) != Eval(*e.args[1]));
      case ExprKind::kLt: return Value(Eval(*e.args[0]) < Eval(*e.args[1]));
      case ExprKind::kLe: return Value(Eval(*e.args[0]) <= Eval(*e.args[1]));
      case ExprKind::kGt: return Value(Eval(*e.args[0]) > Eval(*e.args[1]));
      case ExprKind::kGe: return Value(Eval(*e.args[0]) >= Eval(*e.args[1]));
      case ExprKind::kPacketVar:
      case ExprKind::kConstruct: break;
    }
    throw Error(ErrorCode::kTypeError, "packet expression used as a value");
  }

  const MiddleboxModel& model_;
  const InstanceConfig& cfg_;
  const std::string& self_;
  const ModelState& pre_;
  const Packet& packet_;
  const std::vector<size_t>& forced_;
  ModelState next_;
  std::vector<Packet> outputs_;
  std::vector<std::tuple<std::string, std::vector<Value>, Value>> writes_;
  std::vector<size_t> taken_;
  std::vector<size_t> counts_;
};

}  // namespace interp_internal

// Processes one packet under every valuation of the uninterpreted-function
// applications it reaches that are not already fixed in `state`. Reads see
// the state as of arrival; writes apply after the packet is processed.
inline std::vector<Execution> Execute(const MiddleboxModel& model,
                                      const InstanceConfig& cfg,
                                      const std::string& self,
                                      const ModelState& state,
                                      const Packet& packet) {
  std::vector<Execution> out;
  std::vector<size_t> forced;
  while (true) {
    interp_internal::Run run(model, cfg, self, state, packet, forced);
    out.push_back(run.Go());
    std::vector<size_t> taken = run.taken();
    const std::vector<size_t>& counts = run.counts();
    size_t i = taken.size();
    while (i > 0 && taken[i - 1] + 1 >= counts[i - 1]) --i;
    if (i == 0) break;
    taken.resize(i);
    ++taken.back();
    forced = std::move(taken);
  }
  return out;
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_INTERP_H_
