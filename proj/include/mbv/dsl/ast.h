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

#ifndef MBV_DSL_AST_H_
#define MBV_DSL_AST_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mbv::dsl {

enum class Sort { kBool, kPort, kAddress, kNode, kBody, kPacket };

inline std::string_view SortName(Sort sort) {
  switch (sort) {
    case Sort::kBool: return "Bool";
    case Sort::kPort: return "Port";
    case Sort::kAddress: return "Address";
    case Sort::kNode: return "Node";
    case Sort::kBody: return "Body";
    case Sort::kPacket: return "Packet";
  }
  return "?";
}

inline std::optional<Sort> ParseSortName(std::string_view name) {
  if (name == "Bool") return Sort::kBool;
  if (name == "Port") return Sort::kPort;
  if (name == "Address") return Sort::kAddress;
  if (name == "Node") return Sort::kNode;
  if (name == "Body") return Sort::kBody;
  return std::nullopt;
}

enum class Field { kSrc, kDst, kSrcPort, kDstPort, kOrigin, kBody };

inline constexpr Field kAllFields[] = {Field::kSrc,     Field::kDst,
                                       Field::kSrcPort, Field::kDstPort,
                                       Field::kOrigin,  Field::kBody};

inline std::string_view FieldName(Field field) {
  switch (field) {
    case Field::kSrc: return "src";
    case Field::kDst: return "dst";
    case Field::kSrcPort: return "src_port";
    case Field::kDstPort: return "dst_port";
    case Field::kOrigin: return "origin";
    case Field::kBody: return "body";
  }
  return "?";
}

inline std::optional<Field> ParseFieldName(std::string_view name) {
  for (Field f : kAllFields) {
    if (FieldName(f) == name) return f;
  }
  return std::nullopt;
}

inline Sort FieldSort(Field field) {
  switch (field) {
    case Field::kSrc:
    case Field::kDst: return Sort::kAddress;
    case Field::kSrcPort:
    case Field::kDstPort: return Sort::kPort;
    case Field::kOrigin: return Sort::kNode;
    case Field::kBody: return Sort::kBody;
  }
  return Sort::kBool;
}

// The field a reply carries in place of `field`.
inline Field ReverseField(Field field) {
  switch (field) {
    case Field::kSrc: return Field::kDst;
    case Field::kDst: return Field::kSrc;
    case Field::kSrcPort: return Field::kDstPort;
    case Field::kDstPort: return Field::kSrcPort;
    default: return field;
  }
}

// Concrete value of any scalar sort. Addresses, nodes and bodies are names.
using Value = std::variant<bool, std::int64_t, std::string>;

// Body of packets a middlebox constructs without a base packet.
inline constexpr const char* kNilBodyToken = "nil";

inline std::string ValueToString(const Value& v) {
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ExprKind {
  kLiteral,
  kPacketVar,
  kField,
  kConfigRead,
  kStateRead,
  kHas,
  kCall,
  kNot,
  kAnd,
  kOr,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kConstruct,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::kLiteral;
  Sort sort = Sort::kBool;
  SourcePos pos;
  Value literal;
  Field field = Field::kSrc;
  // Map, config, function or packet variable name.
  std::string name;
  // Keys, call arguments or operands.
  std::vector<ExprPtr> args;
  // kConstruct: optional base packet and field overrides in source order.
  ExprPtr base;
  std::vector<std::pair<Field, ExprPtr>> overrides;
};

enum class StmtKind { kRecv, kSend, kSet, kIf };

struct Stmt;
using Block = std::vector<Stmt>;

struct Branch {
  ExprPtr guard;
  Block body;
};

struct Stmt {
  StmtKind kind = StmtKind::kRecv;
  SourcePos pos;
  // kRecv: bound variable. kSet: state map name.
  std::string name;
  // kSend: packet expression. kSet: value expression.
  ExprPtr expr;
  // kSet: key expressions.
  std::vector<ExprPtr> keys;
  // kIf: if/elif branches, then an optional else block.
  std::vector<Branch> branches;
  std::optional<Block> else_block;
};

// Read-only config table or mutable state table. A config table without keys
// is a scalar parameter.
struct TableDecl {
  std::string name;
  std::vector<Sort> key_sorts;
  Sort value_sort = Sort::kBool;
  SourcePos pos;
};

struct FuncDecl {
  std::string name;
  std::vector<Sort> arg_sorts;
  Sort result_sort = Sort::kBool;
  std::vector<Value> codomain;
  SourcePos pos;
};

struct MiddleboxModel {
  std::string name;
  std::vector<TableDecl> config;
  std::vector<TableDecl> state;
  std::vector<FuncDecl> funcs;
  // Starts with the single recv statement.
  Block body;

  const std::string& packet_var() const { return body.front().name; }

  const TableDecl* FindConfig(std::string_view n) const {
    for (const TableDecl& d : config) {
      if (d.name == n) return &d;
    }
    return nullptr;
  }
  const TableDecl* FindState(std::string_view n) const {
    for (const TableDecl& d : state) {
      if (d.name == n) return &d;
    }
    return nullptr;
  }
  const FuncDecl* FindFunc(std::string_view n) const {
    for (const FuncDecl& d : funcs) {
      if (d.name == n) return &d;
    }
    return nullptr;
  }
};

// Structural equality that ignores source positions.
inline bool SameExpr(const Expr& a, const Expr& b);

inline bool SameExprPtr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return SameExpr(*a, *b);
}

inline bool SameExpr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.sort != b.sort || a.name != b.name) return false;
  if (a.kind == ExprKind::kLiteral && a.literal != b.literal) return false;
  if (a.kind == ExprKind::kField && a.field != b.field) return false;
  if (a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!SameExprPtr(a.args[i], b.args[i])) return false;
  }
  if (!SameExprPtr(a.base, b.base)) return false;
  if (a.overrides.size() != b.overrides.size()) return false;
  for (size_t i = 0; i < a.overrides.size(); ++i) {
    if (a.overrides[i].first != b.overrides[i].first ||
        !SameExprPtr(a.overrides[i].second, b.overrides[i].second)) {
      return false;
    }
  }
  return true;
}

inline bool SameBlock(const Block& a, const Block& b);

inline bool SameStmt(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (!SameExprPtr(a.expr, b.expr)) return false;
  if (a.keys.size() != b.keys.size()) return false;
  for (size_t i = 0; i < a.keys.size(); ++i) {
    if (!SameExprPtr(a.keys[i], b.keys[i])) return false;
  }
  if (a.branches.size() != b.branches.size()) return false;
  for (size_t i = 0; i < a.branches.size(); ++i) {
    if (!SameExprPtr(a.branches[i].guard, b.branches[i].guard) ||
        !SameBlock(a.branches[i].body, b.branches[i].body)) {
      return false;
    }
  }
  if (a.else_block.has_value() != b.else_block.has_value()) return false;
  return !a.else_block || SameBlock(*a.else_block, *b.else_block);
}

inline bool SameBlock(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!SameStmt(a[i], b[i])) return false;
  }
  return true;
}

inline bool SameTable(const TableDecl& a, const TableDecl& b) {
  return a.name == b.name && a.key_sorts == b.key_sorts &&
         a.value_sort == b.value_sort;
}

inline bool SameModel(const MiddleboxModel& a, const MiddleboxModel& b) {
  if (a.name != b.name || a.config.size() != b.config.size() ||
      a.state.size() != b.state.size() || a.funcs.size() != b.funcs.size()) {
    return false;
  }
  for (size_t i = 0; i < a.config.size(); ++i) {
    if (!SameTable(a.config[i], b.config[i])) return false;
  }
  for (size_t i = 0; i < a.state.size(); ++i) {
    if (!SameTable(a.state[i], b.state[i])) return false;
  }
  for (size_t i = 0; i < a.funcs.size(); ++i) {
    const FuncDecl& x = a.funcs[i];
    const FuncDecl& y = b.funcs[i];
    if (x.name != y.name || x.arg_sorts != y.arg_sorts ||
        x.result_sort != y.result_sort || x.codomain != y.codomain) {
      return false;
    }
  }
  return SameBlock(a.body, b.body);
}

// Visits every expression node reachable from `e`, parents first.
template <typename F>
void VisitExpr(const ExprPtr& e, F&& f) {
  if (!e) return;
  f(*e);
  for (const ExprPtr& a : e->args) VisitExpr(a, f);
  VisitExpr(e->base, f);
  for (const auto& [field, o] : e->overrides) VisitExpr(o, f);
}

// Visits every statement in `block`, including nested ones.
template <typename F>
void VisitStmts(const Block& block, F&& f) {
  for (const Stmt& s : block) {
    f(s);
    for (const Branch& b : s.branches) VisitStmts(b.body, f);
    if (s.else_block) VisitStmts(*s.else_block, f);
  }
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_AST_H_
