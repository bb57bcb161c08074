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

#ifndef MBV_DSL_PRINTER_H_
#define MBV_DSL_PRINTER_H_

#include <string>

#include "mbv/dsl/ast.h"

namespace mbv::dsl {

namespace printer_internal {

inline int Precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::kOr: return 1;
    case ExprKind::kAnd: return 2;
    case ExprKind::kNot: return 3;
    case ExprKind::kEq:
    case ExprKind::kNe:
    case ExprKind::kLt:
    case ExprKind::kLe:
    case ExprKind::kGt:
    case ExprKind::kGe: return 4;
    default: return 5;
  }
}

inline std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace printer_internal

inline std::string PrintValue(const Value& v, Sort sort) {
  if (sort == Sort::kAddress || sort == Sort::kNode || sort == Sort::kBody) {
    return printer_internal::Quote(std::get<std::string>(v));
  }
  return ValueToString(v);
}

inline std::string PrintExpr(const Expr& e);

inline std::string PrintOperand(const Expr& e, int min_prec) {
  std::string s = PrintExpr(e);
  if (printer_internal::Precedence(e) < min_prec) return "(" + s + ")";
  return s;
}

inline std::string PrintList(const std::vector<ExprPtr>& args) {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += PrintExpr(*args[i]);
  }
  return out;
}

inline std::string PrintExpr(const Expr& e) {
  using printer_internal::Precedence;
  switch (e.kind) {
    case ExprKind::kLiteral: return PrintValue(e.literal, e.sort);
    case ExprKind::kPacketVar: return e.name;
    case ExprKind::kField:
      return e.name + "." + std::string(FieldName(e.field));
    case ExprKind::kConfigRead:
      if (e.args.empty()) return e.name;
      return e.name + "[" + PrintList(e.args) + "]";
    case ExprKind::kStateRead: return e.name + "[" + PrintList(e.args) + "]";
    case ExprKind::kHas: return "has " + e.name + "[" + PrintList(e.args) + "]";
    case ExprKind::kCall: return e.name + "(" + PrintList(e.args) + ")";
    case ExprKind::kNot: return "not " + PrintOperand(*e.args[0], 3);
    case ExprKind::kAnd:
    case ExprKind::kOr: {
      const int prec = Precedence(e);
      const char* op = e.kind == ExprKind::kAnd ? " and " : " or ";
      std::string out;
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += op;
        out += PrintOperand(*e.args[i], prec + 1);
      }
      return out;
    }
    case ExprKind::kEq:
    case ExprKind::kNe:
    case ExprKind::kLt:
    case ExprKind::kLe:
    case ExprKind::kGt:
    case ExprKind::kGe: {
      const char* op = e.kind == ExprKind::kEq   ? " == "
                       : e.kind == ExprKind::kNe ? " != "
                       : e.kind == ExprKind::kLt ? " < "
                       : e.kind == ExprKind::kLe ? " <= "
                       : e.kind == ExprKind::kGt ? " > "
                                                 : " >= ";
      return PrintOperand(*e.args[0], 5) + op + PrintOperand(*e.args[1], 5);
    }
    case ExprKind::kConstruct: {
      std::string out = "packet(";
      bool first = true;
      if (e.base) {
        out += e.base->name;
        first = false;
      }
      for (const auto& [field, value] : e.overrides) {
        if (!first) out += ", ";
        first = false;
        out += std::string(FieldName(field)) + " = " + PrintExpr(*value);
      }
      return out + ")";
    }
  }
  return "?";
}

inline void PrintBlock(const Block& block, int indent, std::string& out);

inline void PrintStmt(const Stmt& s, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  switch (s.kind) {
    case StmtKind::kRecv: out += pad + "recv " + s.name + ";\n"; return;
    case StmtKind::kSend:
      out += pad + "send " + PrintExpr(*s.expr) + ";\n";
      return;
    case StmtKind::kSet:
      out += pad + "set " + s.name + "[" + PrintList(s.keys) +
             "] = " + PrintExpr(*s.expr) + ";\n";
      return;
    case StmtKind::kIf:
      for (size_t i = 0; i < s.branches.size(); ++i) {
        out += i == 0 ? pad + "if " : " elif ";
        out += PrintExpr(*s.branches[i].guard) + " {\n";
        PrintBlock(s.branches[i].body, indent + 2, out);
        out += pad + "}";
      }
      if (s.else_block) {
        out += " else {\n";
        PrintBlock(*s.else_block, indent + 2, out);
        out += pad + "}";
      }
      out += "\n";
      return;
  }
}

inline void PrintBlock(const Block& block, int indent, std::string& out) {
  for (const Stmt& s : block) PrintStmt(s, indent, out);
}

inline std::string PrintSignature(const std::vector<Sort>& keys, Sort value) {
  if (keys.empty()) return std::string(SortName(value));
  std::string out = "(";
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ", ";
    out += SortName(keys[i]);
  }
  return out + ") -> " + std::string(SortName(value));
}

// Canonical source text; ParseModel(PrintModel(m)) is structurally equal to m.
inline std::string PrintModel(const MiddleboxModel& m) {
  std::string out = "model " + m.name + " {\n";
  for (const TableDecl& d : m.config) {
    out += "  config " + d.name + ": " + PrintSignature(d.key_sorts, d.value_sort) +
           ";\n";
  }
  for (const TableDecl& d : m.state) {
    out += "  state " + d.name + ": " + PrintSignature(d.key_sorts, d.value_sort) +
           ";\n";
  }
  for (const FuncDecl& d : m.funcs) {
    out += "  func " + d.name + ": (";
    for (size_t i = 0; i < d.arg_sorts.size(); ++i) {
      if (i) out += ", ";
      out += SortName(d.arg_sorts[i]);
    }
    out += ") -> ";
    if (d.result_sort != Sort::kBool && d.result_sort != Sort::kPort) {
      out += std::string(SortName(d.result_sort)) + " ";
    }
    out += "{";
    for (size_t i = 0; i < d.codomain.size(); ++i) {
      if (i) out += ", ";
      out += PrintValue(d.codomain[i], d.result_sort);
    }
    out += "};\n";
  }
  if (!m.config.empty() || !m.state.empty() || !m.funcs.empty()) out += "\n";
  PrintBlock(m.body, 2, out);
  return out + "}\n";
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_PRINTER_H_
