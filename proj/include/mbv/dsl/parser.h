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

#ifndef MBV_DSL_PARSER_H_
#define MBV_DSL_PARSER_H_

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbv/dsl/ast.h"
#include "mbv/dsl/printer.h"
#include "mbv/error.h"

namespace mbv::dsl {

namespace parser_internal {

enum class Tok { kIdent, kInt, kString, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  SourcePos pos;
};

inline bool IsLoopKeyword(std::string_view w) {
  return w == "while" || w == "for" || w == "loop" || w == "do" ||
         w == "repeat" || w == "goto" || w == "until";
}

inline bool IsKeyword(std::string_view w) {
  static const char* const kWords[] = {
      "model", "config", "state", "func", "recv", "send",   "set",
      "if",    "elif",   "else",  "packet", "has", "and",   "or",
      "not",   "true",   "false"};
  for (const char* k : kWords) {
    if (w == k) return true;
  }
  return false;
}

inline std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      if (IsLoopKeyword(t.text)) {
        throw Error(ErrorCode::kLoopDisallowed,
                    "loop construct '" + t.text + "' is not part of the language",
                    t.pos.line, t.pos.column);
      }
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::kInt;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::string s;
      size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        if (src[j] == '\\' && j + 1 < src.size()) {
          s += src[j + 1];
          j += 2;
          continue;
        }
        if (src[j] == '"') {
          closed = true;
          break;
        }
        if (src[j] == '\n') break;
        s += src[j++];
      }
      if (!closed) {
        throw Error(ErrorCode::kSyntaxError, "unterminated string literal",
                    t.pos.line, t.pos.column);
      }
      t.kind = Tok::kString;
      t.text = s;
      advance(j + 1 - i);
    } else {
      static const char* const kTwo[] = {"==", "!=", "<=", ">=", "->"};
      t.kind = Tok::kPunct;
      for (const char* two : kTwo) {
        if (src.substr(i, 2) == two) t.text = two;
      }
      if (t.text.empty()) {
        if (std::string_view("{}()[],;:.=<>").find(c) == std::string_view::npos) {
          throw Error(ErrorCode::kSyntaxError,
                      std::string("unexpected character '") + c + "'",
                      t.pos.line, t.pos.column);
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Tok::kEnd;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

struct Parsed {
  std::shared_ptr<Expr> e;
  // String literal whose sort comes from context.
  bool untyped = false;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lex(src)) {}

  MiddleboxModel ParseModel() {
    Keyword("model");
    model_.name = Ident("model name");
    Punct("{");
    while (PeekIdent("config") || PeekIdent("state") || PeekIdent("func")) {
      ParseDecl();
    }
    if (!PeekIdent("recv")) {
      if (PeekPunct("}")) {
        throw Error(ErrorCode::kMissingRecv, "model body must begin with recv",
                    Peek().pos.line, Peek().pos.column);
      }
      // Parse the offending statement only to report it precisely.
      throw Error(ErrorCode::kMissingRecv,
                  "first statement of the body must be recv, found '" +
                      Peek().text + "'",
                  Peek().pos.line, Peek().pos.column);
    }
    Stmt recv;
    recv.kind = StmtKind::kRecv;
    recv.pos = Next().pos;
    recv.name = Ident("packet variable");
    CheckFresh(recv.name, recv.pos);
    Punct(";");
    packet_var_ = recv.name;
    model_.body.push_back(std::move(recv));
    while (!PeekPunct("}")) {
      if (Peek().kind == Tok::kEnd) Fail("expected '}' before end of input");
      model_.body.push_back(ParseStmt());
    }
    Punct("}");
    if (Peek().kind != Tok::kEnd) Fail("unexpected text after model");
    return std::move(model_);
  }

 private:
  const Token& Peek(size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& Next() {
    const Token& t = Peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool PeekIdent(std::string_view w, size_t k = 0) const {
    return Peek(k).kind == Tok::kIdent && Peek(k).text == w;
  }
  bool PeekPunct(std::string_view p, size_t k = 0) const {
    return Peek(k).kind == Tok::kPunct && Peek(k).text == p;
  }
  [[noreturn]] void Fail(const std::string& msg) const {
    throw Error(ErrorCode::kSyntaxError, msg, Peek().pos.line, Peek().pos.column);
  }
  [[noreturn]] void Fail(ErrorCode code, const std::string& msg,
                         SourcePos pos) const {
    throw Error(code, msg, pos.line, pos.column);
  }
  void Keyword(std::string_view w) {
    if (!PeekIdent(w)) Fail("expected '" + std::string(w) + "'");
    Next();
  }
  void Punct(std::string_view p) {
    if (!PeekPunct(p)) {
      Fail("expected '" + std::string(p) + "', found '" + Peek().text + "'");
    }
    Next();
  }
  std::string Ident(const char* what) {
    if (Peek().kind != Tok::kIdent || IsKeyword(Peek().text)) {
      Fail(std::string("expected ") + what);
    }
    return Next().text;
  }

  void CheckFresh(const std::string& name, SourcePos pos) {
    if (!names_.insert(name).second) {
      Fail(ErrorCode::kTypeError, "duplicate declaration of '" + name + "'", pos);
    }
  }

  Sort ParseSort() {
    const Token& t = Peek();
    if (t.kind == Tok::kIdent) {
      if (auto s = ParseSortName(t.text)) {
        Next();
        return *s;
      }
    }
    Fail("expected a sort (Address, Port, Bool, Node, Body)");
  }

  void ParseDecl() {
    const std::string kw = Next().text;
    const SourcePos pos = Peek().pos;
    const std::string name = Ident("declaration name");
    CheckFresh(name, pos);
    Punct(":");
    if (kw == "func") {
      FuncDecl d;
      d.name = name;
      d.pos = pos;
      Punct("(");
      if (!PeekPunct(")")) {
        d.arg_sorts.push_back(ParseSort());
        while (PeekPunct(",")) {
          Next();
          d.arg_sorts.push_back(ParseSort());
        }
      }
      Punct(")");
      Punct("->");
      std::optional<Sort> declared;
      const SourcePos cpos = Peek().pos;
      if (Peek().kind == Tok::kIdent) declared = ParseSort();
      if (!PeekPunct("{")) {
        if (declared == Sort::kBool) {
          d.result_sort = Sort::kBool;
          d.codomain = {Value(true), Value(false)};
        } else {
          Fail(ErrorCode::kInfiniteCodomain,
               "function '" + name + "' must enumerate its codomain", cpos);
        }
      } else {
        Next();
        std::optional<Sort> inferred;
        while (true) {
          const Token& t = Next();
          Value v;
          Sort s;
          if (t.kind == Tok::kIdent && (t.text == "true" || t.text == "false")) {
            v = Value(t.text == "true");
            s = Sort::kBool;
          } else if (t.kind == Tok::kInt) {
            v = Value(static_cast<std::int64_t>(std::stoll(t.text)));
            s = Sort::kPort;
          } else if (t.kind == Tok::kString) {
            if (!declared || (*declared != Sort::kAddress && *declared != Sort::kNode &&
                              *declared != Sort::kBody)) {
              Fail(ErrorCode::kTypeError,
                   "string codomain values need an Address, Node or Body sort", t.pos);
            }
            v = Value(t.text);
            s = *declared;
          } else {
            Fail(ErrorCode::kSyntaxError, "expected a codomain literal", t.pos);
          }
          if (inferred && *inferred != s) {
            Fail(ErrorCode::kTypeError, "codomain values of mixed sorts", t.pos);
          }
          inferred = s;
          for (const Value& prev : d.codomain) {
            if (prev == v) Fail(ErrorCode::kTypeError, "duplicate codomain value", t.pos);
          }
          d.codomain.push_back(v);
          if (PeekPunct(",")) {
            Next();
            continue;
          }
          Punct("}");
          break;
        }
        if (declared && *declared != *inferred) {
          Fail(ErrorCode::kTypeError, "codomain values do not match declared sort",
               cpos);
        }
        d.result_sort = *inferred;
      }
      Punct(";");
      model_.funcs.push_back(std::move(d));
      return;
    }
    TableDecl d;
    d.name = name;
    d.pos = pos;
    if (PeekPunct("(")) {
      Next();
      if (!PeekPunct(")")) {
        d.key_sorts.push_back(ParseSort());
        while (PeekPunct(",")) {
          Next();
          d.key_sorts.push_back(ParseSort());
        }
      }
      Punct(")");
      Punct("->");
    }
    d.value_sort = ParseSort();
    Punct(";");
    if (kw == "config") {
      model_.config.push_back(std::move(d));
    } else {
      if (d.key_sorts.empty()) {
        Fail(ErrorCode::kTypeError, "state map '" + name + "' needs a key", pos);
      }
      model_.state.push_back(std::move(d));
    }
  }

  Block ParseBlock() {
    Punct("{");
    Block b;
    while (!PeekPunct("}")) {
      if (Peek().kind == Tok::kEnd) Fail("expected '}' before end of input");
      b.push_back(ParseStmt());
    }
    Punct("}");
    return b;
  }

  Stmt ParseStmt() {
    Stmt s;
    s.pos = Peek().pos;
    if (PeekIdent("recv")) {
      Fail(ErrorCode::kSyntaxError, "recv may appear only once, as the first statement",
           s.pos);
    }
    if (PeekIdent("send")) {
      Next();
      s.kind = StmtKind::kSend;
      Parsed p = ParseExpr();
      if (p.untyped || p.e->sort != Sort::kPacket) {
        Fail(ErrorCode::kTypeError, "send expects a packet", s.pos);
      }
      s.expr = p.e;
      Punct(";");
      return s;
    }
    if (PeekIdent("set")) {
      Next();
      s.kind = StmtKind::kSet;
      const SourcePos npos = Peek().pos;
      if (Peek().kind == Tok::kIdent && PeekPunct(".", 1)) {
        Fail(ErrorCode::kNonLocalState, "state of another node is not accessible",
             npos);
      }
      s.name = Ident("state map name");
      const TableDecl* decl = model_.FindState(s.name);
      if (!decl) {
        if (model_.FindConfig(s.name)) {
          Fail(ErrorCode::kTypeError, "config '" + s.name + "' is read-only", npos);
        }
        Fail(ErrorCode::kNonLocalState, "'" + s.name + "' is not a state map of this model",
             npos);
      }
      s.keys = ParseKeys(decl->key_sorts, s.name);
      Punct("=");
      const SourcePos vpos = Peek().pos;
      s.expr = Expect(ParseExpr(), decl->value_sort, vpos);
      if (decl->value_sort == Sort::kBool &&
          !(s.expr->kind == ExprKind::kLiteral && s.expr->literal == Value(true))) {
        Fail(ErrorCode::kTypeError,
             "boolean state maps only accept 'true' (entries are never retracted)", vpos);
      }
      Punct(";");
      return s;
    }
    if (PeekIdent("if")) {
      Next();
      s.kind = StmtKind::kIf;
      s.branches.push_back(ParseBranch());
      while (PeekIdent("elif")) {
        Next();
        s.branches.push_back(ParseBranch());
      }
      if (PeekIdent("else")) {
        Next();
        s.else_block = ParseBlock();
      }
      return s;
    }
    Fail("expected a statement (send, set, if), found '" + Peek().text + "'");
  }

  Branch ParseBranch() {
    Branch b;
    const SourcePos gpos = Peek().pos;
    b.guard = Expect(ParseExpr(), Sort::kBool, gpos);
    b.body = ParseBlock();
    return b;
  }

  std::vector<ExprPtr> ParseKeys(const std::vector<Sort>& sorts,
                                 const std::string& map) {
    const SourcePos pos = Peek().pos;
    Punct("[");
    std::vector<ExprPtr> keys;
    if (!PeekPunct("]")) {
      while (true) {
        const SourcePos kpos = Peek().pos;
        Parsed k = ParseExpr();
        if (keys.size() >= sorts.size()) {
          Fail(ErrorCode::kTypeError, "too many keys for '" + map + "'", kpos);
        }
        keys.push_back(Expect(std::move(k), sorts[keys.size()], kpos));
        if (!PeekPunct(",")) break;
        Next();
      }
    }
    Punct("]");
    if (keys.size() != sorts.size()) {
      Fail(ErrorCode::kTypeError, "'" + map + "' expects " +
                                      std::to_string(sorts.size()) + " keys",
           pos);
    }
    return keys;
  }

  ExprPtr Expect(Parsed p, Sort sort, SourcePos pos) {
    if (p.untyped) {
      if (sort != Sort::kAddress && sort != Sort::kNode && sort != Sort::kBody) {
        Fail(ErrorCode::kTypeError,
             "string literal used where " + std::string(SortName(sort)) + " expected",
             pos);
      }
      p.e->sort = sort;
      return p.e;
    }
    if (p.e->sort != sort) {
      Fail(ErrorCode::kTypeError,
           "expected " + std::string(SortName(sort)) + ", found " +
               std::string(SortName(p.e->sort)),
           pos);
    }
    return p.e;
  }

  static std::shared_ptr<Expr> Node(ExprKind kind, Sort sort, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->sort = sort;
    e->pos = pos;
    return e;
  }

  Parsed ParseExpr() { return ParseOr(); }

  Parsed ParseOr() {
    const SourcePos pos = Peek().pos;
    Parsed first = ParseAnd();
    if (!PeekIdent("or")) return first;
    auto e = Node(ExprKind::kOr, Sort::kBool, pos);
    e->args.push_back(Expect(std::move(first), Sort::kBool, pos));
    while (PeekIdent("or")) {
      Next();
      const SourcePos p = Peek().pos;
      e->args.push_back(Expect(ParseAnd(), Sort::kBool, p));
    }
    return {e};
  }

  Parsed ParseAnd() {
    const SourcePos pos = Peek().pos;
    Parsed first = ParseNot();
    if (!PeekIdent("and")) return first;
    auto e = Node(ExprKind::kAnd, Sort::kBool, pos);
    e->args.push_back(Expect(std::move(first), Sort::kBool, pos));
    while (PeekIdent("and")) {
      Next();
      const SourcePos p = Peek().pos;
      e->args.push_back(Expect(ParseNot(), Sort::kBool, p));
    }
    return {e};
  }

  Parsed ParseNot() {
    if (PeekIdent("not")) {
      const SourcePos pos = Next().pos;
      const SourcePos p = Peek().pos;
      auto e = Node(ExprKind::kNot, Sort::kBool, pos);
      e->args.push_back(Expect(ParseNot(), Sort::kBool, p));
      return {e};
    }
    return ParseCmp();
  }

  Parsed ParseCmp() {
    const SourcePos pos = Peek().pos;
    Parsed lhs = ParsePrimary();
    static const std::pair<const char*, ExprKind> kOps[] = {
        {"==", ExprKind::kEq}, {"!=", ExprKind::kNe}, {"<", ExprKind::kLt},
        {"<=", ExprKind::kLe}, {">", ExprKind::kGt},  {">=", ExprKind::kGe}};
    for (const auto& [text, kind] : kOps) {
      if (!PeekPunct(text)) continue;
      Next();
      const SourcePos rpos = Peek().pos;
      Parsed rhs = ParsePrimary();
      ExprPtr l, r;
      if (lhs.untyped && rhs.untyped) {
        Fail(ErrorCode::kTypeError, "cannot infer the sort of compared literals", pos);
      } else if (lhs.untyped) {
        r = rhs.e;
        l = Expect(std::move(lhs), r->sort, pos);
      } else {
        l = lhs.e;
        r = Expect(std::move(rhs), l->sort, rpos);
      }
      if (l->sort == Sort::kPacket) {
        Fail(ErrorCode::kTypeError, "packets cannot be compared", pos);
      }
      if (kind != ExprKind::kEq && kind != ExprKind::kNe && l->sort != Sort::kPort) {
        Fail(ErrorCode::kTypeError, "ordering comparisons apply to ports only", pos);
      }
      auto e = Node(kind, Sort::kBool, pos);
      e->args = {l, r};
      return {e};
    }
    return lhs;
  }

  Parsed ParsePrimary() {
    const Token t = Peek();
    if (t.kind == Tok::kInt) {
      Next();
      auto e = Node(ExprKind::kLiteral, Sort::kPort, t.pos);
      const long long v = std::stoll(t.text);
      if (v > 65535) Fail(ErrorCode::kTypeError, "port literal out of range", t.pos);
      e->literal = Value(static_cast<std::int64_t>(v));
      return {e};
    }
    if (t.kind == Tok::kString) {
      Next();
      auto e = Node(ExprKind::kLiteral, Sort::kAddress, t.pos);
      e->literal = Value(t.text);
      return {e, true};
    }
    if (PeekPunct("(")) {
      Next();
      Parsed inner = ParseExpr();
      Punct(")");
      return inner;
    }
    if (t.kind != Tok::kIdent) Fail("expected an expression, found '" + t.text + "'");
    if (t.text == "true" || t.text == "false") {
      Next();
      auto e = Node(ExprKind::kLiteral, Sort::kBool, t.pos);
      e->literal = Value(t.text == "true");
      return {e};
    }
    if (t.text == "packet") return ParseConstruct();
    if (t.text == "has") {
      Next();
      const SourcePos npos = Peek().pos;
      const std::string name = Ident("state map name");
      const TableDecl* decl = model_.FindState(name);
      if (!decl) {
        Fail(model_.FindConfig(name) ? ErrorCode::kTypeError : ErrorCode::kUnknownIdentifier,
             "'has' expects a state map, found '" + name + "'", npos);
      }
      if (decl->value_sort == Sort::kBool) {
        Fail(ErrorCode::kTypeError,
             "'has' applies to value maps; read boolean maps directly", npos);
      }
      auto e = Node(ExprKind::kHas, Sort::kBool, t.pos);
      e->name = name;
      e->args = ParseKeys(decl->key_sorts, name);
      return {e};
    }
    if (IsKeyword(t.text)) Fail("unexpected keyword '" + t.text + "'");
    Next();
    if (PeekPunct(".")) {
      if (t.text != packet_var_) {
        Fail(ErrorCode::kNonLocalState,
             "'" + t.text + ".' refers to state outside this model", t.pos);
      }
      Next();
      const SourcePos fpos = Peek().pos;
      const std::string fname = Ident("packet field");
      auto field = ParseFieldName(fname);
      if (!field) Fail(ErrorCode::kUnknownIdentifier, "unknown packet field '" + fname + "'", fpos);
      auto e = Node(ExprKind::kField, FieldSort(*field), t.pos);
      e->name = t.text;
      e->field = *field;
      return {e};
    }
    if (PeekPunct("[")) {
      if (const TableDecl* c = model_.FindConfig(t.text)) {
        auto e = Node(ExprKind::kConfigRead, c->value_sort, t.pos);
        e->name = t.text;
        e->args = ParseKeys(c->key_sorts, t.text);
        return {e};
      }
      if (const TableDecl* s = model_.FindState(t.text)) {
        auto e = Node(ExprKind::kStateRead, s->value_sort, t.pos);
        e->name = t.text;
        e->args = ParseKeys(s->key_sorts, t.text);
        return {e};
      }
      Fail(ErrorCode::kUnknownIdentifier, "unknown table '" + t.text + "'", t.pos);
    }
    if (PeekPunct("(")) {
      if (t.text == model_.name) {
        Fail(ErrorCode::kLoopDisallowed, "recursive invocation of '" + t.text + "'",
             t.pos);
      }
      const FuncDecl* f = model_.FindFunc(t.text);
      if (!f) Fail(ErrorCode::kUnknownIdentifier, "unknown function '" + t.text + "'", t.pos);
      Next();
      auto e = Node(ExprKind::kCall, f->result_sort, t.pos);
      e->name = t.text;
      if (!PeekPunct(")")) {
        while (true) {
          const SourcePos apos = Peek().pos;
          Parsed a = ParseExpr();
          if (e->args.size() >= f->arg_sorts.size()) {
            Fail(ErrorCode::kTypeError, "too many arguments to '" + t.text + "'", apos);
          }
          e->args.push_back(Expect(std::move(a), f->arg_sorts[e->args.size()], apos));
          if (!PeekPunct(",")) break;
          Next();
        }
      }
      Punct(")");
      if (e->args.size() != f->arg_sorts.size()) {
        Fail(ErrorCode::kTypeError, "wrong number of arguments to '" + t.text + "'",
             t.pos);
      }
      return {e};
    }
    if (t.text == packet_var_) {
      auto e = Node(ExprKind::kPacketVar, Sort::kPacket, t.pos);
      e->name = t.text;
      return {e};
    }
    if (const TableDecl* c = model_.FindConfig(t.text); c && c->key_sorts.empty()) {
      auto e = Node(ExprKind::kConfigRead, c->value_sort, t.pos);
      e->name = t.text;
      return {e};
    }
    if (model_.FindState(t.text) || model_.FindConfig(t.text)) {
      Fail(ErrorCode::kTypeError, "table '" + t.text + "' needs keys", t.pos);
    }
    Fail(ErrorCode::kUnknownIdentifier, "unknown identifier '" + t.text + "'", t.pos);
  }

  Parsed ParseConstruct() {
    const SourcePos pos = Next().pos;
    auto e = Node(ExprKind::kConstruct, Sort::kPacket, pos);
    Punct("(");
    bool first = true;
    while (!PeekPunct(")")) {
      if (!first) Punct(",");
      const Token t = Peek();
      if (first && t.kind == Tok::kIdent && t.text == packet_var_ && !PeekPunct("=", 1)) {
        Next();
        auto b = Node(ExprKind::kPacketVar, Sort::kPacket, t.pos);
        b->name = t.text;
        e->base = b;
        first = false;
        continue;
      }
      first = false;
      const std::string fname = Ident("packet field");
      auto field = ParseFieldName(fname);
      if (!field) Fail(ErrorCode::kUnknownIdentifier, "unknown packet field '" + fname + "'", t.pos);
      for (const auto& [f, v] : e->overrides) {
        if (f == *field) Fail(ErrorCode::kTypeError, "field '" + fname + "' set twice", t.pos);
      }
      Punct("=");
      const SourcePos vpos = Peek().pos;
      e->overrides.emplace_back(*field, Expect(ParseExpr(), FieldSort(*field), vpos));
    }
    Punct(")");
    if (!e->base) {
      for (Field f : {Field::kSrc, Field::kDst, Field::kSrcPort, Field::kDstPort}) {
        bool set = false;
        for (const auto& [g, v] : e->overrides) set = set || g == f;
        if (!set) {
          Fail(ErrorCode::kTypeError,
               "packet without a base must set " + std::string(FieldName(f)), pos);
        }
      }
    }
    return {e};
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  MiddleboxModel model_;
  std::string packet_var_;
  std::set<std::string> names_;
};

// A value-map read m[k] is defined only where `has m[k]` is known to hold:
// in a conjunction after the test, or in the branch it guards.
class PresenceChecker {
 public:
  void CheckBlock(const Block& block, std::set<std::string> facts) {
    for (const Stmt& s : block) {
      switch (s.kind) {
        case StmtKind::kRecv: break;
        case StmtKind::kSend:
        case StmtKind::kSet:
          CheckExpr(s.expr, facts);
          for (const ExprPtr& k : s.keys) CheckExpr(k, facts);
          break;
        case StmtKind::kIf:
          for (const Branch& b : s.branches) {
            std::set<std::string> inner = facts;
            CheckExpr(b.guard, inner);
            std::set<std::string> branch_facts = facts;
            Collect(b.guard, branch_facts);
            CheckBlock(b.body, branch_facts);
          }
          if (s.else_block) CheckBlock(*s.else_block, facts);
          break;
      }
    }
  }

 private:
  static std::string Key(const Expr& e) {
    return e.name + "[" + PrintList(e.args) + "]";
  }

  // Facts established by `e` being true.
  static void Collect(const ExprPtr& e, std::set<std::string>& facts) {
    if (e->kind == ExprKind::kHas) facts.insert(Key(*e));
    if (e->kind == ExprKind::kAnd) {
      for (const ExprPtr& a : e->args) Collect(a, facts);
    }
  }

  void CheckExpr(const ExprPtr& e, const std::set<std::string>& facts) {
    if (!e) return;
    if (e->kind == ExprKind::kAnd) {
      std::set<std::string> running = facts;
      for (const ExprPtr& a : e->args) {
        CheckExpr(a, running);
        Collect(a, running);
      }
      return;
    }
    if (e->kind == ExprKind::kStateRead && e->sort != Sort::kBool &&
        !facts.count(Key(*e))) {
      throw Error(ErrorCode::kTypeError,
                  "read of '" + Key(*e) + "' must be guarded by 'has " + Key(*e) + "'",
                  e->pos.line, e->pos.column);
    }
    for (const ExprPtr& a : e->args) CheckExpr(a, facts);
    CheckExpr(e->base, facts);
    for (const auto& [f, o] : e->overrides) CheckExpr(o, facts);
  }
};

}  // namespace parser_internal

// Parses and validates one model. Throws mbv::Error on any violation.
inline MiddleboxModel ParseModel(std::string_view source) {
  parser_internal::Parser parser(source);
  MiddleboxModel model = parser.ParseModel();
  parser_internal::PresenceChecker().CheckBlock(model.body, {});
  return model;
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_PARSER_H_
