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

#ifndef MBV_SOLVER_SEXPR_H_
#define MBV_SOLVER_SEXPR_H_

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mbv/error.h"

namespace mbv::solver {

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> list;

  bool IsAtom(std::string_view s) const { return is_atom && atom == s; }
  const SExpr& operator[](size_t i) const { return list.at(i); }
  size_t size() const { return list.size(); }
  std::string ToString() const {
    if (is_atom) return atom;
    std::string out = "(";
    for (size_t i = 0; i < list.size(); ++i) {
      if (i) out += " ";
      out += list[i].ToString();
    }
    return out + ")";
  }
};

class SExprParser {
 public:
  explicit SExprParser(std::string_view text) : text_(text) {}

  bool AtEnd() {
    Skip();
    return pos_ >= text_.size();
  }

  SExpr Next() {
    Skip();
    if (pos_ >= text_.size()) throw Error(ErrorCode::kParseError, "unexpected end of s-expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.is_atom = false;
      while (true) {
        Skip();
        if (pos_ >= text_.size()) throw Error(ErrorCode::kParseError, "unbalanced '('");
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.list.push_back(Next());
      }
    }
    if (c == ')') throw Error(ErrorCode::kParseError, "unexpected ')'");
    SExpr e;
    if (c == '|') {
      const size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw Error(ErrorCode::kParseError, "unterminated |");
      e.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return e;
    }
    if (c == '"') {
      size_t end = pos_ + 1;
      while (end < text_.size()) {
        if (text_[end] == '"') {
          if (end + 1 < text_.size() && text_[end + 1] == '"') {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      e.atom = std::string(text_.substr(pos_, end + 1 - pos_));
      pos_ = end + 1;
      return e;
    }
    const size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != ';') {
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

 private:
  void Skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

inline std::vector<SExpr> ParseSExprs(std::string_view text) {
  SExprParser p(text);
  std::vector<SExpr> out;
  while (!p.AtEnd()) out.push_back(p.Next());
  return out;
}

}  // namespace mbv::solver

#endif  // MBV_SOLVER_SEXPR_H_
