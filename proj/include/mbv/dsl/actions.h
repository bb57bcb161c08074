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

#ifndef MBV_DSL_ACTIONS_H_
#define MBV_DSL_ACTIONS_H_

#include <vector>

#include "mbv/dsl/ast.h"

namespace mbv::dsl {

struct PathLiteral {
  ExprPtr guard;
  bool positive = true;
};

// A send or set statement together with the guards on its unique AST path.
struct ActionSite {
  const Stmt* stmt = nullptr;
  std::vector<PathLiteral> path;
  bool is_send() const { return stmt->kind == StmtKind::kSend; }
};

namespace actions_internal {

inline void Walk(const Block& block, std::vector<PathLiteral>& path,
                 std::vector<ActionSite>& out) {
  for (const Stmt& s : block) {
    switch (s.kind) {
      case StmtKind::kRecv: break;
      case StmtKind::kSend:
      case StmtKind::kSet: out.push_back({&s, path}); break;
      case StmtKind::kIf: {
        const size_t mark = path.size();
        for (const Branch& b : s.branches) {
          path.push_back({b.guard, true});
          Walk(b.body, path, out);
          path.back().positive = false;
        }
        if (s.else_block) Walk(*s.else_block, path, out);
        path.resize(mark);
        break;
      }
    }
  }
}

}  // namespace actions_internal

// Action sites in source order. Pointers refer into `model.body`.
inline std::vector<ActionSite> EnumerateActions(const MiddleboxModel& model) {
  std::vector<ActionSite> out;
  std::vector<PathLiteral> path;
  actions_internal::Walk(model.body, path, out);
  return out;
}

}  // namespace mbv::dsl

#endif  // MBV_DSL_ACTIONS_H_
