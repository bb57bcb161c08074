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

#ifndef MBV_DSL_CONFIG_H_
#define MBV_DSL_CONFIG_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbv/dsl/ast.h"
#include "mbv/error.h"

namespace mbv::dsl {

// Concrete contents of one config parameter. Scalars keep only the default.
struct ConfigTable {
  std::map<std::vector<Value>, Value> entries;
  std::optional<Value> default_value;
};

struct InstanceConfig {
  std::map<std::string, ConfigTable> tables;

  Value Lookup(const TableDecl& decl, const std::vector<Value>& key) const {
    auto it = tables.find(decl.name);
    if (it != tables.end()) {
      auto e = it->second.entries.find(key);
      if (e != it->second.entries.end()) return e->second;
      if (it->second.default_value) return *it->second.default_value;
    }
    if (decl.value_sort == Sort::kBool) return Value(false);
    throw Error(ErrorCode::kMissingConfig, "no value for config '" + decl.name + "'");
  }
};

}  // namespace mbv::dsl

#endif  // MBV_DSL_CONFIG_H_
