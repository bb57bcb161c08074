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

#ifndef MBV_VERIFIER_INVARIANT_H_
#define MBV_VERIFIER_INVARIANT_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mbv/error.h"
#include "mbv/network/spec.h"

namespace mbv::verifier {

enum class InvariantKind {
  kNodeIsolation,
  kNodeReachability,
  kFlowIsolation,
  kDataIsolation,
  kDataReachability,
  kNodeTraversal,
  kLinkTraversal,
};

inline constexpr InvariantKind kAllInvariantKinds[] = {
    InvariantKind::kNodeIsolation, InvariantKind::kNodeReachability,
    InvariantKind::kFlowIsolation, InvariantKind::kDataIsolation,
    InvariantKind::kDataReachability, InvariantKind::kNodeTraversal,
    InvariantKind::kLinkTraversal};

inline std::string_view InvariantKindName(InvariantKind k) {
  switch (k) {
    case InvariantKind::kNodeIsolation: return "NodeIsolation";
    case InvariantKind::kNodeReachability: return "NodeReachability";
    case InvariantKind::kFlowIsolation: return "FlowIsolation";
    case InvariantKind::kDataIsolation: return "DataIsolation";
    case InvariantKind::kDataReachability: return "DataReachability";
    case InvariantKind::kNodeTraversal: return "NodeTraversal";
    case InvariantKind::kLinkTraversal: return "LinkTraversal";
  }
  return "?";
}

inline std::optional<InvariantKind> ParseInvariantKind(std::string_view s) {
  for (InvariantKind k : kAllInvariantKinds) {
    if (InvariantKindName(k) == s) return k;
  }
  return std::nullopt;
}

// True for kinds whose defining query being satisfiable means Holds.
inline bool IsReachabilityKind(InvariantKind k) {
  return k == InvariantKind::kNodeReachability || k == InvariantKind::kDataReachability ||
         k == InvariantKind::kLinkTraversal;
}

struct Invariant {
  InvariantKind kind = InvariantKind::kNodeIsolation;
  std::string a;
  std::string b;
  std::string target;  // middlebox for NodeTraversal
  std::optional<std::pair<std::string, std::string>> link;  // for LinkTraversal

  std::string Label() const {
    std::string out = std::string(InvariantKindName(kind)) + "(" + a + "," + b;
    if (!target.empty()) out += "," + target;
    if (link) out += "," + link->first + "-" + link->second;
    return out + ")";
  }

  nlohmann::json ToJson() const {
    nlohmann::json j{{"kind", InvariantKindName(kind)}, {"a", a}, {"b", b}};
    if (!target.empty()) j["target"] = target;
    if (link) j["target"] = {link->first, link->second};
    return j;
  }
};

inline void ValidateInvariant(const Invariant& inv, const network::NetworkSpec& net) {
  using network::NodeKind;
  if (!net.IsKind(inv.a, NodeKind::kHost) || !net.IsKind(inv.b, NodeKind::kHost) ||
      inv.a == inv.b) {
    throw Error(ErrorCode::kUnsupportedQuery,
                inv.Label() + ": endpoints must be two distinct hosts");
  }
  if (inv.kind == InvariantKind::kNodeTraversal && !net.IsKind(inv.target, NodeKind::kMiddlebox)) {
    throw Error(ErrorCode::kUnsupportedQuery, inv.Label() + ": target must be a middlebox");
  }
  if (inv.kind == InvariantKind::kLinkTraversal &&
      (!inv.link || !net.links.count(*inv.link))) {
    throw Error(ErrorCode::kUnsupportedQuery, inv.Label() + ": target must be a link");
  }
}

inline std::vector<Invariant> ParseInvariants(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("invariants: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kParseError, "invariants: expected a list");
  std::vector<Invariant> out;
  try {
    for (const auto& j : doc) {
      Invariant inv;
      const std::string kind = j.at("kind").get<std::string>();
      auto k = ParseInvariantKind(kind);
      if (!k) throw Error(ErrorCode::kParseError, "unknown invariant kind '" + kind + "'");
      inv.kind = *k;
      inv.a = j.at("a").get<std::string>();
      inv.b = j.at("b").get<std::string>();
      if (j.contains("target")) {
        const auto& t = j.at("target");
        if (t.is_array() && t.size() == 2) {
          inv.link = {t[0].get<std::string>(), t[1].get<std::string>()};
        } else {
          inv.target = t.get<std::string>();
        }
      }
      if ((inv.kind == InvariantKind::kNodeTraversal && inv.target.empty()) ||
          (inv.kind == InvariantKind::kLinkTraversal && !inv.link)) {
        throw Error(ErrorCode::kParseError, inv.Label() + ": missing target");
      }
      out.push_back(std::move(inv));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("invariants: ") + e.what());
  }
  return out;
}

inline nlohmann::json InvariantsToJson(const std::vector<Invariant>& invs) {
  nlohmann::json j = nlohmann::json::array();
  for (const Invariant& i : invs) j.push_back(i.ToJson());
  return j;
}

}  // namespace mbv::verifier

#endif  // MBV_VERIFIER_INVARIANT_H_
