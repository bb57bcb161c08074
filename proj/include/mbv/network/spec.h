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

#ifndef MBV_NETWORK_SPEC_H_
#define MBV_NETWORK_SPEC_H_

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/ast.h"
#include "mbv/dsl/classify.h"
#include "mbv/dsl/config.h"
#include "mbv/dsl/parser.h"
#include "mbv/error.h"

namespace mbv::network {

enum class NodeKind { kHost, kMiddlebox, kRouter };

inline std::string_view NodeKindName(NodeKind k) {
  switch (k) {
    case NodeKind::kHost: return "host";
    case NodeKind::kMiddlebox: return "middlebox";
    case NodeKind::kRouter: return "router";
  }
  return "?";
}

struct MiddleboxInstance {
  std::string name;
  std::string model;
  dsl::InstanceConfig config;
};

// One forwarding rule: exact address, "prefix*" or "*".
struct Route {
  std::string pattern;
  std::string next_hop;
};

using ModelLibrary = std::map<std::string, dsl::MiddleboxModel>;

struct NetworkSpec {
  std::map<std::string, NodeKind> nodes;
  std::vector<std::string> node_order;
  std::set<std::pair<std::string, std::string>> links;  // both orientations
  std::map<std::string, std::vector<Route>> forwarding;
  std::map<std::string, std::vector<std::string>> hosts;
  std::map<std::string, MiddleboxInstance> middleboxes;
  dsl::FlowKeySpec flow_key;
  ModelLibrary models;

  std::vector<std::string> HostNames() const {
    std::vector<std::string> out;
    for (const std::string& n : node_order) {
      if (nodes.at(n) == NodeKind::kHost) out.push_back(n);
    }
    return out;
  }

  std::vector<std::string> MiddleboxNames() const {
    std::vector<std::string> out;
    for (const std::string& n : node_order) {
      if (nodes.at(n) == NodeKind::kMiddlebox) out.push_back(n);
    }
    return out;
  }

  // All bound addresses in host order.
  std::vector<std::string> Addresses() const {
    std::vector<std::string> out;
    for (const std::string& h : HostNames()) {
      for (const std::string& a : hosts.at(h)) out.push_back(a);
    }
    return out;
  }

  std::optional<std::string> OwnerOf(const std::string& addr) const {
    for (const auto& [h, addrs] : hosts) {
      if (std::find(addrs.begin(), addrs.end(), addr) != addrs.end()) return h;
    }
    return std::nullopt;
  }

  std::vector<std::string> Neighbors(const std::string& n) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : links) {
      if (a == n) out.push_back(b);
    }
    return out;
  }

  const dsl::MiddleboxModel& ModelOf(const std::string& inst) const {
    return models.at(middleboxes.at(inst).model);
  }

  bool IsKind(const std::string& n, NodeKind k) const {
    auto it = nodes.find(n);
    return it != nodes.end() && it->second == k;
  }
};

inline bool ValidName(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses every *.mbx file in `dir`, keyed by model name.
inline ModelLibrary LoadModelDirectory(const std::string& dir) {
  ModelLibrary lib;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "model directory not found: " + dir);
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".mbx") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    dsl::MiddleboxModel m = dsl::ParseModel(ReadFile(f.string()));
    lib[m.name] = std::move(m);
  }
  return lib;
}

namespace spec_internal {

using nlohmann::json;

inline dsl::Value JsonValue(const json& j, dsl::Sort sort, const std::string& where) {
  switch (sort) {
    case dsl::Sort::kBool:
      if (j.is_boolean()) return dsl::Value(j.get<bool>());
      break;
    case dsl::Sort::kPort:
      if (j.is_number_integer()) {
        const auto v = j.get<std::int64_t>();
        if (v < 0 || v > 65535) throw Error(ErrorCode::kTypeError, where + ": port out of range");
        return dsl::Value(v);
      }
      break;
    default:
      if (j.is_string()) return dsl::Value(j.get<std::string>());
      break;
  }
  throw Error(ErrorCode::kTypeError,
              where + ": expected " + std::string(dsl::SortName(sort)) + ", got " + j.dump());
}

inline void CheckValue(const NetworkSpec& net, const dsl::Value& v, dsl::Sort sort,
                       const std::string& where) {
  if (sort == dsl::Sort::kAddress && !net.OwnerOf(std::get<std::string>(v))) {
    throw Error(ErrorCode::kUnboundAddress,
                where + ": address " + std::get<std::string>(v) + " is not bound to a host");
  }
  if (sort == dsl::Sort::kNode && !net.nodes.count(std::get<std::string>(v))) {
    throw Error(ErrorCode::kInvalidTopology, where + ": unknown node " + std::get<std::string>(v));
  }
}

inline const json& Require(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kParseError, std::string("missing key '") + key + "'");
  return j.at(key);
}

}  // namespace spec_internal

// Parses and validates a topology document against the model library.
inline NetworkSpec LoadNetwork(std::string_view source, const ModelLibrary& models) {
  using spec_internal::json;
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("topology: ") + e.what());
  }
  NetworkSpec net;
  net.models = models;
  try {
    for (const json& n : spec_internal::Require(doc, "nodes")) {
      const std::string name = n.at("name").get<std::string>();
      const std::string kind = n.at("kind").get<std::string>();
      if (!ValidName(name)) throw Error(ErrorCode::kInvalidTopology, "invalid node name '" + name + "'");
      NodeKind k;
      if (kind == "host") k = NodeKind::kHost;
      else if (kind == "middlebox") k = NodeKind::kMiddlebox;
      else if (kind == "router") k = NodeKind::kRouter;
      else throw Error(ErrorCode::kInvalidTopology, "unknown node kind '" + kind + "'");
      if (!net.nodes.emplace(name, k).second) {
        throw Error(ErrorCode::kInvalidTopology, "duplicate node '" + name + "'");
      }
      net.node_order.push_back(name);
    }
    if (doc.contains("links")) {
      for (const json& l : doc.at("links")) {
        const std::string a = l.at(0).get<std::string>(), b = l.at(1).get<std::string>();
        if (!net.nodes.count(a) || !net.nodes.count(b) || a == b) {
          throw Error(ErrorCode::kInvalidTopology, "bad link " + l.dump());
        }
        net.links.insert({a, b});
        net.links.insert({b, a});
      }
    }
    std::set<std::string> seen_addr;
    if (doc.contains("hosts")) {
      for (const auto& [h, addrs] : doc.at("hosts").items()) {
        if (!net.IsKind(h, NodeKind::kHost)) {
          throw Error(ErrorCode::kInvalidTopology, "address binding for non-host '" + h + "'");
        }
        for (const json& a : addrs) {
          const std::string s = a.get<std::string>();
          if (!ValidName(s)) throw Error(ErrorCode::kInvalidTopology, "invalid address '" + s + "'");
          if (!seen_addr.insert(s).second) {
            throw Error(ErrorCode::kDuplicateAddress, "address " + s + " bound to two hosts");
          }
          net.hosts[h].push_back(s);
        }
      }
    }
    for (const std::string& h : net.HostNames()) {
      if (net.hosts[h].empty()) {
        throw Error(ErrorCode::kUnboundAddress, "host '" + h + "' has no address");
      }
    }
    if (doc.contains("forwarding")) {
      for (const auto& [node, table] : doc.at("forwarding").items()) {
        if (!net.nodes.count(node)) {
          throw Error(ErrorCode::kInvalidTopology, "forwarding table for unknown node '" + node + "'");
        }
        for (const auto& [pattern, hop] : table.items()) {
          std::string next;
          if (hop.is_array()) {
            if (hop.size() != 1) {
              throw Error(ErrorCode::kMultipathRejected,
                          node + ": several next hops for " + pattern);
            }
            next = hop.at(0).get<std::string>();
          } else {
            next = hop.get<std::string>();
          }
          if (!net.links.count({node, next})) {
            throw Error(ErrorCode::kInvalidTopology,
                        node + ": next hop " + next + " is not a neighbor");
          }
          const bool wildcard = !pattern.empty() && pattern.back() == '*';
          if (!wildcard && !net.OwnerOf(pattern)) {
            throw Error(ErrorCode::kUnboundAddress, node + ": route for unbound address " + pattern);
          }
          net.forwarding[node].push_back({pattern, next});
        }
      }
    }
    if (doc.contains("flow_key")) {
      net.flow_key.fields.clear();
      for (const json& f : doc.at("flow_key")) {
        auto field = dsl::ParseFieldName(f.get<std::string>());
        if (!field || dsl::FieldSort(*field) == dsl::Sort::kNode ||
            dsl::FieldSort(*field) == dsl::Sort::kBody) {
          throw Error(ErrorCode::kParseError, "bad flow_key field " + f.dump());
        }
        net.flow_key.fields.push_back(*field);
      }
    }
    const json empty = json::object();
    const json& boxes = doc.contains("middleboxes") ? doc.at("middleboxes") : empty;
    for (const std::string& m : net.MiddleboxNames()) {
      if (!boxes.contains(m)) {
        throw Error(ErrorCode::kInvalidTopology, "middlebox '" + m + "' has no instance entry");
      }
    }
    for (const auto& [inst, spec] : boxes.items()) {
      if (!net.IsKind(inst, NodeKind::kMiddlebox)) {
        throw Error(ErrorCode::kInvalidTopology, "instance '" + inst + "' is not a middlebox node");
      }
      MiddleboxInstance mi;
      mi.name = inst;
      mi.model = spec.at("model").get<std::string>();
      auto it = models.find(mi.model);
      if (it == models.end()) throw Error(ErrorCode::kUnknownModel, inst + ": unknown model '" + mi.model + "'");
      const dsl::MiddleboxModel& model = it->second;
      const json& cfg = spec.contains("config") ? spec.at("config") : empty;
      for (const auto& [param, value] : cfg.items()) {
        if (!model.FindConfig(param)) {
          throw Error(ErrorCode::kUnknownIdentifier, inst + ": model has no config '" + param + "'");
        }
      }
      for (const dsl::TableDecl& d : model.config) {
        const std::string where = inst + "." + d.name;
        if (!cfg.contains(d.name)) throw Error(ErrorCode::kMissingConfig, where + " not supplied");
        const json& v = cfg.at(d.name);
        dsl::ConfigTable t;
        if (d.key_sorts.empty()) {
          t.default_value = spec_internal::JsonValue(v, d.value_sort, where);
          spec_internal::CheckValue(net, *t.default_value, d.value_sort, where);
        } else {
          if (!v.is_object()) throw Error(ErrorCode::kTypeError, where + ": expected a table");
          if (v.contains("default")) {
            t.default_value = spec_internal::JsonValue(v.at("default"), d.value_sort, where);
            spec_internal::CheckValue(net, *t.default_value, d.value_sort, where);
          }
          if (v.contains("entries")) {
            for (const json& e : v.at("entries")) {
              const json& keys = e.at(0);
              if (!keys.is_array() || keys.size() != d.key_sorts.size()) {
                throw Error(ErrorCode::kTypeError, where + ": entry key arity " + e.dump());
              }
              std::vector<dsl::Value> key;
              for (size_t i = 0; i < keys.size(); ++i) {
                key.push_back(spec_internal::JsonValue(keys[i], d.key_sorts[i], where));
                spec_internal::CheckValue(net, key.back(), d.key_sorts[i], where);
              }
              dsl::Value val = spec_internal::JsonValue(e.at(1), d.value_sort, where);
              spec_internal::CheckValue(net, val, d.value_sort, where);
              t.entries[key] = val;
            }
          }
          if (!t.default_value && t.entries.empty() && d.value_sort != dsl::Sort::kBool) {
            throw Error(ErrorCode::kMissingConfig, where + " has neither entries nor default");
          }
        }
        mi.config.tables[d.name] = std::move(t);
      }
      net.middleboxes[inst] = std::move(mi);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("topology: ") + e.what());
  }
  return net;
}

inline NetworkSpec LoadNetworkFile(const std::string& path, const ModelLibrary& models) {
  return LoadNetwork(ReadFile(path), models);
}

}  // namespace mbv::network

#endif  // MBV_NETWORK_SPEC_H_
