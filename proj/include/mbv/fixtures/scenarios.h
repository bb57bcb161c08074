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

#ifndef MBV_FIXTURES_SCENARIOS_H_
#define MBV_FIXTURES_SCENARIOS_H_

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mbv::fixtures {

using nlohmann::json;

// A generated topology document plus the invariants shipped with it.
struct Scenario {
  std::string name;
  json topology;
  json invariants = json::array();
};

namespace scenarios_internal {

inline json Node(const std::string& name, const char* kind) { return {{"name", name}, {"kind", kind}}; }

inline json Inv(const char* kind, const std::string& a, const std::string& b) {
  return {{"kind", kind}, {"a", a}, {"b", b}};
}

inline json Entry(std::vector<std::string> keys, json value) {
  return json::array({json(std::move(keys)), std::move(value)});
}

}  // namespace scenarios_internal

struct EnterpriseOptions {
  int per_class = 3;
  // Quarantined host whose inbound deny rule is deleted (1-based; 0 = none).
  int drop_quarantine_rule = 0;
};

// External host `ext` behind a learning firewall `f`; the internal side is a
// router `core` with external-facing hosts e_k (open both ways), normal hosts
// h_k (outbound only, replies via hole punching) and quarantined hosts q_k
// (denied both ways). The firewall allows by default.
inline Scenario Enterprise(const EnterpriseOptions& o = {}) {
  using namespace scenarios_internal;
  Scenario s;
  s.name = "enterprise";
  json nodes = json::array({Node("ext", "host"), Node("f", "middlebox"), Node("core", "router")});
  json links = json::array({{"ext", "f"}, {"f", "core"}});
  json hosts{{"ext", {"8.8.8.8"}}};
  json core{{"8.8.8.8", "f"}};
  json acl_entries = json::array();
  const char* classes[] = {"e", "h", "q"};
  for (int c = 0; c < 3; ++c) {
    for (int k = 1; k <= o.per_class; ++k) {
      const std::string h = classes[c] + std::to_string(k);
      const std::string addr = "10." + std::to_string(c + 1) + ".0." + std::to_string(k);
      nodes.push_back(Node(h, "host"));
      links.push_back({h, "core"});
      hosts[h] = {addr};
      core[addr] = h;
      if (c == 1) acl_entries.push_back(Entry({"8.8.8.8", addr}, false));
      if (c == 2) {
        acl_entries.push_back(Entry({addr, "8.8.8.8"}, false));
        if (k != o.drop_quarantine_rule) acl_entries.push_back(Entry({"8.8.8.8", addr}, false));
      }
    }
  }
  s.topology = {
      {"nodes", nodes},
      {"links", links},
      {"hosts", hosts},
      {"forwarding", {{"core", core}, {"f", {{"8.8.8.8", "ext"}, {"*", "core"}}}}},
      {"middleboxes",
       {{"f", {{"model", "learning_firewall"},
               {"config", {{"acl", {{"default", true}, {"entries", acl_entries}}}}}}}}}};
  for (int k = 1; k <= o.per_class; ++k) {
    const std::string q = "q" + std::to_string(k);
    s.invariants.push_back(Inv("NodeIsolation", q, "ext"));
    s.invariants.push_back(Inv("NodeIsolation", "ext", q));
  }
  for (int k = 1; k <= o.per_class; ++k) {
    const std::string e = "e" + std::to_string(k);
    s.invariants.push_back(Inv("NodeReachability", e, "ext"));
    s.invariants.push_back(Inv("NodeReachability", "ext", e));
  }
  for (int k = 1; k <= o.per_class; ++k) {
    s.invariants.push_back(Inv("FlowIsolation", "ext", "h" + std::to_string(k)));
  }
  if (o.drop_quarantine_rule) s.name += "_leak";
  return s;
}

struct CacheOptions {
  int clients = 4;
  bool cache_acl = true;
};

// Clients h_k reach servers s1 and s2 through a content cache and a learning
// firewall. Only h1 may see s2: the firewall denies s2 <-> h_k (k > 1) and the
// cache refuses to serve s2-origin content to them.
inline Scenario Cache(const CacheOptions& o = {}) {
  using namespace scenarios_internal;
  Scenario s;
  s.name = o.cache_acl ? "cache" : "cache_noacl";
  json nodes = json::array({Node("cache", "middlebox"), Node("fw", "middlebox"),
                            Node("edge", "router"), Node("s1", "host"), Node("s2", "host")});
  json links = json::array({{"edge", "cache"}, {"cache", "fw"}, {"fw", "s1"}, {"fw", "s2"}});
  json hosts{{"s1", {"192.168.0.1"}}, {"s2", {"192.168.0.2"}}};
  json edge = json::object();
  json fw_acl = json::array();
  json deny = json::array();
  for (int k = 1; k <= o.clients; ++k) {
    const std::string h = "h" + std::to_string(k);
    const std::string addr = "10.0.0." + std::to_string(k);
    nodes.push_back(Node(h, "host"));
    links.push_back({h, "edge"});
    hosts[h] = {addr};
    edge[addr] = h;
    if (k > 1) {
      fw_acl.push_back(Entry({addr, "192.168.0.2"}, false));
      fw_acl.push_back(Entry({"192.168.0.2", addr}, false));
      if (o.cache_acl) deny.push_back(Entry({addr, "s2"}, true));
    }
  }
  edge["*"] = "cache";
  s.topology = {
      {"nodes", nodes},
      {"links", links},
      {"hosts", hosts},
      {"forwarding",
       {{"edge", edge},
        {"cache", {{"192.168.0.*", "fw"}, {"*", "edge"}}},
        {"fw", {{"192.168.0.1", "s1"}, {"192.168.0.2", "s2"}, {"*", "cache"}}}}},
      {"middleboxes",
       {{"cache",
         {{"model", "content_cache"},
          {"config",
           {{"servers", {{"entries", json::array({Entry({"192.168.0.1"}, true),
                                                  Entry({"192.168.0.2"}, true)})}}},
            {"deny", {{"entries", deny}}}}}}},
        {"fw", {{"model", "learning_firewall"},
                {"config", {{"acl", {{"default", true}, {"entries", fw_acl}}}}}}}}}};
  for (int k = 2; k <= o.clients; ++k) {
    s.invariants.push_back(Inv("DataIsolation", "h" + std::to_string(k), "s2"));
  }
  for (int k = 1; k <= o.clients; ++k) {
    s.invariants.push_back(Inv("DataReachability", "h" + std::to_string(k), "s1"));
  }
  return s;
}

struct PermutationOptions {
  int hosts = 5;
  // Flow-parallel box keyed on the address pair; otherwise the shared variant.
  bool flow_parallel = true;
};

// Left hosts l_k and right hosts r_k joined by a permutation box p0 and an ACL
// firewall f (l-side -> p0 -> f -> r-side). Once p0 has seen a flow from l_k
// (k > 1) to r_j it rewrites that flow's destination to r_{j+1} (cyclically).
// The firewall isolates l1 from r1 in both directions.
inline Scenario Permutation(const PermutationOptions& o = {}) {
  using namespace scenarios_internal;
  Scenario s;
  s.name = std::string(o.flow_parallel ? "permutation_" : "permutation_shared_") +
           std::to_string(o.hosts);
  const int left = (o.hosts + 1) / 2;
  const int right = o.hosts - left;
  json nodes = json::array({Node("L", "router"), Node("R", "router"), Node("p0", "middlebox"),
                            Node("f", "middlebox")});
  json links = json::array({{"L", "p0"}, {"p0", "f"}, {"f", "R"}});
  json hosts = json::object();
  json lt = json::object(), rt = json::object();
  auto laddr = [](int k) { return "10.1.0." + std::to_string(k); };
  auto raddr = [](int k) { return "10.2.0." + std::to_string(k); };
  for (int k = 1; k <= left; ++k) {
    const std::string h = "l" + std::to_string(k);
    nodes.push_back(Node(h, "host"));
    links.push_back({h, "L"});
    hosts[h] = {laddr(k)};
    lt[laddr(k)] = h;
  }
  for (int k = 1; k <= right; ++k) {
    const std::string h = "r" + std::to_string(k);
    nodes.push_back(Node(h, "host"));
    links.push_back({h, "R"});
    hosts[h] = {raddr(k)};
    rt[raddr(k)] = h;
  }
  lt["10.2.0.*"] = "p0";
  rt["10.1.0.*"] = "f";
  json rule = json::array(), new_src = json::array(), new_dst = json::array();
  for (int k = 2; k <= left && right >= 2; ++k) {
    const std::string a = laddr(k);
    for (int j = 1; j <= right; ++j) {
      rule.push_back(Entry({a, raddr(j)}, true));
      new_src.push_back(Entry({a, raddr(j)}, a));
      new_dst.push_back(Entry({a, raddr(j)}, raddr(j % right + 1)));
    }
  }
  json identity_src = laddr(1);
  s.topology = {
      {"nodes", nodes},
      {"links", links},
      {"hosts", hosts},
      {"flow_key", {"src", "dst"}},
      {"forwarding",
       {{"L", lt},
        {"R", rt},
        {"p0", {{"10.2.0.*", "f"}, {"*", "L"}}},
        {"f", {{"10.2.0.*", "R"}, {"*", "p0"}}}}},
      {"middleboxes",
       {{"p0", {{"model", o.flow_parallel ? "permutation" : "permutation_shared"},
                {"config",
                 {{"rule", {{"entries", rule}}},
                  {"new_src", {{"default", identity_src}, {"entries", new_src}}},
                  {"new_dst", {{"default", raddr(1)}, {"entries", new_dst}}}}}}},
        {"f", {{"model", "acl_firewall"},
               {"config",
                {{"acl", {{"default", true},
                          {"entries", json::array({Entry({laddr(1), raddr(1)}, false),
                                                   Entry({raddr(1), laddr(1)}, false)})}}}}}}}}}};
  s.invariants.push_back(Inv("NodeIsolation", "l1", "r1"));
  s.invariants.push_back(Inv("NodeIsolation", "r1", "l1"));
  if (right >= 2) {
    s.invariants.push_back(Inv("NodeReachability", "l1", "r2"));
    s.invariants.push_back(Inv("NodeReachability", "r2", "l1"));
  }
  return s;
}

// Hosts e_0..e_{n-1} send everything to forwarder a, which sends traffic for
// the first half of the addresses via c and the rest via d; both hand it to
// b, which delivers. Traversal of c holds exactly for destinations in the
// first half.
inline Scenario Traversal(int n = 6) {
  using namespace scenarios_internal;
  Scenario s;
  s.name = "traversal";
  json nodes = json::array();
  for (const char* m : {"a", "b", "c", "d"}) nodes.push_back(Node(m, "middlebox"));
  json links = json::array({{"a", "c"}, {"a", "d"}, {"c", "b"}, {"d", "b"}});
  json hosts = json::object(), fwd = json::object(), a = json::object(), b = json::object();
  for (int i = 0; i < n; ++i) {
    const std::string h = "e" + std::to_string(i);
    const std::string addr = "10.0.0." + std::to_string(i + 1);
    nodes.push_back(Node(h, "host"));
    links.push_back({h, "a"});
    links.push_back({"b", h});
    hosts[h] = {addr};
    fwd[h] = {{"*", "a"}};
    a[addr] = i < n / 2 ? "c" : "d";
    b[addr] = h;
  }
  fwd["a"] = a;
  fwd["b"] = b;
  fwd["c"] = {{"*", "b"}};
  fwd["d"] = {{"*", "b"}};
  json boxes = json::object();
  for (const char* m : {"a", "b", "c", "d"}) boxes[m] = {{"model", "forwarder"}};
  s.topology = {{"nodes", nodes}, {"links", links}, {"hosts", hosts},
                {"forwarding", fwd}, {"middleboxes", boxes}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      json inv = Inv("NodeTraversal", "e" + std::to_string(i), "e" + std::to_string(j));
      inv["target"] = "c";
      s.invariants.push_back(inv);
    }
  }
  return s;
}

// The constant-packet box k feeding an ACL firewall: k answers every packet
// with one fixed packet from a to b.
inline Scenario ConstantComposition() {
  using namespace scenarios_internal;
  Scenario s;
  s.name = "constant";
  s.topology = {
      {"nodes", json::array({Node("a", "host"), Node("b", "host"), Node("k", "middlebox"),
                             Node("f", "middlebox")})},
      {"links", json::array({{"a", "k"}, {"k", "f"}, {"f", "b"}})},
      {"hosts", {{"a", {"10.0.0.1"}}, {"b", {"10.0.0.2"}}}},
      {"forwarding",
       {{"k", {{"10.0.0.2", "f"}, {"*", "a"}}}, {"f", {{"10.0.0.2", "b"}, {"*", "k"}}}}},
      {"middleboxes",
       {{"k", {{"model", "constant_source"},
               {"config", {{"out_src", "10.0.0.1"}, {"out_dst", "10.0.0.2"},
                           {"out_src_port", 7}, {"out_dst_port", 7}}}}},
        {"f", {{"model", "acl_firewall"},
               {"config", {{"acl", {{"default", true}}}}}}}}}};
  s.invariants.push_back(Inv("NodeIsolation", "a", "b"));
  s.invariants.push_back(Inv("NodeIsolation", "b", "a"));
  return s;
}

// Two hosts a, b behind a single box of model `model` with `config`.
inline Scenario Pair(const std::string& name, const std::string& model, json config) {
  using namespace scenarios_internal;
  Scenario s;
  s.name = name;
  s.topology = {
      {"nodes", json::array({Node("a", "host"), Node("m", "middlebox"), Node("b", "host")})},
      {"links", json::array({{"a", "m"}, {"m", "b"}})},
      {"hosts", {{"a", {"10.0.0.1"}}, {"b", {"10.0.0.2"}}}},
      {"forwarding", {{"m", {{"10.0.0.1", "a"}, {"10.0.0.2", "b"}}}}},
      {"middleboxes", {{"m", {{"model", model}, {"config", std::move(config)}}}}}};
  s.invariants = json::array({Inv("NodeIsolation", "a", "b"), Inv("NodeIsolation", "b", "a"),
                              Inv("FlowIsolation", "a", "b"), Inv("FlowIsolation", "b", "a"),
                              Inv("NodeReachability", "a", "b"), Inv("DataIsolation", "b", "a")});
  return s;
}

// Desk-scale networks with at most three hosts and two middleboxes, in the
// range of exhaustive enumeration.
inline std::vector<Scenario> MiniScenarios() {
  using namespace scenarios_internal;
  std::vector<Scenario> out;
  out.push_back(Enterprise({1, 0}));
  out.back().name = "mini_enterprise";
  // Three-host cuts of the larger scenarios.
  for (Scenario& s : out) {
    json nodes = json::array();
    for (const json& n : s.topology["nodes"]) {
      if (n["name"] != "e1") nodes.push_back(n);
    }
    s.topology["nodes"] = nodes;
    json links = json::array();
    for (const json& l : s.topology["links"]) {
      if (l[0] != "e1") links.push_back(l);
    }
    s.topology["links"] = links;
    s.topology["hosts"].erase("e1");
    s.topology["forwarding"]["core"].erase("10.1.0.1");
    json invs = json::array();
    for (const json& i : s.invariants) {
      if (i["a"] != "e1" && i["b"] != "e1") invs.push_back(i);
    }
    invs.push_back(Inv("NodeIsolation", "h1", "ext"));
    invs.push_back(Inv("FlowIsolation", "h1", "ext"));
    s.invariants = invs;
  }
  Scenario leak = out.back();
  leak.name = "mini_enterprise_leak";
  leak.topology["middleboxes"]["f"]["config"]["acl"]["entries"].erase(2);
  out.push_back(leak);

  for (bool acl : {true, false}) {
    Scenario c = Cache({2, acl});
    c.name = acl ? "mini_cache" : "mini_cache_noacl";
    json nodes = json::array();
    for (const json& n : c.topology["nodes"]) {
      if (n["name"] != "s1") nodes.push_back(n);
    }
    c.topology["nodes"] = nodes;
    json links = json::array();
    for (const json& l : c.topology["links"]) {
      if (l[1] != "s1") links.push_back(l);
    }
    c.topology["links"] = links;
    c.topology["hosts"].erase("s1");
    c.topology["forwarding"]["fw"].erase("192.168.0.1");
    c.topology["middleboxes"]["cache"]["config"]["servers"]["entries"].erase(0);
    c.invariants = json::array({Inv("DataIsolation", "h2", "s2"), Inv("DataReachability", "h1", "s2"),
                                Inv("NodeIsolation", "h2", "s2"), Inv("NodeIsolation", "s2", "h2"),
                                Inv("NodeReachability", "h1", "s2")});
    out.push_back(std::move(c));
  }

  out.push_back(Pair("open_acl", "acl_firewall", {{"acl", {{"default", true}}}}));
  out.push_back(Pair("closed_acl", "acl_firewall", {{"acl", {{"default", false}}}}));
  out.push_back(Pair("one_way_acl", "acl_firewall",
                     {{"acl", {{"entries", json::array({Entry({"10.0.0.1", "10.0.0.2"}, true)})}}}}));
  out.push_back(Pair("hole_punch", "learning_firewall",
                     {{"acl", {{"entries", json::array({Entry({"10.0.0.1", "10.0.0.2"}, true)})}}}}));
  out.push_back(Pair("dpi", "dpi_firewall", json::object()));
  out.push_back(Pair("forward", "forwarder", json::object()));
  return out;
}

// Every scenario shipped under fixtures/.
inline std::vector<Scenario> ShippedScenarios() {
  std::vector<Scenario> out{Enterprise(), Enterprise({3, 1}), Cache(), Cache({4, false}),
                            Traversal(), ConstantComposition()};
  for (int n : {5, 10, 20}) {
    out.push_back(Permutation({n, true}));
    out.push_back(Permutation({n, false}));
  }
  for (Scenario& s : MiniScenarios()) out.push_back(std::move(s));
  return out;
}

}  // namespace mbv::fixtures

#endif  // MBV_FIXTURES_SCENARIOS_H_
