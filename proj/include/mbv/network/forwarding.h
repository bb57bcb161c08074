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

#ifndef MBV_NETWORK_FORWARDING_H_
#define MBV_NETWORK_FORWARDING_H_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/ast.h"
#include "mbv/error.h"
#include "mbv/logic/formula.h"
#include "mbv/logic/program.h"
#include "mbv/network/spec.h"

namespace mbv::network {

// Longest-prefix next hop of `node` for `addr`. A node without a matching
// rule and exactly one link forwards over that link.
inline std::optional<std::string> NextHop(const NetworkSpec& net, const std::string& node,
                                          const std::string& addr) {
  std::optional<std::string> best;
  int best_len = -1;
  auto it = net.forwarding.find(node);
  if (it != net.forwarding.end()) {
    for (const Route& r : it->second) {
      int len;
      if (!r.pattern.empty() && r.pattern.back() == '*') {
        const std::string prefix = r.pattern.substr(0, r.pattern.size() - 1);
        if (addr.compare(0, prefix.size(), prefix) != 0) continue;
        len = static_cast<int>(prefix.size());
      } else {
        if (r.pattern != addr) continue;
        len = 1 << 20;
      }
      if (len > best_len) {
        best_len = len;
        best = r.next_hop;
      }
    }
  }
  if (best) return best;
  std::vector<std::string> nbrs = net.Neighbors(node);
  if (nbrs.size() == 1) return nbrs[0];
  return std::nullopt;
}

inline bool Detached(const NetworkSpec& net, const std::string& node) {
  return net.Neighbors(node).empty();
}

struct Walk {
  enum class End { kDelivered, kBlackhole, kLoop };
  End end = End::kDelivered;
  std::vector<std::string> path;  // nodes visited, starting at the origin
};

// Follows forwarding from `from` toward `addr` until a host is reached.
inline Walk WalkPath(const NetworkSpec& net, const std::string& from, const std::string& addr) {
  Walk w;
  w.path.push_back(from);
  const std::optional<std::string> owner = net.OwnerOf(addr);
  std::string cur = from;
  while (true) {
    std::optional<std::string> nh = NextHop(net, cur, addr);
    if (!nh) {
      w.end = Walk::End::kBlackhole;
      return w;
    }
    if (std::find(w.path.begin(), w.path.end(), *nh) != w.path.end()) {
      w.path.push_back(*nh);
      w.end = Walk::End::kLoop;
      return w;
    }
    w.path.push_back(*nh);
    if (net.IsKind(*nh, NodeKind::kHost)) {
      w.end = *nh == owner ? Walk::End::kDelivered : Walk::End::kBlackhole;
      return w;
    }
    cur = *nh;
  }
}

// First host or middlebox after `from` on the way to `addr`, routers skipped.
inline std::optional<std::string> NextStop(const NetworkSpec& net, const std::string& from,
                                           const std::string& addr) {
  if (Detached(net, from)) return std::nullopt;
  Walk w = WalkPath(net, from, addr);
  const size_t end = w.end == Walk::End::kLoop ? w.path.size() - 1 : w.path.size();
  for (size_t i = 1; i < end; ++i) {
    if (!net.IsKind(w.path[i], NodeKind::kRouter)) return w.path[i];
  }
  return std::nullopt;
}

// Destination addresses with identical next hops at every node.
inline std::vector<std::vector<std::string>> HeaderClasses(const NetworkSpec& net) {
  std::map<std::vector<std::string>, std::vector<std::string>> groups;
  std::vector<std::vector<std::string>> order;
  for (const std::string& a : net.Addresses()) {
    std::vector<std::string> sig;
    for (const std::string& n : net.node_order) sig.push_back(NextHop(net, n, a).value_or("-"));
    auto [it, fresh] = groups.emplace(sig, std::vector<std::string>{});
    if (fresh) order.push_back(sig);
    it->second.push_back(a);
  }
  std::vector<std::vector<std::string>> out;
  for (const auto& sig : order) out.push_back(groups[sig]);
  return out;
}

struct Finding {
  std::string kind;  // "loop" or "blackhole"
  std::vector<std::string> header_class;
  std::vector<std::string> path;
  bool operator==(const Finding&) const = default;
};

struct ForwardingReport {
  std::vector<Finding> findings;
  // Ordered host pairs without any path (detached hosts).
  std::vector<std::pair<std::string, std::string>> unreachable;

  bool admissible() const { return findings.empty(); }

  nlohmann::json ToJson() const {
    nlohmann::json j = nlohmann::json::object();
    j["admissible"] = admissible();
    j["findings"] = nlohmann::json::array();
    for (const Finding& f : findings) {
      j["findings"].push_back({{"kind", f.kind}, {"headerClass", f.header_class}, {"path", f.path}});
    }
    j["unreachable"] = nlohmann::json::array();
    for (const auto& [a, b] : unreachable) j["unreachable"].push_back({a, b});
    return j;
  }
};

// Every forwarding loop and black hole, per header class, on walks from
// each attached node toward each address of another attached host.
inline ForwardingReport CheckForwarding(const NetworkSpec& net) {
  ForwardingReport r;
  const auto classes = HeaderClasses(net);
  std::map<std::string, size_t> class_of;
  for (size_t i = 0; i < classes.size(); ++i) {
    for (const std::string& a : classes[i]) class_of[a] = i;
  }
  for (const std::string& from : net.node_order) {
    if (Detached(net, from)) continue;
    for (const std::string& a : net.Addresses()) {
      const std::string owner = *net.OwnerOf(a);
      if (owner == from || Detached(net, owner)) continue;
      Walk w = WalkPath(net, from, a);
      if (w.end == Walk::End::kDelivered) continue;
      Finding f;
      f.header_class = classes[class_of[a]];
      if (w.end == Walk::End::kLoop) {
        f.kind = "loop";
        auto start = std::find(w.path.begin(), w.path.end(), w.path.back());
        f.path.assign(start, w.path.end() - 1);
        std::rotate(f.path.begin(), std::min_element(f.path.begin(), f.path.end()), f.path.end());
      } else {
        f.kind = "blackhole";
        f.path = {w.path.back()};
      }
      if (std::find(r.findings.begin(), r.findings.end(), f) == r.findings.end()) {
        r.findings.push_back(std::move(f));
      }
    }
  }
  const auto hosts = net.HostNames();
  for (const std::string& h : hosts) {
    for (const std::string& g : hosts) {
      if (h != g && (Detached(net, h) || Detached(net, g))) r.unreachable.push_back({h, g});
    }
  }
  return r;
}

struct Pipeline {
  std::string src;
  std::string dst;
  std::vector<std::string> header_class;  // destination addresses
  std::vector<std::string> stages;

  std::string Label() const {
    std::string out = src + "->[";
    for (size_t i = 0; i < stages.size(); ++i) out += (i ? "," : "") + stages[i];
    return out + "]->" + dst;
  }
};

// One pipeline per ordered host pair and stage sequence, stages in order.
inline std::vector<Pipeline> ExtractPipelines(const NetworkSpec& net) {
  if (!CheckForwarding(net).admissible()) {
    throw Error(ErrorCode::kPreconditionViolated, "network has forwarding loops or black holes");
  }
  std::vector<Pipeline> out;
  const auto hosts = net.HostNames();
  for (const std::string& h : hosts) {
    if (Detached(net, h)) continue;
    for (const std::string& g : hosts) {
      if (g == h || Detached(net, g)) continue;
      std::vector<Pipeline> mine;
      for (const std::string& a : net.hosts.at(g)) {
        Walk w = WalkPath(net, h, a);
        std::vector<std::string> stages;
        for (size_t i = 1; i + 1 < w.path.size(); ++i) {
          if (net.IsKind(w.path[i], NodeKind::kMiddlebox)) stages.push_back(w.path[i]);
        }
        auto it = std::find_if(mine.begin(), mine.end(),
                               [&](const Pipeline& p) { return p.stages == stages; });
        if (it == mine.end()) {
          mine.push_back({h, g, {a}, stages});
        } else {
          it->header_class.push_back(a);
        }
      }
      out.insert(out.end(), mine.begin(), mine.end());
    }
  }
  return out;
}

namespace forwarding_internal {
namespace L = ::mbv::logic;

inline std::vector<L::TermPtr> AddrTerms(const std::vector<std::string>& addrs) {
  std::vector<L::TermPtr> out;
  for (const std::string& a : addrs) out.push_back(L::AddrConst(a));
  return out;
}

inline L::FormulaPtr SendsMatching(const std::string& sender, const std::vector<std::string>& dsts,
                                   const std::vector<std::string>* srcs,
                                   const L::FormulaPtr& conclusion) {
  const L::VarDecl n{"n", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t{"t", L::Sort::kTime};
  std::vector<L::FormulaPtr> ante{
      L::Pred(L::kSend, {L::NodeConst(sender), L::Var(n), L::Var(p), L::Var(t)}),
      L::In(L::FieldOf(dsl::Field::kDst, L::Var(p)), AddrTerms(dsts))};
  if (srcs) ante.push_back(L::In(L::FieldOf(dsl::Field::kSrc, L::Var(p)), AddrTerms(*srcs)));
  return L::Forall({n, p, t}, L::Implies(L::And(ante), conclusion));
}

}  // namespace forwarding_internal

// send(x, n, p, t) & d(p) in class & s(p) in A(src) => n = next, for each
// adjacent pair of every pipeline.
inline std::vector<logic::Assertion> CompositionConstraints(const NetworkSpec& net,
                                                            const std::vector<Pipeline>& pipes) {
  namespace L = ::mbv::logic;
  std::vector<L::Assertion> out;
  for (const Pipeline& pl : pipes) {
    std::vector<std::string> hops{pl.src};
    hops.insert(hops.end(), pl.stages.begin(), pl.stages.end());
    hops.push_back(pl.dst);
    const std::vector<std::string>& srcs = net.hosts.at(pl.src);
    for (size_t i = 0; i + 1 < hops.size(); ++i) {
      out.push_back({forwarding_internal::SendsMatching(
                         hops[i], pl.header_class, &srcs,
                         L::Eq(L::Var("n", L::Sort::kNode), L::NodeConst(hops[i + 1]))),
                     "pipeline." + pl.src + "." + pl.dst + "." + std::to_string(i)});
    }
  }
  return out;
}

// Destination-based next stop for every send of `sender` within a scope: a
// stop outside `scope` (or none) makes such sends impossible.
inline std::vector<logic::Assertion> EgressClosure(const NetworkSpec& net,
                                                   const std::string& sender,
                                                   const std::set<std::string>& scope,
                                                   const std::vector<std::string>& addresses) {
  namespace L = ::mbv::logic;
  std::map<std::string, std::vector<std::string>> by_stop;
  std::vector<std::string> order;
  const std::vector<std::string>* own =
      net.hosts.count(sender) ? &net.hosts.at(sender) : nullptr;
  for (const std::string& a : addresses) {
    if (own && std::find(own->begin(), own->end(), a) != own->end()) continue;
    std::string stop = NextStop(net, sender, a).value_or("");
    if (!scope.count(stop)) stop = "";
    if (!by_stop.count(stop)) order.push_back(stop);
    by_stop[stop].push_back(a);
  }
  std::vector<L::Assertion> out;
  for (const std::string& stop : order) {
    L::FormulaPtr conclusion = stop.empty()
                                   ? L::False()
                                   : L::Eq(L::Var("n", L::Sort::kNode), L::NodeConst(stop));
    out.push_back({forwarding_internal::SendsMatching(sender, by_stop[stop], nullptr, conclusion),
                   "egress." + sender + "." + (stop.empty() ? std::string("none") : stop)});
  }
  return out;
}

}  // namespace mbv::network

#endif  // MBV_NETWORK_FORWARDING_H_
