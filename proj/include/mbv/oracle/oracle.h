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

#ifndef MBV_ORACLE_ORACLE_H_
#define MBV_ORACLE_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/interp.h"
#include "mbv/error.h"
#include "mbv/network/forwarding.h"
#include "mbv/network/spec.h"
#include "mbv/verifier/invariant.h"

namespace mbv::oracle {

struct Injection {
  std::string host;
  dsl::Packet packet;
  bool operator==(const Injection&) const = default;
};

struct LogEvent {
  bool send = true;
  std::string from;
  std::string to;
  dsl::Packet packet;
  std::int64_t time = 0;
};

using DeliveryLog = std::vector<LogEvent>;

inline nlohmann::json PacketJson(const dsl::Packet& p) {
  return {{"src", p.src},       {"dst", p.dst},       {"src_port", p.src_port},
          {"dst_port", p.dst_port}, {"origin", p.origin}, {"body_token", p.body}};
}

inline std::string LogToJsonLines(const DeliveryLog& log) {
  std::string out;
  for (const LogEvent& e : log) {
    nlohmann::json j{{"kind", e.send ? "send" : "recv"},
                     {"from", e.from},
                     {"to", e.to},
                     {"time", e.time},
                     {"packet", PacketJson(e.packet)}};
    out += j.dump() + "\n";
  }
  return out;
}

struct TraceBound {
  int max_packets = 3;
  std::vector<std::int64_t> ports = {1, 2};
  std::vector<std::string> bodies = {"x"};
};

// Concrete network state along one execution branch.
struct SimState {
  std::map<std::string, dsl::ModelState> boxes;
  DeliveryLog log;
  std::int64_t clock = 0;
};

struct SimOptions {
  // Middlebox that silently discards everything it would receive.
  std::string silenced;
};

namespace oracle_internal {

struct InFlight {
  std::string from;
  dsl::Packet packet;
};

// Hop-by-hop walk through routers to the next host or middlebox.
inline std::optional<std::string> Deliver(const network::NetworkSpec& net, const std::string& from,
                                          const std::string& addr) {
  if (network::Detached(net, from)) return std::nullopt;
  std::string cur = from;
  std::set<std::string> seen{from};
  while (true) {
    std::optional<std::string> nh = network::NextHop(net, cur, addr);
    if (!nh || !seen.insert(*nh).second) return std::nullopt;
    if (!net.IsKind(*nh, network::NodeKind::kRouter)) return nh;
    cur = *nh;
  }
}

// Runs the queue of in-flight packets to completion, branching on every
// uninterpreted-function alternative. `emit` receives each final state.
inline void Drain(const network::NetworkSpec& net, SimState st, std::deque<InFlight> queue,
                  const SimOptions& opts, const std::function<void(SimState&)>& emit) {
  while (!queue.empty()) {
    InFlight f = std::move(queue.front());
    queue.pop_front();
    std::optional<std::string> to = Deliver(net, f.from, f.packet.dst);
    if (!to) continue;
    if (*to == opts.silenced) continue;
    st.log.push_back({true, f.from, *to, f.packet, ++st.clock});
    st.log.push_back({false, f.from, *to, f.packet, ++st.clock});
    if (!net.IsKind(*to, network::NodeKind::kMiddlebox)) continue;
    const network::MiddleboxInstance& mi = net.middleboxes.at(*to);
    const dsl::MiddleboxModel& model = net.models.at(mi.model);
    std::vector<dsl::Execution> alts =
        dsl::Execute(model, mi.config, *to, st.boxes[*to], f.packet);
    for (size_t i = 0; i < alts.size(); ++i) {
      const bool last = i + 1 == alts.size();
      SimState branch = last ? std::move(st) : st;
      std::deque<InFlight> q = last ? std::move(queue) : queue;
      branch.boxes[*to] = std::move(alts[i].next);
      for (const dsl::Packet& out : alts[i].outputs) q.push_back({*to, out});
      Drain(net, std::move(branch), std::move(q), opts, emit);
      if (last) return;
    }
    return;
  }
  emit(st);
}

}  // namespace oracle_internal

// Every branch state after injecting `inj` into `st`.
inline std::vector<SimState> Step(const network::NetworkSpec& net, const SimState& st,
                                  const Injection& inj, const SimOptions& opts = {}) {
  std::vector<SimState> out;
  std::deque<oracle_internal::InFlight> q{{inj.host, inj.packet}};
  oracle_internal::Drain(net, st, std::move(q), opts, [&](SimState& s) { out.push_back(std::move(s)); });
  return out;
}

inline void CheckHonest(const network::NetworkSpec& net, const Injection& inj) {
  if (!net.IsKind(inj.host, network::NodeKind::kHost)) {
    throw Error(ErrorCode::kPreconditionViolated, inj.host + " is not a host");
  }
  const auto& own = net.hosts.at(inj.host);
  if (std::find(own.begin(), own.end(), inj.packet.src) == own.end() ||
      std::find(own.begin(), own.end(), inj.packet.dst) != own.end() ||
      inj.packet.origin != inj.host) {
    throw Error(ErrorCode::kPreconditionViolated,
                "injection from " + inj.host + " is not honest: " + inj.packet.ToString());
  }
}

// Deterministic run that takes the first alternative at every choice point.
inline DeliveryLog Simulate(const network::NetworkSpec& net, const std::vector<Injection>& trace,
                            const SimOptions& opts = {}) {
  if (!network::CheckForwarding(net).admissible()) {
    throw Error(ErrorCode::kPreconditionViolated, "network is not admissible");
  }
  SimState st;
  for (const Injection& inj : trace) {
    CheckHonest(net, inj);
    st = Step(net, st, inj, opts).front();
  }
  return st.log;
}

// All branch logs of `trace` over every uninterpreted-function valuation.
inline std::vector<DeliveryLog> SimulateAll(const network::NetworkSpec& net,
                                            const std::vector<Injection>& trace,
                                            const SimOptions& opts = {}) {
  std::vector<SimState> frontier{SimState{}};
  for (const Injection& inj : trace) {
    CheckHonest(net, inj);
    std::vector<SimState> next;
    for (const SimState& s : frontier) {
      for (SimState& b : Step(net, s, inj, opts)) next.push_back(std::move(b));
    }
    frontier = std::move(next);
  }
  std::vector<DeliveryLog> out;
  for (SimState& s : frontier) out.push_back(std::move(s.log));
  return out;
}

// Whether `log` exhibits the event pattern that violates an isolation kind
// (or witnesses a reachability kind).
inline bool Exhibits(const network::NetworkSpec& net, const verifier::Invariant& inv,
                     const DeliveryLog& log) {
  using verifier::InvariantKind;
  auto is_a_addr = [&](const std::string& addr) {
    const auto& own = net.hosts.at(inv.a);
    return std::find(own.begin(), own.end(), addr) != own.end();
  };
  switch (inv.kind) {
    case InvariantKind::kDataIsolation:
    case InvariantKind::kDataReachability:
      return std::any_of(log.begin(), log.end(), [&](const LogEvent& e) {
        return !e.send && e.to == inv.a && e.packet.origin == inv.b;
      });
    default: break;
  }
  std::vector<std::pair<std::string, std::string>> link_hops;
  if (inv.kind == InvariantKind::kLinkTraversal) {
    for (const std::string& x : net.node_order) {
      if (net.IsKind(x, network::NodeKind::kRouter)) continue;
      for (const std::string& d : net.Addresses()) {
        if (net.OwnerOf(d) == x || network::Detached(net, x)) continue;
        network::Walk w = network::WalkPath(net, x, d);
        for (size_t i = 0; i + 1 < w.path.size(); ++i) {
          const auto& l = *inv.link;
          if ((w.path[i] == l.first && w.path[i + 1] == l.second) ||
              (w.path[i] == l.second && w.path[i + 1] == l.first)) {
            link_hops.push_back({x, d});
            break;
          }
          if (i > 0 && !net.IsKind(w.path[i], network::NodeKind::kRouter)) break;
        }
      }
    }
  }
  for (const LogEvent& s : log) {
    if (!s.send || s.from != inv.a) continue;
    for (const LogEvent& r : log) {
      if (r.send || r.to != inv.b || r.time <= s.time || !(r.packet == s.packet)) continue;
      if (inv.kind == InvariantKind::kFlowIsolation) {
        const bool answered = std::any_of(log.begin(), log.end(), [&](const LogEvent& e) {
          return e.send && e.from == inv.b && is_a_addr(e.packet.dst) && e.time < r.time;
        });
        if (answered) continue;
      }
      if (inv.kind == InvariantKind::kLinkTraversal) {
        const bool crossed = std::any_of(log.begin(), log.end(), [&](const LogEvent& e) {
          if (!e.send || !(e.packet == s.packet)) return false;
          return std::find(link_hops.begin(), link_hops.end(),
                           std::make_pair(e.from, e.packet.dst)) != link_hops.end();
        });
        if (!crossed) continue;
      }
      return true;
    }
  }
  return false;
}

// Every honest injection over the bound's universe.
inline std::vector<Injection> InjectionUniverse(const network::NetworkSpec& net,
                                                const TraceBound& bound) {
  std::vector<Injection> out;
  const std::vector<std::string> all = net.Addresses();
  for (const std::string& h : net.HostNames()) {
    if (network::Detached(net, h)) continue;
    const auto& own = net.hosts.at(h);
    for (const std::string& s : own) {
      for (const std::string& d : all) {
        if (std::find(own.begin(), own.end(), d) != own.end()) continue;
        for (std::int64_t sp : bound.ports) {
          for (std::int64_t dp : bound.ports) {
            for (const std::string& body : bound.bodies) {
              out.push_back({h, {s, d, sp, dp, h, body}});
            }
          }
        }
      }
    }
  }
  return out;
}

struct OracleVerdict {
  verifier::Invariant invariant;
  // Holds / Violated as for solver verdicts, valid up to `bound` packets.
  bool holds = true;
  bool bounded = true;
  int bound = 0;
  std::vector<Injection> trace;  // pattern-exhibiting injection sequence
  DeliveryLog log;
  std::uint64_t sequences = 0;

  std::string StatusLabel() const {
    return holds ? (bounded ? "Holds-up-to-bound" : "Holds")
                 : (bounded ? "Violated-up-to-bound" : "Violated");
  }

  nlohmann::json ToJson() const {
    nlohmann::json j = inv_json();
    j["status"] = StatusLabel();
    j["bound"] = bound;
    j["sequences"] = sequences;
    if (!trace.empty()) {
      j["trace"] = nlohmann::json::array();
      for (const Injection& i : trace) j["trace"].push_back({{"host", i.host}, {"packet", PacketJson(i.packet)}});
    }
    return j;
  }

 private:
  nlohmann::json inv_json() const { return invariant.ToJson(); }
};

// Enumerates injection sequences up to the bound, depth first, over all
// uninterpreted-function valuations. Isolation kinds are Violated on the
// first sequence exhibiting the pattern; reachability kinds Hold on it.
inline OracleVerdict DecideByExhaustion(const network::NetworkSpec& net,
                                        const verifier::Invariant& inv,
                                        const TraceBound& bound) {
  if (bound.max_packets < 1) throw Error(ErrorCode::kBoundTooLarge, "bound must be at least 1");
  verifier::ValidateInvariant(inv, net);
  if (!network::CheckForwarding(net).admissible()) {
    throw Error(ErrorCode::kPreconditionViolated, "network is not admissible");
  }
  const std::vector<Injection> universe = InjectionUniverse(net, bound);
  double total = 0;
  for (int k = 1; k <= bound.max_packets; ++k) total += std::pow(double(universe.size()), k);
  if (total > 1e7) {
    throw Error(ErrorCode::kBoundTooLarge,
                "bound admits " + std::to_string(static_cast<long long>(total)) +
                    " injection sequences (limit 10^7)");
  }
  SimOptions opts;
  if (inv.kind == verifier::InvariantKind::kNodeTraversal) opts.silenced = inv.target;

  OracleVerdict v;
  v.invariant = inv;
  v.bound = bound.max_packets;
  const bool reach = verifier::IsReachabilityKind(inv.kind);
  std::vector<Injection> prefix;
  bool found = false;
  std::function<void(const SimState&, int)> dfs = [&](const SimState& st, int depth) {
    if (found || depth == bound.max_packets) return;
    for (const Injection& inj : universe) {
      prefix.push_back(inj);
      ++v.sequences;
      for (SimState& b : Step(net, st, inj, opts)) {
        if (Exhibits(net, inv, b.log)) {
          found = true;
          v.trace = prefix;
          v.log = b.log;
          return;
        }
        dfs(b, depth + 1);
        if (found) return;
      }
      prefix.pop_back();
    }
  };
  dfs(SimState{}, 0);
  v.holds = reach ? found : !found;
  // A found pattern is definitive; its absence only holds up to the bound.
  v.bounded = !found;
  return v;
}

// Replays injections (time order first, then reorderings of up to six
// packets) and reports whether some branch exhibits the pattern of `inv`.
inline bool Replays(const network::NetworkSpec& net, const verifier::Invariant& inv,
                    std::vector<Injection> trace) {
  SimOptions opts;
  if (inv.kind == verifier::InvariantKind::kNodeTraversal) opts.silenced = inv.target;
  auto attempt = [&](const std::vector<Injection>& t) {
    for (const DeliveryLog& log : SimulateAll(net, t, opts)) {
      if (Exhibits(net, inv, log)) return true;
    }
    return false;
  };
  if (attempt(trace)) return true;
  if (trace.size() > 6) return false;
  std::vector<size_t> idx(trace.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  while (std::next_permutation(idx.begin(), idx.end())) {
    std::vector<Injection> t;
    for (size_t i : idx) t.push_back(trace[i]);
    if (attempt(t)) return true;
  }
  return false;
}

}  // namespace mbv::oracle

#endif  // MBV_ORACLE_ORACLE_H_
