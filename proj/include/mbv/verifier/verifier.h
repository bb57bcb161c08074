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

#ifndef MBV_VERIFIER_VERIFIER_H_
#define MBV_VERIFIER_VERIFIER_H_

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/actions.h"
#include "mbv/dsl/interp.h"
#include "mbv/encoder/encode.h"
#include "mbv/encoder/epr.h"
#include "mbv/error.h"
#include "mbv/logic/program.h"
#include "mbv/network/forwarding.h"
#include "mbv/network/spec.h"
#include "mbv/rono/rono.h"
#include "mbv/solver/model.h"
#include "mbv/solver/process.h"
#include "mbv/solver/smtlib.h"
#include "mbv/verifier/invariant.h"
#include "mbv/verifier/scope.h"

namespace mbv::verifier {

enum class Status { kHolds, kViolated, kUnknown };

inline std::string_view StatusName(Status s) {
  switch (s) {
    case Status::kHolds: return "Holds";
    case Status::kViolated: return "Violated";
    case Status::kUnknown: return "Unknown";
  }
  return "?";
}

struct WitnessEvent {
  bool send = true;
  std::string from;
  std::string to;
  dsl::Packet packet;
  std::int64_t time = 0;
};

struct Witness {
  std::vector<WitnessEvent> events;  // time order
  bool parsed = true;
  std::string detail;

  // Packets the end hosts inject, in time order.
  std::vector<WitnessEvent> HostSends(const network::NetworkSpec& net) const {
    std::vector<WitnessEvent> out;
    for (const WitnessEvent& e : events) {
      if (e.send && net.IsKind(e.from, network::NodeKind::kHost)) out.push_back(e);
    }
    return out;
  }

  nlohmann::json ToJson() const {
    nlohmann::json j{{"parsed", parsed}};
    if (!detail.empty()) j["detail"] = detail;
    j["events"] = nlohmann::json::array();
    for (const WitnessEvent& e : events) {
      j["events"].push_back({{"kind", e.send ? "send" : "recv"},
                             {"from", e.from},
                             {"to", e.to},
                             {"time", e.time},
                             {"packet",
                              {{"src", e.packet.src},
                               {"dst", e.packet.dst},
                               {"src_port", e.packet.src_port},
                               {"dst_port", e.packet.dst_port},
                               {"origin", e.packet.origin},
                               {"body_token", e.packet.body}}}});
    }
    return j;
  }
};

struct Verdict {
  Invariant invariant;
  Status status = Status::kUnknown;
  std::optional<Witness> witness;
  double solver_seconds = 0;
  std::string scope;
  std::string reason;

  nlohmann::json ToJson() const {
    nlohmann::json j{{"kind", InvariantKindName(invariant.kind)},
                     {"endpoints", {invariant.a, invariant.b}},
                     {"status", StatusName(status)},
                     {"scope", scope},
                     {"solverTimeMs", static_cast<std::int64_t>(solver_seconds * 1000)}};
    if (!invariant.target.empty()) j["target"] = invariant.target;
    if (invariant.link) j["target"] = {invariant.link->first, invariant.link->second};
    if (!reason.empty()) j["reason"] = reason;
    if (witness) j["witness"] = witness->ToJson();
    return j;
  }
};

enum class Encoding;

struct VerifierOptions {
  solver::SolverSession session;
  Encoding encoding{};
  // Filled with the emitted SMT-LIB text of the last query when set.
  std::string* program_text = nullptr;
};

namespace verifier_internal {

namespace L = ::mbv::logic;

inline L::FormulaPtr SentThenReceived(const std::string& a, const std::string& b,
                                      std::vector<L::FormulaPtr> extra) {
  const L::VarDecl n1{"n1", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t1{"t1", L::Sort::kTime},
      n2{"n2", L::Sort::kNode}, t2{"t2", L::Sort::kTime};
  std::vector<L::FormulaPtr> parts{
      L::Pred(L::kSend, {L::NodeConst(a), L::Var(n1), L::Var(p), L::Var(t1)}),
      L::Pred(L::kRecv, {L::Var(n2), L::NodeConst(b), L::Var(p), L::Var(t2)}),
      L::Lt(L::Var(t1), L::Var(t2))};
  parts.insert(parts.end(), extra.begin(), extra.end());
  return L::Exists({n1, p, t1, n2, t2}, L::And(parts));
}

// (sender, destination address) pairs whose next elided hop crosses `link`.
inline std::vector<std::pair<std::string, std::string>> HopsOverLink(
    const network::NetworkSpec& net, const std::pair<std::string, std::string>& link) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& x : net.node_order) {
    if (net.IsKind(x, network::NodeKind::kRouter) || network::Detached(net, x)) continue;
    for (const std::string& d : net.Addresses()) {
      if (net.OwnerOf(d) == x) continue;
      network::Walk w = network::WalkPath(net, x, d);
      for (size_t i = 0; i + 1 < w.path.size(); ++i) {
        const bool crosses = (w.path[i] == link.first && w.path[i + 1] == link.second) ||
                             (w.path[i] == link.second && w.path[i + 1] == link.first);
        if (crosses) {
          out.push_back({x, d});
          break;
        }
        if (i > 0 && !net.IsKind(w.path[i], network::NodeKind::kRouter)) break;
      }
    }
  }
  return out;
}

inline std::string Strip(const std::string& v, const char* prefix) {
  const std::string p(prefix);
  return v.rfind(p, 0) == 0 ? v.substr(p.size()) : v;
}

}  // namespace verifier_internal

// Assertions added to a scope program for `inv`. The first one is the query.
inline std::vector<logic::Assertion> QueryAssertions(const Invariant& inv,
                                                     const network::NetworkSpec& net) {
  namespace L = ::mbv::logic;
  using namespace verifier_internal;
  std::vector<L::Assertion> out;
  switch (inv.kind) {
    case InvariantKind::kNodeIsolation:
    case InvariantKind::kNodeReachability:
      out.push_back({SentThenReceived(inv.a, inv.b, {}), "query"});
      break;
    case InvariantKind::kFlowIsolation: {
      const L::VarDecl n{"n3", L::Sort::kNode}, q{"q3", L::Sort::kPacket}, t{"t3", L::Sort::kTime};
      std::vector<L::TermPtr> addrs;
      for (const std::string& x : net.hosts.at(inv.a)) addrs.push_back(L::AddrConst(x));
      const L::FormulaPtr never = L::Forall(
          {n, q, t},
          L::Not(L::And({L::Pred(L::kSend, {L::NodeConst(inv.b), L::Var(n), L::Var(q), L::Var(t)}),
                         L::In(L::FieldOf(dsl::Field::kDst, L::Var(q)), addrs),
                         L::Lt(L::Var(t), L::Var("t2", L::Sort::kTime))})));
      out.push_back({SentThenReceived(inv.a, inv.b, {never}), "query"});
      break;
    }
    case InvariantKind::kDataIsolation:
    case InvariantKind::kDataReachability: {
      const L::VarDecl n{"n", L::Sort::kNode}, p{"p", L::Sort::kPacket}, t{"t", L::Sort::kTime};
      out.push_back(
          {L::Exists({n, p, t},
                     L::And({L::Pred(L::kRecv, {L::Var(n), L::NodeConst(inv.a), L::Var(p), L::Var(t)}),
                             L::Eq(L::FieldOf(dsl::Field::kOrigin, L::Var(p)),
                                   L::NodeConst(inv.b))})),
           "query"});
      break;
    }
    case InvariantKind::kNodeTraversal:
      out.push_back({SentThenReceived(inv.a, inv.b, {}), "query"});
      for (const L::Assertion& a : encoder::SilenceAssertions(inv.target)) out.push_back(a);
      break;
    case InvariantKind::kLinkTraversal: {
      const L::VarDecl t{"t4", L::Sort::kTime};
      const L::TermPtr p = L::Var("p", L::Sort::kPacket);
      std::vector<L::FormulaPtr> hops;
      for (const auto& [x, d] : HopsOverLink(net, *inv.link)) {
        auto stop = network::NextStop(net, x, d);
        if (!stop) continue;
        hops.push_back(L::And({L::Pred(L::kSend, {L::NodeConst(x), L::NodeConst(*stop), p,
                                                  L::Var(t)}),
                               L::Eq(L::FieldOf(dsl::Field::kDst, p), L::AddrConst(d))}));
      }
      out.push_back({SentThenReceived(inv.a, inv.b, {L::Exists({t}, L::Or(hops))}), "query"});
      break;
    }
  }
  return out;
}

// Data queries need every constructed packet in scope to carry an origin.
inline void CheckOriginThreading(const network::NetworkSpec& net,
                                 const std::vector<std::string>& members) {
  for (const std::string& m : members) {
    if (!net.middleboxes.count(m)) continue;
    const dsl::MiddleboxModel& model = net.ModelOf(m);
    for (const dsl::ActionSite& s : dsl::EnumerateActions(model)) {
      if (!s.is_send() || s.stmt->expr->kind != dsl::ExprKind::kConstruct || s.stmt->expr->base) {
        continue;
      }
      const auto& ov = s.stmt->expr->overrides;
      const bool sets_origin = std::any_of(ov.begin(), ov.end(), [](const auto& o) {
        return o.first == dsl::Field::kOrigin;
      });
      if (!sets_origin) {
        throw Error(ErrorCode::kUnsupportedQuery,
                    "data queries need origin threading, but " + m + " (" + model.name +
                        ") constructs packets without an origin");
      }
    }
  }
}

// Complete EPR-F program for one invariant over one scope.
// Scope program plus the query, before the EPR-F transformation.
inline logic::LogicProgram BuildRelationalProgram(const network::NetworkSpec& net,
                                                  const std::vector<network::Pipeline>& pipelines,
                                                  const Invariant& inv,
                                                  const std::vector<std::string>& members) {
  ValidateInvariant(inv, net);
  if (inv.kind == InvariantKind::kDataIsolation || inv.kind == InvariantKind::kDataReachability) {
    CheckOriginThreading(net, members);
  }
  logic::LogicProgram p = BuildScopeProgram(net, members, pipelines);
  for (const logic::Assertion& a : QueryAssertions(inv, net)) p.assertions.push_back(a);
  return p;
}

// EPR-F form of `relational`; throws unless the fragment scan passes.
inline logic::LogicProgram ToCheckedEprF(logic::LogicProgram relational) {
  encoder::ToEprF(relational);
  encoder::EprReport r = encoder::CheckEprF(relational);
  if (!r.ok()) {
    throw Error(ErrorCode::kPreconditionViolated, "program is not EPR-F: " + r.problems.front());
  }
  return relational;
}

inline logic::LogicProgram BuildQueryProgram(const network::NetworkSpec& net,
                                             const std::vector<network::Pipeline>& pipelines,
                                             const Invariant& inv,
                                             const std::vector<std::string>& members) {
  return ToCheckedEprF(BuildRelationalProgram(net, pipelines, inv, members));
}

namespace verifier_internal {

inline dsl::Packet PacketOf(const solver::Model& m, const std::string& pkt) {
  dsl::Packet p;
  p.src = Strip(m.Apply("p_src", {pkt}), "a.");
  p.dst = Strip(m.Apply("p_dst", {pkt}), "a.");
  const std::string sp = m.Apply("p_sport", {pkt}), dp = m.Apply("p_dport", {pkt});
  p.src_port = sp == solver::Model::kUndefined ? 0 : std::stoll(sp);
  p.dst_port = dp == solver::Model::kUndefined ? 0 : std::stoll(dp);
  p.origin = Strip(m.Apply("p_origin", {pkt}), "n.");
  p.body = m.Apply("p_body", {pkt});
  return p;
}

// Names body universe elements after the constants that denote them, or w<i>.
inline void NameBodies(const solver::Model& m, Witness& w) {
  std::set<std::string> elements;
  for (const std::string& b : m.Universe("Body")) elements.insert(b);
  const std::map<std::string, std::string> constants = m.Constants();
  std::map<std::string, std::string> rename;
  int fresh = 0;
  for (WitnessEvent& e : w.events) {
    std::string& body = e.packet.body;
    if (body.rfind("b.", 0) == 0) {
      body = body.substr(2);
      continue;
    }
    if (!elements.count(body)) continue;
    if (!rename.count(body)) {
      std::string name;
      for (const auto& [k, v] : constants) {
        if (k.rfind("b.", 0) == 0 && v == body) name = k.substr(2);
      }
      rename[body] = name.empty() ? "w" + std::to_string(fresh++) : name;
    }
    body = rename[body];
  }
}

inline void SortEvents(Witness& w) {
  std::stable_sort(w.events.begin(), w.events.end(),
                   [](const WitnessEvent& x, const WitnessEvent& y) {
                     if (x.time != y.time) return x.time < y.time;
                     return x.send && !y.send;
                   });
}

template <typename Fill>
Witness Extract(const std::string& model_text, Fill fill) {
  Witness w;
  if (model_text.empty()) {
    w.parsed = false;
    w.detail = "solver returned no model";
    return w;
  }
  try {
    solver::Model m = solver::Model::Parse(model_text);
    fill(m, w);
    NameBodies(m, w);
    SortEvents(w);
  } catch (const std::exception& e) {
    w.events.clear();
    w.parsed = false;
    w.detail = std::string("model present but unparsed: ") + e.what();
  }
  return w;
}

}  // namespace verifier_internal

// Reads every send/receive event out of a model of the event-form program.
inline Witness ExtractWitness(const std::string& model_text) {
  return verifier_internal::Extract(model_text, [](const solver::Model& m, Witness& w) {
    using verifier_internal::Strip;
    for (const std::string& u : m.Universe("Event")) {
      const bool snd = m.Apply(logic::kSnd, {u}) == "true";
      const bool rcv = m.Apply(logic::kRcv, {u}) == "true";
      if (!snd && !rcv) continue;
      WitnessEvent e;
      e.send = snd;
      e.from = Strip(m.Apply(logic::kEvSrc, {u}), "n.");
      e.to = Strip(m.Apply(logic::kEvDst, {u}), "n.");
      e.packet = verifier_internal::PacketOf(m, m.Apply(logic::kEvPkt, {u}));
      const std::string t = m.Apply(logic::kEvTime, {u});
      e.time = t == solver::Model::kUndefined ? 0 : std::stoll(t);
      w.events.push_back(std::move(e));
    }
  });
}

// Reads events out of a model of the relational program. A relation that
// holds over a time interval yields one event where the interval starts;
// interval bounds are among the model's integer constants.
inline Witness ExtractRelationalWitness(const std::string& model_text,
                                        const std::vector<std::string>& nodes) {
  return verifier_internal::Extract(model_text, [&](const solver::Model& m, Witness& w) {
    std::set<std::int64_t> times;
    for (std::int64_t k : m.IntLiterals()) {
      times.insert(k);
      times.insert(k + 1);
    }
    std::vector<std::string> packets = m.Universe("Packet");
    for (const char* rel : {logic::kSend, logic::kRecv}) {
      if (!m.Defines(rel)) continue;
      for (const std::string& a : nodes) {
        for (const std::string& b : nodes) {
          if (a == b) continue;
          for (const std::string& p : packets) {
            const std::vector<std::string> args{logic::NodeSym(a), logic::NodeSym(b), p};
            auto holds = [&](std::int64_t t) {
              std::vector<std::string> full = args;
              full.push_back(std::to_string(t));
              return m.Apply(rel, full) == "true";
            };
            for (std::int64_t t : times) {
              if (!holds(t) || holds(t - 1)) continue;
              WitnessEvent e;
              e.send = std::string(rel) == logic::kSend;
              e.from = a;
              e.to = b;
              e.packet = verifier_internal::PacketOf(m, p);
              e.time = t;
              w.events.push_back(std::move(e));
            }
          }
        }
      }
    }
  });
}

// How the verifier hands a query to the solver.
enum class Encoding {
  kRelational,  // the relational program the EPR-F form was derived from
  kEprF,        // the EPR-F event program
  kBoth,        // race both
};

inline std::optional<Encoding> ParseEncoding(std::string_view s) {
  if (s == "relational") return Encoding::kRelational;
  if (s == "eprf") return Encoding::kEprF;
  if (s == "both") return Encoding::kBoth;
  return std::nullopt;
}

inline Verdict CheckInvariant(const network::NetworkSpec& net,
                              const std::vector<network::Pipeline>& pipelines,
                              const Invariant& inv, const rono::Scope& scope,
                              const VerifierOptions& opts) {
  Verdict v;
  v.invariant = inv;
  v.scope = scope.Label();
  const logic::LogicProgram relational = BuildRelationalProgram(net, pipelines, inv, scope.nodes);
  const logic::LogicProgram eprf = ToCheckedEprF(relational);
  const std::string eprf_text = solver::EmitSmtLib(eprf, true);
  const std::string rel_text = solver::EmitSmtLib(relational, true);
  std::vector<solver::Contender> race;
  if (opts.encoding != Encoding::kEprF) {
    for (auto& c : solver::Expand(opts.session, "relational", rel_text)) race.push_back(c);
  }
  if (opts.encoding != Encoding::kRelational) {
    for (auto& c : solver::Expand(opts.session, "eprf", eprf_text)) race.push_back(c);
  }
  if (opts.program_text) *opts.program_text = race.front().text;
  solver::SolverOutcome out = solver::RunRace(opts.session, race);
  v.solver_seconds = out.seconds;
  switch (out.kind) {
    case solver::Outcome::kProcessError:
      throw Error(ErrorCode::kSolverFailure, out.reason);
    case solver::Outcome::kUnknown:
      v.status = Status::kUnknown;
      v.reason = out.reason;
      return v;
    case solver::Outcome::kUnsat:
      v.status = IsReachabilityKind(inv.kind) ? Status::kViolated : Status::kHolds;
      return v;
    case solver::Outcome::kSat:
      v.status = IsReachabilityKind(inv.kind) ? Status::kHolds : Status::kViolated;
      v.witness = out.winner.rfind("eprf", 0) == 0
                      ? ExtractWitness(out.model)
                      : ExtractRelationalWitness(out.model, relational.nodes);
      return v;
  }
  return v;
}

inline Verdict CheckNodeIsolation(const network::NetworkSpec& net,
                                  const std::vector<network::Pipeline>& pipelines,
                                  const std::string& a, const std::string& b,
                                  const rono::Scope& scope, const VerifierOptions& opts) {
  return CheckInvariant(net, pipelines, {InvariantKind::kNodeIsolation, a, b, "", std::nullopt},
                        scope, opts);
}

inline Verdict CheckFlowIsolation(const network::NetworkSpec& net,
                                  const std::vector<network::Pipeline>& pipelines,
                                  const std::string& a, const std::string& b,
                                  const rono::Scope& scope, const VerifierOptions& opts) {
  return CheckInvariant(net, pipelines, {InvariantKind::kFlowIsolation, a, b, "", std::nullopt},
                        scope, opts);
}

inline Verdict CheckDataIsolation(const network::NetworkSpec& net,
                                  const std::vector<network::Pipeline>& pipelines,
                                  const std::string& a, const std::string& b,
                                  const rono::Scope& scope, const VerifierOptions& opts) {
  return CheckInvariant(net, pipelines, {InvariantKind::kDataIsolation, a, b, "", std::nullopt},
                        scope, opts);
}

inline Verdict CheckNodeTraversal(const network::NetworkSpec& net,
                                  const std::vector<network::Pipeline>& pipelines,
                                  const std::string& a, const std::string& b,
                                  const std::string& m, const VerifierOptions& opts) {
  return CheckInvariant(net, pipelines, {InvariantKind::kNodeTraversal, a, b, m, std::nullopt},
                        rono::WholeScope(net, "traversal"), opts);
}

// Number of ordered host pairs whose traffic can cross `link`.
inline int CheckLinkTraversal(const network::NetworkSpec& net,
                              const std::vector<network::Pipeline>& pipelines,
                              const std::pair<std::string, std::string>& link,
                              const std::vector<std::pair<std::string, std::string>>& pairs,
                              const VerifierOptions& opts) {
  int count = 0;
  const rono::Scope whole = rono::WholeScope(net, "link traversal");
  for (const auto& [a, b] : pairs) {
    Verdict v = CheckInvariant(net, pipelines, {InvariantKind::kLinkTraversal, a, b, "", link},
                               whole, opts);
    if (v.status == Status::kHolds) ++count;
  }
  return count;
}

// Runs every plan entry, `jobs` at a time. Results keep plan order.
inline std::vector<Verdict> RunPlan(const network::NetworkSpec& net,
                                    const std::vector<network::Pipeline>& pipelines,
                                    const rono::VerificationPlan& plan,
                                    const VerifierOptions& opts, int jobs = 1) {
  std::vector<Verdict> out(plan.entries.size());
  std::vector<std::string> errors(plan.entries.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      const size_t i = next++;
      if (i >= plan.entries.size()) return;
      try {
        VerifierOptions o = opts;
        o.program_text = nullptr;
        out[i] = CheckInvariant(net, pipelines, plan.entries[i].invariant,
                                plan.entries[i].scope, o);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(plan.entries.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw Error(ErrorCode::kSolverFailure,
                  plan.entries[i].invariant.Label() + ": " + errors[i]);
    }
  }
  return out;
}

inline nlohmann::json VerdictsToJson(const std::vector<Verdict>& vs) {
  nlohmann::json j = nlohmann::json::array();
  for (const Verdict& v : vs) j.push_back(v.ToJson());
  return j;
}

inline std::string SummaryTable(const std::vector<Verdict>& vs) {
  std::string out;
  size_t width = 9;
  for (const Verdict& v : vs) width = std::max(width, v.invariant.Label().size());
  auto pad = [](std::string s, size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  out += pad("invariant", width) + "  " + pad("status", 9) + "  " + pad("scope", 13) + "  ms\n";
  for (const Verdict& v : vs) {
    out += pad(v.invariant.Label(), width) + "  " + pad(std::string(StatusName(v.status)), 9) +
           "  " + pad(v.scope, 13) + "  " +
           std::to_string(static_cast<long long>(v.solver_seconds * 1000)) + "\n";
  }
  return out;
}

}  // namespace mbv::verifier

#endif  // MBV_VERIFIER_VERIFIER_H_
