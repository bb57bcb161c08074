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

#ifndef MBV_RONO_RONO_H_
#define MBV_RONO_RONO_H_

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/classify.h"
#include "mbv/error.h"
#include "mbv/network/forwarding.h"
#include "mbv/network/spec.h"
#include "mbv/verifier/invariant.h"

namespace mbv::rono {

enum class Rono { kYes, kNotGuaranteed, kNo };

inline std::string_view RonoName(Rono r) {
  switch (r) {
    case Rono::kYes: return "Yes";
    case Rono::kNotGuaranteed: return "NotGuaranteed";
    case Rono::kNo: return "No";
  }
  return "?";
}

struct RonoJudgment {
  network::Pipeline pipeline;
  Rono rono = Rono::kNotGuaranteed;
  std::string rule;
  std::string evidence;

  nlohmann::json ToJson() const {
    return {{"pipeline", pipeline.Label()},
            {"src", pipeline.src},
            {"dst", pipeline.dst},
            {"stages", pipeline.stages},
            {"headerClass", pipeline.header_class},
            {"rono", RonoName(rono)},
            {"rule", rule},
            {"evidence", evidence}};
  }
};

using Classifications = std::map<std::string, dsl::Classification>;

// Instance-level classification of every middlebox in `net`.
inline Classifications ClassifyNetwork(const network::NetworkSpec& net) {
  Classifications out;
  const std::vector<std::string> addrs = net.Addresses();
  for (const std::string& m : net.MiddleboxNames()) {
    const network::MiddleboxInstance& mi = net.middleboxes.at(m);
    out[m] = dsl::ClassifyInstance(net.models.at(mi.model), mi.config, net.flow_key, addrs);
  }
  return out;
}

inline RonoJudgment JudgeRono(const network::Pipeline& pl, const Classifications& cls) {
  RonoJudgment j;
  j.pipeline = pl;
  for (const std::string& s : pl.stages) {
    if (!cls.count(s)) {
      throw Error(ErrorCode::kMissingClassification, "no classification for stage '" + s + "'");
    }
  }
  if (pl.stages.empty()) {
    j.rono = Rono::kYes;
    j.rule = "direct";
    j.evidence = "no middlebox on the path";
    return j;
  }
  if (pl.stages.size() == 1 && cls.at(pl.stages[0]).flow_parallel == dsl::Tri::kYes) {
    j.rono = Rono::kYes;
    j.rule = "single-flow-parallel";
    j.evidence = pl.stages[0] + " is flow-parallel";
    return j;
  }
  for (const std::string& s : pl.stages) {
    const dsl::Classification& c = cls.at(s);
    if (c.flow_parallel != dsl::Tri::kYes) {
      j.evidence = s + " is not known to be flow-parallel (" + c.evidence + ")";
      return j;
    }
    if (c.flow_preserving != dsl::Tri::kYes) {
      j.evidence = s + " is not known to be flow-preserving (" + c.evidence + ")";
      return j;
    }
  }
  j.rono = Rono::kYes;
  j.rule = "flow-preserving-composition";
  j.evidence = "every stage is flow-parallel and flow-preserving";
  return j;
}

enum class Mode { kAuto, kPerPipeline, kWhole };

struct Scope {
  bool whole = true;
  std::vector<std::string> nodes;  // hosts and middleboxes, network order
  std::vector<size_t> pipelines;   // indices of the pipelines covered
  std::string reason;

  std::string Label() const { return whole ? "whole-network" : "per-pipeline"; }
};

struct PlanEntry {
  verifier::Invariant invariant;
  Scope scope;
  bool refused = false;  // per-pipeline forced but not RONO
};

struct VerificationPlan {
  std::vector<PlanEntry> entries;
};

inline Scope WholeScope(const network::NetworkSpec& net, std::string reason) {
  Scope s;
  s.whole = true;
  for (const std::string& n : net.node_order) {
    if (!net.IsKind(n, network::NodeKind::kRouter)) s.nodes.push_back(n);
  }
  s.reason = std::move(reason);
  return s;
}

inline VerificationPlan PlanVerification(const network::NetworkSpec& net,
                                         const std::vector<network::Pipeline>& pipelines,
                                         const std::vector<RonoJudgment>& judgments,
                                         const std::vector<verifier::Invariant>& invariants,
                                         Mode mode = Mode::kAuto) {
  using verifier::InvariantKind;
  VerificationPlan plan;
  for (const verifier::Invariant& inv : invariants) {
    PlanEntry e;
    e.invariant = inv;
    const bool global = inv.kind == InvariantKind::kNodeTraversal ||
                        inv.kind == InvariantKind::kLinkTraversal;
    if (mode == Mode::kWhole) {
      e.scope = WholeScope(net, "whole-network mode requested");
    } else if (global) {
      e.scope = WholeScope(net, "traversal depends on the entire network");
      e.refused = mode == Mode::kPerPipeline;
    } else {
      std::vector<size_t> relevant;
      for (size_t i = 0; i < pipelines.size(); ++i) {
        const network::Pipeline& p = pipelines[i];
        if ((p.src == inv.a && p.dst == inv.b) || (p.src == inv.b && p.dst == inv.a)) {
          relevant.push_back(i);
        }
      }
      std::string blocker;
      for (size_t i : relevant) {
        if (judgments.at(i).rono != Rono::kYes) {
          blocker = pipelines[i].Label() + " is " + std::string(RonoName(judgments[i].rono)) +
                    ": " + judgments[i].evidence;
          break;
        }
      }
      if (relevant.empty()) blocker = "no pipeline between the endpoints";
      if (blocker.empty()) {
        std::set<std::string> members{inv.a, inv.b};
        for (size_t i : relevant) members.insert(pipelines[i].stages.begin(), pipelines[i].stages.end());
        Scope s;
        s.whole = false;
        for (const std::string& n : net.node_order) {
          if (members.count(n)) s.nodes.push_back(n);
        }
        s.pipelines = relevant;
        s.reason = "all pipelines between the endpoints are RONO";
        e.scope = std::move(s);
      } else {
        e.scope = WholeScope(net, blocker);
        e.refused = mode == Mode::kPerPipeline;
      }
    }
    plan.entries.push_back(std::move(e));
  }
  return plan;
}

}  // namespace mbv::rono

#endif  // MBV_RONO_RONO_H_
