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

#ifndef MBV_ENFORCEMENT_ENFORCEMENT_H_
#define MBV_ENFORCEMENT_ENFORCEMENT_H_

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbv/dsl/interp.h"
#include "mbv/error.h"

namespace mbv::enforcement {

// One observation at a middlebox tap: the packet it received and the packets
// it emitted in response.
struct TraceRecord {
  dsl::Packet in;
  std::vector<dsl::Packet> out;
};

struct Deviation {
  size_t index = 0;
  std::vector<dsl::Packet> observed;
  std::vector<std::vector<dsl::Packet>> allowed;
};

struct ConformanceReport {
  std::vector<Deviation> deviations;
  size_t records = 0;

  bool conforming() const { return deviations.empty(); }
  nlohmann::json ToJson() const;
};

inline nlohmann::json PacketToJson(const dsl::Packet& p) {
  return {{"src", p.src},           {"dst", p.dst},         {"src_port", p.src_port},
          {"dst_port", p.dst_port}, {"origin", p.origin}, {"body_token", p.body}};
}

inline dsl::Packet PacketFromJson(const nlohmann::json& j, const std::string& where) {
  try {
    dsl::Packet p;
    p.src = j.at("src").get<std::string>();
    p.dst = j.at("dst").get<std::string>();
    p.src_port = j.at("src_port").get<std::int64_t>();
    p.dst_port = j.at("dst_port").get<std::int64_t>();
    p.origin = j.value("origin", std::string());
    p.body = j.value("body_token", std::string(dsl::kNilBody));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, where + ": bad packet: " + e.what());
  }
}

inline nlohmann::json ConformanceReport::ToJson() const {
  nlohmann::json devs = nlohmann::json::array();
  for (const Deviation& d : deviations) {
    nlohmann::json obs = nlohmann::json::array();
    for (const dsl::Packet& p : d.observed) obs.push_back(PacketToJson(p));
    nlohmann::json allowed = nlohmann::json::array();
    for (const auto& alt : d.allowed) {
      nlohmann::json a = nlohmann::json::array();
      for (const dsl::Packet& p : alt) a.push_back(PacketToJson(p));
      allowed.push_back(a);
    }
    devs.push_back({{"index", d.index}, {"observed", obs}, {"allowed", allowed}});
  }
  return {{"records", records}, {"deviations", devs}};
}

// Reads one JSON object per non-empty line: {"in": packet, "out": [packets]}.
inline std::vector<TraceRecord> ParseTrace(std::string_view text) {
  std::vector<TraceRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "trace line " + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("in") || !j.contains("out") || !j["out"].is_array()) {
      throw Error(ErrorCode::kParseError, where + ": expected {\"in\": ..., \"out\": [...]}");
    }
    TraceRecord r;
    r.in = PacketFromJson(j["in"], where);
    for (const auto& p : j["out"]) r.out.push_back(PacketFromJson(p, where));
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string TraceToJsonLines(const std::vector<TraceRecord>& trace) {
  std::string out;
  for (const TraceRecord& r : trace) {
    nlohmann::json outs = nlohmann::json::array();
    for (const dsl::Packet& p : r.out) outs.push_back(PacketToJson(p));
    out += nlohmann::json{{"in", PacketToJson(r.in)}, {"out", outs}}.dump() + "\n";
  }
  return out;
}

// Output sets the model permits for `packet` in `state`.
// One way the model may react to a packet: what it sends and its next state.
struct Alternative {
  std::vector<dsl::Packet> outputs;  // sorted
  dsl::ModelState next;

  auto operator<=>(const Alternative&) const = default;
};

// Executes the model once per valuation of the uninterpreted functions the
// packet reaches; identical alternatives are merged.
inline std::vector<Alternative> EnumerateOutputs(const dsl::MiddleboxModel& model,
                                                 const dsl::InstanceConfig& cfg,
                                                 const std::string& self,
                                                 const dsl::ModelState& state,
                                                 const dsl::Packet& packet) {
  std::set<Alternative> seen;
  for (dsl::Execution& e : dsl::Execute(model, cfg, self, state, packet)) {
    std::sort(e.outputs.begin(), e.outputs.end());
    seen.insert({std::move(e.outputs), std::move(e.next)});
  }
  return {seen.begin(), seen.end()};
}

inline ConformanceReport CheckConformance(const dsl::MiddleboxModel& model,
                                          const dsl::InstanceConfig& cfg,
                                          const std::string& self,
                                          const std::vector<TraceRecord>& trace) {
  ConformanceReport report;
  report.records = trace.size();
  std::set<dsl::ModelState> states{dsl::ModelState{}};
  for (size_t i = 0; i < trace.size(); ++i) {
    std::vector<dsl::Packet> observed = trace[i].out;
    std::sort(observed.begin(), observed.end());
    std::set<dsl::ModelState> matching;
    std::set<dsl::ModelState> any;
    std::set<std::vector<dsl::Packet>> allowed;
    for (const dsl::ModelState& s : states) {
      for (Alternative& e : EnumerateOutputs(model, cfg, self, s, trace[i].in)) {
        if (e.outputs == observed) matching.insert(e.next);
        allowed.insert(e.outputs);
        any.insert(std::move(e.next));
      }
    }
    if (matching.empty()) {
      report.deviations.push_back({i, trace[i].out, {allowed.begin(), allowed.end()}});
      states = std::move(any);
    } else {
      states = std::move(matching);
    }
  }
  return report;
}

}  // namespace mbv::enforcement

#endif  // MBV_ENFORCEMENT_ENFORCEMENT_H_
