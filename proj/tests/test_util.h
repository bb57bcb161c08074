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

#ifndef MBV_TESTS_TEST_UTIL_H_
#define MBV_TESTS_TEST_UTIL_H_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mbv/cli/commands.h"
#include "mbv/dsl/parser.h"
#include "mbv/fixtures/scenarios.h"
#include "mbv/network/spec.h"
#include "mbv/oracle/oracle.h"
#include "mbv/rono/rono.h"
#include "mbv/verifier/invariant.h"
#include "mbv/verifier/verifier.h"

namespace mbv::testing {

inline std::string FixturePath(const std::string& rel) {
  return std::string(MBV_FIXTURE_DIR) + "/" + rel;
}

inline std::string ReadFixture(const std::string& rel) {
  std::ifstream in(FixturePath(rel));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline dsl::MiddleboxModel LoadModel(const std::string& name) {
  return dsl::ParseModel(ReadFixture("models/" + name + ".mbx"));
}

inline const network::ModelLibrary& Library() {
  static const network::ModelLibrary lib = network::LoadModelDirectory(FixturePath("models"));
  return lib;
}

inline network::NetworkSpec LoadNet(const nlohmann::json& topology) {
  return network::LoadNetwork(topology.dump(), Library());
}

// Shipped scenario by name; aborts the test binary when absent.
inline fixtures::Scenario ScenarioNamed(const std::string& name) {
  for (fixtures::Scenario& s : fixtures::ShippedScenarios()) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no scenario " + name);
}

inline network::NetworkSpec ScenarioNet(const std::string& name) {
  return LoadNet(ScenarioNamed(name).topology);
}

inline std::vector<verifier::Invariant> Invariants(const nlohmann::json& list) {
  return verifier::ParseInvariants(list.dump());
}

inline verifier::VerifierOptions SolverOptions(double timeout_sec = 120) {
  verifier::VerifierOptions o;
  o.session.solver_path = solver::ResolveSolverPath("");
  o.session.timeout_sec = timeout_sec;
  return o;
}

// Plans and checks `invs` on `net` in `mode`.
inline cli::VerifyRun Verify(const network::NetworkSpec& net,
                             const std::vector<verifier::Invariant>& invs,
                             rono::Mode mode = rono::Mode::kAuto,
                             const verifier::VerifierOptions& opts = SolverOptions()) {
  return cli::RunVerification(cli::Prepare(net), invs, mode, opts, 1);
}

inline cli::VerifyRun VerifyScenario(const std::string& name, rono::Mode mode = rono::Mode::kAuto) {
  const fixtures::Scenario s = ScenarioNamed(name);
  return Verify(LoadNet(s.topology), Invariants(s.invariants), mode);
}

// Injections a witness makes at hosts, in time order.
inline std::vector<oracle::Injection> WitnessTrace(const network::NetworkSpec& net,
                                                   const verifier::Witness& w) {
  std::vector<oracle::Injection> out;
  for (const verifier::WitnessEvent& e : w.HostSends(net)) out.push_back({e.from, e.packet});
  return out;
}

}  // namespace mbv::testing

#endif  // MBV_TESTS_TEST_UTIL_H_
