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


// Writes every shipped scenario to <dir>/<name>/{topology,invariants}.json.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mbv/fixtures/scenarios.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gen_fixtures <fixtures-dir>\n";
    return 3;
  }
  namespace fs = std::filesystem;
  for (const mbv::fixtures::Scenario& s : mbv::fixtures::ShippedScenarios()) {
    const fs::path dir = fs::path(argv[1]) / s.name;
    fs::create_directories(dir);
    std::ofstream(dir / "topology.json") << s.topology.dump(2) << "\n";
    std::ofstream(dir / "invariants.json") << s.invariants.dump(2) << "\n";
  }
  return 0;
}
