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

#ifndef MBV_SOLVER_SMTLIB_H_
#define MBV_SOLVER_SMTLIB_H_

#include <set>
#include <string>

#include "mbv/logic/formula.h"
#include "mbv/logic/program.h"

namespace mbv::solver {

// SMT-LIB 2.6 text for `p`: sorts, value constants, declarations and
// assertions, then (check-sat) and, if requested, (get-model).
inline std::string EmitSmtLib(const logic::LogicProgram& p, bool get_model = true) {
  namespace L = ::mbv::logic;
  std::string out;
  out += "(define-sort Port () Int)\n(define-sort Time () Int)\n";
  out += "(declare-sort Packet 0)\n(declare-sort Event 0)\n(declare-sort Body 0)\n";
  auto datatype = [&](const char* sort, const std::vector<std::string>& values, auto sym) {
    if (values.empty()) {
      out += std::string("(declare-sort ") + sort + " 0)\n";
      return;
    }
    out += std::string("(declare-datatypes ((") + sort + " 0)) ((";
    for (size_t i = 0; i < values.size(); ++i) out += (i ? " (" : "(") + sym(values[i]) + ")";
    out += ")))\n";
  };
  datatype("Node", p.nodes, [](const std::string& s) { return L::NodeSym(s); });
  datatype("Address", p.addresses, [](const std::string& s) { return L::AddrSym(s); });
  for (const std::string& b : p.bodies) out += "(declare-const " + L::BodySym(b) + " Body)\n";
  if (p.bodies.size() > 1) {
    out += "(assert (distinct";
    for (const std::string& b : p.bodies) out += " " + L::BodySym(b);
    out += "))\n";
  }
  for (const L::FunDecl& f : p.functions) {
    if (f.definition.empty()) {
      out += "(declare-fun " + f.name + " (";
      for (size_t i = 0; i < f.args.size(); ++i) {
        out += (i ? " " : "") + std::string(L::SortName(f.args[i]));
      }
      out += ") " + std::string(L::SortName(f.result)) + ")\n";
    } else {
      out += "(define-fun " + f.name + " (";
      for (size_t i = 0; i < f.args.size(); ++i) {
        out += (i ? " (x" : "(x") + std::to_string(i) + " " +
               std::string(L::SortName(f.args[i])) + ")";
      }
      out += ") " + std::string(L::SortName(f.result)) + " " + f.definition + ")\n";
    }
  }
  for (const L::Assertion& a : p.assertions) {
    out += "; " + a.provenance + "\n(assert " + L::ToSmt(a.formula) + ")\n";
  }
  out += "(check-sat)\n";
  if (get_model) out += "(get-model)\n";
  return out;
}

}  // namespace mbv::solver

#endif  // MBV_SOLVER_SMTLIB_H_
