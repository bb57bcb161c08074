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

#ifndef MBV_LOGIC_PROGRAM_H_
#define MBV_LOGIC_PROGRAM_H_

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mbv/dsl/ast.h"
#include "mbv/logic/formula.h"

namespace mbv::logic {

struct Assertion {
  FormulaPtr formula;
  // Which model, axiom, constraint or query produced the assertion.
  std::string provenance;
};

enum class FunRole {
  kProjector,
  kRelation,
  kStateRelation,
  kConfig,
  kUninterpreted,
  kSkolem,
  kConstant,
};

struct FunDecl {
  std::string name;
  std::vector<Sort> args;
  Sort result = Sort::kBool;
  FunRole role = FunRole::kConstant;
  // SMT-LIB body over parameters x0..xn for config tables; empty otherwise.
  std::string definition;
};

struct LogicProgram {
  // Values of the enumerated Node and Address sorts, by raw name.
  std::vector<std::string> nodes;
  std::vector<std::string> addresses;
  // Distinct Body constants, by token.
  std::vector<std::string> bodies;
  std::vector<FunDecl> functions;
  std::vector<Assertion> assertions;

  const FunDecl* Find(std::string_view name) const {
    for (const FunDecl& f : functions) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }

  // Adds `f` unless a declaration with the same name exists.
  void Declare(const FunDecl& f) {
    if (!Find(f.name)) functions.push_back(f);
  }
};

// ---- Symbol names --------------------------------------------------------

inline constexpr const char* kSend = "send";
inline constexpr const char* kRecv = "recv";
inline constexpr const char* kSnd = "snd";
inline constexpr const char* kRcv = "rcv";
inline constexpr const char* kEvSrc = "ev_src";
inline constexpr const char* kEvDst = "ev_dst";
inline constexpr const char* kEvPkt = "ev_pkt";
inline constexpr const char* kEvTime = "ev_time";

inline std::string NodeSym(std::string_view name) { return "n." + std::string(name); }
inline std::string AddrSym(std::string_view addr) { return "a." + std::string(addr); }
inline std::string BodySym(std::string_view token) { return "b." + std::string(token); }
inline std::string InstSym(std::string_view inst, std::string_view param) {
  return "m." + std::string(inst) + "." + std::string(param);
}

inline TermPtr NodeConst(std::string_view name) { return App(NodeSym(name), Sort::kNode); }
inline TermPtr AddrConst(std::string_view addr) { return App(AddrSym(addr), Sort::kAddress); }
inline TermPtr BodyConst(std::string_view token) { return App(BodySym(token), Sort::kBody); }

inline std::string ProjectorName(dsl::Field f) {
  switch (f) {
    case dsl::Field::kSrc: return "p_src";
    case dsl::Field::kDst: return "p_dst";
    case dsl::Field::kSrcPort: return "p_sport";
    case dsl::Field::kDstPort: return "p_dport";
    case dsl::Field::kOrigin: return "p_origin";
    case dsl::Field::kBody: return "p_body";
  }
  return "?";
}

inline Sort ToLogicSort(dsl::Sort s) {
  switch (s) {
    case dsl::Sort::kBool: return Sort::kBool;
    case dsl::Sort::kPort: return Sort::kPort;
    case dsl::Sort::kAddress: return Sort::kAddress;
    case dsl::Sort::kNode: return Sort::kNode;
    case dsl::Sort::kBody: return Sort::kBody;
    case dsl::Sort::kPacket: return Sort::kPacket;
  }
  return Sort::kBool;
}

inline TermPtr FieldOf(dsl::Field f, const TermPtr& packet) {
  return App(ProjectorName(f), ToLogicSort(dsl::FieldSort(f)), {packet});
}

inline std::string SanitizeTag(std::string_view tag) {
  std::string out;
  for (char c : tag) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out;
}

// Declarations every encoding relies on: packet projectors and the
// relational send/recv predicates (replaced by events in EPR-F form).
inline void DeclareCore(LogicProgram& p) {
  for (dsl::Field f : dsl::kAllFields) {
    p.Declare({ProjectorName(f), {Sort::kPacket}, ToLogicSort(dsl::FieldSort(f)),
               FunRole::kProjector, ""});
  }
  for (const char* r : {kSend, kRecv}) {
    p.Declare({r, {Sort::kNode, Sort::kNode, Sort::kPacket, Sort::kTime}, Sort::kBool,
               FunRole::kRelation, ""});
  }
}

inline void DeclareEvents(LogicProgram& p) {
  p.Declare({kSnd, {Sort::kEvent}, Sort::kBool, FunRole::kProjector, ""});
  p.Declare({kRcv, {Sort::kEvent}, Sort::kBool, FunRole::kProjector, ""});
  p.Declare({kEvSrc, {Sort::kEvent}, Sort::kNode, FunRole::kProjector, ""});
  p.Declare({kEvDst, {Sort::kEvent}, Sort::kNode, FunRole::kProjector, ""});
  p.Declare({kEvPkt, {Sort::kEvent}, Sort::kPacket, FunRole::kProjector, ""});
  p.Declare({kEvTime, {Sort::kEvent}, Sort::kTime, FunRole::kProjector, ""});
}

// Human-readable listing with provenance tags.
inline std::string Listing(const LogicProgram& p) {
  std::string out;
  for (const Assertion& a : p.assertions) {
    out += "[" + a.provenance + "] " + ToText(a.formula) + "\n";
  }
  return out;
}

}  // namespace mbv::logic

#endif  // MBV_LOGIC_PROGRAM_H_
