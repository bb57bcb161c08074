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

#ifndef MBV_SOLVER_PROCESS_H_
#define MBV_SOLVER_PROCESS_H_

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "mbv/error.h"

namespace mbv::solver {

enum class Outcome { kSat, kUnsat, kUnknown, kProcessError };

inline const char* OutcomeName(Outcome r) {
  switch (r) {
    case Outcome::kSat: return "sat";
    case Outcome::kUnsat: return "unsat";
    case Outcome::kUnknown: return "unknown";
    case Outcome::kProcessError: return "process-error";
  }
  return "?";
}

struct SolverSession {
  // Executable name or path. Empty means $MBV_SOLVER, then "z3".
  std::string solver_path;
  double timeout_sec = 60;
  std::vector<std::string> options;  // extra (set-option ...) lines
  // Option sets raced against each other; the first definitive answer wins.
  // Empty means the solver's default portfolio.
  std::vector<std::vector<std::string>> portfolio;
  bool capture_transcript = false;
};

// One entrant of a race: a query text and its extra solver options.
struct Contender {
  std::string label;
  std::string text;
  std::vector<std::string> options;
};

struct SolverOutcome {
  Outcome kind = Outcome::kUnknown;
  std::string winner;  // label of the contender that answered
  std::string model;   // text following "sat", when present
  std::string reason;  // unknown reason or process error detail
  std::string transcript;
  double seconds = 0;
};

inline std::string ResolveSolverPath(const std::string& path) {
  if (!path.empty()) return path;
  if (const char* env = std::getenv("MBV_SOLVER"); env && *env) return env;
  return "z3";
}

inline std::string Basename(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

namespace process_internal {

class Child {
 public:
  Child(const std::string& path, const std::vector<std::string>& args) {
    int in[2], out[2];
    if (pipe2(in, O_CLOEXEC) != 0 || pipe2(out, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::kSolverFailure, std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(path.c_str()));
    for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_ = fork();
    if (pid_ < 0) throw Error(ErrorCode::kSolverFailure, "fork failed");
    if (pid_ == 0) {
      dup2(in[0], 0);
      dup2(out[1], 1);
      dup2(out[1], 2);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(in[0]);
    close(out[1]);
    to_ = in[1];
    from_ = out[0];
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  ~Child() {
    CloseInput();
    if (from_ >= 0) close(from_);
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  bool Write(const std::string& s) {
    size_t done = 0;
    while (done < s.size()) {
      const ssize_t n = write(to_, s.data() + done, s.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      done += static_cast<size_t>(n);
    }
    return true;
  }

  void CloseInput() {
    if (to_ >= 0) close(to_);
    to_ = -1;
  }

  int fd() const { return from_; }
  bool eof() const { return eof_; }

  // Reads whatever is available after poll reported the descriptor ready.
  void Pump() {
    char chunk[65536];
    const ssize_t n = read(from_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno != EINTR && errno != EAGAIN) eof_ = true;
    } else if (n == 0) {
      eof_ = true;
    } else {
      buf_.append(chunk, static_cast<size_t>(n));
    }
  }

  // Next complete line (or the unterminated remainder after EOF).
  bool NextLine(std::string& line) {
    const size_t nl = buf_.find('\n');
    if (nl != std::string::npos) {
      line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      return true;
    }
    if (eof_ && !buf_.empty()) {
      line = std::move(buf_);
      buf_.clear();
      return true;
    }
    return false;
  }

 private:
  pid_t pid_ = -1;
  int to_ = -1;
  int from_ = -1;
  std::string buf_;
  bool eof_ = false;
};

// Output interpretation for one solver process.
struct Attempt {
  std::unique_ptr<Child> child;
  std::string input;
  std::string output;
  std::string errors;
  std::string model;
  bool verdict = false;
  bool done = false;
  Outcome kind = Outcome::kUnknown;

  void Consume() {
    std::string line;
    while (!done && child->NextLine(line)) {
      output += line + "\n";
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (verdict) {
        model += line + "\n";
        continue;
      }
      if (line.empty() || line == "success") continue;
      if (line.rfind("(error", 0) == 0) {
        errors += line + "\n";
        continue;
      }
      if (!errors.empty()) {
        done = true;
        break;
      }
      if (line == "sat") kind = Outcome::kSat;
      else if (line == "unsat") kind = Outcome::kUnsat;
      else if (line == "unknown") kind = Outcome::kUnknown;
      else {
        errors += line + "\n";
        done = true;
        break;
      }
      verdict = true;
      if (kind != Outcome::kSat) done = true;
    }
    if (child->eof()) done = true;
  }

  bool definitive() const {
    return done && verdict && errors.empty() && kind != Outcome::kUnknown;
  }
};

}  // namespace process_internal

// Session-level options for the named solver.
inline std::string Prelude(const std::string& base) {
  (void)base;
  return "(set-option :produce-models true)\n";
}

// Option sets raced by default. Z3's pure model-based instantiation and its
// default E-matching each stall on queries the other answers at once.
inline std::vector<std::vector<std::string>> DefaultPortfolio(const std::string& base) {
  if (base.find("z3") != std::string::npos) {
    return {{"(set-option :smt.ematching false)"}, {}};
  }
  return {{}};
}

// `text` under each option set of the session's portfolio.
inline std::vector<Contender> Expand(const SolverSession& session, const std::string& label,
                                     const std::string& text) {
  const std::string base = Basename(ResolveSolverPath(session.solver_path));
  const std::vector<std::vector<std::string>> portfolio =
      session.portfolio.empty() ? DefaultPortfolio(base) : session.portfolio;
  std::vector<Contender> out;
  for (size_t i = 0; i < portfolio.size(); ++i) {
    out.push_back({label.empty() ? std::to_string(i) : label + "/" + std::to_string(i), text,
                   portfolio[i]});
  }
  return out;
}

// Runs every contender in its own solver process; the first definitive
// answer wins and the others are killed. Each text carries its own
// (check-sat) and optional (get-model).
inline SolverOutcome RunRace(const SolverSession& session,
                             const std::vector<Contender>& contenders) {
  static const bool sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  const std::string path = ResolveSolverPath(session.solver_path);
  const std::string base = Basename(path);
  std::vector<std::string> args;
  if (base.find("z3") != std::string::npos) {
    args = {"-in"};
  } else if (base.find("cvc") != std::string::npos) {
    args = {"--lang=smt2", "--produce-models"};
  }
  SolverOutcome out;
  const auto start = std::chrono::steady_clock::now();
  const auto deadline =
      start + std::chrono::milliseconds(static_cast<long long>(session.timeout_sec * 1000));
  std::vector<process_internal::Attempt> attempts(contenders.size());
  auto finish = [&](SolverOutcome& o, const process_internal::Attempt* a) -> SolverOutcome& {
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (session.capture_transcript) {
      for (const auto& at : attempts) {
        if (a && &at != a) continue;
        o.transcript += at.input + "\n;; ---- output\n" + at.output;
      }
    }
    return o;
  };
  try {
    for (size_t i = 0; i < contenders.size(); ++i) {
      process_internal::Attempt& a = attempts[i];
      a.input = Prelude(base);
      for (const std::string& o : contenders[i].options) a.input += o + "\n";
      for (const std::string& o : session.options) a.input += o + "\n";
      a.input += contenders[i].text;
      a.child = std::make_unique<process_internal::Child>(path, args);
      if (!a.child->Write(a.input)) {
        out.kind = Outcome::kProcessError;
        out.reason = "cannot write to solver '" + path + "'";
        return finish(out, &a);
      }
      a.child->CloseInput();
    }
    while (true) {
      for (process_internal::Attempt& a : attempts) {
        if (a.definitive()) {
          out.kind = a.kind;
          out.winner = contenders[static_cast<size_t>(&a - attempts.data())].label;
          if (a.kind == Outcome::kSat && a.model.rfind("(error", 0) != 0) out.model = a.model;
          return finish(out, &a);
        }
        if (a.done && !a.errors.empty()) {
          out.kind = Outcome::kProcessError;
          out.reason = a.errors;
          return finish(out, &a);
        }
      }
      std::vector<pollfd> fds;
      std::vector<process_internal::Attempt*> live;
      for (process_internal::Attempt& a : attempts) {
        if (a.done) continue;
        fds.push_back({a.child->fd(), POLLIN, 0});
        live.push_back(&a);
      }
      if (live.empty()) break;
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        out.kind = Outcome::kUnknown;
        out.reason = "timeout";
        return finish(out, nullptr);
      }
      const int r = poll(fds.data(), fds.size(),
                         static_cast<int>(std::min<long long>(left.count(), 1000)));
      if (r < 0 && errno != EINTR) throw Error(ErrorCode::kSolverFailure, "poll failed");
      for (size_t i = 0; r > 0 && i < fds.size(); ++i) {
        if (fds[i].revents == 0) continue;
        live[i]->child->Pump();
        live[i]->Consume();
      }
    }
    // Every attempt ended without a definitive answer.
    for (const process_internal::Attempt& a : attempts) {
      if (a.verdict && a.kind == Outcome::kUnknown) {
        out.kind = Outcome::kUnknown;
        out.reason = "solver returned unknown";
        return finish(out, &a);
      }
    }
    out.kind = Outcome::kProcessError;
    out.reason = "solver '" + path + "' exited without a verdict";
    return finish(out, attempts.empty() ? nullptr : &attempts.front());
  } catch (const Error& e) {
    out.kind = Outcome::kProcessError;
    out.reason = e.what();
    return finish(out, nullptr);
  }
}

// Runs one query under the session's portfolio.
inline SolverOutcome RunQuery(const SolverSession& session, const std::string& text) {
  return RunRace(session, Expand(session, "", text));
}

}  // namespace mbv::solver

#endif  // MBV_SOLVER_PROCESS_H_
