// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_LANG_HPP_
#define PORTCHECK_LANG_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "portcheck/pretrace.hpp"

namespace portcheck {

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Cond {
  enum class Op { True, False, Eq, Ne };
  Op op = Op::True;
  std::string local;
  std::int64_t value = 0;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct WriteStmt {
  std::string loc;
  std::int64_t value = 0;
};
struct ReadStmt {
  std::string local;
  std::string loc;
};
struct RmwStmt {
  std::string loc;
  std::string local;
  std::int64_t value = 0;
};
struct IfStmt {
  Cond cond;
  Block then_arm;
  Block else_arm;
};

struct Stmt {
  std::variant<WriteStmt, ReadStmt, RmwStmt, IfStmt> node;
  SourcePos pos;
};

struct Thread {
  unsigned tid = 0;
  Block body;
  SourcePos pos;
};

struct Program {
  std::vector<Thread> threads;
};

/// Parses litmus text: one `tid: stmt; stmt; ...` line per thread, `#`
/// comments. Throws ParseError with the offending line and column.
Program parse_program(std::string_view text);

/// One pre-trace per combination of branch arms, both arms of every
/// conditional taken regardless of its condition. Paths are produced in
/// thread order, L before R.
std::vector<PreTrace> extract_pretraces(const Program& p);

/// Litmus text that parses back to `p`.
std::string render_program(const Program& p);

}  // namespace portcheck

#endif  // PORTCHECK_LANG_HPP_
