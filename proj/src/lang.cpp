// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/lang.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "portcheck/errors.hpp"

namespace portcheck {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view line, std::size_t line_no)
      : s_(line), line_(line_no) {}

  Thread thread() {
    skip_ws();
    Thread t;
    t.pos = pos();
    const std::int64_t tid = integer("thread id");
    if (tid <= 0) {
      fail(t.pos, tid == 0 ? "tid 0 is reserved for initialization"
                           : "thread id must be positive");
    }
    t.tid = static_cast<unsigned>(tid);
    expect(':');
    t.body = block(/*in_braces=*/false);
    skip_ws();
    if (!at_end()) fail(pos(), "unexpected '" + std::string(1, peek()) + "'");
    return t;
  }

 private:
  Block block(bool in_braces) {
    Block out;
    for (;;) {
      skip_ws();
      if (at_end()) {
        if (in_braces) fail(pos(), "missing '}'");
        return out;
      }
      if (peek() == '}') {
        if (!in_braces) fail(pos(), "unmatched '}'");
        return out;
      }
      if (peek() == ';') {
        ++i_;
        continue;
      }
      out.push_back(statement());
      if (std::holds_alternative<IfStmt>(out.back().node)) continue;
      skip_ws();
      if (!at_end() && peek() != ';' && peek() != '}') {
        fail(pos(), "expected ';'");
      }
    }
  }

  Stmt statement() {
    Stmt st;
    st.pos = pos();
    const std::string word = ident("statement");
    skip_ws();
    if (word == "if" && !at_end() && peek() == '(') {
      st.node = if_stmt();
      return st;
    }
    if (word == "rmw" && !at_end() && peek() == '(') {
      ++i_;
      RmwStmt r;
      r.loc = ident("location");
      expect(',');
      r.local = ident("local");
      expect(',');
      r.value = integer("value");
      expect(')');
      st.node = r;
      return st;
    }
    expect('=');
    skip_ws();
    const SourcePos rhs = pos();
    if (at_end() || peek() == ';' || peek() == '}') {
      fail(rhs, "missing value after '='");
    }
    if (peek() == '-' || std::isdigit(static_cast<unsigned char>(peek()))) {
      st.node = WriteStmt{word, integer("value")};
    } else {
      st.node = ReadStmt{word, ident("location")};
    }
    return st;
  }

  IfStmt if_stmt() {
    IfStmt s;
    expect('(');
    skip_ws();
    const SourcePos cpos = pos();
    const std::string first = ident("condition");
    if (first == "true" || first == "false") {
      s.cond.op = first == "true" ? Cond::Op::True : Cond::Op::False;
    } else {
      skip_ws();
      if (s_.substr(i_, 2) == "==") {
        s.cond.op = Cond::Op::Eq;
      } else if (s_.substr(i_, 2) == "!=") {
        s.cond.op = Cond::Op::Ne;
      } else {
        fail(cpos, "condition must be true, false, a==v or a!=v");
      }
      i_ += 2;
      s.cond.local = first;
      s.cond.value = integer("value");
    }
    expect(')');
    expect('{');
    s.then_arm = block(true);
    expect('}');
    skip_ws();
    if (s_.substr(i_, 4) == "else" &&
        (i_ + 4 >= s_.size() ||
         !(std::isalnum(static_cast<unsigned char>(s_[i_ + 4])) ||
           s_[i_ + 4] == '_'))) {
      i_ += 4;
      expect('{');
      s.else_arm = block(true);
      expect('}');
    }
    return s;
  }

  std::string ident(const char* what) {
    skip_ws();
    const SourcePos p = pos();
    const std::size_t start = i_;
    if (at_end() ||
        !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
      fail(p, std::string("expected ") + what);
    }
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                         peek() == '_')) {
      ++i_;
    }
    return std::string(s_.substr(start, i_ - start));
  }

  std::int64_t integer(const char* what) {
    skip_ws();
    const SourcePos p = pos();
    std::int64_t v = 0;
    const char* b = s_.data() + i_;
    const char* e = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr == b) fail(p, std::string("expected ") + what);
    i_ += static_cast<std::size_t>(ptr - b);
    return v;
  }

  void expect(char c) {
    skip_ws();
    if (at_end() || peek() != c) {
      fail(pos(), std::string("expected '") + c + "'");
    }
    ++i_;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++i_;
  }

  [[noreturn]] void fail(SourcePos p, const std::string& what) const {
    throw ParseError(p.line, p.column, what);
  }

  SourcePos pos() const { return {line_, i_ + 1}; }
  bool at_end() const { return i_ >= s_.size(); }
  char peek() const { return s_[i_]; }

  std::string_view s_;
  std::size_t line_;
  std::size_t i_ = 0;
};

// Role of every identifier, checked for location/local conflicts.
class Roles {
 public:
  void location(const std::string& name, SourcePos p) { note(name, true, p); }
  void local(const std::string& name, SourcePos p) { note(name, false, p); }

  void check_cond_local(const std::string& name, SourcePos p) const {
    const auto it = roles_.find(name);
    if (it == roles_.end()) {
      throw ParseError(p.line, p.column,
                       "condition uses '" + name + "', which is never read into");
    }
    if (it->second) {
      throw ParseError(p.line, p.column,
                       "condition uses shared location '" + name + "'");
    }
  }

 private:
  void note(const std::string& name, bool is_loc, SourcePos p) {
    if (name == "if" || name == "rmw" || name == "else" || name == "true" ||
        name == "false") {
      throw ParseError(p.line, p.column, "'" + name + "' is a keyword");
    }
    const auto [it, fresh] = roles_.emplace(name, is_loc);
    if (!fresh && it->second != is_loc) {
      throw ParseError(p.line, p.column,
                       "'" + name +
                           "' is used both as a shared location and as a "
                           "local (writes of locals are not supported)");
    }
  }

  std::map<std::string, bool> roles_;
};

void collect_roles(const Block& b, Roles& roles,
                   std::vector<std::pair<std::string, SourcePos>>& conds) {
  for (const Stmt& s : b) {
    if (const auto* w = std::get_if<WriteStmt>(&s.node)) {
      roles.location(w->loc, s.pos);
    } else if (const auto* r = std::get_if<ReadStmt>(&s.node)) {
      roles.local(r->local, s.pos);
      roles.location(r->loc, s.pos);
    } else if (const auto* u = std::get_if<RmwStmt>(&s.node)) {
      roles.location(u->loc, s.pos);
      roles.local(u->local, s.pos);
    } else {
      const auto& f = std::get<IfStmt>(s.node);
      if (!f.cond.local.empty()) conds.emplace_back(f.cond.local, s.pos);
      collect_roles(f.then_arm, roles, conds);
      collect_roles(f.else_arm, roles, conds);
    }
  }
}

struct PathEvents {
  std::string choices;
  std::vector<Event> events;
};

// All paths through `b`, extending every prefix in `acc`.
void expand(unsigned tid, const Block& b, std::vector<PathEvents>& acc) {
  for (const Stmt& s : b) {
    if (const auto* f = std::get_if<IfStmt>(&s.node)) {
      std::vector<PathEvents> next;
      for (const PathEvents& p : acc) {
        std::vector<PathEvents> left{{p.choices + "L", p.events}};
        expand(tid, f->then_arm, left);
        std::vector<PathEvents> right{{p.choices + "R", p.events}};
        expand(tid, f->else_arm, right);
        next.insert(next.end(), left.begin(), left.end());
        next.insert(next.end(), right.begin(), right.end());
      }
      acc = std::move(next);
      continue;
    }
    for (PathEvents& p : acc) {
      Event e;
      e.tid = tid;
      e.label = "T" + std::to_string(tid) + "." + p.choices + "." +
                std::to_string(p.events.size());
      if (const auto* w = std::get_if<WriteStmt>(&s.node)) {
        e.kind = Kind::Write;
        e.loc = w->loc;
        e.wval = w->value;
      } else if (const auto* r = std::get_if<ReadStmt>(&s.node)) {
        e.kind = Kind::Read;
        e.loc = r->loc;
        e.local = r->local;
      } else {
        const auto& u = std::get<RmwStmt>(s.node);
        e.kind = Kind::Update;
        e.loc = u.loc;
        e.local = u.local;
        e.wval = u.value;
      }
      p.events.push_back(std::move(e));
    }
  }
}

std::string render_block(const Block& b);

std::string render_cond(const Cond& c) {
  switch (c.op) {
    case Cond::Op::True:
      return "true";
    case Cond::Op::False:
      return "false";
    case Cond::Op::Eq:
      return c.local + "==" + std::to_string(c.value);
    case Cond::Op::Ne:
      return c.local + "!=" + std::to_string(c.value);
  }
  return "true";
}

std::string render_stmt(const Stmt& s) {
  if (const auto* w = std::get_if<WriteStmt>(&s.node)) {
    return w->loc + "=" + std::to_string(w->value) + ";";
  }
  if (const auto* r = std::get_if<ReadStmt>(&s.node)) {
    return r->local + "=" + r->loc + ";";
  }
  if (const auto* u = std::get_if<RmwStmt>(&s.node)) {
    return "rmw(" + u->loc + "," + u->local + "," + std::to_string(u->value) +
           ");";
  }
  const auto& f = std::get<IfStmt>(s.node);
  return "if(" + render_cond(f.cond) + "){" + render_block(f.then_arm) +
         "}else{" + render_block(f.else_arm) + "}";
}

std::string render_block(const Block& b) {
  std::string out;
  for (const Stmt& s : b) {
    if (!out.empty()) out += " ";
    out += render_stmt(s);
  }
  return out;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program prog;
  std::set<unsigned> tids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      Thread t = Parser(line, line_no).thread();
      if (!tids.insert(t.tid).second) {
        throw ParseError(t.pos.line, t.pos.column,
                         "duplicate tid " + std::to_string(t.tid));
      }
      prog.threads.push_back(std::move(t));
    }
    start = end + 1;
  }
  if (prog.threads.empty()) throw ParseError(1, 1, "program has no threads");
  Roles roles;
  std::vector<std::pair<std::string, SourcePos>> conds;
  for (const Thread& t : prog.threads) collect_roles(t.body, roles, conds);
  for (const auto& [name, p] : conds) roles.check_cond_local(name, p);
  return prog;
}

std::vector<PreTrace> extract_pretraces(const Program& p) {
  std::vector<std::vector<PathEvents>> per_thread;
  for (const Thread& t : p.threads) {
    std::vector<PathEvents> paths{{}};
    expand(t.tid, t.body, paths);
    per_thread.push_back(std::move(paths));
  }
  std::vector<PreTrace> out;
  std::vector<std::size_t> pick(per_thread.size(), 0);
  for (;;) {
    std::vector<Event> events;
    std::vector<std::pair<unsigned, unsigned>> po;
    std::string path;
    for (std::size_t t = 0; t < per_thread.size(); ++t) {
      const PathEvents& pe = per_thread[t][pick[t]];
      if (!path.empty()) path += ";";
      path += "T" + std::to_string(p.threads[t].tid) + "=" + pe.choices;
      const auto base = static_cast<unsigned>(events.size());
      for (std::size_t k = 0; k < pe.events.size(); ++k) {
        if (k > 0) po.emplace_back(base + k - 1, base + k);
        events.push_back(pe.events[k]);
      }
    }
    out.push_back(make_pretrace(std::move(events), po, std::move(path)));
    // Odometer with the last thread varying fastest.
    std::size_t t = per_thread.size();
    while (t > 0) {
      --t;
      if (++pick[t] < per_thread[t].size()) break;
      pick[t] = 0;
      if (t == 0) return out;
    }
    if (per_thread.empty()) return out;
  }
}

std::string render_program(const Program& p) {
  std::string out;
  for (const Thread& t : p.threads) {
    out += std::to_string(t.tid) + ": " + render_block(t.body) + "\n";
  }
  return out;
}

}  // namespace portcheck
