// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "portcheck/corpus.hpp"
#include "portcheck/effects.hpp"
#include "portcheck/errors.hpp"
#include "portcheck/execution.hpp"
#include "portcheck/lang.hpp"
#include "portcheck/models.hpp"
#include "portcheck/portability.hpp"

namespace portcheck::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using PT = std::shared_ptr<const PreTrace>;

enum class Format { Json, Dot, Text };

struct Options {
  std::string command;
  std::vector<std::string> inputs;
  std::string model = "sc";
  std::string target = "tso";
  std::string outcome;
  std::string format = "json";
  std::string bounds;
  unsigned jobs = 1;
  unsigned cap = 12;
  unsigned pretrace = 0;
  bool model_set = false;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "dot") return Format::Dot;
  if (f == "text") return Format::Text;
  throw UsageError("unknown format '" + f + "' (expected json, dot or text)");
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

ModelId model_flag(const std::string& name) {
  try {
    return parse_model(name);
  } catch (const Error&) {
    throw UsageError("unknown model '" + name + "' (expected sc, tso or sra)");
  }
}

SourceFile load_input(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
  return load_source(path);
}

PT one_pretrace(const std::string& path, unsigned which) {
  SourceFile f = load_input(path);
  if (which >= f.pretraces.size()) {
    throw UsageError(path + " has " + std::to_string(f.pretraces.size()) +
                     " pre-trace(s); --pretrace " + std::to_string(which) + " is out of range");
  }
  return f.pretraces[which];
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// po solid, rf green, mo dashed; one cluster per thread.
std::string execution_dot(const Execution& e, const std::string& name) {
  const PreTrace& pt = *e.pt;
  std::ostringstream os;
  os << "digraph \"" << escape_dot(name) << "\" {\n";
  std::map<unsigned, std::vector<unsigned>> by_tid;
  for (unsigned i = 0; i < pt.size(); ++i) by_tid[pt.events[i].tid].push_back(i);
  for (const auto& [tid, events] : by_tid) {
    os << "  subgraph cluster_" << tid << " {\n    label=\""
       << (tid == 0 ? std::string("init") : "T" + std::to_string(tid)) << "\";\n";
    for (unsigned i : events) {
      os << "    e" << i << " [label=\"" << escape_dot(describe(pt.events[i])) << "\"];\n";
    }
    os << "  }\n";
  }
  // Transitive reduction of po keeps the drawing readable.
  const Rel po2 = compose(pt.po, pt.po);
  for (auto [a, b] : pt.po.pairs()) {
    if (!po2.contains(a, b)) os << "  e" << a << " -> e" << b << " [label=\"po\"];\n";
  }
  for (auto [a, b] : e.rf.pairs()) {
    os << "  e" << a << " -> e" << b << " [label=\"rf\", color=green, fontcolor=green];\n";
  }
  const std::vector<unsigned> order = mo_order(e);
  for (std::size_t i = 1; i < order.size(); ++i) {
    os << "  e" << order[i - 1] << " -> e" << order[i] << " [label=\"mo\", style=dashed];\n";
  }
  os << "}\n";
  return os.str();
}

std::string pretrace_dot(const PreTrace& pt, const std::string& name) {
  return execution_dot(Execution{std::make_shared<const PreTrace>(pt), Rel(pt.size()),
                                 Rel(pt.size())},
                       name);
}

std::string execution_text(const Execution& e) {
  const PreTrace& pt = *e.pt;
  std::ostringstream os;
  os << "rf:";
  for (auto [w, r] : e.rf.pairs()) os << " " << pt.events[w].label << "->" << pt.events[r].label;
  os << "\nmo:";
  for (unsigned w : mo_order(e)) os << " " << pt.events[w].label;
  os << "\n";
  return os.str();
}

void emit(std::ostream& out, const ordered_json& doc) { out << doc.dump(2) << "\n"; }

ordered_json document(const char* kind) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["kind"] = kind;
  return doc;
}

// Outcome "k=v,..." where k is a read label or the local a read stores into.
std::vector<std::pair<std::string, std::int64_t>> parse_outcome(const std::string& text) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError("bad outcome term '" + item + "' (expected key=value)");
    }
    std::int64_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("bad outcome value in '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), v);
  }
  if (out.empty()) throw UsageError("empty outcome");
  return out;
}

std::optional<std::vector<std::pair<unsigned, std::int64_t>>> resolve_outcome(
    const PreTrace& pt, const std::vector<std::pair<std::string, std::int64_t>>& terms) {
  std::vector<std::pair<unsigned, std::int64_t>> out;
  for (const auto& [key, v] : terms) {
    std::optional<unsigned> idx = pt.find(key);
    if (!idx) {
      for (unsigned i = 0; i < pt.size(); ++i) {
        if (pt.events[i].is_read() && pt.events[i].local == key) idx = i;
      }
    }
    if (!idx) return std::nullopt;  // not on this path
    if (!pt.events[*idx].is_read()) throw UsageError("outcome key '" + key + "' is not a read");
    out.emplace_back(*idx, v);
  }
  return out;
}

int cmd_parse(const Options& o, Format fmt, std::ostream& out) {
  const std::string text = read_file(o.inputs.at(0));
  const Program prog = parse_program(text);
  const auto traces = extract_pretraces(prog);
  if (fmt == Format::Text) {
    out << render_program(prog);
    for (const PreTrace& pt : traces) {
      out << "# path '" << pt.path << "':";
      for (const Event& e : pt.events) {
        if (!e.is_init()) out << " " << describe(e);
      }
      out << "\n";
    }
    return kOk;
  }
  ordered_json doc = document("parse");
  doc["program"] = render_program(prog);
  ordered_json paths = ordered_json::array();
  for (const PreTrace& pt : traces) {
    ordered_json p;
    p["path"] = pt.path;
    ordered_json labels = ordered_json::object();
    for (const Event& e : pt.events) {
      if (!e.is_init()) labels[e.label] = describe(e);
    }
    p["labels"] = std::move(labels);
    paths.push_back(std::move(p));
  }
  doc["pretraces"] = std::move(paths);
  emit(out, doc);
  return kOk;
}

int cmd_pretraces(const Options& o, Format fmt, std::ostream& out) {
  const SourceFile f = load_input(o.inputs.at(0));
  if (fmt == Format::Dot) {
    for (std::size_t i = 0; i < f.pretraces.size(); ++i) {
      out << pretrace_dot(*f.pretraces[i], f.name + "#" + std::to_string(i));
    }
    return kOk;
  }
  if (fmt == Format::Text) {
    for (const auto& pt : f.pretraces) {
      out << "path '" << pt->path << "': " << pt->size() << " events, "
          << candidate_count(*pt) << " candidates\n";
    }
    return kOk;
  }
  ordered_json doc = document("pretraces");
  doc["source"] = f.name;
  ordered_json arr = ordered_json::array();
  for (const auto& pt : f.pretraces) arr.push_back(store_pretrace(*pt));
  doc["pretraces"] = std::move(arr);
  emit(out, doc);
  return kOk;
}

int cmd_enumerate(const Options& o, Format fmt, bool model_given, std::ostream& out) {
  const PT pt = one_pretrace(o.inputs.at(0), o.pretrace);
  const EnumOptions eo{o.cap};
  std::vector<Execution> execs =
      model_given ? consistent_set(pt, model_flag(o.model), eo) : enumerate_candidates(pt, eo);
  if (fmt == Format::Dot) {
    for (std::size_t i = 0; i < execs.size(); ++i) {
      out << execution_dot(execs[i], "execution " + std::to_string(i));
    }
    return kOk;
  }
  if (fmt == Format::Text) {
    out << execs.size() << (model_given ? " consistent" : "") << " executions\n";
    for (const Execution& e : execs) out << execution_text(e);
    return kOk;
  }
  ordered_json doc = document("enumerate");
  if (model_given) doc["model"] = lower(model_name(model_flag(o.model)));
  doc["count"] = execs.size();
  ordered_json arr = ordered_json::array();
  for (const Execution& e : execs) {
    ordered_json x;
    x["rf"] = store_execution(e)["rf"];
    x["mo"] = store_execution(e)["mo"];
    arr.push_back(std::move(x));
  }
  doc["pretrace"] = store_pretrace(*pt);
  doc["executions"] = std::move(arr);
  emit(out, doc);
  return kOk;
}

int cmd_check(const Options& o, Format fmt, std::ostream& out) {
  const SourceFile f = load_input(o.inputs.at(0));
  const ModelId m = model_flag(o.model);
  const EnumOptions eo{o.cap};
  if (o.outcome.empty()) {
    ordered_json doc = document("check");
    doc["model"] = lower(model_name(m));
    ordered_json arr = ordered_json::array();
    std::uint64_t total_c = 0, total_k = 0;
    for (const auto& pt : f.pretraces) {
      std::uint64_t candidates = 0, consistent = 0;
      for_each_candidate(
          pt,
          [&](const Execution& e) {
            ++candidates;
            consistent += is_consistent(e, m);
          },
          eo);
      total_c += candidates;
      total_k += consistent;
      arr.push_back({{"path", pt->path}, {"candidates", candidates}, {"consistent", consistent}});
    }
    if (fmt == Format::Text) {
      out << total_k << " of " << total_c << " candidates are " << model_name(m)
          << "-consistent\n";
      return kOk;
    }
    doc["pretraces"] = std::move(arr);
    emit(out, doc);
    return kOk;
  }
  const auto terms = parse_outcome(o.outcome);
  std::optional<Execution> witness;
  for (const auto& pt : f.pretraces) {
    const auto resolved = resolve_outcome(*pt, terms);
    if (!resolved) continue;
    witness = find_consistent(
        pt, m,
        [&](const Execution& e) {
          for (auto [r, v] : *resolved) {
            if (e.source(r) < 0 || read_value(e, r) != v) return false;
          }
          return true;
        },
        eo);
    if (witness) break;
  }
  if (fmt == Format::Text) {
    out << (witness ? "reachable" : "unreachable") << "\n";
    if (witness) out << execution_text(*witness);
    return kOk;
  }
  if (fmt == Format::Dot) {
    if (witness) out << execution_dot(*witness, "witness");
    return kOk;
  }
  ordered_json doc = document("check");
  doc["model"] = lower(model_name(m));
  doc["outcome"] = o.outcome;
  doc["verdict"] = witness ? "reachable" : "unreachable";
  if (witness) doc["witness"] = store_execution(*witness);
  emit(out, doc);
  return kOk;
}

int cmd_classify_cycles(const Options& o, Format fmt, std::ostream& out) {
  const PT pt = one_pretrace(o.inputs.at(0), o.pretrace);
  const ModelId m = model_flag(o.model);
  std::map<std::string, std::uint64_t> tally;
  for (const std::string& id : catalogue_ids(m)) tally[id] = 0;
  ordered_json arr = ordered_json::array();
  std::uint64_t inconsistent = 0;
  for_each_candidate(
      pt,
      [&](const Execution& e) {
        if (is_consistent(e, m)) return;
        ++inconsistent;
        ordered_json x;
        x["rf"] = store_execution(e)["rf"];
        x["mo"] = store_execution(e)["mo"];
        ordered_json tags = ordered_json::array();
        for (const CycleHit& h : classify_min_cycles(e, m)) {
          ++tally[h.id];
          ordered_json path = ordered_json::array();
          for (unsigned i : h.path) path.push_back(pt->events[i].label);
          tags.push_back({{"id", h.id}, {"cycle", std::move(path)}});
        }
        x["catalogue"] = std::move(tags);
        arr.push_back(std::move(x));
      },
      EnumOptions{o.cap});
  if (fmt == Format::Text) {
    out << inconsistent << " inconsistent executions\n";
    for (const auto& [id, n] : tally) out << id << " " << n << "\n";
    return kOk;
  }
  ordered_json doc = document("classify-cycles");
  doc["model"] = lower(model_name(m));
  doc["inconsistent"] = inconsistent;
  ordered_json t = ordered_json::object();
  for (const auto& [id, n] : tally) t[id] = n;
  doc["tally"] = std::move(t);
  doc["executions"] = std::move(arr);
  emit(out, doc);
  return kOk;
}

std::pair<PT, PT> pair_inputs(const Options& o) {
  if (o.inputs.size() != 2) throw UsageError(o.command + " takes two inputs: P and P'");
  return {one_pretrace(o.inputs[0], o.pretrace), one_pretrace(o.inputs[1], o.pretrace)};
}

int cmd_diff(const Options& o, Format fmt, std::ostream& out) {
  const auto [p, p2] = pair_inputs(o);
  const Effect eff = diff_effect(*p, *p2);
  ordered_json doc = document("diff");
  doc["effect"] = store_effect(eff);
  if (fmt == Format::Text) {
    out << "st-: " << json(eff.labels(eff.st_minus)).dump() << "\n";
    out << "st+: " << json(eff.labels(eff.st_plus)).dump() << "\n";
    out << "po-: " << json(eff.label_pairs(eff.po_minus)).dump() << "\n";
    out << "po+: " << json(eff.label_pairs(eff.po_plus)).dump() << "\n";
    return kOk;
  }
  emit(out, doc);
  return kOk;
}

int cmd_classify_effect(const Options& o, Format fmt, std::ostream& out) {
  const auto [p, p2] = pair_inputs(o);
  const EffectClass c = classify_effect(*p, *p2);
  if (fmt == Format::Text) {
    out << "wi " << c.wi << "\nwe " << c.we << "\ntuwri " << c.tuwri << "\nww_deord "
        << c.ww_deord << "\nsame_loc_wr_deord " << c.same_loc_wr_deord
        << "\nsame_loc_rw_deord " << c.same_loc_rw_deord << "\nsame_loc_rr_deord "
        << c.same_loc_rr_deord << "\n";
    return kOk;
  }
  ordered_json doc = document("classify-effect");
  doc["class"] = store_effect_class(c);
  emit(out, doc);
  return kOk;
}

int cmd_safety(const Options& o, Format fmt, std::ostream& out) {
  const auto [p, p2] = pair_inputs(o);
  const ModelId m = model_flag(o.model);
  const SafetyResult r = is_safe_effect(p, p2, m, EnumOptions{o.cap});
  if (fmt == Format::Text) {
    out << (r.safe ? "safe" : "unsafe") << " under " << model_name(m) << "\n";
    if (r.counterexample) out << execution_text(*r.counterexample);
    return kOk;
  }
  if (fmt == Format::Dot) {
    if (r.counterexample) out << execution_dot(*r.counterexample, "counterexample");
    return kOk;
  }
  ordered_json doc = document("safety");
  doc["model"] = lower(model_name(m));
  doc["safe"] = r.safe;
  if (r.counterexample) doc["counterexample"] = store_execution(*r.counterexample);
  emit(out, doc);
  return kOk;
}

int cmd_race(const Options& o, Format fmt, std::ostream& out) {
  if (o.inputs.size() == 2) {
    const auto [p, p2] = pair_inputs(o);
    const auto r = introduces_tr(p, p2, EnumOptions{o.cap});
    if (fmt == Format::Text) {
      out << (r ? "introduces a triangular race" : "introduces no triangular race") << "\n";
      if (r) out << json(store_race(r->race)).dump() << "\n" << execution_text(r->execution);
      return kOk;
    }
    ordered_json doc = document("race");
    doc["introduced"] = r.has_value();
    if (r) {
      doc["race"] = store_race(r->race);
      doc["execution"] = store_execution(r->execution);
    }
    emit(out, doc);
    return kOk;
  }
  const PT pt = one_pretrace(o.inputs.at(0), o.pretrace);
  ordered_json arr = ordered_json::array();
  std::uint64_t racy = 0;
  for_each_consistent(
      pt, ModelId::TSO,
      [&](const Execution& e) {
        const auto races = detect_triangular_race(e);
        if (races.empty()) return;
        ++racy;
        ordered_json x;
        x["rf"] = store_execution(e)["rf"];
        x["mo"] = store_execution(e)["mo"];
        ordered_json rs = ordered_json::array();
        for (const auto& r : races) {
          ordered_json rj = store_race(r);
          rj["shape_holds"] = check_atr_shape(e, r);
          rs.push_back(std::move(rj));
        }
        x["races"] = std::move(rs);
        arr.push_back(std::move(x));
      },
      EnumOptions{o.cap});
  if (fmt == Format::Text) {
    out << racy << " TSO-consistent executions with a triangular race\n";
    return kOk;
  }
  ordered_json doc = document("race");
  doc["racy_executions"] = racy;
  doc["executions"] = std::move(arr);
  emit(out, doc);
  return kOk;
}

int cmd_port(const Options& o, Format fmt, std::ostream& out) {
  const auto [p, p2] = pair_inputs(o);
  const ModelId target = model_flag(o.target);
  if (target == ModelId::SC) throw UsageError("--target must be tso or sra");
  const PortVerdict v = port_check(p, p2, target, EnumOptions{o.cap});
  if (fmt == Format::Text) {
    out << "guard " << (v.guard_passes ? "passes" : "fails");
    for (const auto& r : v.guard_reasons) out << "; " << r;
    out << "\nSC " << (v.sc_safe ? "safe" : "unsafe") << ", " << model_name(target) << " "
        << (v.target_safe ? "safe" : "unsafe") << "\n"
        << (v.portable() ? "portable" : "not portable") << "\n";
    if (v.counterexample) out << execution_text(*v.counterexample);
  } else if (fmt == Format::Dot) {
    if (v.counterexample) out << execution_dot(*v.counterexample, "counterexample");
  } else {
    ordered_json doc = document("port");
    doc.update(store_verdict(v));
    doc["target"] = lower(model_name(target));
    emit(out, doc);
  }
  return v.theorem_violation() ? kViolation : kOk;
}

int cmd_search(const Options& o, Format fmt, std::ostream& out, std::ostream& err) {
  SearchBounds b;
  if (!o.bounds.empty()) b = load_bounds(json::parse(read_file(o.bounds)));
  b.jobs = o.jobs;
  const SearchReport r = theorem_search(b);
  if (fmt == Format::Text) {
    out << (r.complete ? "complete" : "incomplete") << ": " << r.programs << " programs, "
        << r.pairs << " pairs, " << r.executions << " executions\n";
    for (const auto& [name, c] : r.claims) {
      out << name << " checked " << c.checked << " violated " << c.violated << "\n";
    }
  } else {
    ordered_json doc = store_search_report(r);
    doc["kind"] = "search";
    emit(out, doc);
  }
  if (!r.complete) {
    err << "search budget exhausted after " << r.programs << " programs\n";
    return kBudget;
  }
  return r.violated() ? kViolation : kOk;
}

int cmd_audit(const Options& o, Format fmt, std::ostream& out) {
  std::vector<SourceFile> files;
  for (const std::string& in : o.inputs) {
    if (std::filesystem::is_directory(in)) {
      for (auto& f : load_corpus(in)) files.push_back(std::move(f));
    } else {
      files.push_back(load_input(in));
    }
  }
  const auto entries = weakness_audit(files, EnumOptions{o.cap});
  const ordered_json doc = [&] {
    ordered_json d = store_audit(entries);
    d["kind"] = "audit";
    return d;
  }();
  if (fmt == Format::Text) {
    for (const AuditEntry& a : entries) {
      out << a.source << (a.path.empty() ? "" : "#" + a.path) << ": SC " << a.sc << " TSO "
          << a.tso << " SRA " << a.sra << "\n";
    }
  } else {
    emit(out, doc);
  }
  return doc["chain_holds"].get<bool>() ? kOk : kViolation;
}

// Applies keys of a JSON config to options not given on the command line.
void apply_config(const std::string& path, CLI::App& sub, Options& o) {
  const json cfg = json::parse(read_file(path));
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  auto unset = [&](const char* flag) {
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  for (const auto& [key, value] : cfg.items()) {
    if (key == "model" && unset("--model")) {
      o.model = value.get<std::string>();
      o.model_set = true;
    }
    else if (key == "target" && unset("--target")) o.target = value.get<std::string>();
    else if (key == "outcome" && unset("--outcome")) o.outcome = value.get<std::string>();
    else if (key == "format" && unset("--format")) o.format = value.get<std::string>();
    else if (key == "bounds" && unset("--bounds")) o.bounds = value.get<std::string>();
    else if (key == "jobs" && unset("--jobs")) o.jobs = value.get<unsigned>();
    else if (key == "cap" && unset("--cap")) o.cap = value.get<unsigned>();
    else if (key == "pretrace" && unset("--pretrace")) o.pretrace = value.get<unsigned>();
    else if (key != "model" && key != "target" && key != "outcome" && key != "format" &&
             key != "bounds" && key != "jobs" && key != "cap" && key != "pretrace") {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Litmus-test engine and SC to TSO/SRA portability checker", "portcheck"};
  app.require_subcommand(1);
  Options o;
  std::string config;

  struct Spec {
    const char* name;
    const char* help;
    int min_inputs, max_inputs;
  };
  const std::vector<Spec> specs = {
      {"parse", "Parse a litmus file and print its label map", 1, 1},
      {"pretraces", "Extract the pre-traces of a litmus or pre-trace file", 1, 1},
      {"enumerate", "Enumerate candidate (or --model consistent) executions", 1, 1},
      {"check", "Count consistent executions or test --outcome reachability", 1, 1},
      {"classify-cycles", "Catalogue tags of every inconsistent execution", 1, 1},
      {"diff", "Transformation effect between P and P'", 2, 2},
      {"classify-effect", "wi, we, tuwri and de-ordering flags of P -> P'", 2, 2},
      {"safety", "Whether P -> P' is safe under --model", 2, 2},
      {"race", "Triangular races of one input, or races P' introduces over P", 1, 2},
      {"port", "Guard and empirical portability of P -> P' to --target", 2, 2},
      {"search", "Bounded search over programs and effect templates", 0, 0},
      {"audit", "SC <= TSO <= SRA inclusion over files or directories", 1, -1},
  };
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, CLI::Option*> model_opts;
  for (const Spec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    subs[s.name] = sub;
    if (s.max_inputs != 0) {
      sub->add_option("inputs", o.inputs, "Input files")
          ->required()
          ->expected(s.min_inputs, s.max_inputs);
    }
    model_opts[s.name] = sub->add_option("--model", o.model, "sc, tso or sra");
    sub->add_option("--target", o.target, "Port target: tso or sra");
    sub->add_option("--outcome", o.outcome, "Read values k=v,... (label or local)");
    sub->add_option("--format", o.format, "json, dot or text");
    sub->add_option("--jobs", o.jobs, "Worker threads for search")->check(CLI::PositiveNumber);
    sub->add_option("--bounds", o.bounds, "Search bounds JSON file");
    sub->add_option("--cap", o.cap, "Maximum program events to enumerate");
    sub->add_option("--pretrace", o.pretrace, "Which pre-trace of a multi-path input");
    sub->add_option("--config", config, "JSON file with defaults for these flags");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "portcheck: " << e.what() << "\n";
    return kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    o.command = sub->get_name();
    if (!config.empty()) apply_config(config, *sub, o);
    const Format fmt = parse_format(o.format);
    const bool model_given = model_opts[o.command]->count() > 0 || o.model_set;
    if (o.command == "parse") return cmd_parse(o, fmt, out);
    if (o.command == "pretraces") return cmd_pretraces(o, fmt, out);
    if (o.command == "enumerate") return cmd_enumerate(o, fmt, model_given, out);
    if (o.command == "check") return cmd_check(o, fmt, out);
    if (o.command == "classify-cycles") return cmd_classify_cycles(o, fmt, out);
    if (o.command == "diff") return cmd_diff(o, fmt, out);
    if (o.command == "classify-effect") return cmd_classify_effect(o, fmt, out);
    if (o.command == "safety") return cmd_safety(o, fmt, out);
    if (o.command == "race") return cmd_race(o, fmt, out);
    if (o.command == "port") return cmd_port(o, fmt, out);
    if (o.command == "search") return cmd_search(o, fmt, out, err);
    if (o.command == "audit") return cmd_audit(o, fmt, out);
  } catch (const ParseError& e) {
    err << "portcheck: parse error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "portcheck: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "portcheck: bad JSON: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace portcheck::cli
