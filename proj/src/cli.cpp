#include "slpspan/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "slpspan/compute.hpp"
#include "slpspan/enumerate.hpp"
#include "slpspan/membership.hpp"
#include "slpspan/oracle.hpp"

namespace slpspan::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Job {
  std::string slp_path;
  std::string text_path;
  std::string document;
  std::string automaton_path;
  std::string regex;
  std::string alphabet;
  std::string vars;
  std::string format = "text";

  bool tables = false;
  std::string tuple;
  std::uint64_t limit = 0;
  bool count_only = false;
  bool delay_stats = false;
  bool allow_duplicates = false;
  bool no_determinize = false;
  std::uint64_t expand_limit = 100'000'000;
  std::size_t oracle_max_length = 40;
  std::string input;
  std::uint64_t seed = 1;
  std::size_t bench_length = 1 << 16;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string strip_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

Slp load_document(const Job& job) {
  const int sources = !job.slp_path.empty() + !job.text_path.empty() + !job.document.empty();
  if (sources != 1) throw UsageError("give exactly one of --slp, --text, --doc");
  if (!job.slp_path.empty()) return load_slp(read_file(job.slp_path));
  if (!job.text_path.empty()) return build_test_slp(strip_newline(read_file(job.text_path)));
  return build_test_slp(job.document);
}

VariableSet parse_vars(const std::string& list) {
  std::vector<std::string> names;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return VariableSet(std::move(names));
}

std::optional<SpannerAutomaton> load_spanner(const Job& job, const Slp& slp, bool required) {
  const bool has_automaton = !job.automaton_path.empty();
  const bool has_regex = !job.regex.empty();
  if (has_automaton && has_regex) throw UsageError("give either --automaton or --regex, not both");
  if (!has_automaton && !has_regex) {
    if (required) throw UsageError("a spanner is required: --automaton FILE or --regex PATTERN");
    return std::nullopt;
  }
  if (has_automaton) return parse_automaton(read_file(job.automaton_path));
  std::string alphabet = job.alphabet;
  if (alphabet.empty()) {
    for (const Label& l : slp.alphabet()) {
      if (l.is_terminal()) alphabet += l.terminal();
    }
  }
  return compile_spanner_regex(job.regex, alphabet, parse_vars(job.vars));
}

class TupleWriter {
 public:
  TupleWriter(std::ostream& out, std::string format, const VariableSet& vars)
      : out_(out), format_(std::move(format)), vars_(vars) {}

  void header() {
    if (format_ != "tsv") return;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      out_ << (v ? "\t" : "") << vars_.name(static_cast<std::uint32_t>(v)) << ".begin\t"
           << vars_.name(static_cast<std::uint32_t>(v)) << ".end";
    }
    out_ << '\n';
  }

  void write(const SpanTuple& t) {
    if (format_ == "json") {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        const auto& name = vars_.name(static_cast<std::uint32_t>(v));
        if (t[v]) {
          j[name] = {t[v]->begin, t[v]->end};
        } else {
          j[name] = nullptr;
        }
      }
      out_ << j.dump() << '\n';
    } else if (format_ == "tsv") {
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (v) out_ << '\t';
        if (t[v]) out_ << t[v]->begin << '\t' << t[v]->end;
        else out_ << '\t';
      }
      out_ << '\n';
    } else {
      out_ << format_tuple(t, vars_) << '\n';
    }
  }

 private:
  std::ostream& out_;
  std::string format_;
  const VariableSet& vars_;
};

int decision(std::ostream& out, bool value) {
  out << (value ? "true" : "false") << '\n';
  return value ? kTrue : kFalse;
}

std::uint64_t memory_cap_from_env() {
  const char* value = std::getenv(kMemoryCapVariable);
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(value, &end, 10);
  if (end == nullptr || *end != '\0') throw UsageError(std::string(kMemoryCapVariable) + " must be a byte count");
  return cap;
}

int cmd_stats(const Job& job, std::ostream& out) {
  const Slp slp = load_document(job);
  const auto spanner = load_spanner(job, slp, job.tables);
  nlohmann::ordered_json j;
  j["symbols"] = slp.symbol_count();
  j["size"] = slp.size();
  j["depth"] = slp.depth();
  j["length"] = slp.document_length();
  if (spanner) {
    j["states"] = spanner->state_count();
    j["transitions"] = spanner->size();
    j["variables"] = spanner->variables().size();
    j["deterministic"] = spanner->is_deterministic();
  }
  if (job.format == "json") {
    out << j.dump() << '\n';
  } else {
    for (const auto& [key, value] : j.items()) out << key << (job.format == "tsv" ? "\t" : ": ") << value.dump() << '\n';
  }
  if (job.tables) {
    const RelationTables tables = build_sentinel_tables(slp, *spanner);
    const Slp& s = tables.slp();
    const std::size_t q = tables.states();
    out << "# reach tables over the sentinel-extended program ('.' none, 'o' unmarked only, '*' with markers)\n";
    for (SymbolId a = 0; a < s.symbol_count(); ++a) {
      out << s.name(a) << (s.is_leaf(a) ? " (leaf)" : "") << '\n';
      for (StateId i = 0; i < q; ++i) {
        out << "  ";
        for (StateId k = 0; k < q; ++k) out << reach_symbol(tables.reach(a, i, k));
        out << '\n';
      }
    }
    out << "# accepting reachable:";
    for (StateId f : tables.accepting_reachable()) out << ' ' << f + 1;
    out << '\n';
  }
  return kTrue;
}

int cmd_expand(const Job& job, std::ostream& out) {
  out << expand(load_document(job), job.expand_limit) << '\n';
  return kTrue;
}

int cmd_compress(const Job& job, std::ostream& out) {
  if (job.input.empty()) throw UsageError("compress needs --input FILE");
  out << format_slp(build_test_slp(strip_newline(read_file(job.input))));
  return kTrue;
}

int cmd_nonempty(const Job& job, std::ostream& out) {
  const Slp slp = load_document(job);
  return decision(out, check_nonempty(slp, *load_spanner(job, slp, true)));
}

int cmd_check(const Job& job, std::ostream& out) {
  const Slp slp = load_document(job);
  const auto m = load_spanner(job, slp, true);
  return decision(out, model_check(slp, *m, parse_tuple(job.tuple, m->variables())));
}

int cmd_compute(const Job& job, std::ostream& out) {
  const Slp slp = load_document(job);
  const auto m = load_spanner(job, slp, true);
  ComputeOptions options;
  options.memory_cap = memory_cap_from_env();
  const ComputedRelation rel = compute_relation(slp, *m, options);
  if (job.count_only) {
    out << rel.tuples.size() << '\n';
    return kTrue;
  }
  TupleWriter writer(out, job.format, m->variables());
  writer.header();
  for (const auto& t : rel.tuples) writer.write(t);
  return kTrue;
}

int cmd_enum(const Job& job, std::ostream& out, std::ostream& err) {
  const Slp slp = load_document(job);
  const auto m = load_spanner(job, slp, true);
  EnumerateOptions options;
  if (job.no_determinize && !m->is_deterministic()) {
    throw Error("--no-determinize needs a deterministic automaton (use --allow-duplicates to run on an NFA)");
  }
  options.determinize = !job.allow_duplicates && !job.no_determinize;
  if (options.determinize && !m->is_deterministic()) {
    err << "note: determinizing a nondeterministic automaton with " << m->state_count() << " states\n";
  }
  RelationEnumerator enumerator(slp, *m, options);
  TupleWriter writer(out, job.format, m->variables());
  if (!job.count_only) writer.header();
  std::uint64_t count = 0;
  while (job.limit == 0 || count < job.limit) {
    auto t = enumerator.next();
    if (!t) break;
    ++count;
    if (!job.count_only) {
      writer.write(*t);
      out.flush();
    }
  }
  if (job.count_only) out << count << '\n';
  if (job.delay_stats) {
    const auto& d = enumerator.delay_stats();
    err << "delay outputs " << d.outputs << " trees " << d.trees << " preprocessing_steps " << d.preprocessing_steps
        << " max_delay " << d.max_delay << " depth " << enumerator.tables().slp().depth() << " variables "
        << enumerator.variable_count() << '\n';
    for (const auto& [delay, n] : d.histogram) err << "delay " << delay << ' ' << n << '\n';
  }
  return kTrue;
}

int cmd_oracle(const Job& job, std::ostream& out) {
  const Slp slp = load_document(job);
  const auto m = load_spanner(job, slp, true);
  OracleBounds bounds;
  bounds.max_document_length = job.oracle_max_length;
  const auto rel = brute_force_relation(expand(slp, job.oracle_max_length), *m, bounds);
  TupleWriter writer(out, job.format, m->variables());
  writer.header();
  for (const auto& t : rel) writer.write(t);
  return kTrue;
}

// A repetitive document: random seed block, then copies of earlier factors.
std::string generate_document(std::uint64_t seed, std::size_t length) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> letter(0, 2);
  std::string doc;
  while (doc.size() < std::min<std::size_t>(length, 16)) doc += static_cast<char>('a' + letter(rng));
  while (doc.size() < length) {
    std::uniform_int_distribution<std::size_t> start(0, doc.size() - 1);
    const std::size_t from = start(rng);
    std::uniform_int_distribution<std::size_t> len(1, std::min(doc.size() - from, length - doc.size()));
    doc += doc.substr(from, len(rng));
  }
  return doc;
}

// Balanced, without sharing: the cost model of evaluating the plain text.
Slp uncompressed_slp(const std::string& doc) {
  SlpBuilder b;
  auto build = [&](auto&& self, std::size_t lo, std::size_t hi) -> SymbolId {
    if (hi - lo == 1) return b.leaf(Label::terminal(doc[lo]));
    const std::size_t mid = lo + (hi - lo) / 2;
    const SymbolId l = self(self, lo, mid);
    const SymbolId r = self(self, mid, hi);
    return b.pair(l, r);
  };
  return b.build(build(build, 0, doc.size()));
}

int cmd_bench(const Job& job, std::ostream& out) {
  Job local = job;
  Slp slp;
  if (job.slp_path.empty() && job.text_path.empty() && job.document.empty()) {
    slp = build_test_slp(generate_document(job.seed, job.bench_length));
  } else {
    slp = load_document(job);
  }
  if (local.regex.empty() && local.automaton_path.empty()) {
    local.regex = ".* x{ a b }x .*";
    local.vars = "x";
  }
  const auto m = load_spanner(local, slp, true);
  const SpannerAutomaton dfa = m->is_deterministic() ? *m : determinize(*m);

  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  nlohmann::ordered_json report;
  auto measure = [&](const std::string& label, const Slp& program) {
    const auto t0 = Clock::now();
    const bool nonempty = check_nonempty(program, dfa);
    const auto t1 = Clock::now();
    const auto rel = compute_relation(program, dfa);
    const auto t2 = Clock::now();
    RelationEnumerator e(program, dfa);
    std::uint64_t n = 0;
    while (e.next_marker_set()) ++n;
    const auto t3 = Clock::now();
    report[label] = {{"symbols", program.symbol_count()},
                     {"depth", program.depth()},
                     {"nonempty", nonempty},
                     {"nonempty_ms", ms(t1 - t0)},
                     {"compute_ms", ms(t2 - t1)},
                     {"enumerate_ms", ms(t3 - t2)},
                     {"tuples", rel.tuples.size()},
                     {"enumerated", n}};
  };
  report["length"] = slp.document_length();
  report["seed"] = job.seed;
  measure("compressed", slp);
  const auto t0 = Clock::now();
  const std::string doc = expand(slp, job.expand_limit);
  const Slp plain = uncompressed_slp(doc);
  report["expand_ms"] = ms(Clock::now() - t0);
  measure("uncompressed", plain);
  if (job.format == "json") {
    out << report.dump() << '\n';
  } else {
    for (const auto& [key, value] : report.items()) {
      if (value.is_object()) {
        for (const auto& [k2, v2] : value.items()) out << key << '.' << k2 << '\t' << v2.dump() << '\n';
      } else {
        out << key << '\t' << value.dump() << '\n';
      }
    }
  }
  return kTrue;
}

void add_inputs(CLI::App* sub, Job& job) {
  sub->add_option("--slp", job.slp_path, "document as an SLP file");
  sub->add_option("--text", job.text_path, "document as a plain text file (compressed on load)");
  sub->add_option("--doc", job.document, "document given inline");
  sub->add_option("--automaton", job.automaton_path, "spanner automaton file");
  sub->add_option("--regex", job.regex, "spanner regex, e.g. \"(b|c)* x{ a }x .*\"");
  sub->add_option("--alphabet", job.alphabet, "terminal alphabet for --regex (default: the document's)");
  sub->add_option("--vars", job.vars, "comma-separated variables for --regex (default: order of use)");
  sub->add_option("--format", job.format, "output format")->check(CLI::IsMember({"text", "tsv", "json"}));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Job job;
  CLI::App app{"Regular spanners on SLP-compressed documents"};
  app.name(args.empty() ? "slpspan" : args[0]);
  app.require_subcommand(1);

  auto* stats = app.add_subcommand("stats", "size, depth and length of the document; automaton size");
  add_inputs(stats, job);
  stats->add_flag("--tables", job.tables, "dump the reach tables");

  auto* expand_cmd = app.add_subcommand("expand", "print the derived document");
  add_inputs(expand_cmd, job);
  expand_cmd->add_option("--limit", job.expand_limit, "refuse documents longer than this");

  auto* compress = app.add_subcommand("compress", "build a balanced SLP from a text file");
  compress->add_option("--input", job.input, "plain text file")->required();

  auto* nonempty = app.add_subcommand("nonempty", "does the spanner extract anything?");
  add_inputs(nonempty, job);

  auto* check = app.add_subcommand("check", "is the tuple extracted?");
  add_inputs(check, job);
  check->add_option("--tuple", job.tuple, "tuple, e.g. \"x=[1,2> y=_\"")->required();

  auto* compute = app.add_subcommand("compute", "materialize the relation (sorted)");
  add_inputs(compute, job);
  compute->add_flag("--count-only", job.count_only, "print only the number of tuples");

  auto* enumerate = app.add_subcommand("enum", "stream the relation");
  add_inputs(enumerate, job);
  enumerate->add_option("--limit", job.limit, "stop after this many tuples");
  enumerate->add_flag("--count-only", job.count_only, "print only the number of tuples");
  enumerate->add_flag("--delay-stats", job.delay_stats, "report producer steps between outputs on stderr");
  enumerate->add_flag("--allow-duplicates", job.allow_duplicates, "run on the automaton as given, even if nondeterministic");
  enumerate->add_flag("--no-determinize", job.no_determinize, "fail instead of determinizing an NFA");

  auto* oracle = app.add_subcommand("oracle", "brute-force relation on the expanded document");
  add_inputs(oracle, job);
  oracle->add_option("--max-length", job.oracle_max_length, "largest document the oracle accepts");

  auto* bench = app.add_subcommand("bench", "timings on the compressed vs. the expanded document");
  add_inputs(bench, job);
  bench->add_option("--seed", job.seed, "seed for the generated document");
  bench->add_option("--length", job.bench_length, "length of the generated document");
  bench->add_option("--limit", job.expand_limit, "refuse to expand documents longer than this");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (stats->parsed()) return cmd_stats(job, out);
    if (expand_cmd->parsed()) return cmd_expand(job, out);
    if (compress->parsed()) return cmd_compress(job, out);
    if (nonempty->parsed()) return cmd_nonempty(job, out);
    if (check->parsed()) return cmd_check(job, out);
    if (compute->parsed()) return cmd_compute(job, out);
    if (enumerate->parsed()) return cmd_enum(job, out, err);
    if (oracle->parsed()) return cmd_oracle(job, out);
    if (bench->parsed()) return cmd_bench(job, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace slpspan::cli
