#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "hdfa/build.hpp"
#include "hdfa/engine.hpp"
#include "hdfa/error.hpp"
#include "hdfa/rules.hpp"
#include "hdfa/workload.hpp"

namespace hdfa::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct CliConfig {
  std::string rules;
  std::string db;
  std::vector<std::string> inputs;
  std::string out;
  std::uint32_t sigma = 30;
  double lambda = 0.05;
  std::uint32_t leak_depth = 9;
  std::uint32_t batch = 9;
  std::string region_mode = "hyper";
  std::uint64_t seed = 0;
  std::string engine;  // empty: command default
  std::string format;  // empty: command default
  std::size_t repeat = 5;
  std::string dot;
  std::size_t cases = 1000;
  bool no_gutter = false;
  std::size_t count = 50;
  std::size_t size = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BuildOptions build_options(const CliConfig& c) {
  BuildOptions o;
  o.detector.sigma = c.sigma;
  o.detector.lambda = c.lambda;
  o.detector.leak_depth = c.leak_depth;
  o.detector.mode = parse_region_mode(c.region_mode);
  o.detector.seed = c.seed;
  o.batch = c.batch;
  return o;
}

// Compile diagnostics refer to pattern indices; report rule-file lines.
Build compile_rules(const CliConfig& c, std::ostream& err) {
  RuleSet rules = load_rules(c.rules);
  try {
    return build_database(rules.patterns, build_options(c));
  } catch (const CompileError& e) {
    if (e.diagnostics().empty()) {
      fmt::print(err, "{}: no patterns\n", c.rules);
    }
    for (const auto& d : e.diagnostics()) {
      fmt::print(err, "{}:{}: {}\n", c.rules, rules.line_numbers.at(d.pattern_index), d.message);
    }
    throw;
  }
}

HybridDb open_database(const CliConfig& c, std::ostream& err) {
  if (!c.db.empty()) return load_database(c.db);
  if (!c.rules.empty()) return compile_rules(c, err).db;
  throw UsageError("one of --db or --rules is required");
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return bytes;
}

// Writes to --out when given, otherwise to the command's stdout.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot create '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }
  void finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw IoError("cannot write '" + (path.empty() ? std::string("stdout") : path) + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string format_id_set(std::span<const StateId> ids) {
  return fmt::format("{{{}}}", fmt::join(ids, ","));
}

std::vector<StateId> accept_states(const Dfa& dfa) {
  std::vector<StateId> out;
  for (StateId s = 0; s < dfa.state_count(); ++s)
    if (dfa.is_accept(s)) out.push_back(s);
  return out;
}

EngineKind parse_engine(const std::string& name) {
  if (name == "scalar") return EngineKind::Scalar;
  return EngineKind::Hybrid;
}

EngineOptions engine_options(const CliConfig& c) {
  EngineOptions o;
  o.use_gutter = !c.no_gutter;
  return o;
}

double gbps(std::uint64_t bytes, double seconds) {
  return seconds > 0 ? 8.0 * static_cast<double>(bytes) / seconds / 1e9 : 0.0;
}

// ---------------------------------------------------------------- compile

int cmd_compile(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.rules.empty()) throw UsageError("compile needs --rules");
  const std::string target = !c.out.empty() ? c.out : c.db;
  if (target.empty()) throw UsageError("compile needs --out (or --db) for the database file");
  Build b = compile_rules(c, err);
  save_database(target, b.db);

  std::size_t patterns = b.dfa.pattern_count();
  if (c.format == "jsonl") {
    json j = {{"patterns", patterns}, {"states", b.dfa.state_count()}, {"database", target}};
    if (b.report.accepted) {
      j["region_size"] = b.report.accepted->members.size();
      j["leakiness"] = b.report.accepted->leakiness;
      j["stickiness_sum"] = b.report.accepted->stickiness_sum;
    } else {
      j["region_size"] = nullptr;
    }
    out << j.dump() << '\n';
    return kOk;
  }
  fmt::print(out, "patterns: {}\n", patterns);
  fmt::print(out, "dfa states: {}\n", b.dfa.state_count());
  if (b.report.accepted) {
    fmt::print(out, "region size: {}\n", b.report.accepted->members.size());
    fmt::print(out, "leakiness: {}\n", b.report.accepted->leakiness);
    fmt::print(out, "stickiness sum: {}\n", b.report.accepted->stickiness_sum);
  } else {
    fmt::print(out, "region size: none ({})\n", b.report.reason);
  }
  fmt::print(out, "wrote {}\n", target);
  return kOk;
}

// ---------------------------------------------------------------- scan

struct FileScan {
  std::string output;
  std::uint64_t bytes = 0;
  std::uint64_t events = 0;
};

FileScan scan_one(const HybridDb& db, const std::string& path, bool with_file, bool jsonl, EngineKind engine,
                  const EngineOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  FileScan r;
  std::string buffer;
  auto emit = [&](const MatchEvent& e) {
    ++r.events;
    if (jsonl) {
      json j;
      if (with_file) j["file"] = path;
      j["pattern"] = e.pattern;
      j["offset"] = e.offset;
      buffer += j.dump();
      buffer += '\n';
    } else if (with_file) {
      buffer += fmt::format("{}: offset {} pattern {}\n", path, e.offset, e.pattern);
    } else {
      buffer += fmt::format("offset {} pattern {}\n", e.offset, e.pattern);
    }
  };
  StreamState state = initial_state(db);
  std::vector<char> chunk(1 << 20);
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    std::span<const std::uint8_t> piece(reinterpret_cast<const std::uint8_t*>(chunk.data()), got);
    state = scan_stream(db, state, piece, emit, engine, options);
  }
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  r.bytes = state.consumed;
  r.output = std::move(buffer);
  return r;
}

int cmd_scan(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.inputs.empty()) throw UsageError("scan needs at least one --input");
  const bool jsonl = c.format.empty() || c.format == "jsonl";
  const HybridDb db = open_database(c, err);
  const EngineKind engine = parse_engine(c.engine);
  const EngineOptions options = engine_options(c);
  const bool with_file = c.inputs.size() > 1;

  auto t0 = Clock::now();
  std::vector<std::future<FileScan>> jobs;
  for (const auto& path : c.inputs) {
    jobs.push_back(std::async(std::launch::async, scan_one, std::cref(db), path, with_file, jsonl, engine, options));
  }
  std::vector<FileScan> results;
  for (auto& j : jobs) results.push_back(j.get());
  double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();

  OutputTarget target(c.out, out);
  std::uint64_t bytes = 0, events = 0;
  for (const auto& r : results) {
    target.get() << r.output;
    bytes += r.bytes;
    events += r.events;
  }
  if (jsonl) {
    json s = {{"summary", {{"files", c.inputs.size()},
                           {"bytes", bytes},
                           {"events", events},
                           {"elapsed_s", elapsed},
                           {"throughput_bps", elapsed > 0 ? 8.0 * static_cast<double>(bytes) / elapsed : 0.0}}}};
    target.get() << s.dump() << '\n';
  } else {
    fmt::print(target.get(), "scanned {} bytes in {} file(s): {} events, {:.6f} s, {:.3f} Gbit/s\n", bytes,
               c.inputs.size(), events, elapsed, gbps(bytes, elapsed));
  }
  target.finish(c.out);
  return kOk;
}

// ---------------------------------------------------------------- bench

double timed_pass(const HybridDb& db, std::span<const std::uint8_t> input, EngineKind engine,
                  const EngineOptions& options, std::uint64_t& events) {
  events = 0;
  auto sink = [&](const MatchEvent&) { ++events; };
  auto t0 = Clock::now();
  scan_stream(db, initial_state(db), input, sink, engine, options);
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int cmd_bench(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.repeat < 1) throw UsageError("--repeat must be at least 1");
  const HybridDb db = open_database(c, err);
  std::vector<std::uint8_t> input;
  std::string source;
  if (c.inputs.empty()) {
    std::size_t size = c.size ? c.size : (std::size_t{16} << 20);
    input = region_circulating_input(db, size, c.seed);
    source = fmt::format("region-circulating synthetic, seed {}", c.seed);
  } else {
    for (const auto& path : c.inputs) {
      auto b = read_bytes(path);
      input.insert(input.end(), b.begin(), b.end());
    }
    source = fmt::format("{}", fmt::join(c.inputs, ","));
  }

  std::vector<EngineKind> engines;
  if (c.engine.empty() || c.engine == "hybrid") engines.push_back(EngineKind::Hybrid);
  if (c.engine.empty() || c.engine == "scalar") engines.push_back(EngineKind::Scalar);

  const EngineOptions options = engine_options(c);
  const bool jsonl = c.format == "jsonl";
  json report = {{"bytes", input.size()},
                 {"repeat", c.repeat},
                 {"input", source},
                 {"region_size", db.region_size()},
                 {"backend", to_string(options.backend.value_or(default_backend()))}};
  if (!jsonl) {
    fmt::print(out, "input: {} ({} bytes)\n", source, input.size());
    fmt::print(out, "region size: {}, permute backend: {}\n", db.region_size(),
               to_string(options.backend.value_or(default_backend())));
  }
  std::vector<double> medians;
  for (EngineKind engine : engines) {
    std::uint64_t events = 0;
    timed_pass(db, input, engine, options, events);  // warm-up
    std::vector<double> rates;
    for (std::size_t i = 0; i < c.repeat; ++i) rates.push_back(gbps(input.size(), timed_pass(db, input, engine, options, events)));
    std::sort(rates.begin(), rates.end());
    double median = rates.size() % 2 ? rates[rates.size() / 2]
                                     : 0.5 * (rates[rates.size() / 2 - 1] + rates[rates.size() / 2]);
    medians.push_back(median);
    const char* name = engine == EngineKind::Hybrid ? "hybrid" : "scalar";
    report[name] = {{"median_gbps", median}, {"events", events}};
    if (!jsonl) fmt::print(out, "{}: {:.3f} Gbit/s median of {} ({} events)\n", name, median, c.repeat, events);
  }
  if (engines.size() == 2) {
    double ratio = medians[1] > 0 ? medians[0] / medians[1] : 0.0;
    report["ratio"] = ratio;
    if (!jsonl) fmt::print(out, "ratio hybrid/scalar: {:.3f}\n", ratio);
  }
  if (jsonl) out << report.dump() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- inspect

std::string escape_byte(unsigned b) {
  if (b == '"' || b == '\\') return fmt::format("\\\\{}", static_cast<char>(b));
  if (b > 0x20 && b < 0x7f) return std::string(1, static_cast<char>(b));
  return fmt::format("\\\\x{:02x}", b);
}

std::string byte_label(const ByteSet& bytes) {
  const bool negate = bytes.count() > 128;
  const ByteSet shown = negate ? ~bytes : bytes;
  std::string label = negate ? "^" : "";
  for (unsigned b = 0; b < 256;) {
    if (!shown.test(b)) {
      ++b;
      continue;
    }
    unsigned e = b;
    while (e + 1 < 256 && shown.test(e + 1)) ++e;
    label += escape_byte(b);
    if (e > b) label += (e > b + 1 ? "-" : "") + escape_byte(e);
    b = e + 1;
  }
  return label.empty() ? "any" : label;
}

void write_dot(const std::string& path, const Dfa& dfa, std::span<const StateId> region) {
  std::ofstream dot(path, std::ios::trunc);
  if (!dot) throw IoError("cannot create '" + path + "'");
  std::vector<bool> in_region(dfa.state_count(), false);
  for (StateId s : region) in_region[s] = true;
  dot << "digraph hdfa {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (StateId s = 0; s < dfa.state_count(); ++s) {
    std::vector<std::string> attrs;
    if (dfa.is_accept(s)) attrs.push_back("shape=doublecircle");
    if (in_region[s]) {
      attrs.push_back("hyper_region=true");
      attrs.push_back("style=filled");
      attrs.push_back("fillcolor=lightblue");
    }
    if (s == dfa.start()) attrs.push_back("penwidth=2");
    fmt::print(dot, "  s{} [label=\"{}\"{}{}];\n", s, s, attrs.empty() ? "" : ",", fmt::join(attrs, ","));
  }
  for (StateId s = 0; s < dfa.state_count(); ++s) {
    for (const EdgeBundle& e : edge_bundles(dfa, s)) {
      fmt::print(dot, "  s{} -> s{} [label=\"{}\"];\n", e.source, e.destination, byte_label(e.bytes));
    }
  }
  dot << "}\n";
  if (!dot) throw IoError("cannot write '" + path + "'");
}

struct InspectData {
  Dfa dfa;
  EngineParams params;
  std::vector<SccInfo> sccs;
  std::vector<CandidateReport> candidates;
  std::vector<StateId> region;
  std::optional<double> leakiness;
  std::optional<std::uint64_t> stickiness;
  std::string decision;
};

InspectData gather_inspect(const CliConfig& c, std::ostream& err) {
  if (!c.rules.empty() && c.db.empty()) {
    Build b = compile_rules(c, err);
    InspectData d{b.dfa, b.db.params(), b.report.sccs, b.report.candidates, {}, {}, {}, b.report.reason};
    if (b.report.accepted) {
      d.region = b.report.accepted->members;
      d.leakiness = b.report.accepted->leakiness;
      d.stickiness = b.report.accepted->stickiness_sum;
    }
    return d;
  }
  if (c.db.empty()) throw UsageError("inspect needs --db or --rules");
  HybridDb db = load_database(c.db);
  Dfa dfa = db.to_dfa();
  DetectorConfig none;
  none.mode = RegionMode::None;
  InspectData d{dfa, db.params(), detect_with_report(dfa, none).sccs, {}, {}, {}, {}, ""};
  if (db.has_region()) {
    for (RuntimeId r = 0; r < db.region_size(); ++r) d.region.push_back(db.dense_index(r));
    d.leakiness = region_leakiness(dfa, d.region, d.region.front(), db.params().leak_depth);
    d.decision = "stored in database";
  } else {
    d.decision = "scalar-only database";
  }
  return d;
}

int cmd_inspect(const CliConfig& c, std::ostream& out, std::ostream& err) {
  InspectData d = gather_inspect(c, err);
  const auto accepts = accept_states(d.dfa);
  if (c.format == "jsonl") {
    json j;
    j["parameters"] = {{"sigma", d.params.sigma},
                       {"lambda", d.params.lambda},
                       {"batch", d.params.batch},
                       {"leak_depth", d.params.leak_depth}};
    j["states"] = d.dfa.state_count();
    j["scc_count"] = d.sccs.size();
    j["sccs"] = json::array();
    for (const auto& s : d.sccs)
      j["sccs"].push_back({{"members", s.members}, {"stickiness_sum", s.stickiness_sum}, {"distance", s.distance}});
    j["candidates"] = json::array();
    for (const auto& cand : d.candidates)
      j["candidates"].push_back({{"scc", cand.scc.members},
                                 {"region", cand.plan.members},
                                 {"leakiness", cand.plan.leakiness},
                                 {"accepted", cand.accepted},
                                 {"reason", cand.reason}});
    j["region"] = d.region.empty() ? json(nullptr) : json(d.region);
    j["leakiness"] = d.leakiness ? json(*d.leakiness) : json(nullptr);
    j["stickiness_sum"] = d.stickiness ? json(*d.stickiness) : json(nullptr);
    j["accept_states"] = accepts;
    j["decision"] = d.decision;
    out << j.dump() << '\n';
  } else {
    fmt::print(out, "parameters: sigma={} lambda={} batch={} leak_depth={}\n", d.params.sigma, d.params.lambda,
               d.params.batch, d.params.leak_depth);
    fmt::print(out, "states: {}\n", d.dfa.state_count());
    fmt::print(out, "sccs: {}\n", d.sccs.size());
    for (const auto& s : d.sccs) {
      fmt::print(out, "  scc {} stickiness {} distance {}\n", format_id_set(s.members), s.stickiness_sum, s.distance);
    }
    for (const auto& cand : d.candidates) {
      fmt::print(out, "candidate {} -> {} leakiness {}: {}\n", format_id_set(cand.scc.members),
                 format_id_set(cand.plan.members), cand.plan.leakiness, cand.accepted ? "accepted" : cand.reason);
    }
    if (d.region.empty()) {
      fmt::print(out, "region: none\n");
    } else {
      fmt::print(out, "region: {}\n", format_id_set(d.region));
      fmt::print(out, "leakiness: {}\n", *d.leakiness);
      if (d.stickiness) fmt::print(out, "stickiness sum: {}\n", *d.stickiness);
    }
    fmt::print(out, "accept states: {}\n", format_id_set(accepts));
    fmt::print(out, "decision: {}\n", d.decision);
  }
  if (!c.dot.empty()) write_dot(c.dot, d.dfa, d.region);
  return kOk;
}

// ---------------------------------------------------------------- difftest

std::string hex(std::span<const std::uint8_t> bytes) {
  std::string s;
  for (auto b : bytes) s += fmt::format("{:02x}", b);
  return s;
}

std::string describe(const ScanResult& r) {
  std::vector<std::string> ev;
  for (const auto& e : r.events) ev.push_back(fmt::format("({},{})", e.pattern, e.offset));
  return fmt::format("final state {} after {} bytes, events [{}]", r.final_state.state, r.final_state.consumed,
                     fmt::join(ev, " "));
}

int cmd_difftest(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const HybridDb db = open_database(c, err);
  DifftestConfig cfg;
  cfg.cases = c.cases;
  cfg.seed = c.seed;
  cfg.options = engine_options(c);
  DifftestResult r = run_difftest(db, cfg);
  if (!r.divergence) {
    fmt::print(out, "difftest: {} cases, {} bytes, region size {}, no divergence\n", r.cases_run, r.bytes_scanned,
               db.region_size());
    return kOk;
  }
  const Divergence& d = *r.divergence;
  fmt::print(out, "difftest: divergence in case {} of {}\n", d.case_index, c.cases);
  fmt::print(out, "reproducer ({} bytes, shrunk from {}): {}\n", d.input.size(), d.original_length, hex(d.input));
  fmt::print(out, "hybrid: {}\n", describe(d.hybrid));
  fmt::print(out, "scalar: {}\n", describe(d.scalar));
  return kDiverged;
}

// ---------------------------------------------------------------- synth

int cmd_synth_rules(const CliConfig& c, std::ostream& out) {
  OutputTarget target(c.out, out);
  for (const auto& p : synthetic_ruleset(c.count, c.seed)) target.get() << p << '\n';
  target.finish(c.out);
  return kOk;
}

int cmd_synth_input(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) throw UsageError("synth-input needs --out");
  const HybridDb db = open_database(c, err);
  auto bytes = region_circulating_input(db, c.size ? c.size : (std::size_t{1} << 20), c.seed);
  OutputTarget target(c.out, out);
  target.get().write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  target.finish(c.out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Multi-pattern regex matcher with a batched hot-region engine", "hdfa"};
  app.require_subcommand(1);

  auto add_source = [&](CLI::App* s) {
    s->add_option("--rules", c.rules, "Rule file, one regex per line");
    s->add_option("--db", c.db, "Compiled .hfxd database");
  };
  auto add_build = [&](CLI::App* s) {
    s->add_option("--sigma", c.sigma, "Stickiness threshold")->capture_default_str();
    s->add_option("--lambda", c.lambda, "Leakiness threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    s->add_option("--leak-depth", c.leak_depth, "Leakiness evaluation depth")
        ->check(CLI::Range(1u, 1u << 20))
        ->capture_default_str();
    s->add_option("--batch", c.batch, "Bytes per batch")->check(CLI::Range(1u, kMaxBatch))->capture_default_str();
    s->add_option("--region-mode", c.region_mode, "Region selection")
        ->check(CLI::IsMember({"hyper", "random", "none"}))
        ->capture_default_str();
    s->add_option("--seed", c.seed, "Seed for random choices")->capture_default_str();
  };
  auto add_format = [&](CLI::App* s) {
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"jsonl", "text"}));
  };
  auto add_engine = [&](CLI::App* s) {
    s->add_option("--engine", c.engine, "Engine")->check(CLI::IsMember({"hybrid", "scalar"}));
    s->add_flag("--no-gutter", c.no_gutter)->group("");
  };

  auto* compile = app.add_subcommand("compile", "Compile a rule file into a database");
  add_source(compile);
  add_build(compile);
  add_format(compile);
  compile->add_option("--out", c.out, "Database output path");

  auto* scan = app.add_subcommand("scan", "Report matches in input files");
  add_source(scan);
  add_build(scan);
  add_format(scan);
  add_engine(scan);
  scan->add_option("--input", c.inputs, "Input file (repeatable)");
  scan->add_option("--out", c.out, "Write events here instead of stdout");

  auto* bench = app.add_subcommand("bench", "Measure scan throughput");
  add_source(bench);
  add_build(bench);
  add_format(bench);
  add_engine(bench);
  bench->add_option("--input", c.inputs, "Input file (repeatable); synthetic when absent");
  bench->add_option("--repeat", c.repeat, "Timed passes per engine")->capture_default_str();
  bench->add_option("--size", c.size, "Synthetic input size in bytes");

  auto* inspect = app.add_subcommand("inspect", "Show the automaton and region decision");
  add_source(inspect);
  add_build(inspect);
  add_format(inspect);
  inspect->add_option("--dot", c.dot, "Write the automaton as a DOT graph");

  auto* difftest = app.add_subcommand("difftest", "Compare the hybrid engine with the table walk");
  add_source(difftest);
  add_build(difftest);
  difftest->add_option("--cases", c.cases, "Number of random inputs")->capture_default_str();
  difftest->add_flag("--no-gutter", c.no_gutter)->group("");

  auto* synth_rules = app.add_subcommand("synth-rules", "Print a synthetic rule set");
  synth_rules->add_option("--count", c.count, "Number of rules")->capture_default_str();
  synth_rules->add_option("--seed", c.seed, "Generator seed")->capture_default_str();
  synth_rules->add_option("--out", c.out, "Output file");

  auto* synth_input = app.add_subcommand("synth-input", "Write input that keeps the region busy");
  add_source(synth_input);
  add_build(synth_input);
  synth_input->add_option("--size", c.size, "Bytes to generate (default 1 MiB)");
  synth_input->add_option("--out", c.out, "Output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (compile->parsed()) return cmd_compile(c, out, err);
    if (scan->parsed()) return cmd_scan(c, out, err);
    if (bench->parsed()) return cmd_bench(c, out, err);
    if (inspect->parsed()) return cmd_inspect(c, out, err);
    if (difftest->parsed()) return cmd_difftest(c, out, err);
    if (synth_rules->parsed()) return cmd_synth_rules(c, out);
    if (synth_input->parsed()) return cmd_synth_input(c, out, err);
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const CompileError&) {
    return kCompileFailed;  // diagnostics already printed
  } catch (const CapacityError& e) {
    fmt::print(err, "compile error: {}\n", e.what());
    return kCompileFailed;
  } catch (const IoError& e) {
    fmt::print(err, "i/o error: {}\n", e.what());
    return kIoFailed;
  } catch (const DatabaseError& e) {
    fmt::print(err, "bad database: {}\n", e.what());
    return kIoFailed;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  }
  return kUsage;
}

}  // namespace hdfa::cli
