#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ltlzinc/csv.hpp"
#include "ltlzinc/dataset.hpp"
#include "ltlzinc/error.hpp"
#include "ltlzinc/inference.hpp"
#include "ltlzinc/task.hpp"

namespace ltlzinc::cli {
namespace {

namespace fs = std::filesystem;

// Bad flags, unknown names and unreadable specs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kCacheEnv = "LTLZINC_CACHE_DIR";
constexpr std::uint64_t kListedSeeds[] = {12345, 67890, 88888};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

// A built-in task name or a YAML file.
TaskSpec load_spec(const std::string& source) {
  if (auto spec = builtin_task(source)) return *spec;
  if (!fs::is_regular_file(source)) {
    std::string names;
    for (const auto& n : builtin_task_names()) names += (names.empty() ? "" : ", ") + n;
    throw UsageError("'" + source + "' is neither a file nor a built-in task (" + names + ")");
  }
  try {
    return load_task_yaml(source);
  } catch (const ParseError& e) {
    throw UsageError(source + ":" + e.what());
  }
}

// Translation is the slow part of compilation, so the automaton is cached
// per spec hash when the cache directory variable is set.
CompiledTask compile_cached(const TaskSpec& spec, std::ostream* log = nullptr,
                           std::size_t max_states = CompileOptions{}.max_states) {
  CompileOptions opts;
  opts.max_states = max_states;
  const char* dir = std::getenv(kCacheEnv);
  std::optional<fs::path> entry;
  if (dir != nullptr && *dir != '\0') {
    entry = fs::path(dir) / (spec_hash(spec) + ".dfa.json");
    if (fs::is_regular_file(*entry)) {
      opts.precompiled = dfa_from_json(read_file(*entry));
      if (log) *log << "cache: hit " << entry->string() << "\n";
    }
  }
  CompiledTask task = compile_task(spec, opts);
  if (entry && !opts.precompiled) {
    write_file(*entry, dfa_to_json(task.dfa()));
    if (log) *log << "cache: stored " << entry->string() << "\n";
  }
  return task;
}

struct Loaded {
  CompiledTask task;
  Dataset ds;
};

// A dataset directory, or a spec to generate from in memory.
Loaded load_source(const std::string& source, unsigned jobs) {
  if (fs::is_directory(source)) {
    Dataset ds = read_dataset(source);
    CompiledTask task = compile_cached(ds.spec);
    return {std::move(task), std::move(ds)};
  }
  CompiledTask task = compile_cached(load_spec(source));
  Dataset ds = generate_dataset(task, jobs);
  return {std::move(task), std::move(ds)};
}

EngineKind parse_engine(const std::string& name) {
  if (auto k = engine_from_name(name)) return *k;
  std::string valid;
  for (const auto& n : engine_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw UsageError("unknown engine '" + name + "'; valid engines: " + valid);
}

OracleConfig parse_oracle(const std::string& kind, const std::string& target, double p,
                          std::uint64_t seed) {
  OracleConfig cfg;
  auto k = oracle_kind_from_name(kind);
  if (!k) throw UsageError("unknown oracle '" + kind + "'; valid: perfect, flip, confidence");
  auto t = oracle_target_from_name(target);
  if (!t) throw UsageError("unknown oracle target '" + target + "'; valid: ic, iccc");
  cfg.kind = *k;
  cfg.target = *t;
  cfg.p = p;
  cfg.seed = seed;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::vector<std::uint64_t> seed_list(std::size_t n) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(i < std::size(kListedSeeds) ? kListedSeeds[i]
                                               : derive_seed(kListedSeeds[0], {i}));
  }
  return out;
}

std::string fmt_ratio(std::size_t num, std::size_t den) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << (den ? static_cast<double>(num) / den : 0.0);
  return s.str();
}

// ---------------------------------------------------------------------------
// Subcommands

struct CompileArgs {
  std::string spec;
  std::string out;
  std::size_t max_states = 10'000;
};

int cmd_compile(const CompileArgs& a, std::ostream& out) {
  const TaskSpec spec = load_spec(a.spec);
  const CompiledTask task = compile_cached(spec, &out, a.max_states);
  const Dfa& d = task.dfa();
  out << "task: " << spec.name << "\n";
  out << "spec_hash: " << spec_hash(spec) << "\n";
  out << "atoms: ";
  for (std::size_t i = 0; i < d.num_atoms(); ++i) out << (i ? " " : "") << d.atoms()[i];
  out << "\nstates: " << d.num_states() << "\n";
  out << "accepting:";
  for (StateId s : d.accepting_states()) out << " " << s;
  out << "\nguards:\n";
  for (StateId s = 0; s < d.num_states(); ++s) {
    for (StateId t = 0; t < d.num_states(); ++t) {
      const Guard g = transition_guard(d, s, t);
      if (g.letters.empty()) continue;
      out << "  " << s << " -> " << t << " : " << to_string(g.formula) << "\n";
    }
  }
  std::size_t usable = 0;
  for (Letter l = 0; l < d.num_letters(); ++l) usable += task.solutions().usable(l);
  out << "usable_letters: " << usable << "/" << d.num_letters() << "\n";
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "dfa.json", dfa_to_json(d));
    out << "wrote: " << (fs::path(a.out) / "dfa.json").string() << "\n";
  }
  return kExitOk;
}

struct GenerateArgs {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> positive_ratio;
  std::optional<std::size_t> train, val, test;
  unsigned jobs = 1;
  std::string pools;
  int epoch = 0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  TaskSpec spec = load_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  if (a.positive_ratio) spec.positive_ratio = *a.positive_ratio;
  if (a.train) spec.splits.train = *a.train;
  if (a.val) spec.splits.val = *a.val;
  if (a.test) spec.splits.test = *a.test;
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const CompiledTask task = compile_cached(spec);
  Dataset ds = generate_dataset(task, a.jobs);
  if (!a.pools.empty()) ds = attach_image_indices(ds, image_pools_from_json(read_file(a.pools)), a.epoch);
  fs::create_directories(a.out);
  write_dataset(ds, task, a.out);
  out << "task: " << spec.name << "\nspec_hash: " << ds.metadata.spec_hash
      << "\nseed: " << spec.seed << "\n";
  for (Split s : kAllSplits) {
    std::size_t pos = 0;
    for (const auto& x : ds.split(s)) pos += x.label;
    out << split_name(s) << ": " << ds.split(s).size() << " sequences, " << pos
        << " positive (" << fmt_ratio(pos, ds.split(s).size()) << ")\n";
  }
  out << "wrote: " << dataset_files(a.out).csv.string() << "\n";
  return kExitOk;
}

struct InferArgs {
  std::string source;
  std::string engine = "exact";
  std::string oracle = "perfect";
  std::string target = "iccc";
  double p = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::string split = "test";
  bool calibrate = false;
  unsigned jobs = 1;
  std::string out;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  const EngineKind engine = parse_engine(a.engine);
  const OracleConfig cfg = parse_oracle(a.oracle, a.target, a.p, a.seed);
  Split split;
  try {
    split = split_from_name(a.split);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const Loaded l = load_source(a.source, a.jobs);
  EvaluateOptions opts;
  opts.split = split;
  opts.jobs = a.jobs;
  opts.calibrate = a.calibrate;
  const Evaluation ev = evaluate(l.task, l.ds, engine, cfg, opts);
  const SweepRow row{l.task.spec().name, engine, cfg, ev.metrics};
  const std::vector<SweepRow> rows = {row};
  const std::string csv = sweep_csv(rows);
  nlohmann::ordered_json j;
  j["task"] = row.task;
  j["engine"] = engine_name(engine);
  j["oracle_target"] = oracle_target_name(cfg.target);
  j["oracle_kind"] = oracle_kind_name(cfg.kind);
  j["p"] = cfg.p;
  j["seed"] = cfg.seed;
  j["split"] = split_name(split);
  j["sequences"] = ev.sequences;
  auto put = [&](const char* k, const std::optional<double>& v) {
    j[k] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  put("ic_acc", ev.metrics.ic_acc);
  put("cc_acc", ev.metrics.cc_acc);
  put("nsp_acc", ev.metrics.nsp_acc);
  put("sc_acc", ev.metrics.sc_acc);
  j["avg_acc"] = ev.metrics.average();
  put("temperature", ev.temperature);
  j["min_mass"] = ev.min_mass;
  j["max_mass_deviation"] = ev.max_mass_deviation;
  out << csv;
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "metrics.csv", csv);
    write_file(fs::path(a.out) / "metrics.json", j.dump(2) + "\n");
  }
  return kExitOk;
}

struct SweepArgs {
  std::string source;
  std::vector<double> noise = kDefaultNoiseLevels;
  std::size_t seeds = 5;
  std::vector<std::string> engines = {"exact", "fuzzy-p", "sddnnf-p"};
  std::vector<std::string> targets = {"ic", "iccc"};
  bool calibrate = false;
  unsigned jobs = 1;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<EngineKind> engines;
  for (const auto& e : a.engines) engines.push_back(parse_engine(e));
  std::vector<OracleTarget> targets;
  for (const auto& t : a.targets) {
    auto v = oracle_target_from_name(t);
    if (!v) throw UsageError("unknown oracle target '" + t + "'; valid: ic, iccc");
    targets.push_back(*v);
  }
  for (double p : a.noise) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("noise levels must lie in [0, 1]");
  }
  if (a.seeds == 0) throw UsageError("--seeds must be at least 1");
  std::vector<OracleConfig> grid;
  for (const auto& c : default_oracle_grid(a.noise)) {
    if (std::find(targets.begin(), targets.end(), c.target) != targets.end()) grid.push_back(c);
  }
  const Loaded l = load_source(a.source, a.jobs);
  SweepOptions opts;
  opts.evaluate.jobs = a.jobs;
  opts.evaluate.calibrate = a.calibrate;
  const auto seeds = seed_list(a.seeds);
  const auto rows = oracle_sweep(l.task, l.ds, grid, engines, seeds, opts);
  const std::string csv = sweep_csv(rows);
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(fs::path(a.out) / "sweep.csv", csv);
    write_file(fs::path(a.out) / "summary.json", sweep_summary_json(rows));
    out << "rows: " << rows.size() << "\nwrote: " << (fs::path(a.out) / "sweep.csv").string()
        << "\n";
  }
  return kExitOk;
}

struct BaselineArgs {
  std::string source;
  unsigned jobs = 1;
};

int cmd_baseline(const BaselineArgs& a, std::ostream& out) {
  const Loaded l = load_source(a.source, a.jobs);
  const MpBaselines mp = mp_baselines(l.ds);
  out << "task: " << l.task.spec().name << "\n"
      << "modal_state: " << mp.modal_state << "\n"
      << "modal_label: " << mp.modal_label << "\n"
      << "mp_successor: " << format_metric(mp.mp_successor) << "\n"
      << "mp_sequence: " << format_metric(mp.mp_sequence) << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string csv;
  std::string out;
};

std::optional<double> metric_field(const std::string& s, std::size_t line, std::size_t col) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("sweep CSV: '" + s + "' is not a number", line, col);
}

// Rebuilds sweep rows from a long-format CSV and prints per-group means.
int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto table = parse_csv(read_file(a.csv));
  const CsvRow header = {"task", "engine", "oracle_target", "oracle_kind", "p", "seed",
                         "ic_acc", "cc_acc", "nsp_acc", "sc_acc", "avg_acc"};
  if (table.empty() || table[0] != header) {
    throw ParseError("sweep CSV: unexpected header", 1, 1);
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const CsvRow& r = table[i];
    const std::size_t line = i + 1;
    if (r.size() != header.size()) throw ParseError("sweep CSV: wrong field count", line, 1);
    auto engine = engine_from_name(r[1]);
    auto target = oracle_target_from_name(r[2]);
    auto kind = oracle_kind_from_name(r[3]);
    if (!engine || !target || !kind) throw ParseError("sweep CSV: unknown name", line, 2);
    SweepRow row{r[0], *engine, {*target, *kind, *metric_field(r[4], line, 5), 0}, {}};
    try {
      row.oracle.seed = std::stoull(r[5]);
    } catch (const std::exception&) {
      throw ParseError("sweep CSV: bad seed", line, 6);
    }
    row.metrics.ic_acc = metric_field(r[6], line, 7);
    row.metrics.cc_acc = metric_field(r[7], line, 8);
    row.metrics.nsp_acc = metric_field(r[8], line, 9);
    row.metrics.sc_acc = metric_field(r[9], line, 10);
    rows.push_back(std::move(row));
  }
  const std::string summary = sweep_summary_json(rows);
  const auto j = nlohmann::json::parse(summary);
  out << "task,engine,oracle_target,oracle_kind,p,seeds,sc_mean,sc_std,avg_mean,avg_std\n";
  for (const auto& g : j["groups"]) {
    auto stat = [&](const char* k, const char* s) {
      return g.contains(k) ? format_metric(g[k][s].get<double>()) : std::string();
    };
    out << g["task"].get<std::string>() << "," << g["engine"].get<std::string>() << ","
        << g["oracle_target"].get<std::string>() << "," << g["oracle_kind"].get<std::string>()
        << "," << g["p"].get<double>() << "," << g["seeds"].get<std::size_t>() << ","
        << stat("sc_acc", "mean") << "," << stat("sc_acc", "std") << ","
        << stat("avg_acc", "mean") << "," << stat("avg_acc", "std") << "\n";
  }
  if (!a.out.empty()) write_file(a.out, summary);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generate and evaluate LTLf-constrained sequence benchmarks", "ltlzinc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kGeneratorVersion));
  app.footer("Exit codes: 0 success, 1 runtime failure, 2 usage error.\n"
             "Environment: LTLZINC_CACHE_DIR caches translated automata by spec hash.");

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Translate a task's formula and report the automaton");
  compile->add_option("spec", ca.spec, "Built-in task name or YAML spec")->required();
  compile->add_option("-o,--out", ca.out, "Directory for dfa.json");
  compile->add_option("--max-states", ca.max_states, "Translation state cap")
      ->check(CLI::PositiveNumber);

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Generate a dataset (CSV plus JSON sidecar)");
  generate->add_option("spec", ga.spec, "Built-in task name or YAML spec")->required();
  generate->add_option("-o,--out", ga.out, "Output directory")->required();
  generate->add_option("--seed", ga.seed, "Master seed (default: the spec's, 12345)");
  generate->add_option("--positive-ratio", ga.positive_ratio, "Fraction of positive sequences")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--train", ga.train, "Train split size");
  generate->add_option("--val", ga.val, "Validation split size");
  generate->add_option("--test", ga.test, "Test split size");
  generate->add_option("-j,--jobs", ga.jobs, "Worker threads")->check(CLI::PositiveNumber);
  generate->add_option("--pools", ga.pools, "Image pool JSON {train|test: {source: {class: [idx]}}}")
      ->check(CLI::ExistingFile);
  generate->add_option("--epoch", ga.epoch, "Resample epoch for image indices")
      ->check(CLI::NonNegativeNumber);

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "Run an engine under an oracle and report metrics");
  infer->add_option("source", ia.source, "Dataset directory, built-in task or YAML spec")->required();
  infer->add_option("-e,--engine", ia.engine, "exact, fuzzy-p, fuzzy-lp, sddnnf-p, sddnnf-lp");
  infer->add_option("--oracle", ia.oracle, "perfect, flip or confidence");
  infer->add_option("--target", ia.target, "ic or ic+cc (alias iccc)");
  infer->add_option("-p,--noise", ia.p, "Oracle noise level");
  infer->add_option("--seed", ia.seed, "Oracle seed");
  infer->add_option("--split", ia.split, "Evaluated split");
  infer->add_flag("--calibrate", ia.calibrate, "Fit a temperature on the validation split");
  infer->add_option("-j,--jobs", ia.jobs, "Worker threads")->check(CLI::PositiveNumber);
  infer->add_option("-o,--out", ia.out, "Directory for metrics.csv and metrics.json");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Oracle noise sweep across engines and seeds");
  sweep->add_option("source", sa.source, "Dataset directory, built-in task or YAML spec")->required();
  sweep->add_option("--p", sa.noise, "Noise levels (0 selects the perfect oracle)")->delimiter(',');
  sweep->add_option("--seeds", sa.seeds, "Number of seeds (12345, 67890, 88888, then derived)");
  sweep->add_option("--engines", sa.engines, "Engines")->delimiter(',');
  sweep->add_option("--targets", sa.targets, "Oracle targets")->delimiter(',');
  sweep->add_flag("--calibrate", sa.calibrate, "Fit temperatures on the validation split");
  sweep->add_option("-j,--jobs", sa.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("-o,--out", sa.out, "Directory for sweep.csv and summary.json");

  BaselineArgs ba;
  auto* baseline = app.add_subcommand("baseline", "Most-probable-class baselines");
  baseline->add_option("source", ba.source, "Dataset directory, built-in task or YAML spec")->required();
  baseline->add_option("-j,--jobs", ba.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Summarize a sweep CSV (mean and sample std per group)");
  report->add_option("csv", ra.csv, "sweep.csv")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--out", ra.out, "Write the JSON summary here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kGeneratorVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*compile) return cmd_compile(ca, out);
    if (*generate) return cmd_generate(ga, out);
    if (*infer) return cmd_infer(ia, out);
    if (*sweep) return cmd_sweep(sa, out);
    if (*baseline) return cmd_baseline(ba, out);
    if (*report) return cmd_report(ra, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ltlzinc::cli
