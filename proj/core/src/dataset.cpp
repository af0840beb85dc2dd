#include "ltlzinc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "ltlzinc/csv.hpp"
#include "ltlzinc/error.hpp"

namespace ltlzinc {

std::string_view split_name(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_name(std::string_view name) {
  for (Split s : kAllSplits) {
    if (split_name(s) == name) return s;
  }
  throw DomainError("unknown split '" + std::string(name) + "'");
}

std::size_t positive_count(std::size_t n, double positive_ratio) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * positive_ratio));
}

// ---------------------------------------------------------------------------
// Generation

SequenceSample generate_sequence(const CompiledTask& task, int label,
                                 std::size_t length, Rng& rng) {
  const Dfa& dfa = task.dfa();
  const bool accept = label == 1;
  if (length == 0 || !task.reachable(dfa.initial(), length, accept)) {
    throw DomainError("no " + std::string(accept ? "positive" : "negative") +
                      " sequence of length " + std::to_string(length) +
                      " is reachable");
  }
  SequenceSample out;
  out.label = accept ? 1 : 0;
  out.values.reserve(length);
  out.letters.reserve(length);
  out.states.reserve(length);

  std::vector<Letter> feasible;
  StateId state = dfa.initial();
  for (std::size_t t = 0; t < length; ++t) {
    const std::size_t remaining = length - t - 1;
    feasible.clear();
    for (Letter l = 0; l < dfa.num_letters(); ++l) {
      if (task.solutions().usable(l) &&
          task.reachable(dfa.next(state, l), remaining, accept)) {
        feasible.push_back(l);
      }
    }
    // Non-empty by the reachability invariant.
    const Letter letter = feasible[rng.uniform_index(feasible.size())];
    out.values.push_back(task.solutions().sample(letter, rng));
    out.letters.push_back(letter);
    state = dfa.next(state, letter);
    out.states.push_back(state);
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t split_size(const TaskSpec& spec, Split s) {
  switch (s) {
    case Split::Train: return spec.splits.train;
    case Split::Val: return spec.splits.val;
    case Split::Test: return spec.splits.test;
  }
  return 0;
}

}  // namespace

Dataset generate_dataset(const CompiledTask& task, unsigned jobs) {
  const TaskSpec& spec = task.spec();
  Dataset ds;
  ds.spec = spec;
  ds.metadata.spec_hash = spec_hash(spec);
  ds.metadata.seed = spec.seed;

  for (Split split : kAllSplits) {
    const std::size_t n = split_size(spec, split);
    const auto split_id = static_cast<std::uint64_t>(split);
    std::vector<int> labels(n, 0);
    std::fill_n(labels.begin(), positive_count(n, spec.positive_ratio), 1);
    Rng shuffle(derive_seed(spec.seed, {tag_of("labels"), split_id}));
    for (std::size_t i = n; i > 1; --i) {
      std::swap(labels[i - 1], labels[shuffle.uniform_index(i)]);
    }

    auto& out = ds.split(split);
    out.resize(n);
    const std::size_t span = spec.length.max - spec.length.min + 1;
    parallel_for(n, jobs, [&](std::size_t i) {
      Rng rng(derive_seed(spec.seed, {tag_of("sequence"), split_id, i}));
      const std::size_t length = spec.length.min + rng.uniform_index(span);
      out[i] = generate_sequence(task, labels[i], length, rng);
    });
  }
  return ds;
}

Dataset generate_dataset(const TaskSpec& spec, unsigned jobs) {
  return generate_dataset(compile_task(spec), jobs);
}

// ---------------------------------------------------------------------------
// Image indices

ImagePools image_pools_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    ImagePools pools;
    using PoolMap = std::map<std::string, std::map<std::string, std::vector<std::int64_t>>>;
    pools.train = j.at("train").get<PoolMap>();
    pools.test = j.at("test").get<PoolMap>();
    return pools;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("image pools JSON: ") + e.what(), 0, 0);
  }
}

Dataset attach_image_indices(const Dataset& ds, const ImagePools& pools,
                             int resample_epoch) {
  if (resample_epoch < 0) throw DomainError("resample epoch must be >= 0");
  Dataset out = ds;
  out.metadata.resample_epoch = resample_epoch;
  const ConstraintSystem system = ds.spec.constraint_system();
  const auto& vars = system.variables();

  for (Split split : kAllSplits) {
    const auto& group = split == Split::Test ? pools.test : pools.train;
    const std::string_view group_name = split == Split::Test ? "test" : "train";
    // Resolve pools once per (variable, domain position).
    std::vector<std::vector<const std::vector<std::int64_t>*>> resolved(vars.size());
    auto pool_for = [&](std::size_t var, int value) -> const std::vector<std::int64_t>& {
      const auto& domain = system.domain_of(var);
      const std::size_t pos = domain.index_of_value(value);
      auto& cache = resolved[var];
      if (cache.empty()) cache.assign(domain.size(), nullptr);
      if (!cache[pos]) {
        const std::string& label = domain.labels()[pos];
        auto src = group.find(vars[var].source);
        const std::vector<std::int64_t>* found = nullptr;
        if (src != group.end()) {
          auto it = src->second.find(label);
          if (it != src->second.end() && !it->second.empty()) found = &it->second;
        }
        if (!found) {
          throw DomainError("no " + std::string(group_name) + " image pool for class '" +
                            label + "' of source '" + vars[var].source + "'");
        }
        cache[pos] = found;
      }
      return *cache[pos];
    };

    auto& samples = out.split(split);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      auto& s = samples[i];
      s.image_indices.assign(s.length(), std::vector<std::int64_t>(vars.size()));
      for (std::size_t t = 0; t < s.length(); ++t) {
        for (std::size_t j = 0; j < vars.size(); ++j) {
          const auto& pool = pool_for(j, s.values[t][j]);
          const std::uint64_t h = derive_seed(
              ds.metadata.seed,
              {tag_of("image"), static_cast<std::uint64_t>(split), i, t, j,
               static_cast<std::uint64_t>(resample_epoch)});
          s.image_indices[t][j] = pool[h % pool.size()];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

DatasetFiles dataset_files(const std::filesystem::path& dir) {
  return {dir / "dataset.csv", dir / "dataset.json"};
}

namespace {

std::vector<std::string> csv_header(const TaskSpec& spec) {
  std::vector<std::string> h{"split", "seq_id", "t"};
  for (const auto& v : spec.variables) h.push_back(v.name + "_label");
  for (const auto& v : spec.variables) h.push_back(v.name + "_index");
  for (const auto& [atom, body] : spec.constraints) h.push_back(atom + "_truth");
  h.push_back("state_after");
  h.push_back("seq_label");
  return h;
}

std::string sidecar_json(const Dataset& ds, const std::string& dfa_json) {
  nlohmann::ordered_json j;
  j["generator_version"] = ds.metadata.generator_version;
  j["spec_hash"] = ds.metadata.spec_hash;
  j["seed"] = ds.metadata.seed;
  j["resample_epoch"] = ds.metadata.resample_epoch;
  nlohmann::ordered_json sizes, positives;
  for (Split s : kAllSplits) {
    const auto& samples = ds.split(s);
    sizes[std::string(split_name(s))] = samples.size();
    positives[std::string(split_name(s))] =
        std::count_if(samples.begin(), samples.end(),
                      [](const SequenceSample& x) { return x.label == 1; });
  }
  j["splits"] = std::move(sizes);
  j["positives"] = std::move(positives);
  j["task"] = nlohmann::ordered_json::parse(task_spec_to_json(ds.spec));
  j["dfa"] = nlohmann::ordered_json::parse(dfa_json);
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string dataset_csv(const Dataset& ds) {
  const ConstraintSystem system = ds.spec.constraint_system();
  const std::size_t nv = ds.spec.variables.size();
  const std::size_t na = ds.spec.constraints.size();
  std::string out = csv_line(csv_header(ds.spec));
  CsvRow row;
  for (Split split : kAllSplits) {
    const auto& samples = ds.split(split);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      for (std::size_t t = 0; t < s.length(); ++t) {
        row.clear();
        row.emplace_back(split_name(split));
        row.push_back(std::to_string(i));
        row.push_back(std::to_string(t));
        for (std::size_t j = 0; j < nv; ++j) {
          const auto& d = system.domain_of(j);
          row.push_back(d.labels()[d.index_of_value(s.values[t][j])]);
        }
        for (std::size_t j = 0; j < nv; ++j) {
          row.push_back(s.image_indices.empty() ? std::string()
                                                : std::to_string(s.image_indices[t][j]));
        }
        for (std::size_t a = 0; a < na; ++a) {
          row.push_back(((s.letters[t] >> a) & 1U) ? "1" : "0");
        }
        row.push_back(std::to_string(s.states[t]));
        row.push_back(std::to_string(s.label));
        out += csv_line(row);
      }
    }
  }
  return out;
}

void write_dataset(const Dataset& ds, const CompiledTask& task,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto files = dataset_files(dir);
  write_file(files.csv, dataset_csv(ds));
  write_file(files.sidecar, sidecar_json(ds, dfa_to_json(task.dfa())));
}

Dataset parse_dataset(std::string_view csv, std::string_view sidecar_json,
                      const LoadOptions& options) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(sidecar_json);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("dataset sidecar: ") + e.what(), 0, 0);
  }

  Dataset ds;
  std::map<std::string, std::size_t> declared_sizes;
  try {
    ds.spec = task_spec_from_json(meta.at("task").dump());
    ds.metadata.spec_hash = meta.at("spec_hash").get<std::string>();
    ds.metadata.seed = meta.at("seed").get<std::uint64_t>();
    ds.metadata.generator_version = meta.at("generator_version").get<std::string>();
    ds.metadata.resample_epoch = meta.at("resample_epoch").get<int>();
    declared_sizes = meta.at("splits").get<std::map<std::string, std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dataset sidecar: ") + e.what(), 0, 0);
  }
  const std::string actual_hash = spec_hash(ds.spec);
  if (actual_hash != ds.metadata.spec_hash) {
    throw IntegrityError("dataset sidecar spec hash " + ds.metadata.spec_hash +
                         " does not match its embedded task (" + actual_hash + ")");
  }
  if (options.expected_spec_hash && *options.expected_spec_hash != actual_hash) {
    throw IntegrityError("dataset was generated from spec " + actual_hash +
                         ", expected " + *options.expected_spec_hash);
  }

  const ConstraintSystem system = ds.spec.constraint_system();
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw ParseError("dataset CSV is empty", 1, 1);

  const auto expected = csv_header(ds.spec);
  const CsvRow& header = rows.front();
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  std::vector<std::size_t> index(expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    auto it = col.find(expected[k]);
    if (it == col.end()) {
      throw ParseError("dataset CSV: missing column '" + expected[k] + "'", 1,
                       header.size() + 1);
    }
    index[k] = it->second;
  }

  const std::size_t nv = ds.spec.variables.size();
  const std::size_t na = ds.spec.constraints.size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() != header.size()) {
      throw ParseError("dataset CSV: expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(row.size()),
                       line, 1);
    }
    auto field = [&](std::size_t k) -> const std::string& { return row[index[k]]; };
    auto integer = [&](std::size_t k) -> long long {
      const std::string& s = field(k);
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != s.size()) {
        throw ParseError("dataset CSV: '" + expected[k] + "' is not an integer", line,
                         index[k] + 1);
      }
      return v;
    };

    Split split;
    try {
      split = split_from_name(field(0));
    } catch (const DomainError&) {
      throw ParseError("dataset CSV: unknown split '" + field(0) + "'", line, index[0] + 1);
    }
    auto& samples = ds.split(split);
    const auto seq = static_cast<std::size_t>(integer(1));
    const auto t = static_cast<std::size_t>(integer(2));
    if (seq == samples.size() && t == 0) {
      samples.emplace_back();
    } else if (seq + 1 != samples.size() || t != samples.back().length()) {
      throw ParseError("dataset CSV: rows out of order at sequence " +
                           std::to_string(seq) + ", step " + std::to_string(t),
                       line, index[1] + 1);
    }
    SequenceSample& s = samples.back();

    Assignment values(nv);
    for (std::size_t j = 0; j < nv; ++j) {
      const auto& d = system.domain_of(j);
      try {
        values[j] = d.values()[d.index_of_label(field(3 + j))];
      } catch (const DomainError& e) {
        throw ParseError(std::string("dataset CSV: ") + e.what(), line, index[3 + j] + 1);
      }
    }
    s.values.push_back(std::move(values));

    bool has_index = !field(3 + nv).empty();
    if (has_index) {
      std::vector<std::int64_t> idx(nv);
      for (std::size_t j = 0; j < nv; ++j) idx[j] = integer(3 + nv + j);
      s.image_indices.push_back(std::move(idx));
    }
    Letter letter = 0;
    for (std::size_t a = 0; a < na; ++a) {
      const std::string& v = field(3 + 2 * nv + a);
      if (v != "0" && v != "1") {
        throw ParseError("dataset CSV: truth values must be 0 or 1", line,
                         index[3 + 2 * nv + a] + 1);
      }
      if (v == "1") letter |= Letter{1} << a;
    }
    s.letters.push_back(letter);
    s.states.push_back(static_cast<StateId>(integer(3 + 2 * nv + na)));
    const int label = static_cast<int>(integer(4 + 2 * nv + na));
    if (label != 0 && label != 1) {
      throw ParseError("dataset CSV: seq_label must be 0 or 1", line,
                       index[4 + 2 * nv + na] + 1);
    }
    if (t == 0) {
      s.label = label;
    } else if (s.label != label) {
      throw ParseError("dataset CSV: seq_label changes within a sequence", line,
                       index[4 + 2 * nv + na] + 1);
    }
  }

  for (Split s : kAllSplits) {
    auto it = declared_sizes.find(std::string(split_name(s)));
    const std::size_t declared = it == declared_sizes.end() ? 0 : it->second;
    if (declared != ds.split(s).size()) {
      throw IntegrityError("split '" + std::string(split_name(s)) + "' has " +
                           std::to_string(ds.split(s).size()) + " sequences, sidecar declares " +
                           std::to_string(declared));
    }
    for (const auto& sample : ds.split(s)) {
      if (!sample.image_indices.empty() &&
          sample.image_indices.size() != sample.length()) {
        throw ParseError("dataset CSV: image indices missing on some steps", 0, 0);
      }
    }
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& dir, const LoadOptions& options) {
  const auto files = dataset_files(dir);
  return parse_dataset(read_file(files.csv), read_file(files.sidecar), options);
}

}  // namespace ltlzinc
