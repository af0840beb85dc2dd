#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltlzinc/task.hpp"

namespace ltlzinc {

inline constexpr std::string_view kGeneratorVersion = "ltlzinc-cpp/0.3.0";

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };
inline constexpr std::array<Split, 3> kAllSplits = {Split::Train, Split::Val, Split::Test};

std::string_view split_name(Split s) noexcept;
Split split_from_name(std::string_view name);

// One annotated sequence. values[t][j] is the integer value of variable j at
// step t; letters[t] the constraint truth vector; states[t] the automaton
// state after step t.
struct SequenceSample {
  std::vector<Assignment> values;
  std::vector<Letter> letters;
  std::vector<StateId> states;
  int label = 0;
  // Empty, or image_indices[t][j] per step and variable.
  std::vector<std::vector<std::int64_t>> image_indices;

  std::size_t length() const noexcept { return letters.size(); }
  friend bool operator==(const SequenceSample&, const SequenceSample&) = default;
};

struct DatasetMetadata {
  std::string spec_hash;
  std::uint64_t seed = kDefaultSeed;
  std::string generator_version{kGeneratorVersion};
  // -1 when no image indices are attached.
  int resample_epoch = -1;

  friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

struct Dataset {
  TaskSpec spec;
  DatasetMetadata metadata;
  std::array<std::vector<SequenceSample>, 3> splits;

  const std::vector<SequenceSample>& split(Split s) const {
    return splits[static_cast<std::size_t>(s)];
  }
  std::vector<SequenceSample>& split(Split s) {
    return splits[static_cast<std::size_t>(s)];
  }
};

// Walk of `length` steps from state 0 choosing uniformly among usable letters
// that keep the target outcome reachable. Requires (label, length) feasible.
SequenceSample generate_sequence(const CompiledTask& task, int label,
                                 std::size_t length, Rng& rng);

// Per-split labels (exact positive counts) and lengths, one derived seed per
// sequence; `jobs` > 1 parallelizes without changing the output.
Dataset generate_dataset(const CompiledTask& task, unsigned jobs = 1);
Dataset generate_dataset(const TaskSpec& spec, unsigned jobs = 1);

// Number of positives requested for a split of size n.
std::size_t positive_count(std::size_t n, double positive_ratio);

// Image index pools per perceptual source and class label. Train and val
// draw from `train`; test draws from `test`.
struct ImagePools {
  std::map<std::string, std::map<std::string, std::vector<std::int64_t>>> train;
  std::map<std::string, std::map<std::string, std::vector<std::int64_t>>> test;
};

ImagePools image_pools_from_json(std::string_view text);

Dataset attach_image_indices(const Dataset& ds, const ImagePools& pools,
                             int resample_epoch);

// Files written by write_dataset.
struct DatasetFiles {
  std::filesystem::path csv;
  std::filesystem::path sidecar;
};
DatasetFiles dataset_files(const std::filesystem::path& dir);

// CSV (one row per step) plus a JSON sidecar with metadata, the task spec
// and the automaton dump.
void write_dataset(const Dataset& ds, const CompiledTask& task,
                   const std::filesystem::path& dir);
std::string dataset_csv(const Dataset& ds);

struct LoadOptions {
  // When set, the sidecar's spec hash must equal this value.
  std::optional<std::string> expected_spec_hash;
};

// Throws ParseError (with row/column) on malformed files and IntegrityError
// on hash mismatches.
Dataset read_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});
Dataset parse_dataset(std::string_view csv, std::string_view sidecar_json,
                      const LoadOptions& options = {});

}  // namespace ltlzinc
