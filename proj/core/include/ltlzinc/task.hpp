#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltlzinc/constraints.hpp"
#include "ltlzinc/dfa.hpp"

namespace ltlzinc {

struct LengthRange {
  std::size_t min = 10;
  std::size_t max = 20;
};

struct SplitCounts {
  std::size_t train = 320;
  std::size_t val = 40;
  std::size_t test = 40;
};

inline constexpr std::uint64_t kDefaultSeed = 12345;

// User specification: domains and variables, constraints grounding the atoms,
// the LTLf formula over those atoms, and dataset shape.
struct TaskSpec {
  std::string name;
  std::vector<SymbolicDomain> domains;
  std::vector<VariableSpec> variables;
  // Atom name -> constraint text, in declaration order.
  std::vector<std::pair<std::string, std::string>> constraints;
  std::string formula;
  LengthRange length;
  SplitCounts splits;
  double positive_ratio = 0.5;
  std::uint64_t seed = kDefaultSeed;

  // Throws DomainError on violated invariants.
  void validate() const;

  ConstraintSystem constraint_system() const;
};

// YAML keys: name, domains, variables, constraints, formula, length,
// splits, positive_ratio, seed. Throws ParseError with location.
TaskSpec parse_task_yaml(std::string_view text);
TaskSpec load_task_yaml(const std::filesystem::path& path);

// Canonical JSON encoding; the spec hash is computed over it.
std::string task_spec_to_json(const TaskSpec& spec, int indent = -1);
TaskSpec task_spec_from_json(std::string_view text);
std::string spec_hash(const TaskSpec& spec);

// Built-in tasks: "task1".."task6" and "example" (the sum / all_different
// alternation with a [2,8] digit domain).
std::vector<std::string> builtin_task_names();
std::optional<TaskSpec> builtin_task(std::string_view name);

struct CompileOptions {
  std::size_t max_states = 10'000;
  // Reuse a previously translated automaton (must match the formula).
  std::optional<Dfa> precompiled;
};

// Spec plus its minimized DFA, per-letter solution caches and the table
// reachable(s, n, outcome): some walk of n usable letters from s ends in an
// accepting (outcome = true) or rejecting state.
class CompiledTask {
 public:
  const TaskSpec& spec() const noexcept { return spec_; }
  const ConstraintSystem& system() const noexcept { return system_; }
  const Dfa& dfa() const noexcept { return dfa_; }
  const SolutionCache& solutions() const noexcept { return solutions_; }

  std::size_t max_length() const noexcept { return reach_.size() - 1; }
  bool reachable(StateId s, std::size_t remaining, bool accept) const;

 private:
  friend CompiledTask compile_task(const TaskSpec&, const CompileOptions&);
  CompiledTask(TaskSpec spec, ConstraintSystem system, Dfa dfa,
               SolutionCache solutions)
      : spec_(std::move(spec)),
        system_(std::move(system)),
        dfa_(std::move(dfa)),
        solutions_(std::move(solutions)) {}

  TaskSpec spec_;
  ConstraintSystem system_;
  Dfa dfa_;
  SolutionCache solutions_;
  // reach_[n][s]: bit 0 = rejecting reachable, bit 1 = accepting reachable.
  std::vector<std::vector<std::uint8_t>> reach_;
};

// Throws CompileError naming the first infeasible (label, length).
CompiledTask compile_task(const TaskSpec& spec, const CompileOptions& options = {});

}  // namespace ltlzinc
