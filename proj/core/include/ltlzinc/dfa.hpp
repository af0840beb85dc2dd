#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ltlzinc/formula.hpp"

namespace ltlzinc {

using StateId = std::uint32_t;
// Truth assignment over the automaton atoms; bit i is atoms()[i].
using Letter = std::uint32_t;

// Complete deterministic automaton over letters in {0,1}^k. The initial
// state is always 0.
class Dfa {
 public:
  struct Transition {
    StateId from;
    Letter letter;
    StateId to;
  };

  Dfa(std::vector<std::string> atoms, std::size_t num_states,
      std::vector<StateId> accepting, std::vector<Transition> transitions);

  const std::vector<std::string>& atoms() const noexcept { return atoms_; }
  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_letters() const noexcept { return std::size_t{1} << atoms_.size(); }
  StateId initial() const noexcept { return 0; }

  bool is_accepting(StateId s) const { return accepting_.at(s); }
  std::vector<StateId> accepting_states() const;

  StateId next(StateId s, Letter letter) const {
    return delta_[static_cast<std::size_t>(s) * num_letters() + letter];
  }

  // Index of an atom by name; throws DomainError if absent.
  std::size_t atom_index(std::string_view name) const;

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  std::vector<std::string> atoms_;
  std::size_t num_states_;
  std::vector<bool> accepting_;
  std::vector<StateId> delta_;
};

// Propositional condition for moving from `source` to `target`. `letters`
// lists the accepted letters in ascending order; `formula` is an equivalent
// disjunction of pairwise disjoint cubes over the atoms (True / False when
// all / none of the letters qualify).
struct Guard {
  StateId source;
  StateId target;
  std::vector<Letter> letters;
  Formula formula;
};

struct TranslationOptions {
  std::size_t max_states = 10'000;
};

// Progression-based construction: states are canonical obligations reachable
// from to_nnf(f); the result is complete and minimal.
Dfa ltlf_to_dfa(const Formula& f, std::span<const std::string> atoms,
                const TranslationOptions& options = {});

// Hopcroft minimization with breadth-first renumbering (letters ascending).
Dfa minimize(const Dfa& dfa);

// Throws DomainError on an empty trace or an out-of-range letter.
bool accepts(const Dfa& dfa, std::span<const Letter> trace);

// State reached after each letter of `trace`.
std::vector<StateId> replay(const Dfa& dfa, std::span<const Letter> trace);

Guard transition_guard(const Dfa& dfa, StateId source, StateId target);

// Disjoint-cube DNF of a letter set over `atoms`.
Formula letters_to_formula(std::span<const Letter> letters,
                           std::span<const std::string> atoms);

// `{atoms, states, initial, accepting, transitions}` with stable key order.
std::string dfa_to_json(const Dfa& dfa, int indent = 2);
Dfa dfa_from_json(std::string_view text);

}  // namespace ltlzinc
