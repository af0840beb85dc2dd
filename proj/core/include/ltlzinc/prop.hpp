#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ltlzinc/dfa.hpp"

namespace ltlzinc {

using PropVar = std::uint32_t;

enum class PropKind : std::uint8_t { True, False, Var, Not, And, Or };

// Immutable propositional formula over integer variables. And/Or are n-ary;
// the factories do not simplify (see simplify()).
class PropFormula {
 public:
  static PropFormula tt();
  static PropFormula ff();
  static PropFormula var(PropVar v);
  static PropFormula literal(PropVar v, bool positive);
  static PropFormula lnot(PropFormula f);
  static PropFormula land(std::vector<PropFormula> children);
  static PropFormula lor(std::vector<PropFormula> children);
  static PropFormula land(PropFormula a, PropFormula b);
  static PropFormula lor(PropFormula a, PropFormula b);

  PropKind kind() const noexcept { return node_->kind; }
  // Only for Var.
  PropVar var_id() const noexcept { return node_->var; }
  const std::vector<PropFormula>& children() const noexcept { return node_->children; }
  std::uint64_t hash() const noexcept { return node_->hash; }

  bool is_constant() const noexcept {
    return kind() == PropKind::True || kind() == PropKind::False;
  }
  // Var or Not(Var).
  bool is_literal() const noexcept;

  friend bool operator==(const PropFormula& a, const PropFormula& b);

 private:
  struct Node {
    PropKind kind;
    PropVar var = 0;
    std::vector<PropFormula> children;
    std::uint64_t hash = 0;
  };
  explicit PropFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static PropFormula make(PropKind kind, PropVar var, std::vector<PropFormula> children);

  std::shared_ptr<const Node> node_;
};

// Total structural order (hash first).
int compare(const PropFormula& a, const PropFormula& b);

struct PropFormulaHash {
  std::size_t operator()(const PropFormula& f) const noexcept {
    return static_cast<std::size_t>(f.hash());
  }
};

// Sorted, duplicate free.
std::vector<PropVar> variables_of(const PropFormula& f);

// `assignment[v]` is the value of variable v.
bool evaluate(const PropFormula& f, const std::vector<bool>& assignment);

bool is_nnf(const PropFormula& f);
PropFormula to_nnf(const PropFormula& f);

// Constant folding, flattening, idempotence, complementation and absorption,
// applied bottom-up to a fixpoint. The result is logically equivalent.
PropFormula simplify(const PropFormula& f);

// Substitute a constant for v, folding constants on the way up.
PropFormula condition(const PropFormula& f, PropVar v, bool value);

// `names[v]` when given, otherwise "x<v>".
std::string to_string(const PropFormula& f, std::span<const std::string> names = {});

// Variable layout shared by the next-state formulas of one automaton:
// state s is variable s, atom i is variable num_states + i.
struct NextStateFormulas {
  std::size_t num_states = 0;
  std::size_t num_atoms = 0;
  std::vector<PropFormula> formulas;
  std::vector<std::string> variable_names;

  PropVar state_var(StateId s) const noexcept { return static_cast<PropVar>(s); }
  PropVar atom_var(std::size_t i) const noexcept {
    return static_cast<PropVar>(num_states + i);
  }
  std::size_t num_variables() const noexcept { return num_states + num_atoms; }
  // State variables in id order, then atoms.
  std::vector<PropVar> variable_order() const;
};

// formulas[s'] = OR over sources s with a non-empty guard of
// (state_s AND guard(s, s')); a True guard contributes state_s alone.
NextStateFormulas next_state_formulas(const Dfa& dfa);

}  // namespace ltlzinc
