#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ltlzinc {

enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  WeakNext,
  Finally,
  Globally,
  Until,
  Release,
};

std::string_view op_name(Op op) noexcept;
std::size_t op_arity(Op op) noexcept;

// Immutable, shared LTLf syntax tree. Copies share nodes; every node caches a
// stable structural hash so formulas can key memo tables.
class Formula {
 public:
  static Formula tt();
  static Formula ff();
  static Formula atom(std::string name);
  static Formula make(Op op, Formula child);
  static Formula make(Op op, Formula lhs, Formula rhs);

  static Formula lnot(Formula f) { return make(Op::Not, std::move(f)); }
  static Formula land(Formula a, Formula b) {
    return make(Op::And, std::move(a), std::move(b));
  }
  static Formula lor(Formula a, Formula b) {
    return make(Op::Or, std::move(a), std::move(b));
  }

  Op op() const noexcept;
  // Empty unless op() == Op::Atom.
  const std::string& name() const noexcept;
  std::size_t arity() const noexcept;
  const Formula& child(std::size_t i) const;
  const Formula& lhs() const { return child(0); }
  const Formula& rhs() const { return child(1); }
  std::uint64_t hash() const noexcept;

  bool is_literal() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept {
    return !(a == b);
  }

 private:
  struct Node;
  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Total structural order; negative, zero or positive like strcmp.
int compare(const Formula& a, const Formula& b) noexcept;

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept {
    return static_cast<std::size_t>(f.hash());
  }
};

using AtomAssignment = std::map<std::string, bool, std::less<>>;

std::set<std::string> atoms_of(const Formula& f);

// Parses the ASCII formula language (with the Unicode aliases ◯ ◇ □).
// Throws SyntaxError / UnknownTokenError on malformed input.
Formula parse_ltlf(std::string_view text);

// Canonical printer; parse_ltlf(to_string(f)) == f.
std::string to_string(const Formula& f);

// Negation normal form with Implies/Iff eliminated.
Formula to_nnf(const Formula& f);

bool is_nnf(const Formula& f) noexcept;

// Boolean normalization used for progression states: a disjunction of
// cubes over leaves (literals and temporal subformulas, left untouched) with
// contradictory and subsumed cubes removed, operands sorted by hash and
// nested to the right. Keeps the set of reachable states finite.
Formula canonicalize(const Formula& f);

// Obligation on the remaining trace after reading `letter`. `f` must be in
// NNF; the result is canonical. Throws DomainError if `letter` misses an atom.
Formula progress(const Formula& f, const AtomAssignment& letter);

// Truth of an NNF formula on the empty continuation.
bool eval_empty(const Formula& f);

}  // namespace ltlzinc
