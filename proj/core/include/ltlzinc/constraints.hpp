#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ltlzinc/dfa.hpp"
#include "ltlzinc/rng.hpp"

namespace ltlzinc {

// Ordered class labels with their integer encodings. Enumerations are cast to
// integers in lexicographic label order; integer ranges use their own values.
class SymbolicDomain {
 public:
  static SymbolicDomain from_labels(std::string name,
                                    std::vector<std::string> labels);
  static SymbolicDomain from_range(std::string name, int lo, int hi);
  // Explicit encoding, as stored in dataset sidecars. Values must increase
  // strictly; label domains must list labels in lexicographic order.
  static SymbolicDomain from_parts(std::string name,
                                   std::vector<std::string> labels,
                                   std::vector<int> values, bool is_range);

  // Sub-domain over a subset of labels that keeps the parent's encodings.
  SymbolicDomain restrict_to(std::string name,
                             const std::vector<std::string>& labels) const;

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<int>& values() const noexcept { return values_; }
  bool is_range() const noexcept { return is_range_; }

  // Position of a value / label within the domain; throws DomainError.
  std::size_t index_of_value(int value) const;
  std::size_t index_of_label(std::string_view label) const;
  bool contains(int value) const noexcept;

 private:
  SymbolicDomain() = default;

  std::string name_;
  std::vector<std::string> labels_;
  std::vector<int> values_;
  bool is_range_ = false;
};

struct VariableSpec {
  std::string name;
  std::string domain;
  // Perceptual source tag such as "mnist"; annotation only.
  std::string source;
};

struct LinearTerm {
  long coefficient;
  std::string variable;
};

struct LinearExpr {
  std::vector<LinearTerm> terms;
  long constant = 0;
};

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

struct Comparison {
  LinearExpr lhs;
  CmpOp op;
  LinearExpr rhs;
};

struct AllDifferent {
  std::vector<std::string> variables;
};

struct AllEqual {
  std::vector<std::string> variables;
};

using ConstraintBody = std::variant<Comparison, AllDifferent, AllEqual>;

struct Constraint {
  std::string name;  // the atom it grounds
  ConstraintBody body;

  std::vector<std::string> variables() const;
};

// "Y < Z", "X + Y = 2*Z", "all_different(X,Y,Z)", "all_equal([V,W,X])".
// Throws ParseError with a 1-based column.
Constraint parse_constraint(std::string name, std::string_view text);
std::string to_string(const Constraint& c);

using VariableAssignment = std::map<std::string, int, std::less<>>;

// Integer semantics; throws DomainError when a variable is unassigned.
bool eval_constraint(const Constraint& c, const VariableAssignment& a);

// Concrete values indexed by variable position in a ConstraintSystem.
using Assignment = std::vector<int>;

// Per-variable categorical distributions over domain positions.
using Distributions = std::vector<std::vector<double>>;

// Variables, domains and constraints bound together by position. The i-th
// constraint grounds atom i of every letter produced here.
class ConstraintSystem {
 public:
  ConstraintSystem(std::vector<SymbolicDomain> domains,
                   std::vector<VariableSpec> variables,
                   std::vector<Constraint> constraints);

  const std::vector<SymbolicDomain>& domains() const noexcept { return domains_; }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  std::vector<std::string> atom_names() const;

  const SymbolicDomain& domain_of(std::size_t variable) const {
    return domains_[domain_index_[variable]];
  }
  std::size_t variable_index(std::string_view name) const;
  std::size_t constraint_index(std::string_view name) const;

  // Number of joint assignments (product of domain sizes).
  std::size_t joint_size() const;

  // Fast path; `values` must be in-domain.
  bool holds(std::size_t constraint, std::span<const int> values) const;
  Letter letter_of(std::span<const int> values) const;

  // Checked path: missing variables and out-of-domain values throw.
  bool evaluate(std::size_t constraint, const VariableAssignment& a) const;
  Assignment to_assignment(const VariableAssignment& a) const;

  // Exact probability that the constraint holds when variables are drawn
  // independently from `dists`. Every distribution must sum to 1 (1e-9).
  double constraint_probability(std::size_t constraint,
                                const Distributions& dists) const;

  // Calls fn(values) for every joint assignment in lexicographic order of
  // domain positions.
  template <typename Fn>
  void for_each_assignment(Fn&& fn) const;

 private:
  struct BoundTerm {
    long coefficient;
    std::size_t variable;
  };
  struct BoundConstraint {
    enum class Kind { Compare, AllDifferent, AllEqual } kind;
    std::vector<BoundTerm> terms;  // lhs - rhs
    long constant = 0;             // lhs - rhs
    CmpOp op = CmpOp::Eq;
    std::vector<std::size_t> variables;
  };

  std::vector<SymbolicDomain> domains_;
  std::vector<VariableSpec> variables_;
  std::vector<Constraint> constraints_;
  std::vector<std::size_t> domain_index_;
  std::vector<BoundConstraint> bound_;
};

// Solutions of one letter: assignments whose constraint truth vector equals
// the letter bit for bit.
std::vector<Assignment> enumerate_solutions(const ConstraintSystem& system,
                                            Letter letter);

// Every letter's solution set, populated eagerly in one pass over the joint
// space. Read-only afterwards, so concurrent readers are safe.
class SolutionCache {
 public:
  explicit SolutionCache(const ConstraintSystem& system);

  std::size_t num_letters() const noexcept { return solutions_.size(); }
  const std::vector<Assignment>& solutions(Letter letter) const;
  bool usable(Letter letter) const { return !solutions(letter).empty(); }

  // Uniform draw; throws DomainError for an unsatisfiable letter.
  const Assignment& sample(Letter letter, Rng& rng) const;

 private:
  std::vector<std::vector<Assignment>> solutions_;
};

template <typename Fn>
void ConstraintSystem::for_each_assignment(Fn&& fn) const {
  const std::size_t n = variables_.size();
  std::vector<std::size_t> pos(n, 0);
  Assignment values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = domain_of(i).values()[0];
  while (true) {
    fn(std::span<const int>(values));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pos[i] < domain_of(i).size()) {
        values[i] = domain_of(i).values()[pos[i]];
        break;
      }
      pos[i] = 0;
      values[i] = domain_of(i).values()[0];
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace ltlzinc
