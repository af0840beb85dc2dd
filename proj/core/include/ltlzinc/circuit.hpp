#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltlzinc/error.hpp"
#include "ltlzinc/prop.hpp"
#include "ltlzinc/semiring.hpp"

namespace ltlzinc {

using NodeId = std::uint32_t;

struct CircuitNode {
  enum class Kind : std::uint8_t { Literal, True, False, And, Or };
  Kind kind = Kind::True;
  PropVar var = 0;        // Literal
  bool positive = true;   // Literal
  // Or nodes from a Shannon split name the variable their branches disagree
  // on; kNoDecision otherwise.
  PropVar decision = kNoDecision;
  std::vector<NodeId> children;

  static constexpr PropVar kNoDecision = std::numeric_limits<PropVar>::max();
};

// NNF circuit with nodes in topological order (children precede parents).
class Circuit {
 public:
  Circuit() = default;
  Circuit(std::vector<CircuitNode> nodes, NodeId root);

  const std::vector<CircuitNode>& nodes() const noexcept { return nodes_; }
  const CircuitNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t num_edges() const noexcept;
  NodeId root() const noexcept { return root_; }

  // Sorted variables below a node.
  const std::vector<PropVar>& scope(NodeId id) const { return scopes_.at(id); }
  const std::vector<PropVar>& variables() const { return scopes_.at(root_); }

  bool is_decomposable() const;
  // Every Or has a decision variable its children fix to opposite values.
  bool is_deterministic() const;
  bool is_smooth() const;

 private:
  std::vector<CircuitNode> nodes_;
  std::vector<std::vector<PropVar>> scopes_;
  NodeId root_ = 0;
};

struct CompileLimits {
  std::size_t max_variables = 30;
};

// Top-down Shannon expansion along `order` (variables of f absent from it
// are appended in id order) with disjoint-component splitting of
// conjunctions and a per-call cache keyed by sub-formula. The result is
// decomposable and deterministic; it is not smoothed.
Circuit compile_sddnnf(const PropFormula& f, std::span<const PropVar> order = {},
                       const CompileLimits& limits = {});

// Fills scope gaps under Or nodes, and at the root against `vars`, with
// (v | !v) sub-circuits.
Circuit smooth(const Circuit& c, std::span<const PropVar> vars = {});

// Literal weights in a semiring's carrier; both polarities per variable.
class LiteralWeights {
 public:
  LiteralWeights() = default;
  explicit LiteralWeights(std::size_t num_vars)
      : pos_(num_vars, kUnset), neg_(num_vars, kUnset) {}

  void set(PropVar v, double positive, double negative) {
    if (v >= pos_.size()) {
      pos_.resize(v + 1, kUnset);
      neg_.resize(v + 1, kUnset);
    }
    pos_[v] = positive;
    neg_[v] = negative;
  }
  bool has(PropVar v) const noexcept {
    return v < pos_.size() && !std::isnan(pos_[v]) && !std::isnan(neg_[v]);
  }
  double positive(PropVar v) const { return pos_.at(v); }
  double negative(PropVar v) const { return neg_.at(v); }
  double weight(PropVar v, bool polarity) const {
    return polarity ? positive(v) : negative(v);
  }
  void require(PropVar v) const {
    if (!has(v)) throw DomainError("no weight for variable x" + std::to_string(v));
  }

  // Probability-space weights p / 1 - p mapped into S.
  template <Semiring S>
  static LiteralWeights from_probabilities(std::span<const double> p) {
    LiteralWeights w(p.size());
    for (std::size_t v = 0; v < p.size(); ++v) {
      w.set(static_cast<PropVar>(v), S::from_probability(p[v]),
            S::from_probability(1.0 - p[v]));
    }
    return w;
  }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pos_;
  std::vector<double> neg_;
};

// One bottom-up pass: literal -> weight, And -> times, Or -> plus.
template <Semiring S>
double amc(const Circuit& c, const LiteralWeights& w) {
  for (PropVar v : c.variables()) w.require(v);
  std::vector<double> value(c.size());
  for (NodeId i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    switch (n.kind) {
      case CircuitNode::Kind::Literal: value[i] = w.weight(n.var, n.positive); break;
      case CircuitNode::Kind::True: value[i] = S::one(); break;
      case CircuitNode::Kind::False: value[i] = S::zero(); break;
      case CircuitNode::Kind::And: {
        double acc = S::one();
        for (NodeId ch : n.children) acc = S::times(acc, value[ch]);
        value[i] = acc;
        break;
      }
      case CircuitNode::Kind::Or: {
        double acc = S::zero();
        for (NodeId ch : n.children) acc = S::plus(acc, value[ch]);
        value[i] = acc;
        break;
      }
    }
  }
  return c.size() == 0 ? S::zero() : value[c.root()];
}

// Structural semiring evaluation of an NNF formula. No counting guarantee:
// overlapping disjuncts are counted once each.
template <Semiring S>
double fuzzy_eval(const PropFormula& f, const LiteralWeights& w) {
  switch (f.kind()) {
    case PropKind::True: return S::one();
    case PropKind::False: return S::zero();
    case PropKind::Var:
      w.require(f.var_id());
      return w.positive(f.var_id());
    case PropKind::Not: {
      const PropFormula& c = f.children()[0];
      if (c.kind() != PropKind::Var) {
        throw DomainError("fuzzy evaluation needs a formula in negation normal form");
      }
      w.require(c.var_id());
      return w.negative(c.var_id());
    }
    case PropKind::And: {
      double acc = S::one();
      for (const auto& c : f.children()) acc = S::times(acc, fuzzy_eval<S>(c, w));
      return acc;
    }
    case PropKind::Or: {
      double acc = S::zero();
      for (const auto& c : f.children()) acc = S::plus(acc, fuzzy_eval<S>(c, w));
      return acc;
    }
  }
  return S::zero();
}

inline constexpr std::size_t kBruteForceMaxVariables = 20;

// Sum over models of f on `vars` (default: the variables of f) of the
// product of literal weights. Counting oracle for tests.
template <Semiring S>
double brute_force_wmc(const PropFormula& f, const LiteralWeights& w,
                       std::span<const PropVar> vars = {}) {
  std::vector<PropVar> scope(vars.begin(), vars.end());
  if (scope.empty()) scope = variables_of(f);
  if (scope.size() > kBruteForceMaxVariables) {
    throw ResourceError("brute-force WMC over " + std::to_string(scope.size()) +
                        " variables exceeds the cap of " +
                        std::to_string(kBruteForceMaxVariables));
  }
  PropVar top = 0;
  for (PropVar v : scope) {
    w.require(v);
    top = std::max(top, v + 1);
  }
  for (PropVar v : variables_of(f)) {
    if (std::find(scope.begin(), scope.end(), v) == scope.end()) {
      throw DomainError("formula variable x" + std::to_string(v) + " outside the scope");
    }
  }
  std::vector<bool> assignment(top, false);
  double total = S::zero();
  const std::uint64_t rows = std::uint64_t{1} << scope.size();
  for (std::uint64_t m = 0; m < rows; ++m) {
    for (std::size_t i = 0; i < scope.size(); ++i) assignment[scope[i]] = (m >> i) & 1U;
    if (!evaluate(f, assignment)) continue;
    double prod = S::one();
    for (PropVar v : scope) prod = S::times(prod, w.weight(v, assignment[v]));
    total = S::plus(total, prod);
  }
  return total;
}

// c2d-style NNF text: header "nnf <nodes> <edges> <vars>", then one line per
// node: "L <lit>", "A <k> <ids>", "O <decision> <k> <ids>" with 1-based
// signed literals (decision 0 means none). True is "A 0", false "O 0 0".
std::string circuit_to_nnf(const Circuit& c);
Circuit circuit_from_nnf(std::string_view text);

}  // namespace ltlzinc
