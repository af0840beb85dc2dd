#pragma once
// Independent reference implementations used only by tests. None of these
// call into the library's translation, progression or counting code.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ltlzinc/formula.hpp"
#include "ltlzinc/prop.hpp"

namespace oracle {

using Trace = std::vector<ltlzinc::AtomAssignment>;

// Direct recursive LTLf semantics on a non-empty finite trace.
inline bool holds(const ltlzinc::Formula& f, const Trace& w, std::size_t i) {
  using ltlzinc::Op;
  const std::size_t n = w.size();
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return w[i].at(f.name());
    case Op::Not: return !holds(f.child(0), w, i);
    case Op::And: return holds(f.lhs(), w, i) && holds(f.rhs(), w, i);
    case Op::Or: return holds(f.lhs(), w, i) || holds(f.rhs(), w, i);
    case Op::Implies: return !holds(f.lhs(), w, i) || holds(f.rhs(), w, i);
    case Op::Iff: return holds(f.lhs(), w, i) == holds(f.rhs(), w, i);
    case Op::Next: return i + 1 < n && holds(f.child(0), w, i + 1);
    case Op::WeakNext: return i + 1 >= n || holds(f.child(0), w, i + 1);
    case Op::Finally:
      for (std::size_t j = i; j < n; ++j) {
        if (holds(f.child(0), w, j)) return true;
      }
      return false;
    case Op::Globally:
      for (std::size_t j = i; j < n; ++j) {
        if (!holds(f.child(0), w, j)) return false;
      }
      return true;
    case Op::Until:
      for (std::size_t j = i; j < n; ++j) {
        if (holds(f.rhs(), w, j)) return true;
        if (!holds(f.lhs(), w, j)) return false;
      }
      return false;
    case Op::Release:
      for (std::size_t j = i; j < n; ++j) {
        if (!holds(f.rhs(), w, j)) return false;
        if (holds(f.lhs(), w, j)) return true;
      }
      return true;
  }
  return false;
}

inline bool satisfies(const ltlzinc::Formula& f, const Trace& w) { return holds(f, w, 0); }

inline ltlzinc::AtomAssignment letter_assignment(std::uint32_t letter,
                                                 const std::vector<std::string>& atoms) {
  ltlzinc::AtomAssignment a;
  for (std::size_t i = 0; i < atoms.size(); ++i) a[atoms[i]] = (letter >> i) & 1U;
  return a;
}

inline Trace to_trace(const std::vector<std::uint32_t>& letters,
                      const std::vector<std::string>& atoms) {
  Trace w;
  for (auto l : letters) w.push_back(letter_assignment(l, atoms));
  return w;
}

// Random LTLf formula of bounded depth over the given atoms.
inline ltlzinc::Formula random_formula(std::mt19937_64& rng, int depth,
                                       const std::vector<std::string>& atoms) {
  using ltlzinc::Formula;
  using ltlzinc::Op;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 14);
  const int k = pick(rng);
  if (k <= 2 || depth <= 0) {
    if (k == 0 && depth > 0) return std::uniform_int_distribution<int>(0, 1)(rng) ? Formula::tt() : Formula::ff();
    return Formula::atom(atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)]);
  }
  static const Op unary[] = {Op::Not, Op::Next, Op::WeakNext, Op::Finally, Op::Globally};
  static const Op binary[] = {Op::And, Op::Or, Op::Implies, Op::Iff, Op::Until, Op::Release};
  if (k <= 7) return Formula::make(unary[(k - 3) % 5], random_formula(rng, depth - 1, atoms));
  return Formula::make(binary[(k - 8) % 6], random_formula(rng, depth - 1, atoms),
                       random_formula(rng, depth - 1, atoms));
}

// Every non-empty trace over `atoms` up to `max_len` letters.
inline std::vector<std::vector<std::uint32_t>> all_traces(std::size_t num_atoms,
                                                          std::size_t max_len) {
  std::vector<std::vector<std::uint32_t>> out;
  const std::uint32_t letters = 1U << num_atoms;
  std::vector<std::uint32_t> cur;
  std::function<void()> rec = [&] {
    if (!cur.empty()) out.push_back(cur);
    if (cur.size() == max_len) return;
    for (std::uint32_t l = 0; l < letters; ++l) {
      cur.push_back(l);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// Random propositional formula over variables [0, num_vars).
inline ltlzinc::PropFormula random_prop(std::mt19937_64& rng, int depth, std::uint32_t num_vars) {
  using ltlzinc::PropFormula;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  const int k = pick(rng);
  const auto var = [&] {
    return std::uniform_int_distribution<std::uint32_t>(0, num_vars - 1)(rng);
  };
  if (k <= 1 || depth <= 0) {
    if (std::uniform_int_distribution<int>(0, 29)(rng) == 0) {
      return std::uniform_int_distribution<int>(0, 1)(rng) ? PropFormula::tt() : PropFormula::ff();
    }
    return PropFormula::literal(var(), k == 0);
  }
  if (k == 2) return PropFormula::lnot(random_prop(rng, depth - 1, num_vars));
  const int width = std::uniform_int_distribution<int>(2, 3)(rng);
  std::vector<PropFormula> cs;
  for (int i = 0; i < width; ++i) cs.push_back(random_prop(rng, depth - 1, num_vars));
  return k <= 5 ? PropFormula::land(std::move(cs)) : PropFormula::lor(std::move(cs));
}

// Truth table by direct recursion, independent of ltlzinc::evaluate.
inline bool prop_holds(const ltlzinc::PropFormula& f, std::uint64_t row) {
  using ltlzinc::PropKind;
  switch (f.kind()) {
    case PropKind::True: return true;
    case PropKind::False: return false;
    case PropKind::Var: return (row >> f.var_id()) & 1U;
    case PropKind::Not: return !prop_holds(f.children()[0], row);
    case PropKind::And: {
      bool r = true;
      for (const auto& c : f.children()) r = r && prop_holds(c, row);
      return r;
    }
    case PropKind::Or: {
      bool r = false;
      for (const auto& c : f.children()) r = r || prop_holds(c, row);
      return r;
    }
  }
  return false;
}

// Weighted model count over variables [0, num_vars) with p(v) = weights[v].
inline double wmc(const ltlzinc::PropFormula& f, const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  double total = 0.0;
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << n); ++row) {
    if (!prop_holds(f, row)) continue;
    double prod = 1.0;
    for (std::size_t v = 0; v < n; ++v) prod *= ((row >> v) & 1U) ? weights[v] : 1.0 - weights[v];
    total += prod;
  }
  return total;
}

}  // namespace oracle
