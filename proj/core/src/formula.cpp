#include "ltlzinc/formula.hpp"

#include <algorithm>
#include <array>
#include <cassert>

#include "ltlzinc/error.hpp"
#include "hashing.hpp"

namespace ltlzinc {

struct Formula::Node {
  Op op;
  std::string name;
  std::array<Formula, 2> children;
  std::size_t arity;
  std::uint64_t hash;
};

namespace {

std::uint64_t node_hash(Op op, const std::string& name, std::size_t arity,
                        const Formula* c0, const Formula* c1) {
  std::uint64_t h = detail::fnv1a(static_cast<std::uint64_t>(op) + 1);
  if (op == Op::Atom) h = detail::fnv1a(name, h);
  if (arity > 0) h = detail::mix(h, c0->hash());
  if (arity > 1) h = detail::mix(h, c1->hash());
  return h;
}

}  // namespace

std::string_view op_name(Op op) noexcept {
  switch (op) {
    case Op::True: return "True";
    case Op::False: return "False";
    case Op::Atom: return "Atom";
    case Op::Not: return "Not";
    case Op::And: return "And";
    case Op::Or: return "Or";
    case Op::Implies: return "Implies";
    case Op::Iff: return "Iff";
    case Op::Next: return "Next";
    case Op::WeakNext: return "WeakNext";
    case Op::Finally: return "Finally";
    case Op::Globally: return "Globally";
    case Op::Until: return "Until";
    case Op::Release: return "Release";
  }
  return "?";
}

std::size_t op_arity(Op op) noexcept {
  switch (op) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Finally:
    case Op::Globally:
      return 1;
    default:
      return 2;
  }
}

Formula Formula::tt() {
  static const Formula t{std::make_shared<const Node>(
      Node{Op::True, {}, {}, 0, node_hash(Op::True, {}, 0, nullptr, nullptr)})};
  return t;
}

Formula Formula::ff() {
  static const Formula f{std::make_shared<const Node>(Node{
      Op::False, {}, {}, 0, node_hash(Op::False, {}, 0, nullptr, nullptr)})};
  return f;
}

Formula Formula::atom(std::string name) {
  auto valid_start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto valid_rest = [&](char c) {
    return valid_start(c) || (c >= '0' && c <= '9');
  };
  if (name.empty() || !valid_start(name.front()) ||
      !std::all_of(name.begin() + 1, name.end(), valid_rest)) {
    throw DomainError("invalid atom name '" + name + "'");
  }
  auto h = node_hash(Op::Atom, name, 0, nullptr, nullptr);
  return Formula{
      std::make_shared<const Node>(Node{Op::Atom, std::move(name), {}, 0, h})};
}

Formula Formula::make(Op op, Formula child) {
  if (op_arity(op) != 1) {
    throw DomainError(std::string(op_name(op)) + " is not unary");
  }
  auto h = node_hash(op, {}, 1, &child, nullptr);
  return Formula{std::make_shared<const Node>(
      Node{op, {}, {std::move(child), Formula{}}, 1, h})};
}

Formula Formula::make(Op op, Formula lhs, Formula rhs) {
  if (op_arity(op) != 2) {
    throw DomainError(std::string(op_name(op)) + " is not binary");
  }
  auto h = node_hash(op, {}, 2, &lhs, &rhs);
  return Formula{std::make_shared<const Node>(
      Node{op, {}, {std::move(lhs), std::move(rhs)}, 2, h})};
}

Op Formula::op() const noexcept { return node_->op; }
const std::string& Formula::name() const noexcept { return node_->name; }
std::size_t Formula::arity() const noexcept { return node_->arity; }
std::uint64_t Formula::hash() const noexcept { return node_->hash; }

const Formula& Formula::child(std::size_t i) const {
  assert(i < node_->arity);
  return node_->children[i];
}

bool Formula::is_literal() const noexcept {
  return op() == Op::Atom || (op() == Op::Not && child(0).op() == Op::Atom);
}

bool operator==(const Formula& a, const Formula& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

int compare(const Formula& a, const Formula& b) noexcept {
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (a.op() == Op::Atom) return a.name().compare(b.name());
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (int c = compare(a.child(i), b.child(i)); c != 0) return c;
  }
  return 0;
}

namespace {

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Atom) {
    out.insert(f.name());
    return;
  }
  for (std::size_t i = 0; i < f.arity(); ++i) collect_atoms(f.child(i), out);
}

}  // namespace

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

Formula to_nnf(const Formula& f) {
  // Positive and negative polarity handled by two mutually recursive lambdas.
  struct Rewriter {
    Formula pos(const Formula& g) const {
      switch (g.op()) {
        case Op::True:
        case Op::False:
        case Op::Atom:
          return g;
        case Op::Not:
          return neg(g.child(0));
        case Op::And:
        case Op::Or:
        case Op::Until:
        case Op::Release:
          return Formula::make(g.op(), pos(g.lhs()), pos(g.rhs()));
        case Op::Implies:
          return Formula::lor(neg(g.lhs()), pos(g.rhs()));
        case Op::Iff:
          return Formula::lor(Formula::land(pos(g.lhs()), pos(g.rhs())),
                              Formula::land(neg(g.lhs()), neg(g.rhs())));
        case Op::Next:
        case Op::WeakNext:
        case Op::Finally:
        case Op::Globally:
          return Formula::make(g.op(), pos(g.child(0)));
      }
      return g;
    }

    Formula neg(const Formula& g) const {
      switch (g.op()) {
        case Op::True: return Formula::ff();
        case Op::False: return Formula::tt();
        case Op::Atom: return Formula::lnot(g);
        case Op::Not: return pos(g.child(0));
        case Op::And: return Formula::lor(neg(g.lhs()), neg(g.rhs()));
        case Op::Or: return Formula::land(neg(g.lhs()), neg(g.rhs()));
        case Op::Implies: return Formula::land(pos(g.lhs()), neg(g.rhs()));
        case Op::Iff:
          return Formula::lor(Formula::land(pos(g.lhs()), neg(g.rhs())),
                              Formula::land(neg(g.lhs()), pos(g.rhs())));
        case Op::Next: return Formula::make(Op::WeakNext, neg(g.child(0)));
        case Op::WeakNext: return Formula::make(Op::Next, neg(g.child(0)));
        case Op::Finally: return Formula::make(Op::Globally, neg(g.child(0)));
        case Op::Globally: return Formula::make(Op::Finally, neg(g.child(0)));
        case Op::Until:
          return Formula::make(Op::Release, neg(g.lhs()), neg(g.rhs()));
        case Op::Release:
          return Formula::make(Op::Until, neg(g.lhs()), neg(g.rhs()));
      }
      return g;
    }
  };
  return Rewriter{}.pos(f);
}

bool is_nnf(const Formula& f) noexcept {
  switch (f.op()) {
    case Op::Not: return f.child(0).op() == Op::Atom;
    case Op::Implies:
    case Op::Iff: return false;
    default: break;
  }
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (!is_nnf(f.child(i))) return false;
  }
  return true;
}

namespace {

bool same_sorted(const Formula& a, const Formula& b) {
  return a.hash() == b.hash() && compare(a, b) == 0;
}

bool hash_order(const Formula& a, const Formula& b) {
  if (a.hash() != b.hash()) return a.hash() < b.hash();
  return compare(a, b) < 0;
}

void flatten(const Formula& f, Op op, std::vector<Formula>& out) {
  if (f.op() == op) {
    flatten(f.lhs(), op, out);
    flatten(f.rhs(), op, out);
  } else {
    out.push_back(f);
  }
}

bool contains_sorted(const std::vector<Formula>& sorted, const Formula& f) {
  return std::binary_search(sorted.begin(), sorted.end(), f, hash_order);
}

Formula negate_literal(const Formula& f) {
  return f.op() == Op::Not ? f.child(0) : Formula::lnot(f);
}

// Builds a canonical n-ary And/Or over already canonical operands.
Formula junction(Op op, std::vector<Formula> operands) {
  const bool is_and = op == Op::And;
  const Op dual = is_and ? Op::Or : Op::And;
  const Formula unit = is_and ? Formula::tt() : Formula::ff();
  const Formula zero = is_and ? Formula::ff() : Formula::tt();

  std::vector<Formula> flat;
  for (const auto& o : operands) flatten(o, op, flat);

  std::vector<Formula> kept;
  kept.reserve(flat.size());
  for (auto& o : flat) {
    if (o == zero) return zero;
    if (o == unit) continue;
    kept.push_back(std::move(o));
  }
  std::sort(kept.begin(), kept.end(), hash_order);
  kept.erase(std::unique(kept.begin(), kept.end(), same_sorted), kept.end());

  // Complement: x and !x together.
  for (const auto& o : kept) {
    if (o.is_literal() && contains_sorted(kept, negate_literal(o))) return zero;
  }

  // Absorption: drop a dual junction that contains another operand.
  std::vector<Formula> absorbed;
  absorbed.reserve(kept.size());
  for (const auto& o : kept) {
    bool drop = false;
    if (o.op() == dual) {
      std::vector<Formula> inner;
      flatten(o, dual, inner);
      for (const auto& i : inner) {
        if (contains_sorted(kept, i)) {
          drop = true;
          break;
        }
      }
    }
    if (!drop) absorbed.push_back(o);
  }

  if (absorbed.empty()) return unit;
  Formula acc = absorbed.back();
  for (std::size_t i = absorbed.size() - 1; i-- > 0;) {
    acc = Formula::make(op, absorbed[i], std::move(acc));
  }
  return acc;
}

}  // namespace

namespace {

using Cube = std::vector<Formula>;  // sorted by hash_order

const Formula& non_empty_marker() {
  static const Formula f = Formula::make(Op::Finally, Formula::tt());
  return f;
}

const Formula& empty_marker() {
  static const Formula f = Formula::make(Op::Globally, Formula::ff());
  return f;
}

bool contradictory(const Cube& c) {
  for (const auto& o : c) {
    if (o.is_literal() && o.op() == Op::Not && contains_sorted(c, o.child(0))) return true;
  }
  return contains_sorted(c, non_empty_marker()) && contains_sorted(c, empty_marker());
}

// Drop contradictory cubes and cubes subsumed by a strict subset.
std::vector<Cube> reduce(std::vector<Cube> cubes) {
  std::vector<Cube> live;
  for (auto& c : cubes) {
    if (!contradictory(c)) live.push_back(std::move(c));
  }
  std::sort(live.begin(), live.end(), [](const Cube& a, const Cube& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), hash_order);
  });
  live.erase(std::unique(live.begin(), live.end(),
                         [](const Cube& a, const Cube& b) {
                           return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                                             same_sorted);
                         }),
             live.end());
  std::vector<Cube> out;
  for (auto& c : live) {
    bool subsumed = false;
    for (const auto& d : out) {
      if (std::includes(c.begin(), c.end(), d.begin(), d.end(), hash_order)) {
        subsumed = true;
        break;
      }
    }
    if (!subsumed) out.push_back(std::move(c));
  }
  return out;
}

// Disjunctive normal form over leaves (literals and temporal subformulas).
std::vector<Cube> dnf(const Formula& f) {
  switch (f.op()) {
    case Op::True: return {Cube{}};
    case Op::False: return {};
    case Op::Or: {
      auto l = dnf(f.lhs());
      auto r = dnf(f.rhs());
      l.insert(l.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
      return reduce(std::move(l));
    }
    case Op::And: {
      const auto l = dnf(f.lhs());
      const auto r = dnf(f.rhs());
      std::vector<Cube> out;
      out.reserve(l.size() * r.size());
      for (const auto& a : l) {
        for (const auto& b : r) {
          Cube c;
          std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c),
                         hash_order);
          out.push_back(std::move(c));
        }
      }
      return reduce(std::move(out));
    }
    case Op::Not:
      if (f.child(0).op() == Op::True) return {};
      if (f.child(0).op() == Op::False) return {Cube{}};
      return {Cube{f}};
    default:
      return {Cube{f}};
  }
}

}  // namespace

Formula canonicalize(const Formula& f) {
  std::vector<Formula> disjuncts;
  for (auto& cube : dnf(f)) disjuncts.push_back(junction(Op::And, std::move(cube)));
  return junction(Op::Or, std::move(disjuncts));
}

namespace {

Formula progress_rec(const Formula& f, const AtomAssignment& letter) {
  const Formula& non_empty = non_empty_marker();
  const Formula& empty = empty_marker();

  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom: {
      auto it = letter.find(f.name());
      if (it == letter.end()) {
        throw DomainError("letter assigns no value to atom '" + f.name() + "'");
      }
      return it->second ? Formula::tt() : Formula::ff();
    }
    case Op::Not: {
      auto inner = progress_rec(f.child(0), letter);
      return inner.op() == Op::True ? Formula::ff() : Formula::tt();
    }
    case Op::And:
      return junction(Op::And,
                      {progress_rec(f.lhs(), letter), progress_rec(f.rhs(), letter)});
    case Op::Or:
      return junction(Op::Or,
                      {progress_rec(f.lhs(), letter), progress_rec(f.rhs(), letter)});
    case Op::Next:
      // The remainder must exist and start with a position satisfying φ.
      return junction(Op::And, {canonicalize(f.child(0)), non_empty});
    case Op::WeakNext:
      return junction(Op::Or, {canonicalize(f.child(0)), empty});
    case Op::Globally:
      return junction(Op::And, {progress_rec(f.child(0), letter), f});
    case Op::Finally:
      return junction(Op::Or, {progress_rec(f.child(0), letter), f});
    case Op::Until:
      return junction(
          Op::Or, {progress_rec(f.rhs(), letter),
                   junction(Op::And, {progress_rec(f.lhs(), letter), f})});
    case Op::Release:
      return junction(
          Op::And, {progress_rec(f.rhs(), letter),
                    junction(Op::Or, {progress_rec(f.lhs(), letter), f})});
    case Op::Implies:
    case Op::Iff:
      break;
  }
  throw DomainError("progress requires a formula in negation normal form");
}

}  // namespace

Formula progress(const Formula& f, const AtomAssignment& letter) {
  if (!is_nnf(f)) {
    throw DomainError("progress requires a formula in negation normal form");
  }
  return canonicalize(progress_rec(f, letter));
}

bool eval_empty(const Formula& f) {
  switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return false;
    case Op::Not: return false;  // negated atom; NNF only
    case Op::And: return eval_empty(f.lhs()) && eval_empty(f.rhs());
    case Op::Or: return eval_empty(f.lhs()) || eval_empty(f.rhs());
    case Op::Next: return false;
    case Op::WeakNext: return true;
    case Op::Globally: return true;
    case Op::Finally: return false;
    case Op::Until: return false;
    case Op::Release: return true;
    case Op::Implies:
    case Op::Iff:
      break;
  }
  throw DomainError("eval_empty requires a formula in negation normal form");
}

}  // namespace ltlzinc
