#include "ltlzinc/prop.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "hashing.hpp"
#include "ltlzinc/error.hpp"

namespace ltlzinc {

PropFormula PropFormula::make(PropKind kind, PropVar var,
                              std::vector<PropFormula> children) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->var = var;
  std::uint64_t h = detail::fnv1a(static_cast<std::uint64_t>(kind));
  h = detail::fnv1a(static_cast<std::uint64_t>(var), h);
  for (const auto& c : children) h = detail::mix(h, c.hash());
  n->hash = h;
  n->children = std::move(children);
  return PropFormula(std::move(n));
}

PropFormula PropFormula::tt() {
  static const PropFormula t = make(PropKind::True, 0, {});
  return t;
}

PropFormula PropFormula::ff() {
  static const PropFormula f = make(PropKind::False, 0, {});
  return f;
}

PropFormula PropFormula::var(PropVar v) { return make(PropKind::Var, v, {}); }

PropFormula PropFormula::literal(PropVar v, bool positive) {
  return positive ? var(v) : lnot(var(v));
}

PropFormula PropFormula::lnot(PropFormula f) {
  return make(PropKind::Not, 0, {std::move(f)});
}

PropFormula PropFormula::land(std::vector<PropFormula> children) {
  return make(PropKind::And, 0, std::move(children));
}

PropFormula PropFormula::lor(std::vector<PropFormula> children) {
  return make(PropKind::Or, 0, std::move(children));
}

PropFormula PropFormula::land(PropFormula a, PropFormula b) {
  return land(std::vector<PropFormula>{std::move(a), std::move(b)});
}

PropFormula PropFormula::lor(PropFormula a, PropFormula b) {
  return lor(std::vector<PropFormula>{std::move(a), std::move(b)});
}

bool PropFormula::is_literal() const noexcept {
  return kind() == PropKind::Var ||
         (kind() == PropKind::Not && children()[0].kind() == PropKind::Var);
}

int compare(const PropFormula& a, const PropFormula& b) {
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.kind() == PropKind::Var && a.var_id() != b.var_id()) {
    return a.var_id() < b.var_id() ? -1 : 1;
  }
  const auto& ca = a.children();
  const auto& cb = b.children();
  if (ca.size() != cb.size()) return ca.size() < cb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (int c = compare(ca[i], cb[i]); c != 0) return c;
  }
  return 0;
}

bool operator==(const PropFormula& a, const PropFormula& b) {
  return a.node_ == b.node_ || compare(a, b) == 0;
}

namespace {

void collect_vars(const PropFormula& f, std::vector<PropVar>& out) {
  if (f.kind() == PropKind::Var) {
    out.push_back(f.var_id());
    return;
  }
  for (const auto& c : f.children()) collect_vars(c, out);
}

bool less(const PropFormula& a, const PropFormula& b) { return compare(a, b) < 0; }

// The complement of a literal-shaped operand, if cheap to name.
bool complementary(const PropFormula& a, const PropFormula& b) {
  if (a.kind() == PropKind::Not && a.children()[0] == b) return true;
  if (b.kind() == PropKind::Not && b.children()[0] == a) return true;
  return false;
}

// Operand set of `f` seen as a junction of kind `op` (a singleton otherwise).
std::vector<PropFormula> operands(const PropFormula& f, PropKind op) {
  if (f.kind() == op) return f.children();
  return {f};
}

bool subset_sorted(const std::vector<PropFormula>& small,
                   const std::vector<PropFormula>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end(), less);
}

PropFormula junction(PropKind op, std::vector<PropFormula> in) {
  const bool is_and = op == PropKind::And;
  const PropKind unit = is_and ? PropKind::True : PropKind::False;
  const PropKind annihilator = is_and ? PropKind::False : PropKind::True;
  const PropKind dual = is_and ? PropKind::Or : PropKind::And;

  std::vector<PropFormula> flat;
  for (auto& c : in) {
    if (c.kind() == op) {
      for (const auto& g : c.children()) flat.push_back(g);
    } else {
      flat.push_back(std::move(c));
    }
  }
  std::vector<PropFormula> kept;
  for (auto& c : flat) {
    if (c.kind() == annihilator) return c;
    if (c.kind() != unit) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), less);
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (complementary(kept[i], kept[j])) {
        return is_and ? PropFormula::ff() : PropFormula::tt();
      }
    }
  }

  // Absorption: x op (x dual y) = x, generalized to operand subsets.
  std::vector<std::vector<PropFormula>> parts;
  parts.reserve(kept.size());
  for (const auto& c : kept) {
    auto p = operands(c, dual);
    std::sort(p.begin(), p.end(), less);
    parts.push_back(std::move(p));
  }
  std::vector<bool> drop(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i].kind() != dual) continue;
    for (std::size_t j = 0; j < kept.size() && !drop[i]; ++j) {
      if (i == j || drop[j]) continue;
      if (parts[j].size() < parts[i].size() && subset_sorted(parts[j], parts[i])) {
        drop[i] = true;
      }
    }
  }
  std::vector<PropFormula> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!drop[i]) out.push_back(std::move(kept[i]));
  }
  if (out.empty()) return is_and ? PropFormula::tt() : PropFormula::ff();
  if (out.size() == 1) return out.front();
  return is_and ? PropFormula::land(std::move(out)) : PropFormula::lor(std::move(out));
}

PropFormula simplify_once(const PropFormula& f) {
  switch (f.kind()) {
    case PropKind::True:
    case PropKind::False:
    case PropKind::Var:
      return f;
    case PropKind::Not: {
      PropFormula c = simplify_once(f.children()[0]);
      if (c.kind() == PropKind::True) return PropFormula::ff();
      if (c.kind() == PropKind::False) return PropFormula::tt();
      if (c.kind() == PropKind::Not) return c.children()[0];
      return PropFormula::lnot(std::move(c));
    }
    case PropKind::And:
    case PropKind::Or: {
      std::vector<PropFormula> cs;
      cs.reserve(f.children().size());
      for (const auto& c : f.children()) cs.push_back(simplify_once(c));
      return junction(f.kind(), std::move(cs));
    }
  }
  return f;
}

}  // namespace

std::vector<PropVar> variables_of(const PropFormula& f) {
  std::vector<PropVar> out;
  collect_vars(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool evaluate(const PropFormula& f, const std::vector<bool>& assignment) {
  switch (f.kind()) {
    case PropKind::True: return true;
    case PropKind::False: return false;
    case PropKind::Var:
      if (f.var_id() >= assignment.size()) {
        throw DomainError("variable x" + std::to_string(f.var_id()) + " is unassigned");
      }
      return assignment[f.var_id()];
    case PropKind::Not: return !evaluate(f.children()[0], assignment);
    case PropKind::And:
      for (const auto& c : f.children()) {
        if (!evaluate(c, assignment)) return false;
      }
      return true;
    case PropKind::Or:
      for (const auto& c : f.children()) {
        if (evaluate(c, assignment)) return true;
      }
      return false;
  }
  return false;
}

bool is_nnf(const PropFormula& f) {
  if (f.kind() == PropKind::Not) return f.children()[0].kind() == PropKind::Var;
  for (const auto& c : f.children()) {
    if (!is_nnf(c)) return false;
  }
  return true;
}

PropFormula to_nnf(const PropFormula& f) {
  std::function<PropFormula(const PropFormula&, bool)> rec =
      [&](const PropFormula& g, bool neg) -> PropFormula {
    switch (g.kind()) {
      case PropKind::True: return neg ? PropFormula::ff() : g;
      case PropKind::False: return neg ? PropFormula::tt() : g;
      case PropKind::Var: return neg ? PropFormula::lnot(g) : g;
      case PropKind::Not: return rec(g.children()[0], !neg);
      case PropKind::And:
      case PropKind::Or: {
        std::vector<PropFormula> cs;
        for (const auto& c : g.children()) cs.push_back(rec(c, neg));
        const bool make_and = (g.kind() == PropKind::And) != neg;
        return make_and ? PropFormula::land(std::move(cs)) : PropFormula::lor(std::move(cs));
      }
    }
    return g;
  };
  return rec(f, false);
}

PropFormula simplify(const PropFormula& f) {
  PropFormula cur = f;
  for (;;) {
    PropFormula next = simplify_once(cur);
    if (next == cur) return next;
    cur = std::move(next);
  }
}

PropFormula condition(const PropFormula& f, PropVar v, bool value) {
  switch (f.kind()) {
    case PropKind::True:
    case PropKind::False:
      return f;
    case PropKind::Var:
      if (f.var_id() != v) return f;
      return value ? PropFormula::tt() : PropFormula::ff();
    case PropKind::Not: {
      PropFormula c = condition(f.children()[0], v, value);
      if (c.kind() == PropKind::True) return PropFormula::ff();
      if (c.kind() == PropKind::False) return PropFormula::tt();
      if (c == f.children()[0]) return f;
      return PropFormula::lnot(std::move(c));
    }
    case PropKind::And:
    case PropKind::Or: {
      const bool is_and = f.kind() == PropKind::And;
      const PropKind annihilator = is_and ? PropKind::False : PropKind::True;
      const PropKind unit = is_and ? PropKind::True : PropKind::False;
      std::vector<PropFormula> cs;
      bool changed = false;
      for (const auto& c : f.children()) {
        PropFormula g = condition(c, v, value);
        if (g.kind() == annihilator) return g;
        changed = changed || !(g == c);
        if (g.kind() == unit) {
          changed = true;
          continue;
        }
        cs.push_back(std::move(g));
      }
      if (!changed) return f;
      if (cs.empty()) return is_and ? PropFormula::tt() : PropFormula::ff();
      if (cs.size() == 1) return cs.front();
      return is_and ? PropFormula::land(std::move(cs)) : PropFormula::lor(std::move(cs));
    }
  }
  return f;
}

std::string to_string(const PropFormula& f, std::span<const std::string> names) {
  switch (f.kind()) {
    case PropKind::True: return "true";
    case PropKind::False: return "false";
    case PropKind::Var:
      if (f.var_id() < names.size()) return names[f.var_id()];
      return "x" + std::to_string(f.var_id());
    case PropKind::Not: {
      const auto& c = f.children()[0];
      std::string inner = to_string(c, names);
      if (c.kind() == PropKind::And || c.kind() == PropKind::Or) inner = "(" + inner + ")";
      return "!" + inner;
    }
    case PropKind::And:
    case PropKind::Or: {
      const char* sep = f.kind() == PropKind::And ? " & " : " | ";
      std::string out;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        const auto& c = f.children()[i];
        std::string part = to_string(c, names);
        if (c.kind() == PropKind::And || c.kind() == PropKind::Or) part = "(" + part + ")";
        if (i) out += sep;
        out += part;
      }
      if (f.children().empty()) return f.kind() == PropKind::And ? "true" : "false";
      return out;
    }
  }
  return "?";
}

std::vector<PropVar> NextStateFormulas::variable_order() const {
  std::vector<PropVar> order(num_variables());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<PropVar>(i);
  return order;
}

namespace {

PropFormula guard_to_prop(const Formula& g, const Dfa& dfa, std::size_t offset) {
  switch (g.op()) {
    case Op::True: return PropFormula::tt();
    case Op::False: return PropFormula::ff();
    case Op::Atom:
      return PropFormula::var(static_cast<PropVar>(offset + dfa.atom_index(g.name())));
    case Op::Not: return PropFormula::lnot(guard_to_prop(g.child(0), dfa, offset));
    case Op::And:
    case Op::Or: {
      // Flatten the binary spine into one n-ary node.
      std::vector<PropFormula> cs;
      std::function<void(const Formula&)> walk = [&](const Formula& h) {
        if (h.op() == g.op()) {
          walk(h.lhs());
          walk(h.rhs());
        } else {
          cs.push_back(guard_to_prop(h, dfa, offset));
        }
      };
      walk(g);
      return g.op() == Op::And ? PropFormula::land(std::move(cs))
                               : PropFormula::lor(std::move(cs));
    }
    default:
      throw DomainError("guard is not propositional: " + to_string(g));
  }
}

}  // namespace

NextStateFormulas next_state_formulas(const Dfa& dfa) {
  NextStateFormulas out;
  out.num_states = dfa.num_states();
  out.num_atoms = dfa.num_atoms();
  for (std::size_t s = 0; s < out.num_states; ++s) {
    out.variable_names.push_back("state_" + std::to_string(s));
  }
  for (const auto& a : dfa.atoms()) out.variable_names.push_back(a);

  for (StateId target = 0; target < dfa.num_states(); ++target) {
    std::vector<PropFormula> clauses;
    for (StateId source = 0; source < dfa.num_states(); ++source) {
      Guard g = transition_guard(dfa, source, target);
      if (g.letters.empty()) continue;
      PropFormula state = PropFormula::var(out.state_var(source));
      if (g.letters.size() == dfa.num_letters()) {
        clauses.push_back(std::move(state));
      } else {
        clauses.push_back(
            PropFormula::land(std::move(state), guard_to_prop(g.formula, dfa, out.num_states)));
      }
    }
    if (clauses.empty()) {
      out.formulas.push_back(PropFormula::ff());
    } else if (clauses.size() == 1) {
      out.formulas.push_back(std::move(clauses.front()));
    } else {
      out.formulas.push_back(PropFormula::lor(std::move(clauses)));
    }
  }
  return out;
}

}  // namespace ltlzinc
