#include "ltlzinc/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "ltlzinc/error.hpp"

namespace ltlzinc {

// ---------------------------------------------------------------------------
// SymbolicDomain

SymbolicDomain SymbolicDomain::from_labels(std::string name,
                                           std::vector<std::string> labels) {
  if (labels.empty()) throw DomainError("domain '" + name + "' has no labels");
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw DomainError("domain '" + name + "' has duplicate labels");
  }
  SymbolicDomain d;
  d.name_ = std::move(name);
  d.labels_ = std::move(labels);
  d.values_.resize(d.labels_.size());
  std::iota(d.values_.begin(), d.values_.end(), 0);
  return d;
}

SymbolicDomain SymbolicDomain::from_range(std::string name, int lo, int hi) {
  if (hi < lo) throw DomainError("domain '" + name + "' has an empty range");
  SymbolicDomain d;
  d.name_ = std::move(name);
  d.is_range_ = true;
  for (int v = lo; v <= hi; ++v) {
    d.values_.push_back(v);
    d.labels_.push_back(std::to_string(v));
  }
  return d;
}

SymbolicDomain SymbolicDomain::from_parts(std::string name,
                                          std::vector<std::string> labels,
                                          std::vector<int> values,
                                          bool is_range) {
  if (labels.empty() || labels.size() != values.size()) {
    throw DomainError("domain '" + name + "' needs one value per label");
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) {
      throw DomainError("domain '" + name + "' values must increase strictly");
    }
    if (!is_range && labels[i] <= labels[i - 1]) {
      throw DomainError("domain '" + name +
                        "' labels must follow lexicographic order");
    }
  }
  SymbolicDomain d;
  d.name_ = std::move(name);
  d.labels_ = std::move(labels);
  d.values_ = std::move(values);
  d.is_range_ = is_range;
  return d;
}

SymbolicDomain SymbolicDomain::restrict_to(
    std::string name, const std::vector<std::string>& labels) const {
  SymbolicDomain d;
  d.name_ = std::move(name);
  d.is_range_ = is_range_;
  std::vector<std::size_t> picked;
  for (const auto& l : labels) picked.push_back(index_of_label(l));
  std::sort(picked.begin(), picked.end());
  if (picked.empty() ||
      std::adjacent_find(picked.begin(), picked.end()) != picked.end()) {
    throw DomainError("invalid label subset for domain '" + d.name_ + "'");
  }
  for (std::size_t i : picked) {
    d.labels_.push_back(labels_[i]);
    d.values_.push_back(values_[i]);
  }
  return d;
}

std::size_t SymbolicDomain::index_of_value(int value) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), value);
  if (it == values_.end() || *it != value) {
    throw DomainError("value " + std::to_string(value) +
                      " is outside domain '" + name_ + "'");
  }
  return static_cast<std::size_t>(it - values_.begin());
}

std::size_t SymbolicDomain::index_of_label(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw DomainError("label '" + std::string(label) + "' is not in domain '" +
                      name_ + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool SymbolicDomain::contains(int value) const noexcept {
  return std::binary_search(values_.begin(), values_.end(), value);
}

// ---------------------------------------------------------------------------
// Constraint syntax

std::vector<std::string> Constraint::variables() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          for (const auto& t : b.lhs.terms) add(t.variable);
          for (const auto& t : b.rhs.terms) add(t.variable);
        } else {
          for (const auto& v : b.variables) add(v);
        }
      },
      body);
  return out;
}

namespace {

class ConstraintParser {
 public:
  explicit ConstraintParser(std::string_view text) : text_(text) {}

  ConstraintBody parse() {
    skip();
    std::size_t save = pos_;
    std::string word = peek_identifier();
    if (word == "all_different" || word == "alldifferent" ||
        word == "all_equal" || word == "allequal") {
      pos_ += word.size();
      auto vars = variable_list();
      expect_end();
      if (vars.size() < 2) fail("needs at least two variables");
      if (word.find("different") != std::string::npos) {
        return AllDifferent{std::move(vars)};
      }
      return AllEqual{std::move(vars)};
    }
    pos_ = save;
    Comparison c;
    c.lhs = linear();
    c.op = comparator();
    c.rhs = linear();
    expect_end();
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("constraint: " + msg, 1, pos_ + 1);
  }

  void skip() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool eat(std::string_view s) {
    skip();
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  std::string peek_identifier() const {
    std::size_t end = pos_;
    if (end < text_.size() &&
        (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_')) {
        ++end;
      }
    }
    return std::string(text_.substr(pos_, end - pos_));
  }

  std::string identifier() {
    skip();
    std::string id = peek_identifier();
    if (id.empty()) fail("expected a variable name");
    pos_ += id.size();
    return id;
  }

  bool peek_digit() {
    skip();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("expected an integer");
    return std::stol(std::string(text_.substr(start, pos_ - start)));
  }

  std::vector<std::string> variable_list() {
    if (!eat("(")) fail("expected '('");
    const bool bracket = eat("[");
    std::vector<std::string> vars{identifier()};
    while (eat(",")) vars.push_back(identifier());
    if (bracket && !eat("]")) fail("expected ']'");
    if (!eat(")")) fail("expected ')'");
    return vars;
  }

  void term(long sign, LinearExpr& e) {
    if (eat("-")) sign = -sign;
    if (peek_digit()) {
      long k = integer();
      if (eat("*")) {
        e.terms.push_back({sign * k, identifier()});
      } else {
        e.constant += sign * k;
      }
      return;
    }
    std::string v = identifier();
    long k = 1;
    if (eat("*")) k = integer();
    e.terms.push_back({sign * k, std::move(v)});
  }

  LinearExpr linear() {
    LinearExpr e;
    term(1, e);
    while (true) {
      if (eat("+")) {
        term(1, e);
      } else if (eat("-")) {
        term(-1, e);
      } else {
        return e;
      }
    }
  }

  CmpOp comparator() {
    struct Spelling {
      std::string_view text;
      CmpOp op;
    };
    static constexpr Spelling spellings[] = {
        {"<=", CmpOp::Le}, {">=", CmpOp::Ge}, {"!=", CmpOp::Ne},
        {"==", CmpOp::Eq}, {"\xE2\x89\xA4", CmpOp::Le},
        {"\xE2\x89\xA5", CmpOp::Ge}, {"\xE2\x89\xA0", CmpOp::Ne},
        {"<", CmpOp::Lt},  {">", CmpOp::Gt}, {"=", CmpOp::Eq},
    };
    for (const auto& s : spellings) {
      if (eat(s.text)) return s.op;
    }
    fail("expected a comparison operator");
  }

  void expect_end() {
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string linear_to_string(const LinearExpr& e) {
  std::string out;
  bool first = true;
  for (const auto& t : e.terms) {
    long k = t.coefficient;
    if (!first) {
      out += k < 0 ? " - " : " + ";
      k = std::labs(k);
    } else if (k < 0) {
      out += "-";
      k = -k;
    }
    if (k != 1) out += std::to_string(k) + "*";
    out += t.variable;
    first = false;
  }
  if (first) {
    out += std::to_string(e.constant);
  } else if (e.constant != 0) {
    out += e.constant < 0 ? " - " : " + ";
    out += std::to_string(std::labs(e.constant));
  }
  return out;
}

std::string_view cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

bool compare_values(long diff, CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return diff < 0;
    case CmpOp::Le: return diff <= 0;
    case CmpOp::Eq: return diff == 0;
    case CmpOp::Ne: return diff != 0;
    case CmpOp::Ge: return diff >= 0;
    case CmpOp::Gt: return diff > 0;
  }
  return false;
}

std::string join_vars(const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ",";
    out += vars[i];
  }
  return out;
}

}  // namespace

Constraint parse_constraint(std::string name, std::string_view text) {
  return Constraint{std::move(name), ConstraintParser(text).parse()};
}

std::string to_string(const Constraint& c) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          return linear_to_string(b.lhs) + " " + std::string(cmp_text(b.op)) +
                 " " + linear_to_string(b.rhs);
        } else if constexpr (std::is_same_v<T, AllDifferent>) {
          return "all_different(" + join_vars(b.variables) + ")";
        } else {
          return "all_equal(" + join_vars(b.variables) + ")";
        }
      },
      c.body);
}

bool eval_constraint(const Constraint& c, const VariableAssignment& a) {
  auto value = [&](const std::string& v) -> long {
    auto it = a.find(v);
    if (it == a.end()) {
      throw DomainError("constraint '" + c.name + "' needs a value for '" + v + "'");
    }
    return it->second;
  };
  return std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          long diff = b.lhs.constant - b.rhs.constant;
          for (const auto& t : b.lhs.terms) diff += t.coefficient * value(t.variable);
          for (const auto& t : b.rhs.terms) diff -= t.coefficient * value(t.variable);
          return compare_values(diff, b.op);
        } else if constexpr (std::is_same_v<T, AllDifferent>) {
          std::set<long> seen;
          for (const auto& v : b.variables) {
            if (!seen.insert(value(v)).second) return false;
          }
          return true;
        } else {
          long first = value(b.variables.front());
          return std::all_of(b.variables.begin(), b.variables.end(),
                             [&](const std::string& v) { return value(v) == first; });
        }
      },
      c.body);
}

// ---------------------------------------------------------------------------
// ConstraintSystem

ConstraintSystem::ConstraintSystem(std::vector<SymbolicDomain> domains,
                                   std::vector<VariableSpec> variables,
                                   std::vector<Constraint> constraints)
    : domains_(std::move(domains)),
      variables_(std::move(variables)),
      constraints_(std::move(constraints)) {
  for (const auto& v : variables_) {
    auto it = std::find_if(domains_.begin(), domains_.end(),
                           [&](const SymbolicDomain& d) { return d.name() == v.domain; });
    if (it == domains_.end()) {
      throw DomainError("variable '" + v.name + "' uses unknown domain '" +
                        v.domain + "'");
    }
    domain_index_.push_back(static_cast<std::size_t>(it - domains_.begin()));
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (variables_[i].name == variables_[j].name) {
        throw DomainError("variable '" + variables_[i].name + "' declared twice");
      }
    }
  }
  if (constraints_.size() > 16) {
    throw ResourceError("at most 16 constraints are supported");
  }
  for (const auto& c : constraints_) {
    BoundConstraint b;
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Comparison>) {
            b.kind = BoundConstraint::Kind::Compare;
            b.op = body.op;
            b.constant = body.lhs.constant - body.rhs.constant;
            for (const auto& t : body.lhs.terms) {
              b.terms.push_back({t.coefficient, variable_index(t.variable)});
            }
            for (const auto& t : body.rhs.terms) {
              b.terms.push_back({-t.coefficient, variable_index(t.variable)});
            }
          } else {
            b.kind = std::is_same_v<T, AllDifferent>
                         ? BoundConstraint::Kind::AllDifferent
                         : BoundConstraint::Kind::AllEqual;
            for (const auto& v : body.variables) b.variables.push_back(variable_index(v));
          }
        },
        c.body);
    for (const auto& v : c.variables()) b.variables.push_back(variable_index(v));
    std::sort(b.variables.begin(), b.variables.end());
    b.variables.erase(std::unique(b.variables.begin(), b.variables.end()),
                      b.variables.end());
    bound_.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (constraints_[i].name == constraints_[j].name) {
        throw DomainError("constraint '" + constraints_[i].name + "' declared twice");
      }
    }
  }
}

std::vector<std::string> ConstraintSystem::atom_names() const {
  std::vector<std::string> out;
  for (const auto& c : constraints_) out.push_back(c.name);
  return out;
}

std::size_t ConstraintSystem::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  throw DomainError("undeclared variable '" + std::string(name) + "'");
}

std::size_t ConstraintSystem::constraint_index(std::string_view name) const {
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (constraints_[i].name == name) return i;
  }
  throw DomainError("undeclared constraint '" + std::string(name) + "'");
}

std::size_t ConstraintSystem::joint_size() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < variables_.size(); ++i) n *= domain_of(i).size();
  return n;
}

bool ConstraintSystem::holds(std::size_t constraint,
                             std::span<const int> values) const {
  const BoundConstraint& b = bound_[constraint];
  switch (b.kind) {
    case BoundConstraint::Kind::Compare: {
      long diff = b.constant;
      for (const auto& t : b.terms) diff += t.coefficient * values[t.variable];
      return compare_values(diff, b.op);
    }
    case BoundConstraint::Kind::AllDifferent:
      for (std::size_t i = 0; i < b.variables.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (values[b.variables[i]] == values[b.variables[j]]) return false;
        }
      }
      return true;
    case BoundConstraint::Kind::AllEqual:
      for (std::size_t v : b.variables) {
        if (values[v] != values[b.variables.front()]) return false;
      }
      return true;
  }
  return false;
}

Letter ConstraintSystem::letter_of(std::span<const int> values) const {
  Letter l = 0;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    if (holds(i, values)) l |= Letter{1} << i;
  }
  return l;
}

Assignment ConstraintSystem::to_assignment(const VariableAssignment& a) const {
  Assignment out(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    auto it = a.find(variables_[i].name);
    if (it == a.end()) {
      throw DomainError("no value for variable '" + variables_[i].name + "'");
    }
    if (!domain_of(i).contains(it->second)) {
      throw DomainError("value " + std::to_string(it->second) + " of '" +
                        variables_[i].name + "' is outside its domain");
    }
    out[i] = it->second;
  }
  return out;
}

bool ConstraintSystem::evaluate(std::size_t constraint,
                                const VariableAssignment& a) const {
  for (std::size_t v : bound_.at(constraint).variables) {
    auto it = a.find(variables_[v].name);
    if (it == a.end()) {
      throw DomainError("no value for variable '" + variables_[v].name + "'");
    }
    if (!domain_of(v).contains(it->second)) {
      throw DomainError("value " + std::to_string(it->second) + " of '" +
                        variables_[v].name + "' is outside its domain");
    }
  }
  return eval_constraint(constraints_[constraint], a);
}

double ConstraintSystem::constraint_probability(std::size_t constraint,
                                                const Distributions& dists) const {
  if (dists.size() != variables_.size()) {
    throw DomainError("expected one distribution per variable");
  }
  const BoundConstraint& b = bound_.at(constraint);
  for (std::size_t v : b.variables) {
    const auto& d = dists[v];
    if (d.size() != domain_of(v).size()) {
      throw DomainError("distribution for '" + variables_[v].name +
                        "' has the wrong number of classes");
    }
    double sum = 0.0;
    for (double x : d) {
      if (!(x >= 0.0)) {
        throw DomainError("negative probability for '" + variables_[v].name + "'");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DomainError("distribution for '" + variables_[v].name +
                        "' is not normalized");
    }
  }

  // Enumerate only the constraint's own variables; the rest marginalize out.
  Assignment values(variables_.size(), 0);
  std::vector<std::size_t> pos(b.variables.size(), 0);
  for (std::size_t i = 0; i < b.variables.size(); ++i) {
    values[b.variables[i]] = domain_of(b.variables[i]).values()[0];
  }
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t i = 0; i < b.variables.size(); ++i) {
      weight *= dists[b.variables[i]][pos[i]];
    }
    if (weight > 0.0 && holds(constraint, values)) total += weight;
    std::size_t i = b.variables.size();
    bool done = true;
    while (i > 0) {
      --i;
      const std::size_t v = b.variables[i];
      if (++pos[i] < domain_of(v).size()) {
        values[v] = domain_of(v).values()[pos[i]];
        done = false;
        break;
      }
      pos[i] = 0;
      values[v] = domain_of(v).values()[0];
    }
    if (done) break;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Solution enumeration

std::vector<Assignment> enumerate_solutions(const ConstraintSystem& system,
                                            Letter letter) {
  if (letter >= (Letter{1} << system.constraints().size())) {
    throw DomainError("letter outside alphabet");
  }
  std::vector<Assignment> out;
  system.for_each_assignment([&](std::span<const int> values) {
    if (system.letter_of(values) == letter) out.emplace_back(values.begin(), values.end());
  });
  return out;
}

SolutionCache::SolutionCache(const ConstraintSystem& system)
    : solutions_(std::size_t{1} << system.constraints().size()) {
  system.for_each_assignment([&](std::span<const int> values) {
    solutions_[system.letter_of(values)].emplace_back(values.begin(), values.end());
  });
}

const std::vector<Assignment>& SolutionCache::solutions(Letter letter) const {
  if (letter >= solutions_.size()) throw DomainError("letter outside alphabet");
  return solutions_[letter];
}

const Assignment& SolutionCache::sample(Letter letter, Rng& rng) const {
  const auto& s = solutions(letter);
  if (s.empty()) {
    throw DomainError("letter " + std::to_string(letter) + " is unsatisfiable");
  }
  return s[rng.uniform_index(s.size())];
}

}  // namespace ltlzinc
