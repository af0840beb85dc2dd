#include "ltlzinc/circuit.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "hashing.hpp"

namespace ltlzinc {

Circuit::Circuit(std::vector<CircuitNode> nodes, NodeId root)
    : nodes_(std::move(nodes)), root_(root) {
  if (nodes_.empty()) throw DomainError("circuit has no nodes");
  if (root_ >= nodes_.size()) throw DomainError("circuit root out of range");
  scopes_.resize(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const CircuitNode& n = nodes_[i];
    auto& scope = scopes_[i];
    if (n.kind == CircuitNode::Kind::Literal) {
      scope.push_back(n.var);
      continue;
    }
    for (NodeId c : n.children) {
      if (c >= i) throw DomainError("circuit nodes are not in topological order");
      std::vector<PropVar> merged;
      std::set_union(scope.begin(), scope.end(), scopes_[c].begin(), scopes_[c].end(),
                     std::back_inserter(merged));
      scope = std::move(merged);
    }
  }
}

std::size_t Circuit::num_edges() const noexcept {
  std::size_t e = 0;
  for (const auto& n : nodes_) e += n.children.size();
  return e;
}

bool Circuit::is_decomposable() const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const CircuitNode& n = nodes_[i];
    if (n.kind != CircuitNode::Kind::And) continue;
    std::size_t total = 0;
    for (NodeId c : n.children) total += scopes_[c].size();
    if (total != scopes_[i].size()) return false;
  }
  return true;
}

namespace {

CircuitNode node_of(CircuitNode::Kind kind) {
  CircuitNode n;
  n.kind = kind;
  return n;
}

// Polarity a node commits its decision variable to, if it does so directly.
std::optional<bool> fixed_polarity(const Circuit& c, NodeId id, PropVar v) {
  const CircuitNode& n = c.node(id);
  if (n.kind == CircuitNode::Kind::Literal) {
    if (n.var == v) return n.positive;
    return std::nullopt;
  }
  if (n.kind == CircuitNode::Kind::And) {
    for (NodeId ch : n.children) {
      const CircuitNode& m = c.node(ch);
      if (m.kind == CircuitNode::Kind::Literal && m.var == v) return m.positive;
    }
  }
  return std::nullopt;
}

}  // namespace

bool Circuit::is_deterministic() const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const CircuitNode& n = nodes_[i];
    if (n.kind != CircuitNode::Kind::Or || n.children.size() < 2) continue;
    if (n.children.size() != 2 || n.decision == CircuitNode::kNoDecision) return false;
    auto a = fixed_polarity(*this, n.children[0], n.decision);
    auto b = fixed_polarity(*this, n.children[1], n.decision);
    if (!a || !b || *a == *b) return false;
  }
  return true;
}

bool Circuit::is_smooth() const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const CircuitNode& n = nodes_[i];
    if (n.kind != CircuitNode::Kind::Or) continue;
    for (NodeId c : n.children) {
      if (scopes_[c] != scopes_[i]) return false;
    }
  }
  return true;
}

namespace {

// Node arena with structural sharing.
class Builder {
 public:
  NodeId add(CircuitNode n) {
    std::uint64_t h = detail::fnv1a(static_cast<std::uint64_t>(n.kind));
    h = detail::mix(h, n.var);
    h = detail::mix(h, n.positive ? 1 : 0);
    h = detail::mix(h, n.decision);
    for (NodeId c : n.children) h = detail::mix(h, c);
    auto range = unique_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      const CircuitNode& m = nodes_[it->second];
      if (m.kind == n.kind && m.var == n.var && m.positive == n.positive &&
          m.decision == n.decision && m.children == n.children) {
        return it->second;
      }
    }
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(std::move(n));
    unique_.emplace(h, id);
    return id;
  }

  NodeId literal(PropVar v, bool positive) {
    CircuitNode n = node_of(CircuitNode::Kind::Literal);
    n.var = v;
    n.positive = positive;
    return add(std::move(n));
  }
  NodeId truth() { return add(node_of(CircuitNode::Kind::True)); }
  NodeId falsity() { return add(node_of(CircuitNode::Kind::False)); }
  NodeId conj(std::vector<NodeId> children) {
    CircuitNode n = node_of(CircuitNode::Kind::And);
    n.children = std::move(children);
    return add(std::move(n));
  }
  NodeId disj(PropVar decision, std::vector<NodeId> children) {
    CircuitNode n = node_of(CircuitNode::Kind::Or);
    n.decision = decision;
    n.children = std::move(children);
    return add(std::move(n));
  }

  const CircuitNode& node(NodeId id) const { return nodes_[id]; }
  std::vector<CircuitNode> release() { return std::move(nodes_); }

 private:
  std::vector<CircuitNode> nodes_;
  std::unordered_multimap<std::uint64_t, NodeId> unique_;
};

class Compiler {
 public:
  Compiler(std::vector<std::size_t> rank) : rank_(std::move(rank)) {}

  NodeId compile(const PropFormula& g) {
    if (auto it = cache_.find(g); it != cache_.end()) return it->second;
    const NodeId id = compile_uncached(g);
    cache_.emplace(g, id);
    return id;
  }

  Builder& builder() { return b_; }

 private:
  NodeId compile_uncached(const PropFormula& g) {
    switch (g.kind()) {
      case PropKind::True: return b_.truth();
      case PropKind::False: return b_.falsity();
      case PropKind::Var: return b_.literal(g.var_id(), true);
      case PropKind::Not:
        if (g.children()[0].kind() == PropKind::Var) {
          return b_.literal(g.children()[0].var_id(), false);
        }
        break;
      case PropKind::And:
        if (auto split = split_components(g)) return *split;
        break;
      case PropKind::Or:
        break;
    }
    return shannon(g);
  }

  // Conjunction whose operands fall into several variable-disjoint groups.
  std::optional<NodeId> split_components(const PropFormula& g) {
    const auto& cs = g.children();
    std::vector<std::size_t> parent(cs.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<PropVar, std::size_t> owner;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (PropVar v : variables_of(cs[i])) {
        auto [it, fresh] = owner.emplace(v, i);
        if (!fresh) parent[find(i)] = find(it->second);
      }
    }
    std::map<std::size_t, std::vector<PropFormula>> groups;
    for (std::size_t i = 0; i < cs.size(); ++i) groups[find(i)].push_back(cs[i]);
    if (groups.size() < 2) return std::nullopt;

    std::vector<NodeId> parts;
    for (auto& [root, members] : groups) {
      PropFormula part = members.size() == 1 ? members.front()
                                             : PropFormula::land(std::move(members));
      const NodeId id = compile(part);
      const auto kind = b_.node(id).kind;
      if (kind == CircuitNode::Kind::False) return b_.falsity();
      if (kind == CircuitNode::Kind::True) continue;
      parts.push_back(id);
    }
    if (parts.empty()) return b_.truth();
    if (parts.size() == 1) return parts.front();
    std::sort(parts.begin(), parts.end());
    return b_.conj(std::move(parts));
  }

  NodeId shannon(const PropFormula& g) {
    const auto vars = variables_of(g);
    // Variable-free but unfolded, e.g. !true.
    if (vars.empty()) return evaluate(g, {}) ? b_.truth() : b_.falsity();
    PropVar v = vars.front();
    for (PropVar u : vars) {
      if (rank_[u] < rank_[v]) v = u;
    }
    std::vector<NodeId> branches;
    for (bool value : {true, false}) {
      const NodeId sub = compile(condition(g, v, value));
      const auto kind = b_.node(sub).kind;
      if (kind == CircuitNode::Kind::False) continue;
      const NodeId lit = b_.literal(v, value);
      branches.push_back(kind == CircuitNode::Kind::True ? lit : b_.conj({lit, sub}));
    }
    if (branches.empty()) return b_.falsity();
    if (branches.size() == 1) return branches.front();
    return b_.disj(v, std::move(branches));
  }

  std::vector<std::size_t> rank_;
  Builder b_;
  std::unordered_map<PropFormula, NodeId, PropFormulaHash> cache_;
};

}  // namespace

Circuit compile_sddnnf(const PropFormula& f, std::span<const PropVar> order,
                       const CompileLimits& limits) {
  const auto vars = variables_of(f);
  if (vars.size() > limits.max_variables) {
    throw ResourceError("formula has " + std::to_string(vars.size()) +
                        " variables, compilation cap is " +
                        std::to_string(limits.max_variables));
  }
  const PropVar top = vars.empty() ? 0 : vars.back() + 1;
  std::vector<std::size_t> rank(top, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (PropVar v : order) {
    if (v < top && rank[v] == std::numeric_limits<std::size_t>::max()) rank[v] = next++;
  }
  for (PropVar v : vars) {
    if (rank[v] == std::numeric_limits<std::size_t>::max()) rank[v] = next++;
  }
  Compiler compiler(std::move(rank));
  const NodeId root = compiler.compile(f);
  return Circuit(compiler.builder().release(), root);
}

Circuit smooth(const Circuit& c, std::span<const PropVar> vars) {
  Builder b;
  std::map<PropVar, NodeId> tautologies;
  auto tautology = [&](PropVar v) {
    auto it = tautologies.find(v);
    if (it != tautologies.end()) return it->second;
    const NodeId pos = b.literal(v, true);
    const NodeId neg = b.literal(v, false);
    const NodeId id = b.disj(v, {pos, neg});
    tautologies.emplace(v, id);
    return id;
  };
  // Conjoin gap fillers, flattening into an existing conjunction.
  auto pad = [&](NodeId id, const std::vector<PropVar>& missing) {
    if (missing.empty()) return id;
    std::vector<NodeId> children;
    if (b.node(id).kind == CircuitNode::Kind::And) {
      children = b.node(id).children;
    } else if (b.node(id).kind != CircuitNode::Kind::True) {
      children.push_back(id);
    }
    for (PropVar v : missing) children.push_back(tautology(v));
    if (children.size() == 1) return children.front();
    return b.conj(std::move(children));
  };
  auto gaps = [](const std::vector<PropVar>& want, const std::vector<PropVar>& have) {
    std::vector<PropVar> out;
    std::set_difference(want.begin(), want.end(), have.begin(), have.end(),
                        std::back_inserter(out));
    return out;
  };

  std::vector<NodeId> map(c.size());
  for (NodeId i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    CircuitNode copy = n;
    for (NodeId& ch : copy.children) {
      const NodeId old = ch;
      ch = map[old];
      if (n.kind == CircuitNode::Kind::Or) ch = pad(ch, gaps(c.scope(i), c.scope(old)));
    }
    map[i] = b.add(std::move(copy));
  }
  NodeId root = map[c.root()];
  if (!vars.empty() && c.node(c.root()).kind != CircuitNode::Kind::False) {
    std::vector<PropVar> want(vars.begin(), vars.end());
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    root = pad(root, gaps(want, c.scope(c.root())));
  }
  return Circuit(b.release(), root);
}

std::string circuit_to_nnf(const Circuit& c) {
  PropVar top = 0;
  for (const auto& n : c.nodes()) {
    if (n.kind == CircuitNode::Kind::Literal) top = std::max(top, n.var + 1);
  }
  std::ostringstream out;
  out << "nnf " << c.size() << ' ' << c.num_edges() << ' ' << top << '\n';
  for (const auto& n : c.nodes()) {
    switch (n.kind) {
      case CircuitNode::Kind::Literal: {
        const long long lit = static_cast<long long>(n.var) + 1;
        out << "L " << (n.positive ? lit : -lit) << '\n';
        break;
      }
      case CircuitNode::Kind::True: out << "A 0\n"; break;
      case CircuitNode::Kind::False: out << "O 0 0\n"; break;
      case CircuitNode::Kind::And:
      case CircuitNode::Kind::Or: {
        if (n.kind == CircuitNode::Kind::And) {
          out << "A ";
        } else {
          out << "O "
              << (n.decision == CircuitNode::kNoDecision ? 0 : n.decision + 1) << ' ';
        }
        out << n.children.size();
        for (NodeId ch : n.children) out << ' ' << ch;
        out << '\n';
        break;
      }
    }
  }
  // The root is the last line in c2d files; record ours when it differs.
  if (c.root() + 1 != c.size()) out << "c root " << c.root() << '\n';
  return out.str();
}

Circuit circuit_from_nnf(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::size_t declared = 0;
  bool header = false;
  std::optional<NodeId> root;
  std::vector<CircuitNode> nodes;
  auto fail = [&](const std::string& what) -> void { throw ParseError(what, lineno, 1); };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "c") {
      std::string word;
      NodeId r = 0;
      if (ls >> word && word == "root" && ls >> r) root = r;
      continue;
    }
    if (!header) {
      std::size_t edges = 0, vars = 0;
      if (tag != "nnf" || !(ls >> declared >> edges >> vars)) fail("expected 'nnf N E V' header");
      header = true;
      continue;
    }
    CircuitNode n = node_of(CircuitNode::Kind::True);
    if (tag == "L") {
      long long lit = 0;
      if (!(ls >> lit) || lit == 0) fail("bad literal");
      n.kind = CircuitNode::Kind::Literal;
      n.var = static_cast<PropVar>((lit < 0 ? -lit : lit) - 1);
      n.positive = lit > 0;
    } else if (tag == "A" || tag == "O") {
      std::size_t decision = 0, k = 0;
      if (tag == "O" && !(ls >> decision)) fail("missing decision variable");
      if (!(ls >> k)) fail("missing child count");
      n.children.resize(k);
      for (auto& ch : n.children) {
        if (!(ls >> ch) || ch >= nodes.size()) fail("bad child reference");
      }
      if (tag == "A") {
        n.kind = CircuitNode::Kind::And;
        if (k == 0) n.kind = CircuitNode::Kind::True;
      } else {
        n.kind = k == 0 ? CircuitNode::Kind::False : CircuitNode::Kind::Or;
        n.decision = decision == 0 ? CircuitNode::kNoDecision
                                   : static_cast<PropVar>(decision - 1);
      }
    } else {
      fail("unknown node kind '" + tag + "'");
    }
    nodes.push_back(std::move(n));
  }
  if (!header) throw ParseError("empty NNF text", 1, 1);
  if (nodes.size() != declared) {
    throw ParseError("header declares " + std::to_string(declared) + " nodes, found " +
                         std::to_string(nodes.size()),
                     1, 1);
  }
  if (nodes.empty()) throw ParseError("NNF text has no nodes", 1, 1);
  const NodeId r = root.value_or(static_cast<NodeId>(nodes.size() - 1));
  return Circuit(std::move(nodes), r);
}

}  // namespace ltlzinc
