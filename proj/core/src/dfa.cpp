#include "ltlzinc/dfa.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include <json.hpp>

#include "ltlzinc/error.hpp"

namespace ltlzinc {

Dfa::Dfa(std::vector<std::string> atoms, std::size_t num_states,
         std::vector<StateId> accepting, std::vector<Transition> transitions)
    : atoms_(std::move(atoms)), num_states_(num_states) {
  if (num_states_ == 0) throw DomainError("a DFA needs at least one state");
  if (atoms_.size() > 16) {
    throw ResourceError("DFA alphabets are limited to 16 atoms");
  }
  accepting_.assign(num_states_, false);
  for (StateId s : accepting) {
    if (s >= num_states_) throw DomainError("accepting state out of range");
    accepting_[s] = true;
  }
  constexpr StateId kUnset = ~StateId{0};
  delta_.assign(num_states_ * num_letters(), kUnset);
  for (const auto& t : transitions) {
    if (t.from >= num_states_ || t.to >= num_states_ || t.letter >= num_letters()) {
      throw DomainError("transition out of range");
    }
    auto& slot = delta_[t.from * num_letters() + t.letter];
    if (slot != kUnset && slot != t.to) {
      throw DomainError("nondeterministic transition from state " +
                        std::to_string(t.from));
    }
    slot = t.to;
  }
  if (std::find(delta_.begin(), delta_.end(), kUnset) != delta_.end()) {
    throw DomainError("transition map is not total");
  }
}

std::vector<StateId> Dfa::accepting_states() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < num_states_; ++s) {
    if (accepting_[s]) out.push_back(s);
  }
  return out;
}

std::size_t Dfa::atom_index(std::string_view name) const {
  auto it = std::find(atoms_.begin(), atoms_.end(), name);
  if (it == atoms_.end()) {
    throw DomainError("automaton has no atom '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - atoms_.begin());
}

Dfa ltlf_to_dfa(const Formula& f, std::span<const std::string> atoms,
                const TranslationOptions& options) {
  for (const auto& a : atoms_of(f)) {
    if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) {
      throw DomainError("formula atom '" + a + "' is not in the alphabet");
    }
  }
  const std::size_t num_letters = std::size_t{1} << atoms.size();
  std::vector<AtomAssignment> assignments(num_letters);
  for (Letter l = 0; l < num_letters; ++l) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      assignments[l][atoms[i]] = ((l >> i) & 1U) != 0;
    }
  }

  std::unordered_map<Formula, StateId, FormulaHash> ids;
  std::vector<Formula> states;
  std::vector<Dfa::Transition> transitions;
  auto intern = [&](const Formula& g) {
    auto [it, fresh] = ids.try_emplace(g, static_cast<StateId>(states.size()));
    if (fresh) {
      if (states.size() >= options.max_states) {
        throw ResourceError("LTLf translation exceeded " +
                            std::to_string(options.max_states) +
                            " states for formula: " + to_string(f));
      }
      states.push_back(g);
    }
    return it->second;
  };

  intern(canonicalize(to_nnf(f)));
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (Letter l = 0; l < num_letters; ++l) {
      // states may reallocate inside intern; copy the source first.
      Formula src = states[s];
      StateId to = intern(progress(src, assignments[l]));
      transitions.push_back({static_cast<StateId>(s), l, to});
    }
  }

  std::vector<StateId> accepting;
  for (StateId s = 0; s < states.size(); ++s) {
    if (eval_empty(states[s])) accepting.push_back(s);
  }
  Dfa raw({atoms.begin(), atoms.end()}, states.size(), std::move(accepting),
          std::move(transitions));
  return minimize(raw);
}

Dfa minimize(const Dfa& dfa) {
  const std::size_t k = dfa.num_letters();

  // Reachable states.
  std::vector<char> reachable(dfa.num_states(), 0);
  std::vector<StateId> order{dfa.initial()};
  reachable[dfa.initial()] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (Letter l = 0; l < k; ++l) {
      StateId t = dfa.next(order[i], l);
      if (!reachable[t]) {
        reachable[t] = 1;
        order.push_back(t);
      }
    }
  }

  // inverse[l][t] = predecessors of t on l (restricted to reachable states).
  std::vector<std::vector<std::vector<StateId>>> inverse(
      k, std::vector<std::vector<StateId>>(dfa.num_states()));
  for (StateId s : order) {
    for (Letter l = 0; l < k; ++l) inverse[l][dfa.next(s, l)].push_back(s);
  }

  std::vector<std::vector<StateId>> blocks;
  std::vector<std::size_t> block_of(dfa.num_states(), 0);
  {
    std::vector<StateId> acc, rej;
    for (StateId s : order) (dfa.is_accepting(s) ? acc : rej).push_back(s);
    for (auto* b : {&acc, &rej}) {
      if (b->empty()) continue;
      for (StateId s : *b) block_of[s] = blocks.size();
      blocks.push_back(std::move(*b));
    }
  }

  std::deque<std::pair<std::size_t, Letter>> work;
  std::vector<std::vector<char>> in_work;
  auto enqueue = [&](std::size_t b, Letter l) {
    if (in_work.size() <= b) in_work.resize(b + 1, std::vector<char>(k, 0));
    if (!in_work[b][l]) {
      in_work[b][l] = 1;
      work.emplace_back(b, l);
    }
  };
  in_work.assign(blocks.size(), std::vector<char>(k, 0));
  if (blocks.size() == 2) {
    std::size_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
    for (Letter l = 0; l < k; ++l) enqueue(smaller, l);
  }

  std::vector<char> marked(dfa.num_states(), 0);
  std::vector<std::size_t> hits(blocks.size(), 0);
  while (!work.empty()) {
    auto [splitter, letter] = work.front();
    work.pop_front();
    in_work[splitter][letter] = 0;

    std::vector<StateId> preimage;
    for (StateId t : blocks[splitter]) {
      for (StateId p : inverse[letter][t]) {
        if (!marked[p]) {
          marked[p] = 1;
          preimage.push_back(p);
        }
      }
    }
    hits.assign(blocks.size(), 0);
    std::vector<std::size_t> touched;
    for (StateId p : preimage) {
      if (hits[block_of[p]]++ == 0) touched.push_back(block_of[p]);
    }
    for (std::size_t y : touched) {
      if (hits[y] == blocks[y].size()) continue;
      std::vector<StateId> inside, outside;
      for (StateId s : blocks[y]) (marked[s] ? inside : outside).push_back(s);
      const std::size_t z = blocks.size();
      blocks[y] = std::move(outside);
      for (StateId s : inside) block_of[s] = z;
      blocks.push_back(std::move(inside));
      in_work.resize(blocks.size(), std::vector<char>(k, 0));
      for (Letter l = 0; l < k; ++l) {
        if (in_work[y][l]) {
          enqueue(z, l);
        } else {
          enqueue(blocks[z].size() <= blocks[y].size() ? z : y, l);
        }
      }
    }
    for (StateId p : preimage) marked[p] = 0;
  }

  // Breadth-first renumbering of blocks.
  constexpr std::size_t kNone = ~std::size_t{0};
  std::vector<std::size_t> new_id(blocks.size(), kNone);
  std::vector<std::size_t> bfs{block_of[dfa.initial()]};
  new_id[bfs[0]] = 0;
  std::vector<Dfa::Transition> transitions;
  std::vector<StateId> accepting;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    StateId rep = blocks[bfs[i]].front();
    if (dfa.is_accepting(rep)) accepting.push_back(static_cast<StateId>(i));
    for (Letter l = 0; l < k; ++l) {
      std::size_t target = block_of[dfa.next(rep, l)];
      if (new_id[target] == kNone) {
        new_id[target] = bfs.size();
        bfs.push_back(target);
      }
      transitions.push_back(
          {static_cast<StateId>(i), l, static_cast<StateId>(new_id[target])});
    }
  }
  return Dfa(dfa.atoms(), bfs.size(), std::move(accepting),
             std::move(transitions));
}

std::vector<StateId> replay(const Dfa& dfa, std::span<const Letter> trace) {
  std::vector<StateId> out;
  out.reserve(trace.size());
  StateId s = dfa.initial();
  for (Letter l : trace) {
    if (l >= dfa.num_letters()) {
      throw DomainError("letter " + std::to_string(l) + " outside alphabet");
    }
    s = dfa.next(s, l);
    out.push_back(s);
  }
  return out;
}

bool accepts(const Dfa& dfa, std::span<const Letter> trace) {
  if (trace.empty()) throw DomainError("cannot classify an empty trace");
  return dfa.is_accepting(replay(dfa, trace).back());
}

namespace {

void cover(const std::vector<char>& member, std::span<const std::string> atoms,
           std::size_t depth, Letter fixed_bits, std::vector<Formula>& cubes) {
  // Letters agreeing with fixed_bits on atoms [0, depth).
  const std::size_t free = atoms.size() - depth;
  std::size_t hit = 0;
  for (Letter rest = 0; rest < (Letter{1} << free); ++rest) {
    hit += member[fixed_bits | (rest << depth)] ? 1 : 0;
  }
  if (hit == 0) return;
  if (hit == (std::size_t{1} << free)) {
    Formula cube = Formula::tt();
    bool first = true;
    for (std::size_t i = 0; i < depth; ++i) {
      Formula lit = Formula::atom(atoms[i]);
      if (!((fixed_bits >> i) & 1U)) lit = Formula::lnot(lit);
      cube = first ? lit : Formula::land(cube, lit);
      first = false;
    }
    cubes.push_back(cube);
    return;
  }
  cover(member, atoms, depth + 1, fixed_bits, cubes);
  cover(member, atoms, depth + 1, fixed_bits | (Letter{1} << depth), cubes);
}

}  // namespace

Formula letters_to_formula(std::span<const Letter> letters,
                           std::span<const std::string> atoms) {
  std::vector<char> member(std::size_t{1} << atoms.size(), 0);
  for (Letter l : letters) {
    if (l >= member.size()) throw DomainError("letter outside alphabet");
    member[l] = 1;
  }
  std::vector<Formula> cubes;
  cover(member, atoms, 0, 0, cubes);
  if (cubes.empty()) return Formula::ff();
  Formula out = cubes.front();
  for (std::size_t i = 1; i < cubes.size(); ++i) out = Formula::lor(out, cubes[i]);
  return out;
}

Guard transition_guard(const Dfa& dfa, StateId source, StateId target) {
  if (source >= dfa.num_states() || target >= dfa.num_states()) {
    throw DomainError("state out of range");
  }
  Guard g{source, target, {}, Formula::ff()};
  for (Letter l = 0; l < dfa.num_letters(); ++l) {
    if (dfa.next(source, l) == target) g.letters.push_back(l);
  }
  g.formula = letters_to_formula(g.letters, dfa.atoms());
  return g;
}

std::string dfa_to_json(const Dfa& dfa, int indent) {
  nlohmann::ordered_json j;
  j["atoms"] = dfa.atoms();
  j["states"] = dfa.num_states();
  j["initial"] = dfa.initial();
  j["accepting"] = dfa.accepting_states();
  auto transitions = nlohmann::ordered_json::array();
  for (StateId s = 0; s < dfa.num_states(); ++s) {
    for (Letter l = 0; l < dfa.num_letters(); ++l) {
      nlohmann::ordered_json t;
      t["from"] = s;
      t["letter"] = l;
      t["to"] = dfa.next(s, l);
      transitions.push_back(std::move(t));
    }
  }
  j["transitions"] = std::move(transitions);
  return j.dump(indent);
}

Dfa dfa_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("DFA JSON: ") + e.what(), 0, 0);
  }
  try {
    if (j.at("initial").get<StateId>() != 0) {
      throw ParseError("DFA JSON: initial state must be 0", 0, 0);
    }
    std::vector<Dfa::Transition> transitions;
    for (const auto& t : j.at("transitions")) {
      transitions.push_back({t.at("from").get<StateId>(),
                             t.at("letter").get<Letter>(),
                             t.at("to").get<StateId>()});
    }
    return Dfa(j.at("atoms").get<std::vector<std::string>>(),
               j.at("states").get<std::size_t>(),
               j.at("accepting").get<std::vector<StateId>>(),
               std::move(transitions));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("DFA JSON: ") + e.what(), 0, 0);
  }
}

}  // namespace ltlzinc
