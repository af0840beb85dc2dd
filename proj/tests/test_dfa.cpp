#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "ltlzinc/dfa.hpp"
#include "ltlzinc/error.hpp"
#include "ltlzinc/task.hpp"
#include "support/oracles.hpp"

using namespace ltlzinc;

namespace {

Dfa compile_builtin(const std::string& name) {
  const TaskSpec t = *builtin_task(name);
  return ltlf_to_dfa(parse_ltlf(t.formula), t.constraint_system().atom_names());
}

// Number of Myhill-Nerode classes among reachable states, by comparing
// acceptance of every suffix up to `depth` letters.
std::size_t distinct_behaviours(const Dfa& d, std::size_t depth) {
  std::set<StateId> reachable{d.initial()};
  std::vector<StateId> todo{d.initial()};
  while (!todo.empty()) {
    StateId s = todo.back();
    todo.pop_back();
    for (Letter l = 0; l < d.num_letters(); ++l) {
      if (reachable.insert(d.next(s, l)).second) todo.push_back(d.next(s, l));
    }
  }
  const auto words = oracle::all_traces(d.num_atoms(), depth);
  std::set<std::vector<bool>> sigs;
  for (StateId s : reachable) {
    std::vector<bool> sig{d.is_accepting(s)};
    for (const auto& w : words) {
      StateId cur = s;
      for (auto l : w) cur = d.next(cur, l);
      sig.push_back(d.is_accepting(cur));
    }
    sigs.insert(sig);
  }
  return sigs.size();
}

Dfa random_dfa(std::mt19937_64& rng, std::size_t states, std::size_t atoms) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < atoms; ++i) names.push_back("a" + std::to_string(i));
  std::vector<Dfa::Transition> ts;
  std::vector<StateId> acc;
  std::uniform_int_distribution<StateId> pick(0, static_cast<StateId>(states - 1));
  for (StateId s = 0; s < states; ++s) {
    if (rng() & 1U) acc.push_back(s);
    for (Letter l = 0; l < (1U << atoms); ++l) ts.push_back({s, l, pick(rng)});
  }
  return Dfa(names, states, acc, ts);
}

std::vector<Letter> random_trace(std::mt19937_64& rng, std::size_t letters, std::size_t min_len,
                                 std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<Letter> pick(0, static_cast<Letter>(letters - 1));
  std::vector<Letter> out(len(rng));
  for (auto& l : out) l = pick(rng);
  return out;
}

}  // namespace

TEST(Translation, BuiltinStateCounts) {
  const std::map<std::string, std::size_t> expected{
      {"task1", 8}, {"task2", 5}, {"task3", 5}, {"task4", 5}, {"task5", 4}, {"task6", 4}};
  for (const auto& [name, states] : expected) {
    EXPECT_EQ(compile_builtin(name).num_states(), states) << name;
  }
}

TEST(Translation, EventuallyHasTwoStates) {
  const std::vector<std::string> atoms{"p"};
  const Formula f = parse_ltlf("F p");
  const Dfa d = ltlf_to_dfa(f, atoms);
  EXPECT_EQ(d.num_states(), 2u);
  for (const auto& w : oracle::all_traces(1, 4)) {
    EXPECT_EQ(accepts(d, w), oracle::satisfies(f, oracle::to_trace(w, atoms)));
  }
}

TEST(Translation, AgreesWithTraceSemanticsOnBuiltins) {
  std::mt19937_64 rng(42);
  for (const auto& name : builtin_task_names()) {
    const TaskSpec t = *builtin_task(name);
    const auto atoms = t.constraint_system().atom_names();
    const Formula f = parse_ltlf(t.formula);
    const Dfa d = ltlf_to_dfa(f, atoms);
    for (int i = 0; i < 500; ++i) {
      const auto w = random_trace(rng, d.num_letters(), 1, 10);
      ASSERT_EQ(accepts(d, w), oracle::satisfies(f, oracle::to_trace(w, atoms))) << name;
    }
  }
}

TEST(Translation, AgreesWithTraceSemanticsOnRandomFormulas) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> atoms{"a", "b"};
  const auto traces = oracle::all_traces(atoms.size(), 4);
  for (int i = 0; i < 100; ++i) {
    const Formula f = oracle::random_formula(rng, 4, atoms);
    const Dfa d = ltlf_to_dfa(f, atoms);
    for (const auto& w : traces) {
      ASSERT_EQ(accepts(d, w), oracle::satisfies(f, oracle::to_trace(w, atoms))) << to_string(f);
    }
  }
}

TEST(Translation, ResultIsMinimalAndComplete) {
  for (const auto& name : builtin_task_names()) {
    const Dfa d = compile_builtin(name);
    EXPECT_EQ(distinct_behaviours(d, d.num_states()), d.num_states()) << name;
    EXPECT_EQ(minimize(d), d) << name;
  }
}

TEST(Translation, StateCapRaisesResourceError) {
  const TaskSpec t = *builtin_task("task1");
  TranslationOptions small;
  small.max_states = 3;
  try {
    (void)ltlf_to_dfa(parse_ltlf(t.formula), t.constraint_system().atom_names(), small);
    FAIL() << "expected a resource error";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("G"), std::string::npos);
  }
}

TEST(Translation, MissingAtomRejected) {
  const std::vector<std::string> atoms{"p"};
  EXPECT_THROW((void)ltlf_to_dfa(parse_ltlf("p & q"), atoms), DomainError);
}

TEST(Minimize, MergesBisimilarAcceptingStates) {
  // 0 -a-> 1, 0 -!a-> 2; 1 and 2 accept and loop to each other.
  const Dfa d({"a"}, 3, {1, 2},
              {{0, 0, 2}, {0, 1, 1}, {1, 0, 2}, {1, 1, 1}, {2, 0, 1}, {2, 1, 2}});
  const Dfa m = minimize(d);
  EXPECT_EQ(m.num_states(), 2u);
  for (const auto& w : oracle::all_traces(1, 5)) EXPECT_EQ(accepts(d, w), accepts(m, w));
}

TEST(Minimize, MatchesBehaviourCountOnRandomAutomata) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Dfa d = random_dfa(rng, 2 + rng() % 6, 1 + rng() % 2);
    const Dfa m = minimize(d);
    EXPECT_EQ(m.num_states(), distinct_behaviours(d, d.num_states()));
    EXPECT_EQ(minimize(m), m);
  }
}

TEST(Minimize, PreservesLanguageOnRandomTraces) {
  std::mt19937_64 rng(23);
  const Dfa d = random_dfa(rng, 7, 2);
  const Dfa m = minimize(d);
  for (int i = 0; i < 1000; ++i) {
    const auto w = random_trace(rng, d.num_letters(), 1, 12);
    ASSERT_EQ(accepts(d, w), accepts(m, w));
  }
}

TEST(Minimize, RenumbersBreadthFirst) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const Dfa m = minimize(random_dfa(rng, 6, 2));
    // BFS order: each state first appears as a successor before any later id.
    StateId next_new = 1;
    std::vector<bool> seen(m.num_states(), false);
    seen[0] = true;
    for (StateId s = 0; s < m.num_states(); ++s) {
      for (Letter l = 0; l < m.num_letters(); ++l) {
        const StateId t = m.next(s, l);
        if (!seen[t]) {
          ASSERT_EQ(t, next_new);
          seen[t] = true;
          ++next_new;
        }
      }
    }
  }
}

TEST(Accepts, WorkedExampleTraces) {
  const TaskSpec t = *builtin_task("example");
  const auto atoms = t.constraint_system().atom_names();
  ASSERT_EQ(atoms, (std::vector<std::string>{"p", "q"}));
  const Formula f = parse_ltlf(t.formula);
  const Dfa d = ltlf_to_dfa(f, atoms);
  // bit 0 = p, bit 1 = q
  const std::vector<Letter> s_plus{0b01, 0b10, 0b11, 0b10};
  const std::vector<Letter> s_minus{0b01, 0b10, 0b10, 0b10};
  EXPECT_FALSE(accepts(d, s_minus));
  EXPECT_EQ(accepts(d, s_plus), oracle::satisfies(f, oracle::to_trace(s_plus, atoms)));
}

TEST(Accepts, InitialAcceptingSelfLoop) {
  const Dfa d({"a"}, 1, {0}, {{0, 0, 0}, {0, 1, 0}});
  EXPECT_TRUE(accepts(d, std::vector<Letter>{1}));
}

TEST(Accepts, EmptyTraceAndBadLetter) {
  const Dfa d({"a"}, 1, {0}, {{0, 0, 0}, {0, 1, 0}});
  EXPECT_THROW((void)accepts(d, std::vector<Letter>{}), DomainError);
  EXPECT_THROW((void)accepts(d, std::vector<Letter>{2}), DomainError);
}

TEST(Dfa, RejectsPartialOrNondeterministicTables) {
  EXPECT_THROW(Dfa({"a"}, 1, {0}, {{0, 0, 0}}), DomainError);
  EXPECT_THROW(Dfa({"a"}, 2, {0}, {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}),
               DomainError);
}

TEST(Guards, TautologyAndEmpty) {
  const Dfa d({"a"}, 2, {1}, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
  EXPECT_EQ(transition_guard(d, 0, 1).formula, Formula::tt());
  EXPECT_EQ(transition_guard(d, 0, 0).formula, Formula::ff());
  EXPECT_TRUE(transition_guard(d, 0, 0).letters.empty());
}

TEST(Guards, PartitionLettersOnEveryTaskState) {
  for (const auto& name : builtin_task_names()) {
    const Dfa d = compile_builtin(name);
    for (StateId s = 0; s < d.num_states(); ++s) {
      std::vector<int> hits(d.num_letters(), 0);
      for (StateId t = 0; t < d.num_states(); ++t) {
        const Guard g = transition_guard(d, s, t);
        for (Letter l = 0; l < d.num_letters(); ++l) {
          const bool in_formula =
              oracle::holds(g.formula, {oracle::letter_assignment(l, d.atoms())}, 0);
          const bool in_letters =
              std::find(g.letters.begin(), g.letters.end(), l) != g.letters.end();
          ASSERT_EQ(in_formula, in_letters);
          ASSERT_EQ(in_letters, d.next(s, l) == t);
          hits[l] += in_formula;
        }
      }
      for (int h : hits) ASSERT_EQ(h, 1) << name << " state " << s;
    }
  }
}

TEST(Json, RoundTripAndStableBytes) {
  const Dfa d = compile_builtin("task2");
  const std::string text = dfa_to_json(d);
  EXPECT_EQ(dfa_from_json(text), d);
  EXPECT_EQ(dfa_to_json(compile_builtin("task2")), text);
  EXPECT_NE(text.find("\"transitions\""), std::string::npos);
  EXPECT_THROW((void)dfa_from_json("{\"atoms\": ["), ParseError);
  EXPECT_THROW((void)dfa_from_json("{\"atoms\": []}"), ParseError);
}
