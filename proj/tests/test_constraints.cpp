#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "ltlzinc/constraints.hpp"
#include "ltlzinc/error.hpp"
#include "ltlzinc/task.hpp"

using namespace ltlzinc;

namespace {

ConstraintSystem digits3(std::vector<std::pair<std::string, std::string>> cs) {
  std::vector<Constraint> parsed;
  for (auto& [n, b] : cs) parsed.push_back(parse_constraint(n, b));
  return ConstraintSystem({SymbolicDomain::from_range("d", 0, 9)},
                          {{"X", "d", "mnist"}, {"Y", "d", "mnist"}, {"Z", "d", "mnist"}},
                          std::move(parsed));
}

std::vector<double> uniform(std::size_t k) { return std::vector<double>(k, 1.0 / k); }

std::vector<double> one_hot(std::size_t k, std::size_t i) {
  std::vector<double> v(k, 0.0);
  v[i] = 1.0;
  return v;
}

}  // namespace

TEST(Domain, LabelsSortedLexicographically) {
  const auto d = SymbolicDomain::from_labels("f", {"top", "bag", "sandal"});
  EXPECT_EQ(d.labels(), (std::vector<std::string>{"bag", "sandal", "top"}));
  EXPECT_EQ(d.values(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(d.index_of_label("top"), 2u);
  EXPECT_THROW((void)SymbolicDomain::from_labels("f", {"a", "a"}), DomainError);
}

TEST(Domain, RangeAndRestriction) {
  const auto r = SymbolicDomain::from_range("r", 2, 8);
  EXPECT_EQ(r.size(), 7u);
  EXPECT_TRUE(r.contains(8));
  EXPECT_FALSE(r.contains(9));
  EXPECT_EQ(r.labels().front(), "2");

  const auto full = SymbolicDomain::from_labels(
      "fmnist", {"bag", "boot", "coat", "dress", "pullover", "sandal", "shirt", "sneaker",
                 "top", "trouser"});
  const auto upper = full.restrict_to("upper", {"trouser", "sandal"});
  EXPECT_EQ(upper.labels(), (std::vector<std::string>{"sandal", "trouser"}));
  EXPECT_EQ(upper.values(), (std::vector<int>{5, 9}));
  EXPECT_THROW((void)full.restrict_to("bad", {"hat"}), DomainError);
}

TEST(Parse, ConstraintForms) {
  EXPECT_TRUE(std::holds_alternative<Comparison>(parse_constraint("p", "Y < Z").body));
  EXPECT_TRUE(std::holds_alternative<AllDifferent>(parse_constraint("p", "all_different(X,Y,Z)").body));
  EXPECT_TRUE(std::holds_alternative<AllDifferent>(parse_constraint("p", "alldifferent([X, Y])").body));
  EXPECT_TRUE(std::holds_alternative<AllEqual>(parse_constraint("q", "all_equal(V,W,X)").body));
  const auto c = parse_constraint("q", "X + Y = 2*Z");
  const auto& cmp = std::get<Comparison>(c.body);
  ASSERT_EQ(cmp.rhs.terms.size(), 1u);
  EXPECT_EQ(cmp.rhs.terms[0].coefficient, 2);
  EXPECT_EQ(c.variables(), (std::vector<std::string>{"X", "Y", "Z"}));
  EXPECT_EQ(parse_constraint("r", to_string(c)).variables(), c.variables());
}

TEST(Parse, ConstraintErrorsCarryColumns) {
  try {
    (void)parse_constraint("p", "X + < Y");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 5u);
  }
  EXPECT_THROW((void)parse_constraint("p", "X + Y"), ParseError);
  EXPECT_THROW((void)parse_constraint("p", "all_different(X"), ParseError);
}

TEST(Eval, WorkedExampleTriples) {
  EXPECT_TRUE(eval_constraint(parse_constraint("p", "A + B = C"), {{"A", 0}, {"B", 8}, {"C", 8}}));
  EXPECT_TRUE(eval_constraint(parse_constraint("q", "all_different(A,B,C)"),
                              {{"A", 3}, {"B", 1}, {"C", 5}}));
  EXPECT_TRUE(eval_constraint(parse_constraint("q", "all_equal(A,B,C)"),
                              {{"A", 5}, {"B", 5}, {"C", 5}}));
  EXPECT_FALSE(eval_constraint(parse_constraint("q", "all_equal(A,B,C)"),
                               {{"A", 5}, {"B", 4}, {"C", 5}}));
}

TEST(Eval, CheckedPathRejectsMissingAndOutOfDomain) {
  const auto sys = digits3({{"p", "X + Y = Z"}});
  EXPECT_THROW((void)sys.evaluate(0, {{"X", 1}, {"Y", 2}}), DomainError);
  EXPECT_THROW((void)sys.evaluate(0, {{"X", 1}, {"Y", 2}, {"Z", 10}}), DomainError);
  EXPECT_TRUE(sys.evaluate(0, {{"X", 1}, {"Y", 2}, {"Z", 3}}));
  EXPECT_THROW((void)eval_constraint(parse_constraint("p", "X < Y"), {{"X", 1}}), DomainError);
}

TEST(Enumerate, SumHasFiftyFiveSolutions) {
  const auto sys = digits3({{"p", "X + Y = Z"}});
  std::size_t brute = 0;
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y)
      for (int z = 0; z < 10; ++z) brute += x + y == z;
  EXPECT_EQ(brute, 55u);
  EXPECT_EQ(enumerate_solutions(sys, 1).size(), brute);
  EXPECT_EQ(enumerate_solutions(sys, 0).size(), 1000 - brute);
}

TEST(Enumerate, AllDifferentHas720) {
  EXPECT_EQ(enumerate_solutions(digits3({{"p", "all_different(X,Y,Z)"}}), 1).size(), 10u * 9 * 8);
}

TEST(Enumerate, NoConstraintsGivesCartesianProduct) {
  EXPECT_EQ(enumerate_solutions(digits3({}), 0).size(), 1000u);
}

TEST(Enumerate, CachesAreDisjointAndComplete) {
  for (const auto& name : builtin_task_names()) {
    const auto sys = builtin_task(name)->constraint_system();
    const SolutionCache cache(sys);
    std::set<Assignment> seen;
    std::size_t total = 0;
    for (Letter l = 0; l < cache.num_letters(); ++l) {
      for (const auto& a : cache.solutions(l)) {
        EXPECT_EQ(sys.letter_of(a), l);
        seen.insert(a);
        ++total;
      }
    }
    EXPECT_EQ(total, sys.joint_size()) << name;
    EXPECT_EQ(seen.size(), total) << name;
  }
}

TEST(Sample, SingletonAndDeterminism) {
  const auto sys = digits3({{"p", "X + Y = Z"}, {"q", "X = 9"}});
  const SolutionCache cache(sys);
  // p and q: only 9 + 0 = 9.
  ASSERT_EQ(cache.solutions(0b11).size(), 1u);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(cache.sample(0b11, rng), (Assignment{9, 0, 9}));
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(cache.sample(0b01, a), cache.sample(0b01, b));
}

TEST(Sample, UnsatisfiableLetterThrows) {
  const auto sys = digits3({{"p", "X < 0"}});
  const SolutionCache cache(sys);
  Rng rng(1);
  EXPECT_FALSE(cache.usable(1));
  EXPECT_THROW((void)cache.sample(1, rng), DomainError);
}

TEST(Sample, UniformWithinFiveSigma) {
  const auto sys = digits3({{"p", "X + Y = Z"}});
  const SolutionCache cache(sys);
  std::map<Assignment, int> counts;
  Rng rng(2024);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[cache.sample(1, rng)];
  ASSERT_EQ(counts.size(), 55u);
  const double p = 1.0 / 55.0;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (const auto& [a, n] : counts) EXPECT_LE(std::abs(n - mean), 5 * sigma);
}

TEST(Probability, OneHotAndUniformCases) {
  const ConstraintSystem ex({SymbolicDomain::from_range("digits", 0, 9),
                             SymbolicDomain::from_range("s", 2, 8)},
                            {{"A", "digits", "mnist"}, {"B", "digits", "mnist"}, {"C", "s", "svhn"}},
                            {parse_constraint("p", "A + B = C")});
  EXPECT_DOUBLE_EQ(ex.constraint_probability(0, {one_hot(10, 0), one_hot(10, 8), one_hot(7, 6)}), 1.0);

  const auto sys = digits3({{"p", "Y < Z"}});
  EXPECT_NEAR(sys.constraint_probability(0, {uniform(10), uniform(10), uniform(10)}), 0.45, 1e-12);

  const auto five = SymbolicDomain::from_range("five", 0, 4);
  const ConstraintSystem eq({five}, {{"V", "five", ""}, {"W", "five", ""}, {"X", "five", ""}},
                            {parse_constraint("q", "all_equal(V,W,X)")});
  EXPECT_NEAR(eq.constraint_probability(0, {uniform(5), uniform(5), uniform(5)}), 0.04, 1e-12);
}

TEST(Probability, RejectsUnnormalized) {
  const auto sys = digits3({{"p", "Y < Z"}});
  auto bad = uniform(10);
  bad[0] += 1e-6;
  EXPECT_THROW((void)sys.constraint_probability(0, {uniform(10), bad, uniform(10)}), DomainError);
}

TEST(Probability, OneHotMatchesEvaluationOnTaskLibrary) {
  std::mt19937_64 rng(5);
  for (const auto& name : builtin_task_names()) {
    const auto sys = builtin_task(name)->constraint_system();
    const std::size_t nv = sys.variables().size();
    for (int trial = 0; trial < 200; ++trial) {
      Distributions d(nv);
      Assignment a(nv);
      for (std::size_t j = 0; j < nv; ++j) {
        const auto& dom = sys.domain_of(j);
        const std::size_t pos = rng() % dom.size();
        d[j] = one_hot(dom.size(), pos);
        a[j] = dom.values()[pos];
      }
      for (std::size_t c = 0; c < sys.constraints().size(); ++c) {
        ASSERT_EQ(sys.constraint_probability(c, d), sys.holds(c, a) ? 1.0 : 0.0);
      }
    }
  }
}

TEST(Probability, UniformMixtureIsAverageOfOneHots) {
  const auto sys = digits3({{"p", "Y < Z"}});
  double avg = 0.0;
  for (int y = 0; y < 10; ++y)
    for (int z = 0; z < 10; ++z)
      avg += sys.constraint_probability(0, {uniform(10), one_hot(10, y), one_hot(10, z)}) / 100.0;
  EXPECT_NEAR(sys.constraint_probability(0, {uniform(10), uniform(10), uniform(10)}), avg, 1e-12);
}

TEST(Probability, MatchesBruteForceOnRandomDistributions) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto sys = digits3({{"p", "X + Y = 2*Z"}});
  for (int trial = 0; trial < 20; ++trial) {
    Distributions d(3, std::vector<double>(10));
    for (auto& v : d) {
      double s = 0;
      for (auto& x : v) s += (x = u(rng));
      for (auto& x : v) x /= s;
    }
    double brute = 0.0;
    for (int x = 0; x < 10; ++x)
      for (int y = 0; y < 10; ++y)
        for (int z = 0; z < 10; ++z)
          if (x + y == 2 * z) brute += d[0][x] * d[1][y] * d[2][z];
    EXPECT_NEAR(sys.constraint_probability(0, d), brute, 1e-12);
  }
}
