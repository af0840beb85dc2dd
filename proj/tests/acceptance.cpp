// One PASS/FAIL line per acceptance criterion. With "--criterion N" only
// criterion N runs; the exit status is non-zero if any selected check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ltlzinc/circuit.hpp"
#include "ltlzinc/dataset.hpp"
#include "ltlzinc/inference.hpp"
#include "support/oracles.hpp"

using namespace ltlzinc;
using P = ProbabilitySemiring;
using LP = LogProbabilitySemiring;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& o, bool cond, const std::string& why) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = why;
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

const std::vector<std::string> kTasks = {"task1", "task2", "task3", "task4", "task5", "task6"};

std::vector<double> letter_cb(Letter l, std::size_t n) {
  std::vector<double> cb(n);
  for (std::size_t i = 0; i < n; ++i) cb[i] = (l >> i) & 1U;
  return cb;
}

// Forward step by letter enumeration, written independently of the library.
std::vector<double> reference_step(const Dfa& d, const std::vector<double>& b,
                                   const std::vector<double>& cb) {
  std::vector<double> out(d.num_states(), 0.0);
  for (StateId s = 0; s < d.num_states(); ++s) {
    for (Letter l = 0; l < d.num_letters(); ++l) {
      double w = b[s];
      for (std::size_t i = 0; i < cb.size(); ++i) w *= ((l >> i) & 1U) ? cb[i] : 1.0 - cb[i];
      out[d.next(s, l)] += w;
    }
  }
  return out;
}

// Pairwise distinguishability by fixpoint over state pairs.
bool is_minimal(const Dfa& d) {
  const std::size_t n = d.num_states();
  std::vector<std::vector<bool>> diff(n, std::vector<bool>(n, false));
  for (StateId a = 0; a < n; ++a)
    for (StateId b = 0; b < n; ++b) diff[a][b] = d.is_accepting(a) != d.is_accepting(b);
  for (bool changed = true; changed;) {
    changed = false;
    for (StateId a = 0; a < n; ++a)
      for (StateId b = 0; b < n; ++b) {
        if (diff[a][b]) continue;
        for (Letter l = 0; l < d.num_letters(); ++l) {
          if (diff[d.next(a, l)][d.next(b, l)]) {
            diff[a][b] = true;
            changed = true;
            break;
          }
        }
      }
  }
  for (StateId a = 0; a < n; ++a)
    for (StateId b = a + 1; b < n; ++b)
      if (!diff[a][b]) return false;
  // Every state reachable from the initial one.
  std::vector<bool> seen(n, false);
  std::vector<StateId> stack = {d.initial()};
  seen[d.initial()] = true;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (Letter l = 0; l < d.num_letters(); ++l)
      if (!seen[d.next(s, l)]) seen[d.next(s, l)] = true, stack.push_back(d.next(s, l));
  }
  for (bool b : seen)
    if (!b) return false;
  return true;
}

Outcome criterion1() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::size_t> want = {8, 5, 5, 5, 4, 4};
  std::ostringstream got;
  for (std::size_t i = 0; i < kTasks.size(); ++i) {
    const Dfa d = compile_task(*builtin_task(kTasks[i])).dfa();
    got << (i ? "," : "") << d.num_states();
    require(o, d.num_states() == want[i], kTasks[i] + " has " + std::to_string(d.num_states()) + " states");
    require(o, is_minimal(d), kTasks[i] + " is not minimal");
  }
  const double ms = elapsed_ms(start);
  require(o, ms < 5000, "took longer than 5 s");
  if (o.pass) o.detail = "states " + got.str();
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto task = compile_task(*builtin_task("example"));
  const Dfa& d = task.dfa();
  // Letter bit 0 is p, bit 1 is q.
  const std::vector<Letter> plus = {0b01, 0b10, 0b11, 0b10};
  const std::vector<Letter> minus = {0b01, 0b10, 0b10, 0b10};
  const Formula phi = parse_ltlf(task.spec().formula);
  const bool plus_ok = accepts(d, plus);
  const bool minus_ok = accepts(d, minus);
  const bool plus_sem = oracle::satisfies(phi, oracle::to_trace(plus, d.atoms()));
  const bool minus_sem = oracle::satisfies(phi, oracle::to_trace(minus, d.atoms()));
  require(o, plus_ok, std::string("S+ rejected (trace semantics oracle: ") +
                          (plus_sem ? "accepts" : "also rejects") + ")");
  require(o, !minus_ok, "S- accepted");
  require(o, plus_ok == plus_sem && minus_ok == minus_sem, "automaton disagrees with trace semantics");
  if (o.pass) o.detail = "S+ accepted, S- rejected";
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::ostringstream times;
  for (const auto& name : kTasks) {
    const auto start = std::chrono::steady_clock::now();
    const auto task = compile_task(*builtin_task(name));
    const auto ds = generate_dataset(task);
    const double ms = elapsed_ms(start);
    times << name << "=" << static_cast<long>(ms) << "ms ";
    require(o, ms < 30000, name + " generation over 30 s");
    const Formula phi = parse_ltlf(task.spec().formula);
    const std::array<std::size_t, 3> sizes = {320, 40, 40};
    for (Split split : kAllSplits) {
      const auto& samples = ds.split(split);
      require(o, samples.size() == sizes[static_cast<std::size_t>(split)], name + " split size");
      for (const auto& s : samples) {
        require(o, s.length() >= 10 && s.length() <= 20, name + " length out of range");
        StateId q = task.dfa().initial();
        bool replay = true;
        for (std::size_t t = 0; t < s.length(); ++t) {
          q = task.dfa().next(q, s.letters[t]);
          replay = replay && q == s.states[t];
        }
        require(o, replay, name + " replay mismatch");
        require(o, task.dfa().is_accepting(q) == (s.label == 1), name + " label/acceptance mismatch");
        require(o, oracle::satisfies(phi, oracle::to_trace(s.letters, task.dfa().atoms())) == (s.label == 1),
                name + " label disagrees with trace semantics");
      }
    }
  }
  if (o.pass) o.detail = times.str();
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_p = 0, worst_lp = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const PropVar n = 1 + static_cast<PropVar>(rng() % 12);
    const PropFormula f = oracle::random_prop(rng, 5, n);
    std::vector<PropVar> vars(n);
    for (PropVar i = 0; i < n; ++i) vars[i] = i;
    const Circuit c = smooth(compile_sddnnf(f), vars);
    std::vector<double> p(n);
    for (auto& x : p) x = u(rng);
    const double want = oracle::wmc(f, p);
    const double got = amc<P>(c, LiteralWeights::from_probabilities<P>(p));
    worst_p = std::max(worst_p, std::abs(got - want));
    if (want > 0) {
      const double lp = std::exp(amc<LP>(c, LiteralWeights::from_probabilities<LP>(p)));
      worst_lp = std::max(worst_lp, std::abs(lp - want) / want);
    }
  }
  require(o, worst_p <= 1e-9, "probability semiring error " + std::to_string(worst_p));
  require(o, worst_lp <= 1e-6, "log-probability relative error " + std::to_string(worst_lp));
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |P err| %.2e, max LP rel err %.2e", worst_p, worst_lp);
    o.detail = buf;
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (const auto& name : kTasks) {
    const Dfa d = compile_task(*builtin_task(name)).dfa();
    const auto tc = build_task_circuits(d);
    for (int i = 0; i < 1000; ++i) {
      const auto b = BeliefState::one_hot(d.num_states(), static_cast<StateId>(rng() % d.num_states()));
      std::vector<double> cb(d.num_atoms());
      for (auto& x : cb) x = u(rng);
      const auto want = reference_step(d, b.prob, cb);
      const auto lib = exact_step(d, b, cb).prob;
      const auto p = sddnnf_step<P>(tc, b, cb);
      const auto lp = sddnnf_step<LP>(tc, b, cb);
      for (std::size_t s = 0; s < want.size(); ++s) {
        worst = std::max({worst, std::abs(lib[s] - want[s]), std::abs(p[s] - want[s]),
                          std::abs(lp[s] - want[s])});
      }
    }
  }
  require(o, worst <= 1e-9, "max deviation " + std::to_string(worst));
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "max deviation %.2e over 6000 pairs", worst);
    o.detail = buf;
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& name : kTasks) {
    const Dfa d = compile_task(*builtin_task(name)).dfa();
    const Engine fp(EngineKind::FuzzyP, d), flp(EngineKind::FuzzyLP, d), ex(EngineKind::Exact, d);
    for (StateId s = 0; s < d.num_states(); ++s) {
      for (Letter l = 0; l < d.num_letters(); ++l) {
        const auto b = BeliefState::one_hot(d.num_states(), s);
        const auto cb = letter_cb(l, d.num_atoms());
        const auto want = reference_step(d, b.prob, cb);
        require(o, ex.step(b, cb).belief.prob == want, name + " exact engine differs");
        require(o, fp.step(b, cb).belief.prob == want, name + " fuzzy-p differs");
        require(o, flp.step(b, cb).belief.prob == want, name + " fuzzy-lp differs");
        ++checked;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " transitions, exact equality";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& name : kTasks) {
    const auto task = compile_task(*builtin_task(name));
    const auto ds = generate_dataset(task);
    for (EngineKind k : {EngineKind::FuzzyP, EngineKind::FuzzyLP, EngineKind::SddnnfP, EngineKind::SddnnfLP}) {
      for (OracleTarget t : {OracleTarget::IC, OracleTarget::ICCC}) {
        const auto m = evaluate(task, ds, k, {t, OracleKind::Perfect, 0.0, kDefaultSeed}).metrics;
        require(o, m.nsp_acc == 1.0 && m.sc_acc == 1.0,
                name + " " + std::string(engine_name(k)) + " not perfect");
      }
    }
  }
  const double ms = elapsed_ms(start);
  require(o, ms < 60000, "took longer than 60 s");
  if (o.pass) o.detail = "NSP = SC = 1.0 on 6 tasks x 4 engines x 2 targets";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  // The three listed seeds, then derived ones (same list as the CLI's --seeds).
  const std::vector<std::uint64_t> seeds = {12345, 67890, 88888, derive_seed(12345, {3}),
                                            derive_seed(12345, {4})};
  const std::vector<double> noise = {0.0, 0.05, 0.1, 0.2};
  const std::vector<EngineKind> engines = {EngineKind::FuzzyP, EngineKind::SddnnfP};
  double worst_gap = 0.0;
  std::string worst_config = "none";
  double min_conf_cc = 1.0;
  std::ostringstream curves;
  for (const std::string name : {"task3", "task4", "task5", "task6"}) {
    const auto task = compile_task(*builtin_task(name));
    const auto ds = generate_dataset(task);
    auto mean_metrics = [&](EngineKind e, OracleConfig cfg) {
      Metrics mean;
      double sc = 0, cc = 0, avg = 0;
      for (auto s : seeds) {
        cfg.seed = s;
        const auto m = evaluate(task, ds, e, cfg).metrics;
        sc += *m.sc_acc;
        cc += *m.cc_acc;
        avg += m.average();
      }
      const double n = static_cast<double>(seeds.size());
      mean.sc_acc = sc / n;
      mean.cc_acc = cc / n;
      mean.ic_acc = avg / n;  // carries the mean average accuracy
      return mean;
    };
    for (OracleTarget target : {OracleTarget::IC, OracleTarget::ICCC}) {
      for (EngineKind e : engines) {
        // (a) flip oracle, mean SC accuracy non-increasing in p.
        double prev = 2.0;
        curves << name << "/" << oracle_target_name(target) << "/" << engine_name(e) << " sc:";
        for (double p : noise) {
          const OracleConfig cfg{target, p == 0.0 ? OracleKind::Perfect : OracleKind::Flip, p, 0};
          const double sc = *mean_metrics(e, cfg).sc_acc;
          char buf[16];
          std::snprintf(buf, sizeof buf, " %.3f", sc);
          curves << buf;
          require(o, sc <= prev + 1e-12,
                  name + " " + std::string(oracle_target_name(target)) + " " +
                      std::string(engine_name(e)) + " SC rises at p=" + std::to_string(p));
          prev = sc;
        }
        curves << "; ";
      }
      // (c) fuzzy vs sd-DNNF mean accuracy gap under every noisy oracle.
      for (double p : noise) {
        if (p == 0.0) continue;
        for (OracleKind kind : {OracleKind::Flip, OracleKind::Confidence}) {
          const OracleConfig cfg{target, kind, p, 0};
          const double gap = std::abs(*mean_metrics(EngineKind::FuzzyP, cfg).ic_acc -
                                      *mean_metrics(EngineKind::SddnnfP, cfg).ic_acc);
          if (gap > worst_gap) {
            worst_gap = gap;
            worst_config = name + "/" + std::string(oracle_target_name(target)) + "/" +
                           std::string(oracle_kind_name(kind)) + "/p=" + std::to_string(p).substr(0, 4);
          }
        }
      }
    }
    // (b) confidence oracle on the constraint stage: CC accuracy 1.0.
    for (double p : {0.05, 0.1, 0.2}) {
      const double cc = *mean_metrics(EngineKind::SddnnfP,
                                      {OracleTarget::ICCC, OracleKind::Confidence, p, 0}).cc_acc;
      min_conf_cc = std::min(min_conf_cc, cc);
    }
  }
  require(o, min_conf_cc == 1.0, "confidence-oracle CC accuracy " + std::to_string(min_conf_cc));
  require(o, worst_gap <= 0.05,
          "fuzzy vs sd-DNNF gap " + std::to_string(worst_gap) + " at " + worst_config);
  const double ms = elapsed_ms(start);
  require(o, ms < 600000, "took longer than 10 min");
  char buf[96];
  std::snprintf(buf, sizeof buf, "(b) min CC %.3f, (c) max gap %.4f at ", min_conf_cc, worst_gap);
  o.detail = (o.pass ? std::string(buf) + worst_config + "; " : o.detail + "; ") + curves.str();
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> b(2 + rng() % 9);
    double s = 0;
    for (auto& x : b) s += (x = u(rng));
    for (auto& x : b) x /= s;
    const auto top = std::max_element(b.begin(), b.end()) - b.begin();
    for (double temp : {0.1, 0.5, 2.0, 10.0}) {
      const auto c = apply_temperature(b, temp);
      require(o, std::max_element(c.begin(), c.end()) - c.begin() == top, "argmax changed");
    }
  }
  const double v = apply_temperature(0.9, 2.0);
  require(o, std::abs(v - 0.75) <= 1e-12, "sigma(ln 3) gave " + std::to_string(v));
  if (o.pass) o.detail = "argmax kept on 40000 cases; 0.9 @ T=2 -> 0.75";
  return o;
}

Outcome criterion10() {
  Outcome o;
  const std::vector<double> one = {1.0};
  const std::vector<int> pos = {1};
  const std::vector<double> two = {1.0, 1.0};
  const std::vector<int> pos2 = {1, 1};
  const double a = semantic_loss(one, pos);
  const double b = semantic_loss(two, pos2);
  const double c = soft_xor(0.5, 0.5);
  require(o, std::abs(a) <= 1e-12, "single confident positive loss " + std::to_string(a));
  require(o, std::abs(soft_xor(1.0, 1.0)) <= 1e-12 && std::abs(b - 1.0) <= 1e-12,
          "double positive loss " + std::to_string(b));
  require(o, std::abs(c - 0.5625) <= 1e-12, "soft xor " + std::to_string(c));
  if (o.pass) o.detail = "0, 1, 0.5625";
  return o;
}

Outcome criterion11() {
  Outcome o;
  auto seq = [](std::vector<StateId> states, int label) {
    SequenceSample s;
    s.states = std::move(states);
    s.letters.assign(s.states.size(), 0);
    s.values.assign(s.states.size(), {});
    s.label = label;
    return s;
  };
  Dataset fx;
  fx.split(Split::Train) = {seq({0, 0, 0, 0, 1}, 1), seq({0, 0, 0, 1, 1}, 0), seq({0}, 1)};
  fx.split(Split::Test) = {seq({0, 0, 1, 0, 0}, 1), seq({0, 1, 0, 1, 0}, 0)};
  const auto mp = mp_baselines(fx);
  require(o, mp.mp_successor == 0.7, "fixture mp_successor " + std::to_string(mp.mp_successor));
  require(o, mp.mp_sequence == 0.5, "fixture mp_sequence " + std::to_string(mp.mp_sequence));
  fx.split(Split::Test) = {seq({1, 1}, 1), seq({0}, 1)};
  const auto all_pos = mp_baselines(fx);
  require(o, all_pos.mp_sequence == 1.0, "all-positive mp_sequence");
  require(o, std::abs(all_pos.mp_successor - 1.0 / 3.0) < 1e-15, "all-positive mp_successor");

  const std::vector<std::pair<double, double>> published = {
      {0.72, 0.90}, {0.34, 0.50}, {0.45, 0.50}, {0.45, 0.50}, {0.41, 0.50}, {0.45, 0.50}};
  std::ostringstream ref;
  ref << "regenerated (published):";
  for (std::size_t i = 0; i < kTasks.size(); ++i) {
    const auto m = mp_baselines(generate_dataset(compile_task(*builtin_task(kTasks[i]))));
    char buf[96];
    std::snprintf(buf, sizeof buf, " %s %.2f/%.2f (%.2f/%.2f)", kTasks[i].c_str(), m.mp_successor,
                  m.mp_sequence, published[i].first, published[i].second);
    ref << buf;
  }
  o.detail = o.pass ? "fixtures exact; " + ref.str() : o.detail;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"DFA state counts 8,5,5,5,4,4", criterion1},
      {"worked example S+ accepted, S- rejected", criterion2},
      {"generator soundness on 320/40/40 datasets", criterion3},
      {"AMC equals brute-force WMC", criterion4},
      {"sd-DNNF step equals exact step", criterion5},
      {"fuzzy engine exact on Boolean inputs", criterion6},
      {"perfect-oracle pipeline", criterion7},
      {"oracle noise trends", criterion8},
      {"calibration preserves argmax", criterion9},
      {"semantic loss unit values", criterion10},
      {"most-probable baselines", criterion11},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::stoi(argv[++i]);
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %2zu: %s (%.0f ms) %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, elapsed_ms(start), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
