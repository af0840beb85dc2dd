#include "ltlzinc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <map>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "ltlzinc/error.hpp"

namespace ltlzinc {

// ---------------------------------------------------------------------------
// Beliefs and steps

BeliefState BeliefState::initial(std::size_t num_states) { return one_hot(num_states, 0); }

BeliefState BeliefState::one_hot(std::size_t num_states, StateId s) {
  if (s >= num_states) throw DomainError("state out of range");
  BeliefState b;
  b.prob.assign(num_states, 0.0);
  b.prob[s] = 1.0;
  return b;
}

double BeliefState::mass() const noexcept {
  return std::accumulate(prob.begin(), prob.end(), 0.0);
}

StateId BeliefState::argmax() const {
  if (prob.empty()) throw DomainError("empty belief");
  return static_cast<StateId>(std::max_element(prob.begin(), prob.end()) - prob.begin());
}

namespace {

void check_inputs(const Dfa& dfa, const BeliefState& b, std::span<const double> cb) {
  if (b.size() != dfa.num_states()) {
    throw DomainError("belief has " + std::to_string(b.size()) + " entries, automaton has " +
                      std::to_string(dfa.num_states()) + " states");
  }
  if (cb.size() != dfa.num_atoms()) {
    throw DomainError("constraint belief has " + std::to_string(cb.size()) +
                      " entries, automaton has " + std::to_string(dfa.num_atoms()) + " atoms");
  }
  for (double v : cb) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("constraint belief outside [0, 1]");
  }
}

}  // namespace

BeliefState exact_step(const Dfa& dfa, const BeliefState& b, std::span<const double> cb) {
  check_inputs(dfa, b, cb);
  std::vector<double> letter_weight(dfa.num_letters());
  for (Letter l = 0; l < dfa.num_letters(); ++l) {
    double w = 1.0;
    for (std::size_t i = 0; i < cb.size(); ++i) w *= ((l >> i) & 1U) ? cb[i] : 1.0 - cb[i];
    letter_weight[l] = w;
  }
  BeliefState out;
  out.prob.assign(dfa.num_states(), 0.0);
  for (StateId s = 0; s < dfa.num_states(); ++s) {
    if (b.prob[s] == 0.0) continue;
    for (Letter l = 0; l < dfa.num_letters(); ++l) {
      out.prob[dfa.next(s, l)] += b.prob[s] * letter_weight[l];
    }
  }
  return out;
}

TaskCircuits build_task_circuits(const Dfa& dfa) {
  TaskCircuits tc;
  tc.formulas = next_state_formulas(dfa);
  const auto order = tc.formulas.variable_order();
  for (const auto& f : tc.formulas.formulas) {
    tc.simplified.push_back(simplify(to_nnf(f)));
    tc.circuits.push_back(smooth(compile_sddnnf(f, order), order));
  }
  return tc;
}

template <Semiring S>
LiteralWeights engine_weights(const NextStateFormulas& f, const BeliefState& b,
                              std::span<const double> cb) {
  if (b.size() != f.num_states || cb.size() != f.num_atoms) {
    throw DomainError("belief or constraint belief size does not match the formulas");
  }
  LiteralWeights w(f.num_variables());
  for (std::size_t s = 0; s < f.num_states; ++s) {
    w.set(f.state_var(static_cast<StateId>(s)), S::from_probability(b.prob[s]),
          S::from_probability(1.0 - b.prob[s]));
  }
  for (std::size_t i = 0; i < f.num_atoms; ++i) {
    if (!(cb[i] >= 0.0 && cb[i] <= 1.0)) throw DomainError("constraint belief outside [0, 1]");
    w.set(f.atom_var(i), S::from_probability(cb[i]), S::from_probability(1.0 - cb[i]));
  }
  return w;
}

template <Semiring S>
std::vector<double> sddnnf_step(const TaskCircuits& tc, const BeliefState& b,
                                std::span<const double> cb) {
  const LiteralWeights w = engine_weights<S>(tc.formulas, b, cb);
  std::vector<double> out;
  out.reserve(tc.circuits.size());
  for (const auto& c : tc.circuits) out.push_back(S::to_probability(amc<S>(c, w)));
  return out;
}

template <Semiring S>
std::vector<double> fuzzy_step(const TaskCircuits& tc, const BeliefState& b,
                               std::span<const double> cb) {
  const LiteralWeights w = engine_weights<S>(tc.formulas, b, cb);
  std::vector<double> out;
  out.reserve(tc.simplified.size());
  for (const auto& f : tc.simplified) out.push_back(S::to_probability(fuzzy_eval<S>(f, w)));
  return out;
}

template LiteralWeights engine_weights<ProbabilitySemiring>(const NextStateFormulas&,
                                                            const BeliefState&,
                                                            std::span<const double>);
template LiteralWeights engine_weights<LogProbabilitySemiring>(const NextStateFormulas&,
                                                               const BeliefState&,
                                                               std::span<const double>);
template std::vector<double> sddnnf_step<ProbabilitySemiring>(const TaskCircuits&,
                                                              const BeliefState&,
                                                              std::span<const double>);
template std::vector<double> sddnnf_step<LogProbabilitySemiring>(const TaskCircuits&,
                                                                 const BeliefState&,
                                                                 std::span<const double>);
template std::vector<double> fuzzy_step<ProbabilitySemiring>(const TaskCircuits&,
                                                             const BeliefState&,
                                                             std::span<const double>);
template std::vector<double> fuzzy_step<LogProbabilitySemiring>(const TaskCircuits&,
                                                                const BeliefState&,
                                                                std::span<const double>);

// ---------------------------------------------------------------------------
// Engines

namespace {
constexpr std::array<std::pair<EngineKind, std::string_view>, 5> kEngines = {{
    {EngineKind::Exact, "exact"},
    {EngineKind::FuzzyP, "fuzzy-p"},
    {EngineKind::FuzzyLP, "fuzzy-lp"},
    {EngineKind::SddnnfP, "sddnnf-p"},
    {EngineKind::SddnnfLP, "sddnnf-lp"},
}};
}  // namespace

std::string_view engine_name(EngineKind kind) noexcept {
  for (const auto& [k, n] : kEngines) {
    if (k == kind) return n;
  }
  return "?";
}

std::optional<EngineKind> engine_from_name(std::string_view name) noexcept {
  for (const auto& [k, n] : kEngines) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> engine_names() {
  std::vector<std::string> out;
  for (const auto& [k, n] : kEngines) out.emplace_back(n);
  return out;
}

Engine::Engine(EngineKind kind, const Dfa& dfa)
    : kind_(kind), dfa_(std::make_shared<const Dfa>(dfa)) {
  if (kind != EngineKind::Exact) {
    circuits_ = std::make_shared<const TaskCircuits>(build_task_circuits(dfa));
  }
}

StepResult Engine::step(const BeliefState& b, std::span<const double> cb) const {
  check_inputs(*dfa_, b, cb);
  StepResult r;
  if (kind_ == EngineKind::Exact) {
    r.belief = exact_step(*dfa_, b, cb);
    r.mass = r.belief.mass();
    return r;
  }
  std::vector<double> raw;
  switch (kind_) {
    case EngineKind::FuzzyP: raw = fuzzy_step<ProbabilitySemiring>(*circuits_, b, cb); break;
    case EngineKind::FuzzyLP: raw = fuzzy_step<LogProbabilitySemiring>(*circuits_, b, cb); break;
    case EngineKind::SddnnfP: raw = sddnnf_step<ProbabilitySemiring>(*circuits_, b, cb); break;
    case EngineKind::SddnnfLP:
      raw = sddnnf_step<LogProbabilitySemiring>(*circuits_, b, cb);
      break;
    case EngineKind::Exact: break;
  }
  const double mass = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw DegenerateBeliefError("engine " + std::string(engine_name(kind_)) +
                                " produced a belief of total mass " + std::to_string(mass));
  }
  for (double& v : raw) v /= mass;
  r.belief.prob = std::move(raw);
  r.mass = mass;
  return r;
}

SequenceRun run_sequence(const Engine& engine, std::span<const ConstraintBelief> cb_trace) {
  if (cb_trace.empty()) throw DomainError("constraint-belief trace is empty");
  SequenceRun run;
  BeliefState b = BeliefState::initial(engine.dfa().num_states());
  for (const auto& cb : cb_trace) {
    StepResult r = engine.step(b, cb);
    b = r.belief;
    run.beliefs.push_back(std::move(r.belief));
    run.masses.push_back(r.mass);
  }
  for (StateId s : engine.dfa().accepting_states()) run.acceptance += b.prob[s];
  return run;
}

// ---------------------------------------------------------------------------
// Temperature

namespace {

void check_temperature(double temp) {
  if (!(temp > 0.0) || !std::isfinite(temp)) {
    throw DomainError("temperature must be positive and finite");
  }
}

double clamp_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
  return std::clamp(p, kCalibrationEpsilon, 1.0 - kCalibrationEpsilon);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

// log sigma(z), stable for large |z|.
double log_sigmoid(double z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

}  // namespace

double apply_temperature(double prob, double temp) {
  check_temperature(temp);
  const double z = logit(clamp_probability(prob)) / temp;
  return 1.0 / (1.0 + std::exp(-z));
}

std::vector<double> apply_temperature(std::span<const double> belief, double temp) {
  check_temperature(temp);
  if (belief.empty()) throw DomainError("empty belief");
  std::vector<double> z(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i) {
    z[i] = std::log(clamp_probability(belief[i])) / temp;
  }
  const double hi = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : z) v /= total;
  return z;
}

double calibration_nll(std::span<const std::pair<double, int>> values, double temp) {
  check_temperature(temp);
  double nll = 0.0;
  for (const auto& [p, y] : values) {
    const double z = logit(clamp_probability(p)) / temp;
    nll -= y == 1 ? log_sigmoid(z) : log_sigmoid(-z);
  }
  return nll;
}

Calibration calibrate_temperature(std::span<const std::pair<double, int>> values) {
  if (values.empty()) throw DomainError("calibration needs at least one sample");
  bool flat = true;
  for (const auto& [p, y] : values) {
    if (y != 0 && y != 1) throw DomainError("calibration truth must be 0 or 1");
    if (std::abs(logit(clamp_probability(p))) > 1e-12) flat = false;
  }
  Calibration out;
  if (flat) {
    out.degenerate = true;
    out.nll = calibration_nll(values, 1.0);
    return out;
  }
  auto f = [&](double x) { return calibration_nll(values, std::exp(x)); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -5.0, b = 5.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-9) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2.0;
  out.temperature = std::exp(x);
  out.nll = f(x);
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

std::string_view oracle_target_name(OracleTarget t) noexcept {
  return t == OracleTarget::IC ? "ic" : "ic+cc";
}

std::string_view oracle_kind_name(OracleKind k) noexcept {
  switch (k) {
    case OracleKind::Perfect: return "perfect";
    case OracleKind::Flip: return "flip";
    case OracleKind::Confidence: return "confidence";
  }
  return "?";
}

std::optional<OracleTarget> oracle_target_from_name(std::string_view s) noexcept {
  if (s == "ic") return OracleTarget::IC;
  if (s == "ic+cc" || s == "iccc") return OracleTarget::ICCC;
  return std::nullopt;
}

std::optional<OracleKind> oracle_kind_from_name(std::string_view s) noexcept {
  for (OracleKind k : {OracleKind::Perfect, OracleKind::Flip, OracleKind::Confidence}) {
    if (oracle_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

void OracleConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("oracle noise p must lie in [0, 1]");
  if (kind == OracleKind::Perfect && p != 0.0) {
    throw DomainError("the perfect oracle has no noise (p must be 0)");
  }
}

namespace {

void check_oracle_args(std::size_t true_label, std::size_t k, double p) {
  if (k < 2) throw DomainError("oracles need at least two classes");
  if (true_label >= k) throw DomainError("true label out of range");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("oracle noise p must lie in [0, 1]");
}

}  // namespace

std::vector<double> flip_oracle(std::size_t true_label, std::size_t k, double p, Rng& rng) {
  check_oracle_args(true_label, k, p);
  // Both draws happen regardless of p so noise levels stay coupled.
  const double u = rng.uniform01();
  const std::size_t random_label = rng.uniform_index(k);
  std::vector<double> out(k, 0.0);
  out[u < p ? random_label : true_label] = 1.0;
  return out;
}

std::vector<double> confidence_oracle(std::size_t true_label, std::size_t k, double p,
                                      Rng& rng) {
  check_oracle_args(true_label, k, p);
  const double m = 1.0 - p * rng.uniform01();
  std::vector<double> out(k, (1.0 - m) / static_cast<double>(k - 1));
  out[true_label] = m;
  return out;
}

std::vector<double> oracle_distribution(OracleKind kind, std::size_t true_label,
                                        std::size_t k, double p, Rng& rng) {
  switch (kind) {
    case OracleKind::Perfect: {
      check_oracle_args(true_label, k, 0.0);
      std::vector<double> out(k, 0.0);
      out[true_label] = 1.0;
      return out;
    }
    case OracleKind::Flip: return flip_oracle(true_label, k, p, rng);
    case OracleKind::Confidence: return confidence_oracle(true_label, k, p, rng);
  }
  return {};
}

OracleTrace simulate_oracle(const ConstraintSystem& system, const SequenceSample& sample,
                            const OracleConfig& config, Split split, std::size_t index) {
  config.validate();
  Rng rng(derive_seed(config.seed, {tag_of("oracle"), static_cast<std::uint64_t>(config.target),
                                    static_cast<std::uint64_t>(split), index}));
  const std::size_t na = system.constraints().size();
  const std::size_t nv = system.variables().size();
  OracleTrace out;
  out.cb.reserve(sample.length());
  for (std::size_t t = 0; t < sample.length(); ++t) {
    ConstraintBelief cb(na);
    if (config.target == OracleTarget::IC) {
      Distributions dists(nv);
      for (std::size_t j = 0; j < nv; ++j) {
        const auto& d = system.domain_of(j);
        dists[j] = oracle_distribution(config.kind, d.index_of_value(sample.values[t][j]),
                                       d.size(), config.p, rng);
      }
      for (std::size_t a = 0; a < na; ++a) {
        cb[a] = std::clamp(system.constraint_probability(a, dists), 0.0, 1.0);
      }
      out.labels.push_back(std::move(dists));
    } else {
      for (std::size_t a = 0; a < na; ++a) {
        const std::size_t bit = (sample.letters[t] >> a) & 1U;
        cb[a] = oracle_distribution(config.kind, bit, 2, config.p, rng)[1];
      }
    }
    out.cb.push_back(std::move(cb));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

double Metrics::average() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : {ic_acc, cc_acc, nsp_acc, sc_acc}) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

namespace {

struct SequenceTally {
  std::size_t ic_correct = 0, ic_total = 0;
  std::size_t cc_correct = 0, cc_total = 0;
  std::size_t nsp_correct = 0, nsp_total = 0;
  double acceptance = 0.0;
  double min_mass = 1.0;
  double max_dev = 0.0;
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<SequenceTally> run_split(const CompiledTask& task, const Dataset& ds,
                                     const Engine& engine, const OracleConfig& oracle,
                                     Split split, unsigned jobs) {
  const auto& samples = ds.split(split);
  const ConstraintSystem& system = task.system();
  std::vector<SequenceTally> tallies(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) {
    const SequenceSample& s = samples[i];
    const OracleTrace trace = simulate_oracle(system, s, oracle, split, i);
    const SequenceRun run = run_sequence(engine, trace.cb);
    SequenceTally& tally = tallies[i];
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (std::size_t a = 0; a < trace.cb[t].size(); ++a) {
        const bool predicted = trace.cb[t][a] >= kDecisionThreshold;
        const bool truth = (s.letters[t] >> a) & 1U;
        tally.cc_correct += predicted == truth;
        ++tally.cc_total;
      }
      if (!trace.labels.empty()) {
        for (std::size_t j = 0; j < trace.labels[t].size(); ++j) {
          const auto& dist = trace.labels[t][j];
          const auto guess =
              static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
          tally.ic_correct += guess == system.domain_of(j).index_of_value(s.values[t][j]);
          ++tally.ic_total;
        }
      }
      tally.nsp_correct += run.beliefs[t].argmax() == s.states[t];
      ++tally.nsp_total;
      tally.min_mass = std::min(tally.min_mass, run.masses[t]);
      tally.max_dev = std::max(tally.max_dev, std::abs(run.masses[t] - 1.0));
    }
    tally.acceptance = run.acceptance;
  });
  return tallies;
}

}  // namespace

Evaluation evaluate(const CompiledTask& task, const Dataset& ds, EngineKind engine_kind,
                    const OracleConfig& oracle, const EvaluateOptions& options) {
  oracle.validate();
  const std::string expected = spec_hash(task.spec());
  if (ds.metadata.spec_hash != expected) {
    throw IntegrityError("dataset spec hash " + ds.metadata.spec_hash +
                         " does not match the task (" + expected + ")");
  }
  const auto& samples = ds.split(options.split);
  if (samples.empty()) {
    throw DomainError("split '" + std::string(split_name(options.split)) + "' is empty");
  }
  const Engine engine(engine_kind, task.dfa());
  const auto tallies = run_split(task, ds, engine, oracle, options.split, options.jobs);

  Evaluation ev;
  ev.sequences = samples.size();
  if (options.calibrate && options.split != Split::Val && !ds.split(Split::Val).empty()) {
    const auto val = run_split(task, ds, engine, oracle, Split::Val, options.jobs);
    std::vector<std::pair<double, int>> pairs;
    for (std::size_t i = 0; i < val.size(); ++i) {
      pairs.emplace_back(val[i].acceptance, ds.split(Split::Val)[i].label);
    }
    ev.temperature = calibrate_temperature(pairs).temperature;
  }

  SequenceTally sum;
  std::size_t sc_correct = 0;
  for (std::size_t i = 0; i < tallies.size(); ++i) {
    const auto& t = tallies[i];
    sum.ic_correct += t.ic_correct;
    sum.ic_total += t.ic_total;
    sum.cc_correct += t.cc_correct;
    sum.cc_total += t.cc_total;
    sum.nsp_correct += t.nsp_correct;
    sum.nsp_total += t.nsp_total;
    ev.min_mass = std::min(ev.min_mass, t.min_mass);
    ev.max_mass_deviation = std::max(ev.max_mass_deviation, t.max_dev);
    double acceptance = t.acceptance;
    if (ev.temperature) acceptance = apply_temperature(std::clamp(acceptance, 0.0, 1.0), *ev.temperature);
    const int predicted = acceptance >= kDecisionThreshold ? 1 : 0;
    sc_correct += predicted == samples[i].label;
  }
  auto ratio = [](std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); };
  if (sum.ic_total) ev.metrics.ic_acc = ratio(sum.ic_correct, sum.ic_total);
  ev.metrics.cc_acc = ratio(sum.cc_correct, sum.cc_total);
  ev.metrics.nsp_acc = ratio(sum.nsp_correct, sum.nsp_total);
  ev.metrics.sc_acc = ratio(sc_correct, samples.size());
  return ev;
}

MpBaselines mp_baselines(const Dataset& ds) {
  const auto& train = ds.split(Split::Train);
  const auto& test = ds.split(Split::Test);
  if (train.empty() || test.empty()) {
    throw DomainError("MP baselines need non-empty train and test splits");
  }
  std::map<StateId, std::size_t> state_counts;
  std::size_t positives = 0;
  for (const auto& s : train) {
    for (StateId st : s.states) ++state_counts[st];
    positives += s.label == 1;
  }
  MpBaselines out;
  std::size_t best = 0;
  for (const auto& [st, n] : state_counts) {
    if (n > best) {
      best = n;
      out.modal_state = st;
    }
  }
  out.modal_label = positives > train.size() - positives ? 1 : 0;

  std::size_t hits = 0, steps = 0, labels = 0;
  for (const auto& s : test) {
    for (StateId st : s.states) {
      hits += st == out.modal_state;
      ++steps;
    }
    labels += s.label == out.modal_label;
  }
  out.mp_successor = steps ? static_cast<double>(hits) / static_cast<double>(steps) : 0.0;
  out.mp_sequence = static_cast<double>(labels) / static_cast<double>(test.size());
  return out;
}

double soft_xor(double a, double b) noexcept { return (a + b - a * b) * (1.0 - a * b); }

double semantic_loss(std::span<const double> preds, std::span<const int> labels) {
  if (preds.size() != labels.size()) {
    throw DomainError("semantic loss: " + std::to_string(preds.size()) + " predictions for " +
                      std::to_string(labels.size()) + " labels");
  }
  std::optional<double> fold;
  double product = 1.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double p = preds[i];
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("semantic loss: prediction outside [0, 1]");
    if (labels[i] == 1) {
      fold = fold ? soft_xor(*fold, p) : p;
    } else if (labels[i] == 0) {
      product *= 1.0 - p;
    } else {
      throw DomainError("semantic loss: labels must be 0 or 1");
    }
  }
  return (1.0 - fold.value_or(1.0)) + (1.0 - product);
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<OracleConfig> default_oracle_grid(std::span<const double> noise_levels) {
  std::vector<OracleConfig> out;
  for (OracleTarget target : {OracleTarget::IC, OracleTarget::ICCC}) {
    for (double p : noise_levels) {
      if (p == 0.0) {
        out.push_back({target, OracleKind::Perfect, 0.0, kDefaultSeed});
      } else {
        out.push_back({target, OracleKind::Flip, p, kDefaultSeed});
        out.push_back({target, OracleKind::Confidence, p, kDefaultSeed});
      }
    }
  }
  return out;
}

std::vector<SweepRow> oracle_sweep(const CompiledTask& task, const Dataset& ds,
                                   std::span<const OracleConfig> configs,
                                   std::span<const EngineKind> engines,
                                   std::span<const std::uint64_t> seeds,
                                   const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (const auto& base : configs) {
    base.validate();
    for (EngineKind engine : engines) {
      for (std::uint64_t seed : seeds) {
        OracleConfig cfg = base;
        cfg.seed = seed;
        SweepRow row{task.spec().name, engine, cfg, {}};
        row.metrics = evaluate(task, ds, engine, cfg, options.evaluate).metrics;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string format_metric(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

namespace {

// Values as they appear in the CSV, so a summary rebuilt from the CSV matches exactly.
double published(double v) { return std::strtod(format_metric(v).c_str(), nullptr); }

double published_average(const Metrics& m) {
  double sum = 0.0;
  int n = 0;
  for (const auto& v : {m.ic_acc, m.cc_acc, m.nsp_acc, m.sc_acc}) {
    if (v) {
      sum += published(*v);
      ++n;
    }
  }
  return n == 0 ? 0.0 : published(sum / n);
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out =
      "task,engine,oracle_target,oracle_kind,p,seed,ic_acc,cc_acc,nsp_acc,sc_acc,avg_acc\r\n";
  for (const auto& r : rows) {
    out += r.task + "," + std::string(engine_name(r.engine)) + "," +
           std::string(oracle_target_name(r.oracle.target)) + "," +
           std::string(oracle_kind_name(r.oracle.kind)) + "," + format_p(r.oracle.p) + "," +
           std::to_string(r.oracle.seed) + "," + format_metric(r.metrics.ic_acc) + "," +
           format_metric(r.metrics.cc_acc) + "," + format_metric(r.metrics.nsp_acc) + "," +
           format_metric(r.metrics.sc_acc) + "," + format_metric(published_average(r.metrics)) +
           "\r\n";
  }
  return out;
}

std::string sweep_summary_json(std::span<const SweepRow> rows) {
  struct Group {
    const SweepRow* first;
    std::vector<const Metrics*> members;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    const std::string key = r.task + "|" + std::string(engine_name(r.engine)) + "|" +
                            std::string(oracle_target_name(r.oracle.target)) + "|" +
                            std::string(oracle_kind_name(r.oracle.kind)) + "|" + format_p(r.oracle.p);
    auto [it, fresh] = index.emplace(key, groups.size());
    if (fresh) groups.push_back({&r, {}});
    groups[it->second].members.push_back(&r.metrics);
  }
  auto stats = [](const std::vector<double>& xs) {
    nlohmann::ordered_json j;
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["std"] = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return j;
  };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& g : groups) {
    nlohmann::ordered_json j;
    j["task"] = g.first->task;
    j["engine"] = engine_name(g.first->engine);
    j["oracle_target"] = oracle_target_name(g.first->oracle.target);
    j["oracle_kind"] = oracle_kind_name(g.first->oracle.kind);
    j["p"] = g.first->oracle.p;
    j["seeds"] = g.members.size();
    const std::array<std::pair<const char*, std::optional<double> Metrics::*>, 4> fields = {{
        {"ic_acc", &Metrics::ic_acc},
        {"cc_acc", &Metrics::cc_acc},
        {"nsp_acc", &Metrics::nsp_acc},
        {"sc_acc", &Metrics::sc_acc},
    }};
    for (const auto& [name, field] : fields) {
      std::vector<double> xs;
      for (const Metrics* m : g.members) {
        if (m->*field) xs.push_back(published(*(m->*field)));
      }
      if (!xs.empty()) j[name] = stats(xs);
    }
    std::vector<double> avg;
    for (const Metrics* m : g.members) avg.push_back(published_average(*m));
    j["avg_acc"] = stats(avg);
    out.push_back(std::move(j));
  }
  nlohmann::ordered_json root;
  root["average_definition"] =
      "arithmetic mean of the available ic/cc/nsp/sc accuracies, from the 6-decimal CSV values";
  root["groups"] = std::move(out);
  return root.dump(2) + "\n";
}

}  // namespace ltlzinc
