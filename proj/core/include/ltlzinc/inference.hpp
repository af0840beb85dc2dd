#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltlzinc/circuit.hpp"
#include "ltlzinc/dataset.hpp"
#include "ltlzinc/dfa.hpp"
#include "ltlzinc/rng.hpp"
#include "ltlzinc/task.hpp"

namespace ltlzinc {

// Distribution over automaton states (probability space).
struct BeliefState {
  std::vector<double> prob;

  static BeliefState initial(std::size_t num_states);
  static BeliefState one_hot(std::size_t num_states, StateId s);

  std::size_t size() const noexcept { return prob.size(); }
  double mass() const noexcept;
  // Smallest state id among the maxima.
  StateId argmax() const;
};

// Per-atom probability of truth at one step.
using ConstraintBelief = std::vector<double>;

// Letter enumeration with independent atoms; always stochastic.
BeliefState exact_step(const Dfa& dfa, const BeliefState& b,
                       std::span<const double> cb);

// Next-state formulas of one automaton in both engine forms: simplified
// (fuzzy path) and compiled + smoothed over every variable (sd-DNNF path).
struct TaskCircuits {
  NextStateFormulas formulas;
  std::vector<PropFormula> simplified;
  std::vector<Circuit> circuits;
};

TaskCircuits build_task_circuits(const Dfa& dfa);

// Multi-hot state weights w(state_s) = b(s), w(!state_s) = 1 - b(s), atom
// weights from cb, mapped into S.
template <Semiring S>
LiteralWeights engine_weights(const NextStateFormulas& f, const BeliefState& b,
                              std::span<const double> cb);

// Raw evaluations (probability space), not normalized.
template <Semiring S>
std::vector<double> sddnnf_step(const TaskCircuits& tc, const BeliefState& b,
                                std::span<const double> cb);
template <Semiring S>
std::vector<double> fuzzy_step(const TaskCircuits& tc, const BeliefState& b,
                               std::span<const double> cb);

enum class EngineKind : std::uint8_t { Exact, FuzzyP, FuzzyLP, SddnnfP, SddnnfLP };

std::string_view engine_name(EngineKind kind) noexcept;
std::optional<EngineKind> engine_from_name(std::string_view name) noexcept;
std::vector<std::string> engine_names();

struct StepResult {
  BeliefState belief;
  // Total mass before renormalization (1 for a stochastic step).
  double mass = 1.0;
};

// Temporal inference engine bound to one automaton. The fuzzy and sd-DNNF
// engines renormalize every step and report the raw mass; zero mass throws
// DegenerateBeliefError.
class Engine {
 public:
  Engine(EngineKind kind, const Dfa& dfa);

  EngineKind kind() const noexcept { return kind_; }
  const Dfa& dfa() const noexcept { return *dfa_; }
  StepResult step(const BeliefState& b, std::span<const double> cb) const;

 private:
  EngineKind kind_;
  std::shared_ptr<const Dfa> dfa_;
  std::shared_ptr<const TaskCircuits> circuits_;
};

struct SequenceRun {
  std::vector<BeliefState> beliefs;  // after each step
  std::vector<double> masses;
  double acceptance = 0.0;
};

// Throws DomainError on an empty trace.
SequenceRun run_sequence(const Engine& engine,
                         std::span<const ConstraintBelief> cb_trace);

// Inputs at 0 / 1 are clamped to [kCalibrationEpsilon, 1 - kCalibrationEpsilon].
inline constexpr double kCalibrationEpsilon = 1e-7;

// sigma(logit(p) / temp).
double apply_temperature(double prob, double temp);
// softmax(log(b) / temp).
std::vector<double> apply_temperature(std::span<const double> belief, double temp);

struct Calibration {
  double temperature = 1.0;
  double nll = 0.0;
  // Set when every logit is zero and the objective is flat.
  bool degenerate = false;
};

// Golden-section search over log(temp) in [-5, 5] minimizing the negative
// log-likelihood of the truths under the rescaled probabilities.
Calibration calibrate_temperature(std::span<const std::pair<double, int>> values);

// Negative log-likelihood of binary truths under rescaled probabilities.
double calibration_nll(std::span<const std::pair<double, int>> values, double temp);

enum class OracleTarget : std::uint8_t { IC, ICCC };
enum class OracleKind : std::uint8_t { Perfect, Flip, Confidence };

std::string_view oracle_target_name(OracleTarget t) noexcept;
std::string_view oracle_kind_name(OracleKind k) noexcept;
std::optional<OracleTarget> oracle_target_from_name(std::string_view s) noexcept;
std::optional<OracleKind> oracle_kind_from_name(std::string_view s) noexcept;

struct OracleConfig {
  OracleTarget target = OracleTarget::ICCC;
  OracleKind kind = OracleKind::Perfect;
  double p = 0.0;
  std::uint64_t seed = kDefaultSeed;

  // Throws DomainError (p outside [0, 1], perfect with p != 0).
  void validate() const;
};

// Correct one-hot label with probability 1 - p, otherwise a one-hot label
// drawn uniformly over all k classes.
std::vector<double> flip_oracle(std::size_t true_label, std::size_t k, double p, Rng& rng);
// Mass m ~ U[1 - p, 1] on the true label, 1 - m spread over the others.
std::vector<double> confidence_oracle(std::size_t true_label, std::size_t k, double p,
                                      Rng& rng);
std::vector<double> oracle_distribution(OracleKind kind, std::size_t true_label,
                                        std::size_t k, double p, Rng& rng);

// Oracle outputs along one sequence.
struct OracleTrace {
  std::vector<ConstraintBelief> cb;
  // IC target only: per step, per variable label distribution.
  std::vector<std::vector<std::vector<double>>> labels;
};

// Randomness depends on (config.seed, split, index) and not on p, so noise
// levels share their draws.
OracleTrace simulate_oracle(const ConstraintSystem& system, const SequenceSample& sample,
                            const OracleConfig& config, Split split, std::size_t index);

struct Metrics {
  std::optional<double> ic_acc;
  std::optional<double> cc_acc;
  std::optional<double> nsp_acc;
  std::optional<double> sc_acc;
  std::optional<double> mp_successor;
  std::optional<double> mp_sequence;
  // Mean of the IC / CC / NSP / SC accuracies present.
  double average() const;
};

struct EvaluateOptions {
  Split split = Split::Test;
  unsigned jobs = 1;
  // Fit a temperature on the validation split's acceptance probabilities and
  // apply it before thresholding.
  bool calibrate = false;
};

struct Evaluation {
  Metrics metrics;
  std::optional<double> temperature;
  // Smallest pre-normalization mass seen and largest |mass - 1|.
  double min_mass = 1.0;
  double max_mass_deviation = 0.0;
  std::size_t sequences = 0;
};

// SC threshold: acceptance >= 0.5 predicts positive.
inline constexpr double kDecisionThreshold = 0.5;

Evaluation evaluate(const CompiledTask& task, const Dataset& ds, EngineKind engine,
                    const OracleConfig& oracle, const EvaluateOptions& options = {});

struct MpBaselines {
  double mp_successor = 0.0;
  double mp_sequence = 0.0;
  StateId modal_state = 0;
  int modal_label = 0;
};

// Throws DomainError when train or test is empty.
MpBaselines mp_baselines(const Dataset& ds);

// Sequence loss over acceptance predictions: (1 - XOR-fold of positives) +
// (1 - product of complemented negatives). Throws on length mismatch.
double semantic_loss(std::span<const double> preds, std::span<const int> labels);
double soft_xor(double a, double b) noexcept;

inline const std::vector<double> kDefaultNoiseLevels = {0.0, 0.05, 0.1, 0.2};

// Perfect oracle for p = 0, flip and confidence oracles for every p > 0,
// for each target.
std::vector<OracleConfig> default_oracle_grid(std::span<const double> noise_levels);

struct SweepRow {
  std::string task;
  EngineKind engine;
  OracleConfig oracle;
  Metrics metrics;
};

struct SweepOptions {
  EvaluateOptions evaluate;
};

// Rows ordered by (config, engine, seed) as given.
std::vector<SweepRow> oracle_sweep(const CompiledTask& task, const Dataset& ds,
                                   std::span<const OracleConfig> configs,
                                   std::span<const EngineKind> engines,
                                   std::span<const std::uint64_t> seeds,
                                   const SweepOptions& options = {});

// Long-format CSV: task, engine, oracle_target, oracle_kind, p, seed,
// ic_acc, cc_acc, nsp_acc, sc_acc, avg_acc (absent values empty).
std::string sweep_csv(std::span<const SweepRow> rows);
// Mean and sample standard deviation per (task, engine, target, kind, p).
std::string sweep_summary_json(std::span<const SweepRow> rows);

std::string format_metric(std::optional<double> v);

}  // namespace ltlzinc
