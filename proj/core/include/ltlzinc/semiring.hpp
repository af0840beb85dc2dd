#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <string_view>

namespace ltlzinc {

// Commutative semiring over doubles with a map from probabilities into the
// carrier (used to inject literal weights).
template <typename S>
concept Semiring = requires(double a, double b) {
  { S::name } -> std::convertible_to<std::string_view>;
  { S::zero() } -> std::same_as<double>;
  { S::one() } -> std::same_as<double>;
  { S::plus(a, b) } -> std::same_as<double>;
  { S::times(a, b) } -> std::same_as<double>;
  { S::from_probability(a) } -> std::same_as<double>;
  { S::to_probability(a) } -> std::same_as<double>;
};

struct ProbabilitySemiring {
  static constexpr std::string_view name = "probability";
  static double zero() noexcept { return 0.0; }
  static double one() noexcept { return 1.0; }
  static double plus(double a, double b) noexcept { return a + b; }
  static double times(double a, double b) noexcept { return a * b; }
  static double from_probability(double p) noexcept { return p; }
  static double to_probability(double v) noexcept { return v; }
};

// Natural-log probabilities: plus is log-sum-exp, times is addition.
struct LogProbabilitySemiring {
  static constexpr std::string_view name = "log-probability";
  static double zero() noexcept { return -std::numeric_limits<double>::infinity(); }
  static double one() noexcept { return 0.0; }
  static double plus(double a, double b) noexcept {
    if (a == zero()) return b;
    if (b == zero()) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
  }
  static double times(double a, double b) noexcept { return a + b; }
  static double from_probability(double p) noexcept { return std::log(p); }
  static double to_probability(double v) noexcept { return std::exp(v); }
};

static_assert(Semiring<ProbabilitySemiring>);
static_assert(Semiring<LogProbabilitySemiring>);

}  // namespace ltlzinc
