#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "fixpt/exactreal/real.hpp"

namespace fixpt::exactreal {

using Stage = std::int64_t;

inline constexpr Stage kDefaultStageBudget = 1'000'000;

namespace detail {

// Shared memo for a stage-indexed sequence folded by running max or min.
struct MonotoneMemo;

}  // namespace detail

/// One-sided name: stage s -> dyadic, monotone in s, converging to the value
/// from below (Increasing) or above.
///
/// The raw stage function is called exactly once per stage, in increasing
/// order, so it may keep incremental state of its own.
template <bool Increasing>
class OneSidedName {
 public:
  using Raw = std::function<Dyadic(Stage)>;

  OneSidedName() : OneSidedName(constant(Dyadic())) {}
  /// Monotone envelope (running max or min) of an arbitrary stage sequence.
  static OneSidedName from_stages(Raw raw);
  static OneSidedName constant(const Dyadic& value);

  Dyadic at(Stage s) const;

 private:
  explicit OneSidedName(std::shared_ptr<detail::MonotoneMemo> memo) : memo_(std::move(memo)) {}
  std::shared_ptr<detail::MonotoneMemo> memo_;
};

using LowerName = OneSidedName<true>;
using UpperName = OneSidedName<false>;

extern template class OneSidedName<true>;
extern template class OneSidedName<false>;

/// Sierpinski-valued name. fired(s) is cumulative over the raw probe.
class SemiDecision {
 public:
  using Probe = std::function<bool(Stage)>;

  explicit SemiDecision(Probe probe);

  bool fired(Stage s) const;
  /// First stage <= budget at which the probe fires.
  std::optional<Stage> first_fire(Stage budget) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// Fires iff x < y. Stage s compares precision-s queries with slack 2^-(s-1).
SemiDecision lt_semidecide(const Real& x, const Real& y);

enum class SoftOrder { above_a, below_b };

/// Dovetails x > a (even steps) against x < b (odd steps). Requires a < b.
SoftOrder soft_compare(const Real& x, const Dyadic& a, const Dyadic& b);

struct RatedSequence {
  std::function<Real(std::int64_t)> term;
  /// Every term at index >= rate(n) lies within 2^-n of the limit.
  std::function<std::int64_t(Precision)> rate;
};

Real limit_with_rate(const RatedSequence& seq);

/// Cauchy name from converging lower and upper names. A query at n scans
/// stages until hi - lo <= 2^-(n-1); past the budget it throws BudgetExhausted.
Real real_from_bounds(const LowerName& lo, const UpperName& hi,
                      Stage budget = kDefaultStageBudget);

}  // namespace fixpt::exactreal
