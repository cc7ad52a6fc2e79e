#include "fixpt/exactreal/names.hpp"

#include <mutex>
#include <vector>

#include "fixpt/errors.hpp"
#include "fixpt/exactreal/slack.hpp"

namespace fixpt::exactreal {

namespace detail {

struct MonotoneMemo {
  std::function<Dyadic(Stage)> raw;
  bool increasing = true;
  std::optional<Dyadic> constant;
  std::mutex mutex;
  std::vector<Dyadic> prefix;  // prefix[s] = running extremum of raw(0..s)

  Dyadic at(Stage s) {
    if (s < 0) s = 0;
    if (constant) return *constant;
    std::lock_guard<std::mutex> lock(mutex);
    while (static_cast<Stage>(prefix.size()) <= s) {
      const auto t = static_cast<Stage>(prefix.size());
      Dyadic v = raw(t);
      if (!prefix.empty()) v = increasing ? max(prefix.back(), v) : min(prefix.back(), v);
      prefix.push_back(std::move(v));
    }
    return prefix[static_cast<std::size_t>(s)];
  }
};

}  // namespace detail

template <bool Increasing>
OneSidedName<Increasing> OneSidedName<Increasing>::from_stages(Raw raw) {
  auto memo = std::make_shared<detail::MonotoneMemo>();
  memo->raw = std::move(raw);
  memo->increasing = Increasing;
  return OneSidedName(std::move(memo));
}

template <bool Increasing>
OneSidedName<Increasing> OneSidedName<Increasing>::constant(const Dyadic& value) {
  auto memo = std::make_shared<detail::MonotoneMemo>();
  memo->constant = value;
  memo->increasing = Increasing;
  return OneSidedName(std::move(memo));
}

template <bool Increasing>
Dyadic OneSidedName<Increasing>::at(Stage s) const {
  return memo_->at(s);
}

template class OneSidedName<true>;
template class OneSidedName<false>;

struct SemiDecision::State {
  Probe probe;
  std::mutex mutex;
  Stage scanned = -1;  // every stage <= scanned has been probed
  std::optional<Stage> first;
};

SemiDecision::SemiDecision(Probe probe) : state_(std::make_shared<State>()) {
  state_->probe = std::move(probe);
}

std::optional<Stage> SemiDecision::first_fire(Stage budget) const {
  std::lock_guard<std::mutex> lock(state_->mutex);
  if (state_->first) {
    if (*state_->first <= budget) return state_->first;
    return std::nullopt;
  }
  while (state_->scanned < budget) {
    const Stage s = state_->scanned + 1;
    const bool hit = state_->probe(s);
    state_->scanned = s;
    if (hit) {
      state_->first = s;
      return s;
    }
  }
  return std::nullopt;
}

bool SemiDecision::fired(Stage s) const { return first_fire(s).has_value(); }

SemiDecision lt_semidecide(const Real& x, const Real& y) {
  return SemiDecision([x, y](Stage s) {
    const auto n = static_cast<Precision>(s);
    const Dyadic gap = y.query(n) - x.query(n);
    return gap > Dyadic::pow2(-(s - slack::kSemidecideSlack));
  });
}

SoftOrder soft_compare(const Real& x, const Dyadic& a, const Dyadic& b) {
  if (!(a < b)) throw DomainError("soft_compare needs a < b");
  const Real ra(a);
  const Real rb(b);
  const SemiDecision above = lt_semidecide(ra, x);
  const SemiDecision below = lt_semidecide(x, rb);
  for (Stage t = 0;; ++t) {
    if (t % 2 == 0) {
      if (above.fired(t / 2)) return SoftOrder::above_a;
    } else {
      if (below.fired(t / 2)) return SoftOrder::below_b;
    }
  }
}

Real limit_with_rate(const RatedSequence& seq) {
  return Real::from_query([seq](Precision n) {
    const Precision m = n + slack::kLimitShift;
    return seq.term(seq.rate(m)).query(m);
  });
}

Real real_from_bounds(const LowerName& lo, const UpperName& hi, Stage budget) {
  return Real::from_query([lo, hi, budget](Precision n) {
    const Dyadic tol = Dyadic::pow2(-(n - slack::kBoundsGap));
    for (Stage s = 0; s <= budget; ++s) {
      const Dyadic l = lo.at(s);
      const Dyadic h = hi.at(s);
      if (h - l <= tol) return (l + h).half();
    }
    throw BudgetExhausted("bounds did not close to 2^-" + std::to_string(n - 1) + " within " +
                          std::to_string(budget) + " stages");
  });
}

}  // namespace fixpt::exactreal
