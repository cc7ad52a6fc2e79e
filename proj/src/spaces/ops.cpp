#include "fixpt/spaces/ops.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <queue>

#include "fixpt/errors.hpp"
#include "grid.hpp"

namespace fixpt::spaces {

using exactreal::LowerName;
using exactreal::UpperName;

namespace {

void check_eps(const Dyadic& q, const Dyadic& tol) {
  if ((q + tol).sign() <= 0 || Dyadic(2) < q - tol) {
    throw DomainError("eta is defined for 0 < eps <= 2 (got approximately " + q.decimal() + ")");
  }
}

}  // namespace

Real eta_hilbert(const Real& eps) {
  if (eps.exact()) check_eps(*eps.exact(), Dyadic());
  const Real inner = Real(1) - exactreal::scale(eps * eps, Dyadic::pow2(-2));
  const Real eta = Real(1) - exactreal::sqrt(inner);
  if (eps.exact()) return eta;
  return Real::from_query([eps, eta](Precision n) {
    check_eps(eps.query(n + 4), Dyadic::pow2(-(n + 4)));
    return eta.query(n);
  });
}

Precision eta_hilbert_mu(Precision n) { return 2 * n + 3; }

Real halfspace_margin(const HalfSpace& h, const VecName& x) {
  if (x.dim() != h.dim()) throw DimensionMismatch("half-space and point differ in dimension");
  if (h.degenerate()) return Real(h.offset);
  if (x.exact()) return Real(h.value(*x.exact()));
  const auto k = static_cast<Precision>(norm_ub(h.normal, 0).ceil_log2_abs());
  return Real::from_query([h, x, k](Precision n) {
    // |<x - q, normal>| <= ||normal|| 2^-(n+k+1) <= 2^-(n+1)
    return h.value(x.query(n + k + 1)).round_to(n + 2);
  });
}

std::vector<DyVec> net_for_box(const Box& K, Precision n) {
  const Dyadic step = Dyadic::pow2(-(n + ceil_log2(K.dim())));
  std::vector<std::vector<Dyadic>> axes;
  for (std::size_t i = 0; i < K.dim(); ++i) axes.push_back(detail::axis_points(K.lo()[i], K.hi()[i], step));
  std::vector<DyVec> net;
  detail::for_each_product(axes, [&](const DyVec& p) { net.push_back(p); });
  return net;
}

namespace {

struct Cell {
  DyVec lo;
  std::int64_t level = 0;
  Dyadic value_lo;
  Dyadic value_hi;
};

struct CellOrder {
  // Largest upper bound first; among ties the deeper cell, so flat regions
  // are refined depth-first.
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.value_hi != b.value_hi) return a.value_hi < b.value_hi;
    return a.level < b.level;
  }
};

// Incremental branch-and-bound shared by the lower and upper names.
class MaxSearch {
 public:
  MaxSearch(LipschitzFn f, const Dyadic& L, const Box& K) : f_(std::move(f)), L_(L), K_(K) {
    if (L.sign() < 0) throw DomainError("negative Lipschitz constant");
    widths_ = K.widths();
    diag_ = exactreal::sqrt_ceil(K.diameter_sq(), 30);
    const Dyadic spread = L_ * diag_ + Dyadic(1);
    // Evaluation error is kept far below the Lipschitz slack, so splitting
    // rather than re-evaluating is what closes the gap.
    extra_ = static_cast<Precision>(std::max<std::int64_t>(spread.ceil_log2_abs(), 0)) + 32;
    push(K.lo(), 0);
    history_.push_back({*best_, queue_.top().value_hi});
  }

  std::pair<Dyadic, Dyadic> at(Stage s) {
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<Stage>(history_.size()) <= s) step();
    return history_[static_cast<std::size_t>(s)];
  }

 private:
  void push(DyVec lo, std::int64_t level) {
    DyVec centre(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) centre[i] = lo[i] + widths_[i].shifted(-level - 1);
    const auto p = static_cast<Precision>(level) + extra_;
    const Dyadic v = f_(centre, p);
    const Dyadic err = Dyadic::pow2(-p);
    const Dyadic radius = diag_.shifted(-level - 1);
    Cell c{std::move(lo), level, v - err, v + err + L_ * radius};
    if (!best_ || *best_ < c.value_lo) best_ = c.value_lo;
    queue_.push(std::move(c));
  }

  void step() {
    Cell top = queue_.top();
    queue_.pop();
    const std::int64_t next = top.level + 1;
    std::vector<std::size_t> split;
    for (std::size_t i = 0; i < widths_.size(); ++i) {
      if (!widths_[i].is_zero()) split.push_back(i);
    }
    const std::size_t children = std::size_t{1} << split.size();
    for (std::size_t mask = 0; mask < children; ++mask) {
      DyVec lo = top.lo;
      for (std::size_t b = 0; b < split.size(); ++b) {
        if (mask & (std::size_t{1} << b)) lo[split[b]] += widths_[split[b]].shifted(-next);
      }
      push(std::move(lo), next);
    }
    history_.push_back({*best_, queue_.top().value_hi});
  }

  LipschitzFn f_;
  Dyadic L_;
  Box K_;
  DyVec widths_;
  Dyadic diag_;
  Precision extra_ = 0;
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue_;
  std::optional<Dyadic> best_;
  std::mutex mutex_;
  std::vector<std::pair<Dyadic, Dyadic>> history_;
};

}  // namespace

MaxBounds compact_max_bounds(LipschitzFn f, const Dyadic& L, const Box& K) {
  auto search = std::make_shared<MaxSearch>(std::move(f), L, K);
  return MaxBounds{LowerName::from_stages([search](Stage s) { return search->at(s).first; }),
                   UpperName::from_stages([search](Stage s) { return search->at(s).second; })};
}

Real compact_max(LipschitzFn f, const Dyadic& L, const Box& K, Stage budget) {
  MaxBounds b = compact_max_bounds(std::move(f), L, K);
  return exactreal::real_from_bounds(b.lower, b.upper, budget);
}

namespace {

struct CachedBall {
  Ball ball;
  Dyadic radius_sq;
  std::vector<double> centre;
  double radius_sq_d = 0;
};

struct Cube {
  DyVec lo;
  DyVec hi;
};

// An open ball covers a closed cell iff every corner is strictly inside.
bool covers(const CachedBall& b, const Cube& cell, const std::vector<double>& lo_d,
            const std::vector<double>& hi_d) {
  double far = 0;
  for (std::size_t i = 0; i < lo_d.size(); ++i) {
    const double a = std::fabs(b.centre[i] - lo_d[i]);
    const double c = std::fabs(b.centre[i] - hi_d[i]);
    const double m = std::max(a, c);
    far += m * m;
  }
  if (far > b.radius_sq_d * (1 + 1e-9) + 1e-300) return false;
  Dyadic exact_far;
  for (std::size_t i = 0; i < cell.lo.size(); ++i) {
    const Dyadic a = (b.ball.center[i] - cell.lo[i]).abs();
    const Dyadic c = (b.ball.center[i] - cell.hi[i]).abs();
    const Dyadic m = max(a, c);
    exact_far += m * m;
  }
  return exact_far < b.radius_sq;
}

DyVec choose_point(const ClosedName& A, const Box& K, Stage budget, Precision n) {
  const std::size_t d = K.dim();
  if (A.ambient.dim() != d) throw DimensionMismatch("closed set and box differ in dimension");
  const DyVec w = K.widths();
  Dyadic wmax;
  for (const auto& x : w) wmax = max(wmax, x);
  const Dyadic target_sq = Dyadic::pow2(-2 * static_cast<std::int64_t>(n));
  // Cells at the deepest level have half-diagonal >= wmax 2^-(lmax+1).
  const std::int64_t wexp = wmax.is_zero() ? 0 : wmax.ceil_log2_abs();
  const std::int64_t lmax = std::max<std::int64_t>(n + 6 + wexp, 0);
  const Dyadic floor = wmax.shifted(-lmax - 1);
  constexpr std::size_t kMaxSurvivors = std::size_t{1} << 16;

  std::vector<Cube> cells{{K.lo(), K.hi()}};
  std::int64_t level = 0;
  std::vector<CachedBall> balls;
  Stage fetched = -1;
  Stage horizon = 1;
  while (true) {
    const Stage upto = std::min(horizon, budget);
    for (Stage s = fetched + 1; s <= upto; ++s) {
      for (auto& ball : A.balls_at(s, floor)) {
        CachedBall cb;
        cb.radius_sq = ball.radius * ball.radius;
        cb.radius_sq_d = cb.radius_sq.to_double();
        cb.centre = to_doubles(ball.center);
        cb.ball = std::move(ball);
        balls.push_back(std::move(cb));
      }
    }
    fetched = std::max(fetched, upto);

    std::vector<Cube> kept;
    for (auto& cell : cells) {
      const auto lo_d = to_doubles(cell.lo);
      const auto hi_d = to_doubles(cell.hi);
      const bool gone = std::any_of(balls.begin(), balls.end(), [&](const CachedBall& b) {
        return covers(b, cell, lo_d, hi_d);
      });
      if (!gone) kept.push_back(std::move(cell));
    }
    cells = std::move(kept);
    if (cells.empty()) throw InconsistentInput("every cell of the box is excluded: the set is empty");

    DyVec blo = cells.front().lo;
    DyVec bhi = cells.front().hi;
    for (const auto& c : cells) {
      for (std::size_t i = 0; i < d; ++i) {
        blo[i] = min(blo[i], c.lo[i]);
        bhi[i] = max(bhi[i], c.hi[i]);
      }
    }
    // half-diagonal <= 2^-n  <=>  ||bhi - blo||^2 <= 4^-n * 4
    if (norm_sq(bhi - blo) <= target_sq.shifted(2)) return Dyadic::pow2(-1) * (blo + bhi);

    const bool can_split = level < lmax && cells.size() * (std::size_t{1} << d) <= kMaxSurvivors;
    if (!can_split && fetched >= budget) {
      throw BudgetExhausted("survivors still spread after " + std::to_string(budget) + " stages");
    }
    if (can_split) {
      std::vector<Cube> finer;
      for (const auto& c : cells) {
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
          Cube child = c;
          for (std::size_t i = 0; i < d; ++i) {
            const Dyadic mid = (c.lo[i] + c.hi[i]).half();
            if (mask & (std::size_t{1} << i)) {
              child.lo[i] = mid;
            } else {
              child.hi[i] = mid;
            }
          }
          finer.push_back(std::move(child));
        }
      }
      cells = std::move(finer);
      ++level;
    }
    horizon = std::min<Stage>(horizon * 2, std::max<Stage>(budget, 1));
  }
}

}  // namespace

VecName unique_choice_compact(const ClosedName& A, const Box& K, Stage budget) {
  return VecName::from_query(K.dim(), [A, K, budget](Precision n) {
    return choose_point(A, K, budget, n);
  });
}

LowerName dist_lower_from_closed(const ClosedName& A, const VecName& x) {
  if (A.ambient.dim() != x.dim()) throw DimensionMismatch("closed set and point differ in dimension");
  return LowerName::from_stages([A, x](Stage s) {
    const auto p = static_cast<Precision>(s + 4);
    const DyVec q = x.query(p);
    const Dyadic xerr = x.exact() ? Dyadic() : Dyadic::pow2(-p);
    Dyadic best;
    for (const auto& b : A.balls_at(s, Dyadic())) {
      best = max(best, b.radius - norm_ub(q - b.center, p) - xerr);
    }
    return best;
  });
}

UpperName dist_upper_from_dense(const DenseSeq& S, const VecName& x) {
  if (S.dim() != x.dim()) throw DimensionMismatch("dense sequence and point differ in dimension");
  return UpperName::from_stages([S, x](Stage s) {
    const auto p = static_cast<Precision>(s + 2);
    const Dyadic xerr = x.exact() ? Dyadic() : Dyadic::pow2(-p);
    return norm_ub(x.query(p) - S.at(s), p) + xerr;
  });
}

Real dist_located(const ClosedName& A, const DenseSeq& S, const VecName& x, Stage budget) {
  return exactreal::real_from_bounds(dist_lower_from_closed(A, x), dist_upper_from_dense(S, x), budget);
}

CubeEmbedding cube_embed_strong(const CubePoint& x, Precision n) {
  if (n < 0) throw DomainError("negative precision");
  const Precision q = 2 * n + 2 + ceil_log2(static_cast<std::size_t>(n) + 2);
  const Dyadic tol = Dyadic::pow2(-q);
  CubeEmbedding out;
  out.prefix.reserve(static_cast<std::size_t>(n) + 2);
  for (std::int64_t k = 0; k <= n + 1; ++k) {
    const Dyadic v = x.coord(k).query(q);
    const Dyadic top = Dyadic::pow2(-k);
    if ((v + tol).sign() < 0 || top < v - tol) {
      throw DomainError("cube coordinate " + std::to_string(k) + " outside [0, 2^-" + std::to_string(k) + "]");
    }
    out.prefix.push_back(min(max(v, Dyadic()), top));
  }
  out.tail_bound = Dyadic::pow2(-(n + 1));
  return out;
}

}  // namespace fixpt::spaces
