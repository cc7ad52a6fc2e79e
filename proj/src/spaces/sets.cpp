#include "fixpt/spaces/sets.hpp"

#include <mutex>

#include "fixpt/errors.hpp"
#include "grid.hpp"

namespace fixpt::spaces {

using detail::axis_points;
using detail::for_each_product;

namespace {

// Multiples of step inside [max(lo, c - reach), min(hi, c + reach)].
std::vector<Dyadic> aligned_window(const Dyadic& lo, const Dyadic& hi, const Dyadic& c,
                                   const Dyadic& reach, Precision step_exp) {
  std::vector<Dyadic> pts;
  const Dyadic a = max(lo, c - reach).ceil_to(step_exp);
  const Dyadic b = min(hi, c + reach);
  const Dyadic step = Dyadic::pow2(-step_exp);
  for (Dyadic v = a; v <= b; v += step) pts.push_back(v);
  return pts;
}

}  // namespace

Box::Box(DyVec lo, DyVec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_dim(lo_, hi_);
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (hi_[i] < lo_[i]) throw InconsistentInput("box with lo > hi on axis " + std::to_string(i));
  }
}

Box Box::unit(std::size_t dim) { return Box(DyVec(dim, Dyadic(0)), DyVec(dim, Dyadic(1))); }

Box Box::cube_prefix(std::size_t dim) {
  DyVec hi(dim);
  for (std::size_t k = 0; k < dim; ++k) hi[k] = Dyadic::pow2(-static_cast<std::int64_t>(k));
  return Box(DyVec(dim, Dyadic(0)), std::move(hi));
}

DyVec Box::center() const { return Dyadic::pow2(-1) * (lo_ + hi_); }

bool Box::contains(const DyVec& x) const {
  require_same_dim(x, lo_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo_[i] || hi_[i] < x[i]) return false;
  }
  return true;
}

DyVec Box::clamp(const DyVec& x) const {
  require_same_dim(x, lo_);
  DyVec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = min(max(x[i], lo_[i]), hi_[i]);
  return r;
}

std::int64_t Box::norm_bound() const {
  Dyadic s;
  for (std::size_t i = 0; i < lo_.size(); ++i) s += max(lo_[i] * lo_[i], hi_[i] * hi_[i]);
  return exactreal::sqrt_ceil(s, 0).floor_int() + 1;
}

Dyadic Box::diameter_sq() const { return norm_sq(widths()); }

Dyadic Box::min_dot(const DyVec& v) const {
  require_same_dim(v, lo_);
  Dyadic s;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * (v[i].sign() > 0 ? lo_[i] : hi_[i]);
  return s;
}

Dyadic Box::max_dot(const DyVec& v) const {
  require_same_dim(v, lo_);
  Dyadic s;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * (v[i].sign() > 0 ? hi_[i] : lo_[i]);
  return s;
}

bool HalfSpace::degenerate() const {
  for (const auto& c : normal) {
    if (!c.is_zero()) return false;
  }
  return true;
}

bool HalfSpace::nonempty() const { return !degenerate() || offset.sign() <= 0; }

Dyadic HalfSpace::value(const DyVec& x) const { return dot(x, normal) + offset; }

std::vector<Ball> ClosedName::excluded_upto(Stage s, const Dyadic& radius_floor) const {
  std::vector<Ball> all;
  for (Stage t = 0; t <= s; ++t) {
    auto balls = balls_at(t, radius_floor);
    all.insert(all.end(), std::make_move_iterator(balls.begin()), std::make_move_iterator(balls.end()));
  }
  return all;
}

ClosedName grid_exclusion(const Box& ambient, DistanceBound dist_lb) {
  ClosedName name;
  name.ambient = ambient;
  name.balls_at = [ambient, dist_lb = std::move(dist_lb)](Stage t, const Dyadic& floor) {
    std::vector<std::vector<Dyadic>> axes;
    const Dyadic step = Dyadic::pow2(-t);
    for (std::size_t i = 0; i < ambient.dim(); ++i) {
      axes.push_back(axis_points(ambient.lo()[i], ambient.hi()[i], step));
    }
    std::vector<Ball> balls;
    for_each_product(axes, [&](const DyVec& c) {
      Dyadic r = dist_lb(c);
      if (r.sign() > 0 && floor <= r) balls.push_back({c, std::move(r)});
    });
    return balls;
  };
  return name;
}

ClosedName whitney_exclusion(const Box& ambient, DistanceBound dist_lb) {
  ClosedName name;
  name.ambient = ambient;
  name.balls_at = [ambient, dist_lb = std::move(dist_lb)](Stage s, const Dyadic& floor) {
    std::vector<Ball> balls;
    const Dyadic top = Dyadic::pow2(-(s - 1));
    if (top < floor) return balls;
    const Dyadic bottom = Dyadic::pow2(-(s + 1));
    std::vector<std::vector<Dyadic>> axes;
    for (std::size_t i = 0; i < ambient.dim(); ++i) {
      axes.push_back(axis_points(ambient.lo()[i], ambient.hi()[i], Dyadic::pow2(-(s + 2))));
    }
    for_each_product(axes, [&](const DyVec& c) {
      Dyadic r = dist_lb(c);
      if (r < bottom || (s > 0 && top <= r) || r < floor) return;
      balls.push_back({c, std::move(r)});
    });
    return balls;
  };
  return name;
}

ClosedName point_exclusion(const Box& ambient, std::vector<DyVec> points) {
  if (points.empty()) throw InconsistentInput("point exclusion of an empty set");
  for (const auto& p : points) require_same_dim(p, ambient.lo());
  ClosedName name;
  name.ambient = ambient;
  name.balls_at = [ambient, points = std::move(points)](Stage s, const Dyadic& floor) {
    std::vector<Ball> balls;
    const Dyadic top = Dyadic::pow2(-(s - 1));
    if (top < floor) return balls;
    const Dyadic bottom = Dyadic::pow2(-(s + 1));
    const auto step_exp = static_cast<Precision>(s + 2);
    const auto prec = static_cast<Precision>(s + 8);
    auto dist = [&](const DyVec& c) {
      Dyadic best = norm_lb(c - points.front(), prec);
      for (std::size_t k = 1; k < points.size(); ++k) best = min(best, norm_lb(c - points[k], prec));
      return best;
    };
    // Windows around different points may overlap; keep each centre once.
    std::vector<DyVec> seen;
    for (const auto& p : points) {
      std::vector<std::vector<Dyadic>> axes;
      for (std::size_t i = 0; i < ambient.dim(); ++i) {
        axes.push_back(aligned_window(ambient.lo()[i], ambient.hi()[i], p[i], top, step_exp));
      }
      for_each_product(axes, [&](const DyVec& c) {
        Dyadic r = dist(c);
        if (r < bottom || (s > 0 && top <= r) || r < floor) return;
        if (points.size() > 1) {
          for (const auto& q : seen) {
            if (q == c) return;
          }
          seen.push_back(c);
        }
        balls.push_back({c, std::move(r)});
      });
    }
    return balls;
  };
  return name;
}

DenseSeq::DenseSeq(std::size_t dim, Source source) : dim_(dim), source_(std::move(source)) {}

DenseSeq DenseSeq::box_grid(const Box& box) {
  const std::size_t d = box.dim();
  return DenseSeq(d, [box, d](std::int64_t k) {
    if (k < 0) throw DomainError("negative dense-sequence index");
    std::int64_t j = 0;
    while (true) {
      std::int64_t count = 1;
      const std::int64_t side = (std::int64_t{1} << j) + 1;
      for (std::size_t i = 0; i < d; ++i) count *= side;
      if (k < count) break;
      k -= count;
      ++j;
    }
    const std::int64_t side = (std::int64_t{1} << j) + 1;
    DyVec p(d);
    const DyVec w = box.widths();
    for (std::size_t i = 0; i < d; ++i) {
      const std::int64_t t = k % side;
      k /= side;
      p[i] = box.lo()[i] + (Dyadic(static_cast<long>(t)) * w[i]).shifted(-j);
    }
    return p;
  });
}

DenseSeq DenseSeq::from_points(std::vector<DyVec> points) {
  if (points.empty()) throw InconsistentInput("dense sequence of an empty set");
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw DimensionMismatch("dense sequence points differ in dimension");
  }
  return DenseSeq(d, [points = std::move(points)](std::int64_t k) {
    return points[static_cast<std::size_t>(k % static_cast<std::int64_t>(points.size()))];
  });
}

DyVec DenseSeq::at(std::int64_t k) const {
  if (!source_) throw InconsistentInput("empty dense sequence");
  return source_(k);
}

DenseSeq DenseSeq::filtered(std::function<bool(const DyVec&)> keep, std::int64_t scan_budget) const {
  struct State {
    std::mutex mutex;
    std::int64_t scanned = 0;
    std::vector<std::int64_t> hits;
  };
  auto state = std::make_shared<State>();
  DenseSeq base = *this;
  return DenseSeq(dim_, [base, keep = std::move(keep), scan_budget, state](std::int64_t k) {
    std::lock_guard<std::mutex> lock(state->mutex);
    while (static_cast<std::int64_t>(state->hits.size()) <= k) {
      if (state->scanned >= scan_budget) {
        throw BudgetExhausted("filtered dense sequence: no point " + std::to_string(k) +
                              " within " + std::to_string(scan_budget) + " candidates");
      }
      if (keep(base.at(state->scanned))) state->hits.push_back(state->scanned);
      ++state->scanned;
    }
    return base.at(state->hits[static_cast<std::size_t>(k)]);
  });
}

ProjectionParams hilbert_projection_params(std::int64_t dist_bound) {
  if (dist_bound < 0) throw DomainError("distance bound must be nonnegative");
  return ProjectionParams{[](Precision n) { return 2 * n + 3; }, dist_bound};
}

}  // namespace fixpt::spaces
