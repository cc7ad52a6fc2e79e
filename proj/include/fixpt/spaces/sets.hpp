#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "fixpt/spaces/vec.hpp"

namespace fixpt::spaces {

/// Axis-aligned box [lo, hi] in R^d.
class Box {
 public:
  Box() = default;
  Box(DyVec lo, DyVec hi);
  static Box unit(std::size_t dim);
  /// Truncated Hilbert cube: coordinate k ranges over [0, 2^-k].
  static Box cube_prefix(std::size_t dim);

  std::size_t dim() const { return lo_.size(); }
  const DyVec& lo() const { return lo_; }
  const DyVec& hi() const { return hi_; }
  DyVec widths() const { return hi_ - lo_; }
  DyVec center() const;

  bool contains(const DyVec& x) const;
  /// Componentwise clamp, the metric projection onto the box.
  DyVec clamp(const DyVec& x) const;
  /// Integer B >= sup{||x|| + 1 : x in K}.
  std::int64_t norm_bound() const;
  /// Squared diameter, exact.
  Dyadic diameter_sq() const;
  /// Extreme values of <x, v> over the box.
  Dyadic min_dot(const DyVec& v) const;
  Dyadic max_dot(const DyVec& v) const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  DyVec lo_;
  DyVec hi_;
};

/// {x : <x, normal> + offset <= 0}.
struct HalfSpace {
  DyVec normal;
  Dyadic offset;

  std::size_t dim() const { return normal.size(); }
  bool degenerate() const;
  /// False only for a zero normal with positive offset.
  bool nonempty() const;
  /// Exact <x, normal> + offset.
  Dyadic value(const DyVec& x) const;

  friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
};

/// Open ball.
struct Ball {
  DyVec center;
  Dyadic radius;
};

/// Closed subset of a box, named by the open balls excluded from it.
///
/// balls_at(s, floor) returns the balls first listed at stage s; the set is
/// the box minus the union over all stages. A generator may omit balls of
/// radius below the floor hint, which consumers pass when they cannot use
/// them anyway.
struct ClosedName {
  using Generator = std::function<std::vector<Ball>(Stage, const Dyadic& radius_floor)>;

  Box ambient;
  Generator balls_at;

  std::vector<Ball> excluded_upto(Stage s, const Dyadic& radius_floor = Dyadic()) const;
};

/// Lower bound on the distance from a dyadic point to the named set.
using DistanceBound = std::function<Dyadic(const DyVec&)>;

/// Stage t lists every point of the 2^-t grid over the box with radius
/// dist_lb(c). dist_lb must never exceed the true distance.
ClosedName grid_exclusion(const Box& ambient, DistanceBound dist_lb);
/// Stage s lists grid points (spacing 2^-(s+2)) whose distance bound lies in
/// [2^-(s+1), 2^-(s-1)), with radius dist_lb(c). Scans the whole box grid,
/// so only practical in low dimension.
ClosedName whitney_exclusion(const Box& ambient, DistanceBound dist_lb);
/// Whitney exclusion of a finite point set, scanning only around the points.
ClosedName point_exclusion(const Box& ambient, std::vector<DyVec> points);

/// Overt set named by a dense sequence of dyadic points.
class DenseSeq {
 public:
  using Source = std::function<DyVec(std::int64_t)>;

  DenseSeq() = default;
  DenseSeq(std::size_t dim, Source source);
  /// Level j lists the (2^j + 1)^d points of the 2^-j subdivision grid.
  static DenseSeq box_grid(const Box& box);
  /// Cycles through a finite list.
  static DenseSeq from_points(std::vector<DyVec> points);

  std::size_t dim() const { return dim_; }
  DyVec at(std::int64_t k) const;

  /// Subsequence of the points satisfying keep. Finding the k-th kept point
  /// scans at most scan_budget underlying points, then throws BudgetExhausted.
  DenseSeq filtered(std::function<bool(const DyVec&)> keep, std::int64_t scan_budget) const;

 private:
  std::size_t dim_ = 0;
  Source source_;
};

/// Point of the Hilbert cube: 0 <= coord(n) <= 2^-n.
struct CubePoint {
  std::function<Real(std::int64_t)> coord;
};

/// Point of l2 named weakly: a norm bound plus coordinates.
struct WeakPoint {
  Dyadic norm_bound;
  std::function<Real(std::int64_t)> coord;
};

/// Modulus data for projecting onto a convex set.
struct ProjectionParams {
  /// 2^-mu(n) <= eta(2^-n).
  std::function<Precision(Precision)> mu;
  /// Integer bound on d(x, K).
  std::int64_t dist_bound = 1;
};

ProjectionParams hilbert_projection_params(std::int64_t dist_bound);

}  // namespace fixpt::spaces
