#pragma once

// Grid helpers shared by the spaces sources.

#include <vector>

#include "fixpt/spaces/vec.hpp"

namespace fixpt::spaces::detail {

// Points lo + t * step (t = 0, 1, ...) below hi, then hi itself.
inline std::vector<Dyadic> axis_points(const Dyadic& lo, const Dyadic& hi, const Dyadic& step) {
  std::vector<Dyadic> pts;
  for (Dyadic v = lo; v < hi; v += step) pts.push_back(v);
  pts.push_back(hi);
  return pts;
}

// Cartesian product of per-axis coordinate lists.
template <typename Fn>
void for_each_product(const std::vector<std::vector<Dyadic>>& axes, Fn&& fn) {
  const std::size_t d = axes.size();
  for (const auto& a : axes) {
    if (a.empty()) return;
  }
  std::vector<std::size_t> idx(d, 0);
  DyVec p(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) p[i] = axes[i][idx[i]];
    fn(p);
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
    }
    if (i == d) return;
  }
}

}  // namespace fixpt::spaces::detail
