#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fixpt/exactreal/names.hpp"

namespace fixpt::spaces {

using exactreal::Dyadic;
using exactreal::Precision;
using exactreal::Real;
using exactreal::Stage;

using DyVec = std::vector<Dyadic>;

void require_same_dim(const DyVec& a, const DyVec& b);

DyVec operator+(const DyVec& a, const DyVec& b);
DyVec operator-(const DyVec& a, const DyVec& b);
DyVec operator*(const Dyadic& c, const DyVec& v);
Dyadic dot(const DyVec& a, const DyVec& b);
Dyadic norm_sq(const DyVec& v);
/// Upper / lower bounds on the Euclidean norm on the 2^-n grid.
Dyadic norm_ub(const DyVec& v, Precision n);
Dyadic norm_lb(const DyVec& v, Precision n);
DyVec round_vec(const DyVec& v, Precision n);
DyVec zeros(std::size_t dim);
std::vector<double> to_doubles(const DyVec& v);

/// ceil(log2 d) for d >= 1.
Precision ceil_log2(std::size_t d);

/// Name of a point of R^d: query(n) is within 2^-n in Euclidean norm.
class VecName {
 public:
  using Query = std::function<DyVec(Precision)>;

  VecName() = default;
  VecName(DyVec exact);  // NOLINT: dyadic points name themselves
  /// Coordinates queried at n + ceil(log2 d) + 1.
  static VecName from_coords(std::vector<Real> coords);
  static VecName from_query(std::size_t dim, Query query);

  std::size_t dim() const { return dim_; }
  DyVec query(Precision n) const;
  const std::optional<DyVec>& exact() const;
  /// Coordinate i as a scalar name.
  Real coord(std::size_t i) const;

 private:
  struct Node;
  std::size_t dim_ = 0;
  std::shared_ptr<const Node> node_;
};

/// Name of ||x||, and of ||x - y||.
Real norm(const VecName& x);
Real distance(const VecName& x, const VecName& y);

}  // namespace fixpt::spaces
