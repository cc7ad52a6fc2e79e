#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fixpt/spaces/ops.hpp"

namespace fixpt::nonexp {

using exactreal::Dyadic;
using exactreal::Precision;
using exactreal::Real;
using exactreal::Stage;
using spaces::Box;
using spaces::DyVec;
using spaces::HalfSpace;
using spaces::VecName;
using spaces::operator+;
using spaces::operator-;
using spaces::operator*;

/// Convex set a map acts on.
struct Domain {
  enum class Kind { ambient, box, cube, ball };

  Kind kind = Kind::ambient;
  std::size_t dim = 0;
  Box box;        // box and cube (truncated Hilbert cube)
  Dyadic radius;  // ball centred at the origin

  static Domain ambient(std::size_t dim);
  static Domain of_box(const Box& box);
  static Domain cube(std::size_t dim);
  static Domain ball(std::size_t dim, const Dyadic& radius);

  /// Membership up to tol (Euclidean slack for balls, per axis for boxes).
  bool contains(const DyVec& x, const Dyadic& tol = Dyadic()) const;
  /// Nearest point of the domain; identity on the ambient space.
  DyVec nearest(const DyVec& x) const;
  /// Integer B >= sup ||x|| + 1. Throws DomainError on the ambient space.
  std::int64_t norm_bound() const;
  std::string kind_name() const;
};

/// Lipschitz map on a domain, evaluated at dyadic points to precision n.
class MapName {
 public:
  /// eval(x, n) is within 2^-n of f(x) for dyadic x in the domain.
  using Eval = std::function<DyVec(const DyVec&, Precision)>;

  MapName() = default;
  MapName(Domain domain, Dyadic lipschitz, Eval eval);

  const Domain& domain() const { return domain_; }
  const Dyadic& lipschitz() const { return lipschitz_; }
  std::size_t dim() const { return domain_.dim; }

  /// Set when every output lies in this domain (projections onto boxes).
  const std::optional<Domain>& image() const { return image_; }
  MapName with_image(Domain image) const;

  DyVec eval(const DyVec& x, Precision n) const;
  /// Queries x finely enough that the Lipschitz bound absorbs its error.
  DyVec eval(const VecName& x, Precision n) const;
  /// Name of f(x).
  VecName apply(const VecName& x) const;

 private:
  Domain domain_;
  Dyadic lipschitz_;
  Eval eval_;
  std::optional<Domain> image_;
};

MapName identity_map(const Domain& domain);

/// Metric projection onto a half-space (identity for the whole space).
MapName project_halfspace(const HalfSpace& h);
/// Componentwise clamp onto a box.
MapName project_box(const Box& K);
/// Metric projection onto box ∩ half-space: clamp(y - lambda n) with lambda
/// located by bisection on the upper (feasible) side.
MapName project_box_halfspace(const Box& K, const HalfSpace& h);

/// sum_k 2^-(k+1) f_k truncated at N = n + ceil(log2 B) + 2; the leftover
/// weight 2^-(N+1) goes to the identity so common fixed points stay exact.
MapName bruck_combine(std::function<MapName(std::int64_t)> fs, const Domain& domain, std::int64_t B);
/// Finite list used cyclically.
MapName bruck_combine(const std::vector<MapName>& fs, std::int64_t B);

/// PK o g, a self-map of the image of PK. PK must carry an image.
MapName project_back_compose(const MapName& PK, const MapName& g);
/// outer o inner, on the domain of inner.
MapName compose(const MapName& outer, const MapName& inner);
/// (id + g) / 2.
MapName firmly_wrap(const MapName& g);

/// Closed convex set named by a dense sequence and its distance function.
struct LocatedConvex {
  spaces::DenseSeq points;
  std::function<Real(const VecName&)> distance;
};

/// A point of the dense sequence within 2^-n of the metric projection of x.
/// Throws BudgetExhausted after max_stage scan rounds.
DyVec project_located_convex(const LocatedConvex& K, const VecName& x,
                             const spaces::ProjectionParams& params, Precision n,
                             Stage max_stage = 40);
/// Modulus of uniqueness: delta(n) = 2^-(2n + 4 + ceil log2(d + 1)).
Dyadic uniqueness_delta(Precision n, std::int64_t dist_bound);

/// Lipschitz-5 pseudocontraction of the closed unit disc whose only fixed
/// point is the origin.
MapName chidume_mutangadura_map();

/// Name of ||f(x) - x||.
Real residual(const MapName& f, const VecName& x);

}  // namespace fixpt::nonexp
