#pragma once

#include <vector>

#include "fixpt/nonexp/map.hpp"
#include "fixpt/synth/enumeration.hpp"

namespace fixpt::synth {

using exactreal::Precision;
using exactreal::Real;
using nonexp::MapName;
using spaces::Box;
using spaces::DyVec;
using spaces::HalfSpace;

/// Nonexpansive monotone self-map of [0,1] fixing exactly [sup a, inf b]:
/// sum_k 2^-(k+1) clamp(x, a_k, b_k). Throws InconsistentInput when a stage
/// has a_k > b_k after clipping to [0,1].
MapName interval_map(const LowerName& a, const UpperName& b);

struct PolytopeSpec {
  Box box;
  std::vector<HalfSpace> halfspaces;

  bool operator==(const PolytopeSpec&) const = default;
};

/// A point of box ∩ all half-spaces found on a probe net, if any.
std::optional<DyVec> polytope_probe(const PolytopeSpec& spec);

/// P_box o Bruck(P_h1, ..., P_hm) on the box; fixes exactly the polytope.
/// Throws InconsistentInput when the probe finds no feasible point.
MapName polytope_map(const PolytopeSpec& spec);

/// Coordinatewise map on the first dim coordinates of the Hilbert cube,
/// firmly wrapped. Coordinate k is scaled by 1 - 2^-i if alpha lists k at
/// stage i, pulled toward 2^-k the same way if beta does, and fixed otherwise.
/// Throws InconsistentInput if both list an index.
MapName cube_no_computable_fix(const Enumeration& alpha, const Enumeration& beta, std::size_t dim);

enum class CubeSide { alpha_side, beta_side };

/// Separation step from an approximate fixed point x: coordinate k is
/// classified by soft_compare(2^k x(k), 1/4, 3/4); below means alpha side.
std::vector<CubeSide> separate_cube_indices(const std::vector<Real>& coords);

/// T(x) for a nondecreasing sequence in [0,1]: a(0) = x(0),
/// a(n+1) = sqrt(x(n+1)^2 - x(n)^2), so sum_{k<=n} a(k)^2 = x(n)^2.
/// A certified decrease surfaces as InconsistentInput when a coordinate is queried.
spaces::WeakPoint tmap(std::function<Real(std::int64_t)> x);

}  // namespace fixpt::synth
