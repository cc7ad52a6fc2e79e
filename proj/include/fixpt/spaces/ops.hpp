#pragma once

#include <functional>
#include <vector>

#include "fixpt/spaces/sets.hpp"

namespace fixpt::spaces {

/// eta(eps) = 1 - sqrt(1 - eps^2/4), the modulus of convexity of a Hilbert
/// space. Throws DomainError when eps certifies outside (0, 2].
Real eta_hilbert(const Real& eps);
/// mu(n) = 2n + 3, valid because eta(eps) >= eps^2 / 8.
Precision eta_hilbert_mu(Precision n);

/// <x, normal> + offset.
Real halfspace_margin(const HalfSpace& h, const VecName& x);

/// Finite 2^-n net of K made of box points (axis spacing 2^-(n + ceil log2 d)).
std::vector<DyVec> net_for_box(const Box& K, Precision n);

/// f(x, p) returns a dyadic within 2^-p of the function value at x.
using LipschitzFn = std::function<Dyadic(const DyVec&, Precision)>;

struct MaxBounds {
  exactreal::LowerName lower;
  exactreal::UpperName upper;
};

/// Branch-and-bound bounds on max_K f: each stage splits the cell with the
/// largest upper bound. L must be a Lipschitz constant of f.
MaxBounds compact_max_bounds(LipschitzFn f, const Dyadic& L, const Box& K);
Real compact_max(LipschitzFn f, const Dyadic& L, const Box& K,
                 Stage budget = exactreal::kDefaultStageBudget);

/// Recovers the single point of A inside K by discarding cells covered by
/// excluded balls. Throws InconsistentInput when every cell is discarded and
/// BudgetExhausted when the survivors never fit in a 2^-n ball.
VecName unique_choice_compact(const ClosedName& A, const Box& K,
                              Stage budget = exactreal::kDefaultStageBudget);

exactreal::LowerName dist_lower_from_closed(const ClosedName& A, const VecName& x);
exactreal::UpperName dist_upper_from_dense(const DenseSeq& S, const VecName& x);
Real dist_located(const ClosedName& A, const DenseSeq& S, const VecName& x,
                  Stage budget = exactreal::kDefaultStageBudget);

struct CubeEmbedding {
  /// Coordinates 0..n+1.
  DyVec prefix;
  /// l2 norm bound for the omitted coordinates.
  Dyadic tail_bound;
};

/// Finite approximation of a Hilbert cube point within 2^-n in l2.
CubeEmbedding cube_embed_strong(const CubePoint& x, Precision n);

}  // namespace fixpt::spaces
