#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "fixpt/synth/maps.hpp"

namespace fixpt::synth {

/// Candidate half-spaces {x : <n, x> + a <= 0} first appearing at level j:
/// normals have max-norm 1, normal entries and offsets lie on the 2^-j grid
/// and at least one of them needs that grid. Only half-spaces whose boundary
/// hyperplane meets the box are listed. Order: normals lexicographically,
/// then offsets ascending.
std::vector<HalfSpace> halfspace_candidates(const Box& K, int level);

struct Emission {
  HalfSpace halfspace;
  Stage stage = 0;
  /// Point x of the excluded part with ||P_A f(x) - x|| < 2^-(2n+3)/B and
  /// ||f(x) - x|| > 2^-n. Empty for box faces and half-spaces containing the box.
  std::optional<DyVec> witness;
  int n = 0;
};

/// Anytime enumeration of half-spaces whose interior contains Fix(f), for a
/// nonexpansive self-map f of a box. One stage is one witness attempt for one
/// candidate. Even stages serve candidates round-robin; odd stages give a
/// Krasnoselski step to the candidate whose last one came closest to a
/// witness, so separable candidates are not starved by the (typically many)
/// undecidable ones. In round-robin turns each candidate alternates
/// between a Krasnoselski step of P_A o f inside A and the next point of the
/// dense sequence lying in A.
class HalfspaceEnumerator {
 public:
  struct Options {
    int max_level = 1;
    Stage stage_budget = 1'000'000;
  };

  HalfspaceEnumerator(MapName f, Box K, spaces::DenseSeq S, Options options);
  HalfspaceEnumerator(MapName f, Box K, spaces::DenseSeq S, std::vector<HalfSpace> candidates, Options options);
  ~HalfspaceEnumerator();
  HalfspaceEnumerator(HalfspaceEnumerator&&) noexcept;
  HalfspaceEnumerator& operator=(HalfspaceEnumerator&&) noexcept;

  /// Next emitted half-space; empty once the stage budget is spent or every
  /// candidate is decided.
  std::optional<Emission> next();
  Stage stages() const;
  std::size_t pending() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace fixpt::synth
