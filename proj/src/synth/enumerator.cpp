#include "fixpt/synth/enumerator.hpp"

#include <cmath>
#include <limits>

#include "fixpt/errors.hpp"

namespace fixpt::synth {

using nonexp::Domain;
using spaces::norm_lb;
using spaces::norm_ub;
using spaces::operator+;
using spaces::operator-;
using spaces::operator*;

namespace {

// Smallest j with v on the 2^-j grid.
std::int64_t grid_level(const Dyadic& v) { return v.is_zero() ? 0 : std::max<std::int64_t>(0, -v.exponent()); }

constexpr Precision kStartBits = 16;
constexpr Precision kMaxBits = 60;
// only candidates within this factor of a witness get best-first turns
constexpr double kMaxPromise = 1e6;

}  // namespace

std::vector<HalfSpace> halfspace_candidates(const Box& K, int level) {
  if (level < 0) throw DomainError("negative candidate level");
  const std::size_t d = K.dim();
  const std::int64_t side = (std::int64_t{1} << (level + 1)) + 1;  // entries k 2^-level, |k| <= 2^level
  std::int64_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= side;
  std::vector<HalfSpace> out;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    DyVec normal(d);
    std::int64_t rest = idx;
    bool unit = false;
    std::int64_t lvl = 0;
    // most significant coordinate first, so the order is lexicographic
    for (std::size_t i = d; i-- > 0;) {
      const std::int64_t k = rest % side - (side - 1) / 2;
      rest /= side;
      normal[i] = Dyadic(k).shifted(-level);
      unit = unit || normal[i].abs() == Dyadic(1);
      lvl = std::max(lvl, grid_level(normal[i]));
    }
    if (!unit) continue;
    const Dyadic step = Dyadic::pow2(-level);
    const Dyadic a_lo = (-K.max_dot(normal)).ceil_to(level);
    const Dyadic a_hi = (-K.min_dot(normal)).floor_to(level);
    for (Dyadic a = a_lo; a <= a_hi; a += step) {
      if (std::max(lvl, grid_level(a)) != level) continue;
      out.push_back(HalfSpace{normal, a});
    }
  }
  return out;
}

struct HalfspaceEnumerator::State {
  struct Candidate {
    HalfSpace h;
    HalfSpace complement;  // A = K ∩ {<n,x> + a >= 0}
    MapName PA;
    DyVec y;  // Krasnoselski iterate of P_A o f, kept in A
    std::int64_t dense_next = 0;
    std::uint64_t turns = 0;
    Precision precision = kStartBits;
    // gap / threshold at the last Krasnoselski attempt; small means close
    // to a witness
    double promise = std::numeric_limits<double>::infinity();
  };

  MapName f;
  Box K;
  spaces::DenseSeq S;
  Options options;
  std::int64_t B = 1;
  Stage stage = 0;
  std::deque<Emission> ready;
  std::vector<Candidate> active;
  std::size_t cursor = 0;
  int next_level = 0;
  bool explicit_list = false;

  void add(const HalfSpace& h) {
    Candidate c;
    c.h = h;
    c.complement = HalfSpace{Dyadic(-1) * h.normal, -h.offset};
    // A empty: the box already lies in int h
    if (Dyadic() < K.min_dot(c.complement.normal) + c.complement.offset) {
      ready.push_back(Emission{h, stage, std::nullopt, 0});
      return;
    }
    c.PA = nonexp::project_box_halfspace(K, c.complement);
    c.y = c.PA.eval(K.center(), kStartBits);
    active.push_back(std::move(c));
  }

  void add_level() {
    for (const auto& h : halfspace_candidates(K, next_level)) add(h);
    ++next_level;
  }

  bool in_A(const Candidate& c, const DyVec& x) const {
    return K.contains(x) && c.complement.value(x).sign() <= 0;
  }

  // Witness test for x in A given f(x) and P_A(f(x)), both evaluated at
  // precision p. Returns n on success; raises c.precision when the
  // certificate needs more bits.
  std::optional<int> witness(Candidate& c, const DyVec& x, const DyVec& fx, const DyVec& pfx, bool km) const {
    const Precision p = c.precision;
    const Dyadic tol = Dyadic::pow2(-p);
    const Dyadic lb = norm_lb(fx - x, p + 2) - tol;
    if (lb.sign() <= 0) {
      if (km) c.promise = std::numeric_limits<double>::infinity();
      return std::nullopt;
    }
    int n = 0;
    while (!(Dyadic::pow2(-n) < lb)) ++n;
    // f's error passes through P_A unchanged, plus P_A's own error
    const Dyadic ub = norm_ub(pfx - x, p + 2) + tol + tol;
    if (ub * Dyadic(B) < Dyadic::pow2(-(2 * n + 3))) return n;
    if (km) c.promise = std::ldexp((ub * Dyadic(B)).to_double(), 2 * n + 3);
    const Precision need = 2 * n + 3 + spaces::ceil_log2(static_cast<std::size_t>(B)) + 6;
    c.precision = std::min<Precision>(std::max(c.precision, need), kMaxBits);
    return std::nullopt;
  }

  // One witness attempt for candidate c; true when it is decided.
  bool step(Candidate& c, bool force_km = false) {
    ++stage;
    const bool km = force_km || c.turns++ % 2 == 0;
    DyVec x;
    if (km) {
      x = c.y;
    } else {
      // next dense point inside A; a bounded scan per stage
      bool found = false;
      for (int tries = 0; tries < 16 && !found; ++tries) {
        x = S.at(c.dense_next++);
        found = in_A(c, x);
      }
      if (!found) return false;
    }
    const DyVec fx = f.eval(x, c.precision);
    const DyVec pfx = c.PA.eval(fx, c.precision);
    if (auto n = witness(c, x, fx, pfx, km)) {
      ready.push_back(Emission{c.h, stage, x, *n});
      return true;
    }
    if (km) {
      DyVec next = spaces::round_vec(Dyadic::pow2(-1) * (c.y + pfx), c.precision + 2);
      if (!in_A(c, next)) next = c.PA.eval(next, c.precision + 2);
      c.y = std::move(next);
    }
    return false;
  }
};

HalfspaceEnumerator::HalfspaceEnumerator(MapName f, Box K, spaces::DenseSeq S, Options options)
    : state_(std::make_unique<State>()) {
  auto& s = *state_;
  if (f.dim() != K.dim() || S.dim() != K.dim()) throw DimensionMismatch("map, box and dense sequence differ in dimension");
  s.f = std::move(f);
  s.K = std::move(K);
  s.S = std::move(S);
  s.options = options;
  s.B = s.K.norm_bound();
  // faces of the box: half-spaces containing it
  for (std::size_t i = 0; i < s.K.dim(); ++i) {
    DyVec e = spaces::zeros(s.K.dim());
    e[i] = Dyadic(1);
    s.ready.push_back(Emission{HalfSpace{e, -s.K.hi()[i]}, 0, std::nullopt, 0});
    e[i] = Dyadic(-1);
    s.ready.push_back(Emission{HalfSpace{e, s.K.lo()[i]}, 0, std::nullopt, 0});
  }
  s.add_level();
}

HalfspaceEnumerator::HalfspaceEnumerator(MapName f, Box K, spaces::DenseSeq S, std::vector<HalfSpace> candidates,
                                         Options options)
    : state_(std::make_unique<State>()) {
  auto& s = *state_;
  if (f.dim() != K.dim() || S.dim() != K.dim()) throw DimensionMismatch("map, box and dense sequence differ in dimension");
  s.f = std::move(f);
  s.K = std::move(K);
  s.S = std::move(S);
  s.options = options;
  s.B = s.K.norm_bound();
  s.explicit_list = true;
  for (const auto& h : candidates) {
    if (h.dim() != s.K.dim()) throw DimensionMismatch("candidate half-space dimension differs from the box");
    s.add(h);
  }
}

HalfspaceEnumerator::~HalfspaceEnumerator() = default;
HalfspaceEnumerator::HalfspaceEnumerator(HalfspaceEnumerator&&) noexcept = default;
HalfspaceEnumerator& HalfspaceEnumerator::operator=(HalfspaceEnumerator&&) noexcept = default;

std::optional<Emission> HalfspaceEnumerator::next() {
  auto& s = *state_;
  while (true) {
    if (!s.ready.empty()) {
      Emission e = std::move(s.ready.front());
      s.ready.pop_front();
      return e;
    }
    if (s.stage >= s.options.stage_budget) return std::nullopt;
    if (s.cursor >= s.active.size()) {
      // a full round is done; bring in the next level
      s.cursor = 0;
      if (!s.explicit_list && s.next_level <= s.options.max_level) {
        s.add_level();
        continue;
      }
      if (s.active.empty()) return std::nullopt;
    }
    // odd stages: a Krasnoselski step for the most promising candidate;
    // even stages keep the round-robin, so every candidate still gets its turns
    if (s.stage % 2 == 1) {
      std::size_t best = s.active.size();
      for (std::size_t i = 0; i < s.active.size(); ++i) {
        if (s.active[i].promise < (best < s.active.size() ? s.active[best].promise : kMaxPromise)) best = i;
      }
      if (best < s.active.size()) {
        if (s.step(s.active[best], true)) {
          s.active.erase(s.active.begin() + static_cast<std::ptrdiff_t>(best));
          if (best < s.cursor) --s.cursor;
        }
        continue;
      }
    }
    if (s.step(s.active[s.cursor])) {
      s.active.erase(s.active.begin() + static_cast<std::ptrdiff_t>(s.cursor));
    } else {
      ++s.cursor;
    }
  }
}

Stage HalfspaceEnumerator::stages() const { return state_->stage; }

std::size_t HalfspaceEnumerator::pending() const { return state_->active.size(); }

}  // namespace fixpt::synth
