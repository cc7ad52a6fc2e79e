#include "fixpt/synth/maps.hpp"

#include <map>
#include <mutex>

#include "fixpt/errors.hpp"

namespace fixpt::synth {

using nonexp::Domain;
using spaces::operator-;

namespace {

Dyadic clip01(const Dyadic& v) { return min(max(v, Dyadic()), Dyadic(1)); }

}  // namespace

MapName interval_map(const LowerName& a, const UpperName& b) {
  return MapName(Domain::of_box(Box::unit(1)), Dyadic(1), [a, b](const DyVec& x, Precision n) {
    // terms past N move the value by at most 2^-N in total, so the last
    // kept term takes the whole remaining weight
    const Precision N = std::max<Precision>(n + 2, 0);
    Dyadic sum;
    for (Precision k = 0; k <= N; ++k) {
      const Dyadic ak = clip01(a.at(k));
      const Dyadic bk = clip01(b.at(k));
      if (bk < ak) {
        throw InconsistentInput("interval bounds cross at stage " + std::to_string(k) + ": " + ak.str() + " > " +
                                bk.str());
      }
      const Dyadic c = min(max(x[0], ak), bk);
      sum += c * Dyadic::pow2(k < N ? -(k + 1) : -N);
    }
    return DyVec{sum};
  }).with_image(Domain::of_box(Box::unit(1)));
}

std::optional<DyVec> polytope_probe(const PolytopeSpec& spec) {
  const std::size_t d = spec.box.dim();
  for (const auto& h : spec.halfspaces) {
    if (h.dim() != d) throw DimensionMismatch("half-space dimension differs from the box");
    // a half-space missing the box is certified empty
    if (Dyadic() < spec.box.min_dot(h.normal) + h.offset) return std::nullopt;
  }
  auto feasible = [&](const DyVec& x) {
    for (const auto& h : spec.halfspaces) {
      if (h.value(x).sign() > 0) return false;
    }
    return true;
  };
  const DyVec widths = spec.box.widths();
  // levels stay under about 2^17 points
  for (int j = 0; (d == 0 ? 0 : j * static_cast<int>(d)) <= 17; ++j) {
    const std::int64_t side = (std::int64_t{1} << j) + 1;
    std::int64_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= side;
    for (std::int64_t idx = 0; idx < total; ++idx) {
      DyVec x(d);
      std::int64_t rest = idx;
      for (std::size_t i = 0; i < d; ++i) {
        const std::int64_t t = rest % side;
        rest /= side;
        x[i] = spec.box.lo()[i] + (Dyadic(t) * widths[i]).shifted(-j);
      }
      if (feasible(x)) return x;
    }
    if (d == 0) break;
  }
  return std::nullopt;
}

MapName polytope_map(const PolytopeSpec& spec) {
  if (!polytope_probe(spec)) throw InconsistentInput("no point of the box satisfies every half-space on the probe net");
  const Domain dom = Domain::of_box(spec.box);
  if (spec.halfspaces.empty()) return nonexp::identity_map(dom).with_image(dom);
  std::vector<MapName> projections;
  for (const auto& h : spec.halfspaces) projections.push_back(nonexp::project_halfspace(h));
  const MapName g = nonexp::bruck_combine(projections, spec.box.norm_bound());
  return nonexp::project_back_compose(nonexp::project_box(spec.box), g);
}

MapName cube_no_computable_fix(const Enumeration& alpha, const Enumeration& beta, std::size_t dim) {
  const Domain dom = Domain::cube(dim);
  const MapName g(dom, Dyadic(1), [alpha, beta](const DyVec& x, Precision m) {
    // listings after stage m + 1 move coordinate k by < 2^-(m+1+k)
    const Stage horizon = std::max<Precision>(m, 0) + 1;
    DyVec y = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto ik = static_cast<std::int64_t>(k);
      const auto ia = alpha.first_stage(ik, horizon);
      const auto ib = beta.first_stage(ik, horizon);
      if (ia && ib) throw InconsistentInput("index " + std::to_string(k) + " listed by both enumerations");
      if (ia) {
        y[k] = x[k] - x[k].shifted(-*ia);
      } else if (ib) {
        y[k] = Dyadic::pow2(-(ik + *ib)) + x[k] - x[k].shifted(-*ib);
      }
    }
    return y;
  });
  return nonexp::firmly_wrap(g.with_image(dom));
}

std::vector<CubeSide> separate_cube_indices(const std::vector<Real>& coords) {
  std::vector<CubeSide> out;
  const Dyadic lo = Dyadic::pow2(-2), hi = Dyadic(3).shifted(-2);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const Real scaled = exactreal::scale(coords[k], Dyadic::pow2(static_cast<std::int64_t>(k)));
    out.push_back(exactreal::soft_compare(scaled, lo, hi) == exactreal::SoftOrder::below_b ? CubeSide::alpha_side
                                                                                          : CubeSide::beta_side);
  }
  return out;
}

spaces::WeakPoint tmap(std::function<Real(std::int64_t)> x) {
  if (!x) throw DomainError("empty sequence");
  struct Cache {
    std::mutex mu;
    std::map<std::int64_t, Real> xs, coords;
  };
  auto cache = std::make_shared<Cache>();
  auto term = [x, cache](std::int64_t n) {
    {
      std::lock_guard lock(cache->mu);
      if (auto it = cache->xs.find(n); it != cache->xs.end()) return it->second;
    }
    Real v = x(n);
    std::lock_guard lock(cache->mu);
    return cache->xs.emplace(n, v).first->second;
  };
  auto coord = [term, cache](std::int64_t n) -> Real {
    if (n < 0) throw DomainError("negative coordinate index");
    {
      std::lock_guard lock(cache->mu);
      if (auto it = cache->coords.find(n); it != cache->coords.end()) return it->second;
    }
    Real a;
    if (n == 0) {
      a = term(0);
    } else {
      const Real hi = term(n), lo = term(n - 1);
      Real root;
      try {
        root = exactreal::sqrt(hi * hi - lo * lo);
      } catch (const DomainError&) {
        throw InconsistentInput("sequence decreases at index " + std::to_string(n));
      }
      if (root.exact()) return root;
      a = Real::from_query([root, n](Precision p) {
        try {
          return root.query(p);
        } catch (const DomainError&) {
          throw InconsistentInput("sequence decreases at index " + std::to_string(n));
        }
      });
    }
    std::lock_guard lock(cache->mu);
    return cache->coords.emplace(n, a).first->second;
  };
  return spaces::WeakPoint{Dyadic(1), coord};
}

}  // namespace fixpt::synth
