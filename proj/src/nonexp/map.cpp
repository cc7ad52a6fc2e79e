#include "fixpt/nonexp/map.hpp"

#include <algorithm>

#include <gmpxx.h>

#include "fixpt/errors.hpp"

namespace fixpt::nonexp {

using spaces::ceil_log2;
using spaces::norm_sq;
using spaces::round_vec;

namespace {

Precision lipschitz_bits(const Dyadic& L) {
  if (L <= Dyadic(1)) return 0;
  return static_cast<Precision>(L.ceil_log2_abs());
}

// Grid fine enough that rounding every coordinate costs at most 2^-(n+1) in norm.
Precision rounding_grid(Precision n, std::size_t dim) { return n + 1 + ceil_log2(std::max<std::size_t>(dim, 1)); }

mpq_class to_mpq(const Dyadic& v) {
  mpq_class r(v.mantissa());
  if (v.exponent() >= 0) {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(v.exponent()));
  } else {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-v.exponent()));
  }
  return r;
}

// Smallest multiple of 2^-p that is >= q.
Dyadic ceil_dyadic(const mpq_class& q, Precision p) {
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  if (p >= 0) {
    num <<= static_cast<mp_bitcnt_t>(p);
  } else {
    den <<= static_cast<mp_bitcnt_t>(-p);
  }
  mpz_class m;
  mpz_cdiv_q(m.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Dyadic(m, -p);
}

bool is_pow2(const Dyadic& v) { return v.sign() > 0 && v.mantissa() == 1; }

}  // namespace

Domain Domain::ambient(std::size_t dim) {
  Domain d;
  d.kind = Kind::ambient;
  d.dim = dim;
  return d;
}

Domain Domain::of_box(const Box& box) {
  Domain d;
  d.kind = Kind::box;
  d.dim = box.dim();
  d.box = box;
  return d;
}

Domain Domain::cube(std::size_t dim) {
  Domain d = of_box(Box::cube_prefix(dim));
  d.kind = Kind::cube;
  return d;
}

Domain Domain::ball(std::size_t dim, const Dyadic& radius) {
  if (radius.sign() < 0) throw DomainError("negative ball radius");
  Domain d;
  d.kind = Kind::ball;
  d.dim = dim;
  d.radius = radius;
  return d;
}

bool Domain::contains(const DyVec& x, const Dyadic& tol) const {
  if (x.size() != dim) throw DimensionMismatch("point dimension differs from the domain");
  switch (kind) {
    case Kind::ambient:
      return true;
    case Kind::box:
    case Kind::cube:
      for (std::size_t i = 0; i < dim; ++i) {
        if (x[i] < box.lo()[i] - tol || box.hi()[i] + tol < x[i]) return false;
      }
      return true;
    case Kind::ball: {
      const Dyadic r = radius + tol;
      return norm_sq(x) <= r * r;
    }
  }
  return false;
}

DyVec Domain::nearest(const DyVec& x) const {
  if (x.size() != dim) throw DimensionMismatch("point dimension differs from the domain");
  switch (kind) {
    case Kind::ambient:
      return x;
    case Kind::box:
    case Kind::cube:
      return box.clamp(x);
    case Kind::ball: {
      if (norm_sq(x) <= radius * radius) return x;
      // shrink by a factor rounded down, then round toward zero, so the result stays inside
      const Dyadic c = max(Dyadic(), exactreal::div_approx(radius, spaces::norm_ub(x, 64), 64) - Dyadic::pow2(-64));
      DyVec r(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const Dyadic v = c * x[i];
        r[i] = v.sign() >= 0 ? v.floor_to(64) : v.ceil_to(64);
      }
      return r;
    }
  }
  return x;
}

std::int64_t Domain::norm_bound() const {
  switch (kind) {
    case Kind::ambient:
      throw DomainError("the whole space has no norm bound");
    case Kind::box:
    case Kind::cube:
      return box.norm_bound();
    case Kind::ball:
      return radius.ceil_to(0).floor_int() + 1;
  }
  return 1;
}

std::string Domain::kind_name() const {
  switch (kind) {
    case Kind::ambient: return "ambient";
    case Kind::box: return "box";
    case Kind::cube: return "cube";
    case Kind::ball: return "ball";
  }
  return "ambient";
}

MapName::MapName(Domain domain, Dyadic lipschitz, Eval eval)
    : domain_(std::move(domain)), lipschitz_(std::move(lipschitz)), eval_(std::move(eval)) {
  if (lipschitz_.sign() < 0) throw DomainError("negative Lipschitz constant");
}

MapName MapName::with_image(Domain image) const {
  MapName m = *this;
  m.image_ = std::move(image);
  return m;
}

DyVec MapName::eval(const DyVec& x, Precision n) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("map on dimension " + std::to_string(dim()) + " applied to a point of dimension " +
                            std::to_string(x.size()));
  }
  return eval_(x, n);
}

DyVec MapName::eval(const VecName& x, Precision n) const {
  if (x.exact()) return eval(*x.exact(), n);
  const DyVec q = x.query(n + lipschitz_bits(lipschitz_) + 1);
  // the domain is convex, so pulling q back in only reduces its error
  return eval(domain_.nearest(q), n + 1);
}

VecName MapName::apply(const VecName& x) const {
  const MapName f = *this;
  return VecName::from_query(dim(), [f, x](Precision n) { return f.eval(x, n); });
}

MapName identity_map(const Domain& domain) {
  return MapName(domain, Dyadic(1), [](const DyVec& x, Precision) { return x; });
}

MapName project_halfspace(const HalfSpace& h) {
  if (!h.nonempty()) throw InconsistentInput("empty half-space: zero normal with positive offset");
  const Domain dom = Domain::ambient(h.dim());
  if (h.degenerate()) return identity_map(dom);
  const Dyadic nn = norm_sq(h.normal);
  const Precision kn = static_cast<Precision>(std::max<std::int64_t>(spaces::norm_ub(h.normal, 0).ceil_log2_abs(), 0));
  return MapName(dom, Dyadic(1), [h, nn, kn](const DyVec& x, Precision n) {
    const Dyadic alpha = h.value(x);
    if (alpha.sign() <= 0) return x;
    if (is_pow2(nn)) return x - (alpha * Dyadic::pow2(-nn.exponent())) * h.normal;
    // |c - alpha/|n|^2| < 2^-(n+kn+2) moves p by at most 2^-(n+2)
    const Dyadic c = exactreal::div_approx(alpha, nn, n + kn + 2);
    return round_vec(x - c * h.normal, rounding_grid(n + 1, x.size()));
  });
}

MapName project_box(const Box& K) {
  return MapName(Domain::ambient(K.dim()), Dyadic(1), [K](const DyVec& x, Precision) { return K.clamp(x); })
      .with_image(Domain::of_box(K));
}

MapName project_box_halfspace(const Box& K, const HalfSpace& h) {
  if (K.dim() != h.dim()) throw DimensionMismatch("box and half-space differ in dimension");
  if (!h.nonempty() || Dyadic() < K.min_dot(h.normal) + h.offset) {
    throw InconsistentInput("box and half-space do not intersect");
  }
  const Precision kn = static_cast<Precision>(std::max<std::int64_t>(spaces::norm_ub(h.normal, 0).ceil_log2_abs(), 0));
  return MapName(Domain::ambient(K.dim()), Dyadic(1), [K, h, kn](const DyVec& y, Precision n) {
    auto at = [&](const Dyadic& lambda) { return K.clamp(y - lambda * h.normal); };
    DyVec p = at(Dyadic());
    if (h.value(p).sign() <= 0) return p;
    // g(lambda) = <clamp(y - lambda n), n> + a is piecewise linear and
    // nonincreasing; find its root exactly between consecutive breakpoints
    const std::size_t d = y.size();
    std::vector<mpq_class> yq(d), nq(d), lo(d), hi(d);
    std::vector<mpq_class> breaks;
    for (std::size_t i = 0; i < d; ++i) {
      yq[i] = to_mpq(y[i]);
      nq[i] = to_mpq(h.normal[i]);
      lo[i] = to_mpq(K.lo()[i]);
      hi[i] = to_mpq(K.hi()[i]);
      if (sgn(nq[i]) == 0) continue;
      for (const mpq_class& bound : {lo[i], hi[i]}) {
        mpq_class t = (yq[i] - bound) / nq[i];
        if (sgn(t) > 0) breaks.push_back(t);
      }
    }
    const mpq_class a = to_mpq(h.offset);
    auto g = [&](const mpq_class& t) {
      mpq_class v = a;
      for (std::size_t i = 0; i < d; ++i) {
        mpq_class c = yq[i] - t * nq[i];
        if (c < lo[i]) c = lo[i];
        if (c > hi[i]) c = hi[i];
        v += c * nq[i];
      }
      return v;
    };
    std::sort(breaks.begin(), breaks.end());
    mpq_class t0 = 0, g0 = g(t0), root = 0;
    bool found = false;
    for (const auto& t1 : breaks) {
      const mpq_class g1 = g(t1);
      if (sgn(g1) <= 0) {
        root = t0 + g0 * (t1 - t0) / (g0 - g1);
        found = true;
        break;
      }
      t0 = t1;
      g0 = g1;
    }
    if (!found) throw InconsistentInput("box and half-space do not intersect");
    // round lambda up: g is nonincreasing, so the point stays feasible, and
    // lambda -> clamp(y - lambda n) is ||n||-Lipschitz
    return at(ceil_dyadic(root, n + kn + 1));
  }).with_image(Domain::of_box(K));
}

MapName bruck_combine(std::function<MapName(std::int64_t)> fs, const Domain& domain, std::int64_t B) {
  if (!fs) throw InconsistentInput("empty map sequence");
  if (B < 1) throw DomainError("norm bound must be at least 1");
  const auto kb = static_cast<Precision>(ceil_log2(static_cast<std::size_t>(B)));
  return MapName(domain, Dyadic(1), [fs, kb](const DyVec& x, Precision n) {
    const std::int64_t N = n + kb + 2;
    DyVec sum = Dyadic::pow2(-N - 1) * x;
    for (std::int64_t k = 0; k <= N; ++k) {
      const DyVec fk = fs(k).eval(x, static_cast<Precision>(n + k + 2));
      sum = sum + Dyadic::pow2(-k - 1) * fk;
    }
    return round_vec(sum, rounding_grid(n + 2, x.size()));
  });
}

MapName bruck_combine(const std::vector<MapName>& fs, std::int64_t B) {
  if (fs.empty()) throw InconsistentInput("empty map sequence");
  Dyadic L(1);
  for (const auto& f : fs) {
    if (f.dim() != fs.front().dim()) throw DimensionMismatch("combined maps differ in dimension");
    L = max(L, f.lipschitz());
  }
  if (B < 1) throw DomainError("norm bound must be at least 1");
  const auto kb = static_cast<Precision>(ceil_log2(static_cast<std::size_t>(B)));
  // Cyclic terms repeat, so each distinct map is evaluated once with the sum
  // of its weights; weights total below 1, so precision n + 2 covers them all.
  return MapName(fs.front().domain(), L, [list = fs, kb](const DyVec& x, Precision n) {
    const std::int64_t N = n + kb + 2;
    const auto m = static_cast<std::int64_t>(list.size());
    DyVec sum = Dyadic::pow2(-N - 1) * x;
    for (std::int64_t j = 0; j < m && j <= N; ++j) {
      Dyadic w;
      for (std::int64_t k = j; k <= N; k += m) w += Dyadic::pow2(-k - 1);
      sum = sum + w * list[static_cast<std::size_t>(j)].eval(x, n + 2);
    }
    return round_vec(sum, rounding_grid(n + 2, x.size()));
  });
}

namespace {

MapName compose_on(const MapName& outer, const MapName& inner, Domain domain) {
  if (outer.dim() != inner.dim()) throw DimensionMismatch("composed maps differ in dimension");
  const Precision ko = lipschitz_bits(outer.lipschitz());
  return MapName(std::move(domain), outer.lipschitz() * inner.lipschitz(),
                 [outer, inner, ko](const DyVec& x, Precision n) {
                   const DyVec y = inner.eval(x, n + ko + 1);
                   return outer.eval(outer.domain().nearest(y), n + 1);
                 });
}

}  // namespace

MapName project_back_compose(const MapName& PK, const MapName& g) {
  if (!PK.image()) throw DomainError("projection carries no image domain");
  MapName m = compose_on(PK, g, *PK.image());
  return m.with_image(*PK.image());
}

MapName compose(const MapName& outer, const MapName& inner) {
  MapName m = compose_on(outer, inner, inner.domain());
  if (outer.image()) m = m.with_image(*outer.image());
  return m;
}

MapName firmly_wrap(const MapName& g) {
  const Dyadic L = (Dyadic(1) + g.lipschitz()).half();
  MapName m(g.domain(), L, [g](const DyVec& x, Precision n) {
    return Dyadic::pow2(-1) * (x + g.eval(x, n + 1));
  });
  if (g.image()) m = m.with_image(g.domain());
  return m;
}

Dyadic uniqueness_delta(Precision n, std::int64_t dist_bound) {
  if (dist_bound < 0) throw DomainError("distance bound must be nonnegative");
  return Dyadic::pow2(-(2 * n + 4 + ceil_log2(static_cast<std::size_t>(dist_bound) + 1)));
}

DyVec project_located_convex(const LocatedConvex& K, const VecName& x, const spaces::ProjectionParams& params,
                             Precision n, Stage max_stage) {
  if (K.points.dim() != x.dim()) throw DimensionMismatch("convex set and point differ in dimension");
  if (!params.mu) throw DomainError("projection parameters carry no modulus");
  {
    // 2^-mu(n) <= eta(2^-n), checked with a certified lower bound on eta
    const Precision m = params.mu(n);
    // eta(2^-n) exceeds 4^-n/8 only by about 2^-(4n+7), so compare at twice the bits
    const Precision p = 2 * m + 4;
    const Dyadic eta_lo = spaces::eta_hilbert(Real(Dyadic::pow2(-n))).query(p) - Dyadic::pow2(-p);
    if (eta_lo < Dyadic::pow2(-m)) throw DomainError("mu is not a modulus of convexity witness");
  }
  const Dyadic delta = uniqueness_delta(n, params.dist_bound);
  const Real dist = K.distance(x);
  for (Stage t = 0; t <= max_stage; ++t) {
    const auto q = static_cast<Precision>(2 * n + 8 + t);
    const Dyadic tol = Dyadic::pow2(-q);
    const DyVec xq = x.query(q);
    const Dyadic x_err = x.exact() ? Dyadic() : tol;
    // ||p - x|| <= ||p - xq|| + x_err and d >= dq - tol
    const Dyadic rhs = dist.query(q) - tol - x_err + delta;
    if (rhs.sign() < 0) continue;
    const Dyadic rhs_sq = rhs * rhs;
    const std::int64_t scan = std::int64_t{1} << std::min<Stage>(t, 40);
    for (std::int64_t k = 0; k < scan; ++k) {
      DyVec p = K.points.at(k);
      if (norm_sq(p - xq) <= rhs_sq) return p;
    }
  }
  throw BudgetExhausted("no near-minimiser found in " + std::to_string(max_stage) + " scan rounds");
}

MapName chidume_mutangadura_map() {
  const Domain disc = Domain::ball(2, Dyadic(1));
  return MapName(disc, Dyadic(5), [](const DyVec& x, Precision n) {
    const DyVec perp{-x[1], x[0]};
    const Real r = spaces::norm(VecName(x));
    // The branches differ by |1 - 2||x||| near the seam, at most 2^-(n+2) here.
    const Dyadic a = Dyadic::pow2(-1) - Dyadic::pow2(-(n + 3));
    const Dyadic b = Dyadic::pow2(-1) + Dyadic::pow2(-(n + 3));
    if (exactreal::soft_compare(r, a, b) == exactreal::SoftOrder::below_b) return x + perp;
    // x / ||x|| with ||x|| > 1/4: coordinate error <= |x_i| |r - rq| / (r rq) + 2^-p
    const Precision p = n + 8;
    const Dyadic rq = r.query(p);
    DyVec u(2);
    for (std::size_t i = 0; i < 2; ++i) u[i] = exactreal::div_approx(x[i], rq, p);
    return round_vec(u - x + perp, n + 3);
  }).with_image(disc);
}

Real residual(const MapName& f, const VecName& x) {
  if (f.dim() != x.dim()) throw DimensionMismatch("residual of a point of the wrong dimension");
  return Real::from_query([f, x](Precision n) {
    const DyVec y = f.eval(x, n + 2);
    const DyVec xq = x.query(n + 2);
    return exactreal::sqrt_floor(norm_sq(y - xq), n + 2);
  });
}

}  // namespace fixpt::nonexp
