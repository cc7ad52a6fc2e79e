#include "fixpt/iterate/iterate.hpp"

#include <algorithm>

#include "fixpt/errors.hpp"
#include "fixpt/exactreal/json.hpp"

namespace fixpt::iterate {

using spaces::norm_sq;
using spaces::round_vec;
using spaces::operator+;
using spaces::operator-;
using spaces::operator*;

namespace {

std::int64_t ceil_log2_int(std::int64_t v) {
  std::int64_t k = 0;
  while ((std::int64_t{1} << k) < v) ++k;
  return k;
}

void check_start(const MapName& f, const DyVec& x0, std::int64_t N) {
  if (N < 0) throw DomainError("negative step count");
  if (x0.size() != f.dim()) throw DimensionMismatch("start point dimension differs from the map");
  if (!f.domain().contains(x0)) throw DomainError("start point lies outside the domain");
}

struct Stepper {
  const MapName& f;
  Precision p;
  Dyadic escape_tol;

  // f(x) within 2^-p, checked against the domain.
  DyVec image(const DyVec& x) const {
    DyVec fx = f.eval(x, p);
    if (!f.domain().contains(fx, escape_tol)) {
      throw DomainError("map output leaves its domain: not a self-map");
    }
    return fx;
  }

  DyVec settle(const DyVec& y) const { return f.domain().nearest(round_vec(y, p + 1)); }

  Dyadic residual(const DyVec& x, const DyVec& fx) const { return exactreal::sqrt_floor(norm_sq(fx - x), p); }
};

IterationTrace run(const MapName& f, const DyVec& x0, std::int64_t N, Precision precision, const std::string& scheme,
                   const std::function<DyVec(std::int64_t, const DyVec&, const DyVec&, const Stepper&)>& next) {
  check_start(f, x0, N);
  IterationTrace t;
  t.scheme = scheme;
  t.start = x0;
  if (precision < 0) throw DomainError("negative precision");
  t.precision = precision > 0 ? precision : schedule_precision(N, f.dim());
  const Stepper st{f, t.precision, Dyadic::pow2(-(t.precision - 2))};
  t.points.reserve(static_cast<std::size_t>(N) + 1);
  t.residuals.reserve(static_cast<std::size_t>(N) + 1);
  DyVec x = x0;
  for (std::int64_t n = 0;; ++n) {
    const DyVec fx = st.image(x);
    t.points.push_back(x);
    t.residuals.push_back(st.residual(x, fx));
    if (n == N) break;
    x = next(n, x, fx, st);
  }
  return t;
}

// Some pair in the tail from start whose squared distance exceeds bound_sq.
std::optional<Violation> cauchy_violation(const std::vector<DyVec>& points, std::int64_t start, const Dyadic& bound_sq) {
  const auto size = static_cast<std::int64_t>(points.size());
  const std::size_t d = points.front().size();
  // bounding box of the tail; its diagonal bounds every pairwise distance
  std::vector<std::int64_t> arg_lo(d, start), arg_hi(d, start);
  for (std::int64_t l = start + 1; l < size; ++l) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto& c = points[static_cast<std::size_t>(l)][i];
      if (c < points[static_cast<std::size_t>(arg_lo[i])][i]) arg_lo[i] = l;
      if (points[static_cast<std::size_t>(arg_hi[i])][i] < c) arg_hi[i] = l;
    }
  }
  Dyadic diag_sq;
  for (std::size_t i = 0; i < d; ++i) {
    const Dyadic w = points[static_cast<std::size_t>(arg_hi[i])][i] - points[static_cast<std::size_t>(arg_lo[i])][i];
    diag_sq += w * w;
  }
  if (diag_sq <= bound_sq) return std::nullopt;
  auto far = [&](std::int64_t a, std::int64_t b) {
    return bound_sq < norm_sq(points[static_cast<std::size_t>(a)] - points[static_cast<std::size_t>(b)]);
  };
  // extremes along an axis first, then every pair
  for (std::size_t i = 0; i < d; ++i) {
    if (far(arg_lo[i], arg_hi[i])) return Violation{0, std::max(arg_lo[i], arg_hi[i]), std::min(arg_lo[i], arg_hi[i]), {}};
  }
  if (d == 1) return std::nullopt;
  for (std::int64_t l = start; l < size; ++l) {
    for (std::int64_t m = l + 1; m < size; ++m) {
      if (far(l, m)) return Violation{0, m, l, {}};
    }
  }
  return std::nullopt;
}

}  // namespace

Precision schedule_precision(std::int64_t N, std::size_t dim) {
  const std::int64_t root_bits = (ceil_log2_int(static_cast<std::int64_t>(std::max<std::size_t>(dim, 1))) + 1) / 2;
  return static_cast<Precision>(20 + ceil_log2_int(std::max<std::int64_t>(N, 1)) + root_bits + 2);
}

IterationTrace mann(const MapName& f, const DyVec& x0, const Alphas& alphas, std::int64_t N, Precision precision) {
  if (!alphas) throw DomainError("no step sizes");
  IterationTrace t = run(f, x0, N, precision, "mann", [&](std::int64_t n, const DyVec& x, const DyVec& fx, const Stepper& st) {
    const Dyadic a = alphas(n);
    if (a.sign() <= 0 || Dyadic(1) <= a) throw DomainError("step size outside (0,1) at n = " + std::to_string(n));
    return st.settle((Dyadic(1) - a) * x + a * fx);
  });
  return t;
}

IterationTrace krasnoselski(const MapName& f, const DyVec& x0, std::int64_t N, Precision precision) {
  IterationTrace t = mann(f, x0, [](std::int64_t) { return Dyadic::pow2(-1); }, N, precision);
  t.params["alpha"] = exactreal::dual(Dyadic::pow2(-1));
  return t;
}

IterationTrace halpern(const MapName& f, const DyVec& x0, std::int64_t N, std::optional<DyVec> anchor,
                       Precision precision) {
  const DyVec y = anchor ? *anchor : x0;
  if (y.size() != f.dim()) throw DimensionMismatch("anchor dimension differs from the map");
  if (!f.domain().contains(y)) throw DomainError("anchor lies outside the domain");
  IterationTrace t = run(f, x0, N, precision, "halpern", [&](std::int64_t n, const DyVec&, const DyVec& fx, const Stepper& st) {
    // 1/(n+2) rounded to p+2 bits; the combination stays convex
    const Dyadic b = exactreal::div_approx(Dyadic(1), Dyadic(n + 2), st.p + 2);
    return st.settle(b * y + (Dyadic(1) - b) * fx);
  });
  t.anchor = y;
  return t;
}

IterationTrace reich(const MapName& f, const DyVec& x0, std::int64_t N, Precision precision) {
  IterationTrace t = run(f, x0, N, precision, "reich", [&](std::int64_t n, const DyVec&, const DyVec& fx, const Stepper& st) {
    // 1 - a_n = (n+2)^-1/2
    const Dyadic c = exactreal::sqrt(Real::ratio(1, static_cast<long>(n + 2))).query(st.p + 2);
    return st.settle(c * x0 + (Dyadic(1) - c) * fx);
  });
  t.anchor = x0;
  return t;
}

std::optional<std::int64_t> metastability_witness(const std::vector<DyVec>& points, const Adversary& g, int n,
                                                  std::int64_t k_max) {
  const Dyadic bound_sq = Dyadic::pow2(-2 * n);
  const auto size = static_cast<std::int64_t>(points.size());
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const std::int64_t w = g(k);
    if (w < 0) throw DomainError("adversary returned a negative window");
    if (k + w >= size) return std::nullopt;
    bool stable = true;
    if (!points.empty() && points.front().size() == 1) {
      Dyadic lo = points[static_cast<std::size_t>(k)][0], hi = lo;
      for (std::int64_t i = k; i <= k + w; ++i) {
        lo = min(lo, points[static_cast<std::size_t>(i)][0]);
        hi = max(hi, points[static_cast<std::size_t>(i)][0]);
      }
      stable = (hi - lo) * (hi - lo) < bound_sq;
    } else {
      for (std::int64_t i = k; i <= k + w && stable; ++i) {
        for (std::int64_t j = i + 1; j <= k + w && stable; ++j) {
          stable = norm_sq(points[static_cast<std::size_t>(i)] - points[static_cast<std::size_t>(j)]) < bound_sq;
        }
      }
    }
    if (stable) return k;
  }
  return std::nullopt;
}

RateReport certify_rate(const std::vector<DyVec>& points, const Rate& phi, const std::optional<VecName>& limit,
                        int n_max) {
  RateReport report;
  const auto size = static_cast<std::int64_t>(points.size());
  for (int n = 0; n <= n_max; ++n) {
    const std::int64_t start = std::max<std::int64_t>(phi(n), 0);
    if (limit) {
      const Precision q = n + 8;
      const Dyadic tol = Dyadic::pow2(-q);
      const DyVec lq = limit->query(q);
      for (std::int64_t l = start; l < size; ++l) {
        const Dyadic lb = spaces::norm_lb(points[static_cast<std::size_t>(l)] - lq, q) - tol;
        if (Dyadic::pow2(-n) < lb) {
          report.violation = Violation{n, l, -1, lb};
          return report;
        }
      }
    } else if (start < size) {
      const Dyadic bound_sq = Dyadic::pow2(-2 * (n - 1));
      if (auto v = cauchy_violation(points, start, bound_sq)) {
        v->n = n;
        v->distance_lb = spaces::norm_lb(points[static_cast<std::size_t>(v->index)] -
                                             points[static_cast<std::size_t>(v->other)],
                                         n + 8);
        report.violation = v;
        return report;
      }
    }
    report.checked_upto = n;
  }
  return report;
}

Rate contraction_rate(const Dyadic& L, const Dyadic& D) {
  if (L.sign() < 0 || Dyadic(1) <= L) throw DomainError("contraction constant must lie in [0,1)");
  if (D.sign() < 0) throw DomainError("negative distance bound");
  return [L, D](int n) {
    const Dyadic target = Dyadic::pow2(-n);
    Dyadic v = D;
    std::int64_t m = 0;
    while (target < v) {
      v = (v * L).ceil_to(n + 64);
      ++m;
    }
    return m;
  };
}

void write_trace_csv(std::ostream& out, const IterationTrace& t) {
  const std::size_t d = t.points.empty() ? 0 : t.points.front().size();
  out << "n";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i;
  out << ",residual";
  for (std::size_t i = 0; i < d; ++i) out << ",x" << i << "_exact";
  out << ",residual_exact\n";
  for (std::size_t n = 0; n < t.points.size(); ++n) {
    out << n;
    for (const auto& c : t.points[n]) out << ',' << c.decimal();
    out << ',' << t.residuals[n].decimal();
    for (const auto& c : t.points[n]) out << ',' << c.str();
    out << ',' << t.residuals[n].str() << '\n';
  }
}

}  // namespace fixpt::iterate
