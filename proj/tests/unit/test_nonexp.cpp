#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fixpt/errors.hpp"
#include "fixpt/nonexp/json.hpp"
#include "fixpt/nonexp/map.hpp"
#include "oracle.hpp"

using namespace fixpt;
using namespace fixpt::nonexp;
using fixpt::exactreal::lt_semidecide;

namespace {

Dyadic d(const char* s) { return Dyadic::parse(s); }

DyVec v(std::initializer_list<const char*> xs) {
  DyVec r;
  for (const char* x : xs) r.push_back(Dyadic::parse(x));
  return r;
}

Dyadic random_in(std::mt19937_64& rng, const Dyadic& lo, const Dyadic& hi, int bits = 16) {
  const auto k = static_cast<long>(rng() % ((1UL << bits) + 1));
  return lo + (Dyadic(k) * (hi - lo)).shifted(-bits);
}

DyVec random_point(std::mt19937_64& rng, const Box& K) {
  DyVec x(K.dim());
  for (std::size_t i = 0; i < K.dim(); ++i) x[i] = random_in(rng, K.lo()[i], K.hi()[i]);
  return x;
}

DyVec random_disc(std::mt19937_64& rng) {
  const Box sq(v({"-1", "-1"}), v({"1", "1"}));
  while (true) {
    DyVec x = random_point(rng, sq);
    if (spaces::norm_sq(x) <= Dyadic(1)) return x;
  }
}

std::vector<double> dbl(const DyVec& x) { return spaces::to_doubles(x); }

double dnorm(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double ddot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> dsub(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// Exact projection onto a half-space, in rationals.
std::vector<mpq_class> halfspace_oracle(const HalfSpace& h, const DyVec& x) {
  mpq_class val = oracle::q(h.offset), nn = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    val += oracle::q(h.normal[i]) * oracle::q(x[i]);
    nn += oracle::q(h.normal[i]) * oracle::q(h.normal[i]);
  }
  std::vector<mpq_class> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = oracle::q(x[i]);
    if (val > 0) p[i] -= val / nn * oracle::q(h.normal[i]);
  }
  return p;
}

// ||f(p) - f(q)|| <= L ||p - q|| + 2^-(k-1) over random pairs.
void lipschitz_audit(const MapName& f, const std::function<DyVec()>& sample, int pairs = 1000, int k = 20) {
  const double L = f.lipschitz().to_double();
  const double slack = std::ldexp(1.0, -(k - 1));
  int bad = 0;
  for (int i = 0; i < pairs; ++i) {
    const DyVec p = sample(), q = sample();
    const double lhs = dnorm(dbl(f.eval(p, k)), dbl(f.eval(q, k)));
    if (lhs > L * dnorm(dbl(p), dbl(q)) + slack) ++bad;
  }
  CHECK(bad == 0);
}

// Residual certified as at most 2^-n.
bool residual_small(const MapName& f, const DyVec& x, int n) {
  return residual(f, VecName(x)).query(n + 1) <= Dyadic::pow2(-n - 1) * Dyadic(3);
}

bool residual_positive(const MapName& f, const DyVec& x) {
  return lt_semidecide(Real(), residual(f, VecName(x))).first_fire(200).has_value();
}

}  // namespace

TEST_CASE("domains") {
  const Domain box = Domain::of_box(Box::unit(2));
  CHECK(box.contains(v({"1/2", "1"})));
  CHECK_FALSE(box.contains(v({"1/2", "9/8"})));
  CHECK(box.contains(v({"1/2", "9/8"}), d("1/8")));
  CHECK(box.nearest(v({"2", "-1"})) == v({"1", "0"}));
  CHECK(box.norm_bound() >= 2);

  const Domain disc = Domain::ball(2, Dyadic(1));
  const DyVec far = v({"3", "4"});
  const DyVec n = disc.nearest(far);
  CHECK(disc.contains(n));
  CHECK(std::abs(dnorm(dbl(n), {0.0, 0.0}) - 1.0) < 1e-15);
  CHECK(disc.norm_bound() == 2);
  CHECK_THROWS_AS(Domain::ambient(2).norm_bound(), DomainError);

  const Domain cube = Domain::cube(3);
  CHECK(cube.contains(v({"1", "1/2", "1/4"})));
  CHECK_FALSE(cube.contains(v({"1", "1/2", "1/2"})));
}

TEST_CASE("project_halfspace examples") {
  const HalfSpace h{v({"1", "1"}), d("-1")};
  const MapName P = project_halfspace(h);
  CHECK(P.eval(v({"1", "1"}), 30) == v({"1/2", "1/2"}));
  CHECK(P.eval(v({"1/4", "0"}), 30) == v({"1/4", "0"}));

  // variational inequality against a grid of the half-space
  const DyVec x = v({"1", "1"}), p = P.eval(x, 30);
  int bad = 0;
  for (int i = -8; i <= 8; ++i) {
    for (int j = -8; j <= 8; ++j) {
      const DyVec y{Dyadic(i).shifted(-2), Dyadic(j).shifted(-2)};
      if (h.value(y).sign() > 0) continue;
      if (spaces::dot(x - p, y - p).sign() > 0) ++bad;
    }
  }
  CHECK(bad == 0);

  const MapName I = project_halfspace(HalfSpace{v({"0", "0"}), Dyadic()});
  CHECK(I.eval(v({"5", "-7"}), 10) == v({"5", "-7"}));
  CHECK_THROWS_AS(project_halfspace(HalfSpace{v({"0", "0"}), Dyadic(1)}), InconsistentInput);
}

TEST_CASE("project_halfspace with a non-power-of-two normal") {
  std::mt19937_64 rng(11);
  const HalfSpace h{v({"1", "2", "-3"}), d("-5/8")};
  const MapName P = project_halfspace(h);
  const Box sample(v({"-2", "-2", "-2"}), v({"2", "2", "2"}));
  for (int t = 0; t < 200; ++t) {
    const DyVec x = random_point(rng, sample);
    const auto exact = halfspace_oracle(h, x);
    for (int n : {4, 20, 60}) {
      const DyVec p = P.eval(x, n);
      mpq_class err = 0;
      for (std::size_t i = 0; i < 3; ++i) err += (oracle::q(p[i]) - exact[i]) * (oracle::q(p[i]) - exact[i]);
      REQUIRE(err <= oracle::pow2(-2 * n));
    }
  }
}

TEST_CASE("project_box examples") {
  const MapName P = project_box(Box::unit(2));
  CHECK(P.eval(v({"2", "-1"}), 0) == v({"1", "0"}));
  CHECK(P.eval(v({"1/4", "1/2"}), 0) == v({"1/4", "1/2"}));
  const DyVec x = v({"1/2", "3"}), p = P.eval(x, 0);
  CHECK(p == v({"1/2", "1"}));
  int bad = 0;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const DyVec y{Dyadic(i).shifted(-3), Dyadic(j).shifted(-3)};
      if (spaces::dot(x - p, y - p).sign() > 0) ++bad;
    }
  }
  CHECK(bad == 0);
  REQUIRE(P.image());
  CHECK(P.image()->box == Box::unit(2));
}

TEST_CASE("project_box_halfspace matches a grid minimiser") {
  const Box K = Box::unit(2);
  const HalfSpace h{v({"1", "3"}), d("-1")};
  const MapName P = project_box_halfspace(K, h);
  std::mt19937_64 rng(5);
  const Box sample(v({"-1", "-1"}), v({"2", "2"}));
  for (int t = 0; t < 40; ++t) {
    const DyVec x = random_point(rng, sample);
    const auto p = dbl(P.eval(x, 30));
    const auto xd = dbl(x);
    // grid minimiser of the distance over K ∩ h at spacing 2^-9
    double best = 1e9;
    for (int i = 0; i <= 512; ++i) {
      for (int j = 0; j <= 512; ++j) {
        const double a = i / 512.0, b = j / 512.0;
        if (a + 3 * b > 1) continue;
        best = std::min(best, std::hypot(a - xd[0], b - xd[1]));
      }
    }
    CHECK(p[0] + 3 * p[1] <= 1 + 1e-8);
    CHECK(p[0] >= 0);
    CHECK(p[1] >= 0);
    CHECK(dnorm(p, xd) <= best + 1e-8);
    CHECK(dnorm(p, xd) >= best - 2.0 / 512);
  }
  CHECK_THROWS_AS(project_box_halfspace(K, HalfSpace{v({"1", "0"}), d("1/2")}), InconsistentInput);
}

TEST_CASE("bruck_combine examples") {
  const Domain sq = Domain::of_box(Box(v({"-1", "-1"}), v({"1", "1"})));
  const MapName id = identity_map(sq);
  const MapName all_id = bruck_combine([id](std::int64_t) { return id; }, sq, 2);
  CHECK(all_id.eval(v({"3/8", "-5/8"}), 20) == v({"3/8", "-5/8"}));

  const MapName P1 = project_halfspace(HalfSpace{v({"1", "0"}), Dyadic()});
  const MapName P2 = project_halfspace(HalfSpace{v({"0", "1"}), Dyadic()});
  const MapName f = bruck_combine(
      [=](std::int64_t k) { return k == 0 ? P1 : (k == 1 ? P2 : id); }, sq, 2);
  CHECK(residual_small(f, v({"-1/2", "-1/2"}), 30));
  CHECK(residual_positive(f, v({"1/2", "1/2"})));
  CHECK(residual_positive(f, v({"-1/2", "1/2"})));

  // single map repeated is that map
  const MapName g = bruck_combine(std::vector<MapName>{P1}, 2);
  const DyVec x = v({"3/4", "1/4"});
  CHECK(spaces::norm_sq(g.eval(x, 30) - P1.eval(x, 30)) <= Dyadic::pow2(-58));
  CHECK_THROWS_AS(bruck_combine(std::vector<MapName>{}, 2), InconsistentInput);
}

TEST_CASE("project_back_compose examples") {
  const MapName PK = project_box(Box::unit(1));
  const MapName g = project_halfspace(HalfSpace{v({"1"}), d("-3/4")});
  const MapName f = project_back_compose(PK, g);
  CHECK(f.domain().kind == Domain::Kind::box);
  for (int i = 0; i <= 16; ++i) {
    const DyVec x{Dyadic(i).shifted(-4)};
    if (i <= 12) {
      CHECK(residual_small(f, x, 30));
    } else {
      CHECK(residual_positive(f, x));
    }
  }

  const MapName PK2 = project_box(Box::unit(2));
  const HalfSpace h{v({"1", "1"}), d("-1")};
  const MapName f2 = project_back_compose(PK2, project_halfspace(h));
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 8; ++j) {
      const DyVec x{Dyadic(i).shifted(-3), Dyadic(j).shifted(-3)};
      if (h.value(x).sign() <= 0) {
        CHECK(residual_small(f2, x, 30));
      } else {
        CHECK(residual_positive(f2, x));
      }
    }
  }
  // a self-map of K is left alone
  const MapName self = project_back_compose(PK2, identity_map(Domain::of_box(Box::unit(2))));
  CHECK(self.eval(v({"1/8", "7/8"}), 10) == v({"1/8", "7/8"}));
  CHECK_THROWS_AS(project_back_compose(g, g), DomainError);
}

TEST_CASE("firmly_wrap examples and firmness") {
  const Domain I = Domain::of_box(Box::unit(1));
  CHECK(firmly_wrap(identity_map(I)).eval(v({"3/8"}), 10) == v({"3/8"}));
  const MapName zero(I, Dyadic(), [](const DyVec& x, Precision) { return spaces::zeros(x.size()); });
  CHECK(firmly_wrap(zero).eval(v({"3/4"}), 10) == v({"3/8"}));
  const MapName clamp = compose(project_box(Box(v({"1/4"}), v({"3/4"}))), identity_map(I));
  const MapName f = firmly_wrap(clamp);
  CHECK(f.eval(v({"0"}), 10) == v({"1/8"}));

  std::mt19937_64 rng(3);
  const Box sq(v({"-1", "-1"}), v({"1", "1"}));
  const MapName P = project_halfspace(HalfSpace{v({"1", "3"}), d("-1/2")});
  const MapName fw = firmly_wrap(P);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const DyVec x = random_point(rng, sq), y = random_point(rng, sq);
    const auto fx = dbl(fw.eval(x, 24)), fy = dbl(fw.eval(y, 24));
    const auto df = dsub(fx, fy);
    if (ddot(df, df) - ddot(dsub(dbl(x), dbl(y)), df) > std::ldexp(1.0, -20)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("uniqueness delta separates near minimisers") {
  CHECK(uniqueness_delta(0, 0) == Dyadic::pow2(-4));
  CHECK(uniqueness_delta(3, 1) == Dyadic::pow2(-11));
  CHECK(uniqueness_delta(3, 2) == Dyadic::pow2(-12));
  // parallelogram bound: ||p - q||^2 <= 4 delta (2 d + delta) < 4^-n
  for (int n = 0; n < 20; ++n) {
    for (std::int64_t dist : {0, 1, 3, 7, 100}) {
      const mpq_class del = oracle::q(uniqueness_delta(n, dist));
      CHECK(4 * del * (2 * dist + del) < oracle::pow2(-2 * n));
    }
  }
}

TEST_CASE("project_located_convex examples") {
  const spaces::ProjectionParams params = spaces::hilbert_projection_params(1);
  {
    const Box K(v({"1/4"}), v({"3/4"}));
    // exact distance for dyadic points
    LocatedConvex L{spaces::DenseSeq::box_grid(K), [K](const VecName& x) {
                      REQUIRE(x.exact());
                      return spaces::distance(x, VecName(K.clamp(*x.exact())));
                    }};
    const DyVec p = project_located_convex(L, VecName(v({"0"})), params, 8);
    CHECK(oracle::within(p[0], mpq_class(1, 4), 8));
    const DyVec inside = v({"37/128"});
    const DyVec pi = project_located_convex(L, VecName(inside), params, 6);
    CHECK(oracle::within(pi[0], oracle::q(inside[0]), 6));
  }
  {
    const Box K = Box::unit(2);
    const HalfSpace h{v({"1", "1"}), d("-1")};
    const MapName exact = project_box_halfspace(K, h);
    const auto grid = spaces::DenseSeq::box_grid(K).filtered(
        [h](const DyVec& y) { return h.value(y).sign() <= 0; }, 1'000'000);
    LocatedConvex L{grid, [exact](const VecName& x) { return spaces::distance(x, exact.apply(x)); }};
    for (const DyVec& x : {v({"1", "1"}), v({"1", "0"}), v({"-1/2", "1/4"}), v({"3/2", "-1"})}) {
      const DyVec p = project_located_convex(L, VecName(x), params, 4);
      const DyVec e = exact.eval(x, 40);
      CHECK(dnorm(dbl(p), dbl(e)) < 1.0 / 16);
    }
  }
  spaces::ProjectionParams bad = params;
  bad.mu = [](Precision n) { return n; };
  const Box K = Box::unit(1);
  LocatedConvex L{spaces::DenseSeq::box_grid(K),
                  [K](const VecName& x) { return spaces::distance(x, VecName(K.clamp(*x.exact()))); }};
  CHECK_THROWS_AS(project_located_convex(L, VecName(v({"2"})), bad, 5), DomainError);
  // inconsistent distance data: claims 0 for a point far from the sequence
  LocatedConvex liar{spaces::DenseSeq::from_points({v({"0"})}), [](const VecName&) { return Real(); }};
  CHECK_THROWS_AS(project_located_convex(liar, VecName(v({"1"})), params, 3, 6), BudgetExhausted);
}

TEST_CASE("chidume map examples") {
  const MapName f = chidume_mutangadura_map();
  CHECK(f.lipschitz() == Dyadic(5));
  CHECK(f.eval(v({"0", "0"}), 20) == v({"0", "0"}));
  for (int n : {4, 20, 40}) {
    const DyVec a = f.eval(v({"1/2", "0"}), n);
    CHECK(oracle::within(a[0], mpq_class(1, 2), n));
    CHECK(oracle::within(a[1], mpq_class(1, 2), n));
    const DyVec b = f.eval(v({"1", "0"}), n);
    CHECK(oracle::within(b[0], 0, n));
    CHECK(oracle::within(b[1], 1, n));
  }
  // outer branch against a double evaluation of the formula
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const DyVec x = random_disc(rng);
    const auto xd = dbl(x);
    const double r = std::hypot(xd[0], xd[1]);
    std::vector<double> want{xd[0] - xd[1], xd[1] + xd[0]};
    if (r > 0.5) want = {xd[0] / r - xd[0] - xd[1], xd[1] / r - xd[1] + xd[0]};
    CHECK(dnorm(dbl(f.eval(x, 30)), want) < 1e-8);
  }
}

TEST_CASE("residual examples") {
  const Domain I = Domain::of_box(Box::unit(1));
  CHECK(residual(identity_map(I), VecName(v({"5/16"}))).query(30) == Dyadic());
  const MapName clamp = project_box(Box(v({"1/4"}), v({"3/4"})));
  CHECK(oracle::within(residual(clamp, VecName(v({"0"}))).query(30), mpq_class(1, 4), 30));
  const MapName P = project_halfspace(HalfSpace{v({"1", "1"}), d("-1")});
  const Dyadic r = residual(P, VecName(v({"1", "1"}))).query(40);
  CHECK(oracle::within(r, oracle::newton_sqrt(mpq_class(1, 2), 50), 40));
}

TEST_CASE("Lipschitz audit") {
  std::mt19937_64 rng(21);
  const Box cube3 = Box(v({"-2", "-2", "-2"}), v({"2", "2", "2"}));
  auto in3 = [&] { return random_point(rng, cube3); };
  lipschitz_audit(project_halfspace(HalfSpace{v({"1", "-2", "3"}), d("1/2")}), in3);
  lipschitz_audit(project_box(Box::unit(3)), in3);
  lipschitz_audit(project_box_halfspace(Box::unit(3), HalfSpace{v({"1", "1", "1"}), d("-1")}), in3, 300);
  const auto P = project_halfspace(HalfSpace{v({"0", "1", "0"}), d("-1/4")});
  const auto Q = project_halfspace(HalfSpace{v({"1", "0", "1"}), Dyadic()});
  lipschitz_audit(bruck_combine(std::vector<MapName>{P, Q}, 4), in3, 300);
  lipschitz_audit(firmly_wrap(P), in3);
  auto in_disc = [&] { return random_disc(rng); };
  lipschitz_audit(chidume_mutangadura_map(), in_disc);
}

TEST_CASE("projections are nonexpansive and satisfy the variational inequality") {
  std::mt19937_64 rng(31);
  const Box wide(v({"-2", "-2", "-2"}), v({"2", "2", "2"}));
  const Box K = Box::unit(3);
  const HalfSpace h{v({"1", "2", "-1"}), d("-1/2")};
  const std::vector<MapName> maps{project_halfspace(h), project_box(K), project_box_halfspace(K, h)};
  const std::vector<std::function<bool(const DyVec&)>> member{
      [&](const DyVec& y) { return h.value(y).sign() <= 0; }, [&](const DyVec& y) { return K.contains(y); },
      [&](const DyVec& y) { return K.contains(y) && h.value(y).sign() <= 0; }};
  for (std::size_t m = 0; m < maps.size(); ++m) {
    int bad_vi = 0, bad_ne = 0;
    for (int t = 0; t < 50; ++t) {
      const DyVec x = random_point(rng, wide), x2 = random_point(rng, wide);
      const auto p = dbl(maps[m].eval(x, 30)), p2 = dbl(maps[m].eval(x2, 30));
      if (dnorm(p, p2) > dnorm(dbl(x), dbl(x2)) + 1e-8) ++bad_ne;
      const auto r = dsub(dbl(x), p);
      for (int s = 0; s < 50; ++s) {
        const DyVec y = random_point(rng, wide);
        if (!member[m](y)) continue;
        if (ddot(r, dsub(dbl(y), p)) > std::ldexp(1.0, -20)) ++bad_vi;
      }
    }
    CHECK(bad_vi == 0);
    CHECK(bad_ne == 0);
  }
}

TEST_CASE("chidume map is pseudocontractive") {
  std::mt19937_64 rng(41);
  const MapName f = chidume_mutangadura_map();
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const DyVec x = random_disc(rng), y = random_disc(rng);
    const auto dx = dsub(dbl(x), dbl(y));
    const auto df = dsub(dbl(f.eval(x, 30)), dbl(f.eval(y, 30)));
    if (ddot(df, dx) - ddot(dx, dx) > std::ldexp(1.0, -20)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("map spec json") {
  const auto j = nlohmann::json::parse(R"({"kind":"compose",
    "outer":{"kind":"box-proj","box":{"lo":[0,0],"hi":[1,1]}},
    "inner":{"kind":"bruck","bound":2,"maps":[
      {"kind":"halfspace-proj","normal":[1,1],"offset":-1},
      {"kind":"firm","map":{"kind":"halfspace-proj","normal":[0,1],"offset":"-3/4"}}]}})");
  const MapSpec s = parse_map_spec(j, "map");
  CHECK(parse_map_spec(to_json(s), "map") == s);
  const MapName f = build_map(s);
  CHECK(f.domain().kind == Domain::Kind::box);
  CHECK(residual_small(f, v({"1/4", "1/2"}), 20));
  CHECK(residual_positive(f, v({"1", "1"})));

  auto error_path = [](const char* text) {
    try {
      build_map(parse_map_spec(nlohmann::json::parse(text), "map"));
    } catch (const SpecError& e) {
      return e.path();
    }
    return std::string("none");
  };
  CHECK(error_path(R"({"kind":"spiral"})") == "map.kind");
  CHECK(error_path(R"({"kind":"box-proj"})") == "map.box");
  CHECK(error_path(R"({"kind":"box-proj","box":{"lo":[1],"hi":[0]}})") == "map.box");
  CHECK(error_path(R"({"kind":"bruck","maps":[{"kind":"chidume"},{"kind":"box-proj","box":{"lo":[0],"hi":[1]}}]})") ==
        "map.maps[1]");
  CHECK(error_path(R"({"kind":"bruck","maps":[{"kind":"halfspace-proj","normal":[0],"offset":1}]})") ==
        "map.maps[0]");
  CHECK(error_path(R"({"kind":"firm","map":{"kind":"halfspace-proj","normal":["x"],"offset":1}})") ==
        "map.map");
  CHECK(error_path(R"({"kind":"chidume","extra":1})") == "map.extra");
}
