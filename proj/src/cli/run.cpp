#include "fixpt/cli/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixpt/iterate/iterate.hpp"
#include "fixpt/synth/json.hpp"

namespace fixpt::cli {

using exactreal::dual;
using exactreal::Real;
using iterate::IterationTrace;
using nlohmann::json;
using spaces::dot;
using spaces::norm_sq;
using spaces::operator+;
using spaces::operator-;
using spaces::operator*;

namespace {

// Points on a 2^-16 grid, reproducible from the seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Dyadic between(const Dyadic& lo, const Dyadic& hi) {
    std::uniform_int_distribution<std::int64_t> k(0, std::int64_t{1} << 16);
    return lo + (hi - lo) * Dyadic(k(rng_)).shifted(-16);
  }

  DyVec in(const Domain& d) {
    if (d.kind == Domain::Kind::box || d.kind == Domain::Kind::cube) {
      DyVec x(d.dim);
      for (std::size_t i = 0; i < d.dim; ++i) x[i] = between(d.box.lo()[i], d.box.hi()[i]);
      return x;
    }
    const Dyadic r = d.kind == Domain::Kind::ball ? d.radius : Dyadic(1);
    for (;;) {
      DyVec x(d.dim);
      for (auto& c : x) c = between(-r, r);
      if (norm_sq(x) <= r * r) return x;
    }
  }

 private:
  std::mt19937_64 rng_;
};

json dual_vec(const DyVec& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(dual(c));
  return a;
}

json make_report(const std::string& scheme, const ScenarioSpec& s) {
  return json{{"scheme", scheme}, {"params", json::object()}, {"witness", nullptr},
              {"violations", json::array()}, {"seed", s.seed}, {"status", "ok"}};
}

DyVec default_start(const Domain& d) {
  if (d.kind == Domain::Kind::box || d.kind == Domain::Kind::cube) return d.box.lo();
  return spaces::zeros(d.dim);
}

IterationTrace run_iteration(const MapName& f, const IterateParams& p) {
  const DyVec x0 = p.start ? *p.start : default_start(f.domain());
  if (p.scheme == "mann") {
    IterationTrace t = iterate::mann(f, x0, [a = p.alpha](std::int64_t) { return a; }, p.steps, p.precision);
    t.params["alpha"] = dual(p.alpha);
    return t;
  }
  if (p.scheme == "halpern") return iterate::halpern(f, x0, p.steps, p.anchor, p.precision);
  if (p.scheme == "reich") return iterate::reich(f, x0, p.steps, p.precision);
  return iterate::krasnoselski(f, x0, p.steps, p.precision);
}

json trace_params(const IterationTrace& t) {
  json p = t.params;
  p["steps"] = t.steps();
  p["precision"] = t.precision;
  p["start"] = dual_vec(t.start);
  if (!t.anchor.empty()) p["anchor"] = dual_vec(t.anchor);
  return p;
}

json trace_witness(const IterationTrace& t) {
  return json{{"final", dual_vec(t.points.back())}, {"residual", dual(t.residuals.back())}};
}

std::string trace_csv(const IterationTrace& t) {
  std::ostringstream out;
  iterate::write_trace_csv(out, t);
  return out.str();
}

json violation_json(const iterate::Violation& v) {
  json j{{"n", v.n}, {"index", v.index}, {"distance_lb", dual(v.distance_lb)}};
  if (v.other >= 0) j["other"] = v.other;
  return j;
}

void add_artifact(RunResult& r, std::string name, std::string content) { r.artifacts.push_back({std::move(name), std::move(content)}); }

void run_iterate(const ScenarioSpec& s, RunResult& r) {
  const MapName f = build_scenario_map(s);
  const IterationTrace t = run_iteration(f, s.iterate);
  r.report["scheme"] = t.scheme;
  r.report["params"] = trace_params(t);
  r.report["witness"] = trace_witness(t);
  add_artifact(r, "trace.csv", trace_csv(t));
}

void run_metastable(const ScenarioSpec& s, RunResult& r) {
  const MapName f = build_scenario_map(s);
  const IterationTrace t = run_iteration(f, s.iterate);
  const MetastableParams& m = s.metastable;
  const std::int64_t k_max = m.k_max.value_or(static_cast<std::int64_t>(t.steps()));
  const auto k = iterate::metastability_witness(
      t.points, [&](std::int64_t i) { return m.mul * i + m.add; }, m.n, k_max);
  r.report["scheme"] = "metastable/" + t.scheme;
  json params = trace_params(t);
  params["n"] = m.n;
  params["g"] = {{"mul", m.mul}, {"add", m.add}};
  params["k_max"] = k_max;
  r.report["params"] = params;
  add_artifact(r, "trace.csv", trace_csv(t));
  if (!k) {
    r.status = exit_budget;
    r.report["status"] = "budget exhausted";
    r.report["message"] = "no metastability witness up to k_max within the trace";
    return;
  }
  r.report["witness"] = {{"k", *k}, {"window", {*k, *k + m.mul * *k + m.add}}};
}

void run_certify(const ScenarioSpec& s, RunResult& r) {
  const MapName f = build_scenario_map(s);
  const IterationTrace t = run_iteration(f, s.iterate);
  const RateParams& p = s.rate;
  iterate::Rate phi;
  if (p.L) {
    phi = iterate::contraction_rate(*p.L, *p.D);
  } else {
    phi = [table = p.table](int n) { return table.empty() ? 0 : table[static_cast<std::size_t>(n)]; };
  }
  std::optional<spaces::VecName> limit;
  if (p.limit) limit = spaces::VecName(*p.limit);
  const iterate::RateReport rep = iterate::certify_rate(t.points, phi, limit, p.n_max);
  r.report["scheme"] = "certify-rate/" + t.scheme;
  json params = trace_params(t);
  params["n_max"] = p.n_max;
  json rate = json::array();
  for (int n = 0; n <= p.n_max; ++n) rate.push_back(phi(n));
  params["phi"] = rate;
  params["form"] = limit ? "limit" : "cauchy";
  r.report["params"] = params;
  r.report["witness"] = {{"checked_upto", rep.checked_upto}, {"final", dual_vec(t.points.back())}};
  if (rep.violation) r.report["violations"].push_back(violation_json(*rep.violation));
  add_artifact(r, "trace.csv", trace_csv(t));
}

json fixed_set_summary(const ScenarioSpec& s, const MapName& f) {
  const ScenarioMap& m = *s.map;
  if (m.kind == "interval") return {{"interval", {dual(m.a), dual(m.b)}}};
  if (m.kind == "specker") {
    const auto [a, b] = synth::specker_endpoints(m.e1, m.e2);
    const Stage st = s.report_precision;
    return {{"interval_at_stage", st}, {"interval", {dual(a.at(st)), dual(b.at(st))}}};
  }
  if (m.kind == "polytope") {
    const auto p = synth::polytope_probe({s.domain->box, m.halfspaces});
    return {{"probe", p ? dual_vec(*p) : json(nullptr)}};
  }
  if (m.kind == "cube-family") {
    json coords = json::array();
    for (std::size_t k = 0; k < f.dim(); ++k) {
      const auto ik = static_cast<std::int64_t>(k);
      if (m.e1.first_stage(ik, s.report_precision)) {
        coords.push_back(dual(Dyadic()));
      } else if (m.e2.first_stage(ik, s.report_precision)) {
        coords.push_back(dual(Dyadic::pow2(-ik)));
      } else {
        coords.push_back("free");
      }
    }
    return {{"coordinates", coords}, {"stage", s.report_precision}};
  }
  if (m.kind == "chidume") return {{"fixed_point", dual_vec(spaces::zeros(2))}};
  return nullptr;
}

void run_synth(const ScenarioSpec& s, RunResult& r) {
  const MapName f = build_scenario_map(s);
  r.report["scheme"] = "synth/" + s.map->kind;
  r.report["params"] = {{"kind", s.map->kind}, {"dim", f.dim()}, {"domain", f.domain().kind_name()},
                        {"lipschitz", dual(f.lipschitz())}, {"samples", 16}};
  r.report["witness"] = fixed_set_summary(s, f);
  // residuals at seeded sample points
  Sampler sampler(s.seed);
  const Precision p = s.report_precision;
  std::ostringstream csv;
  for (std::size_t i = 0; i < f.dim(); ++i) csv << "x" << i << ",";
  for (std::size_t i = 0; i < f.dim(); ++i) csv << "f" << i << ",";
  csv << "residual\n";
  for (int k = 0; k < 16; ++k) {
    const DyVec x = sampler.in(f.domain());
    const DyVec fx = f.eval(x, p);
    for (const auto& c : x) csv << c.decimal() << ",";
    for (const auto& c : fx) csv << c.decimal() << ",";
    csv << exactreal::sqrt_floor(norm_sq(fx - x), p).decimal() << "\n";
  }
  add_artifact(r, "samples.csv", csv.str());
}

void run_enumerate(const ScenarioSpec& s, RunResult& r) {
  const MapName f = build_scenario_map(s);
  if (f.domain().kind != Domain::Kind::box) throw SpecError("map", "half-space enumeration needs a map on a box");
  const Box& K = f.domain().box;
  synth::HalfspaceEnumerator en(f, K, spaces::DenseSeq::box_grid(K), {s.enumerate.max_level, s.enumerate.stage_budget});
  std::ostringstream lines;
  std::int64_t emitted = 0;
  while (auto e = en.next()) {
    lines << synth::emission_json(*e).dump() << "\n";
    ++emitted;
  }
  r.report["scheme"] = "enumerate-halfspaces";
  r.report["params"] = {{"max_level", s.enumerate.max_level}, {"stage_budget", s.enumerate.stage_budget}};
  r.report["witness"] = {{"emitted", emitted}, {"stages", en.stages()}, {"pending", en.pending()}};
  add_artifact(r, "halfspaces.jsonl", lines.str());
}

// Smallest l with every pair of prefix points from l on within 2^-(n-1): the
// tightest Cauchy rate the first r stages can certify.
std::vector<std::int64_t> prefix_rate(const std::vector<Dyadic>& xs, std::int64_t r, int n_max) {
  std::vector<std::int64_t> phi;
  for (int n = 0; n <= n_max; ++n) {
    const Dyadic bound = Dyadic::pow2(-(n - 1));
    std::int64_t l = r - 1;
    Dyadic lo = xs[static_cast<std::size_t>(l)], hi = lo;
    while (l > 0) {
      const Dyadic& c = xs[static_cast<std::size_t>(l - 1)];
      if (bound < max(hi, c) - min(lo, c)) break;
      lo = min(lo, c);
      hi = max(hi, c);
      --l;
    }
    phi.push_back(l);
  }
  return phi;
}

void demo_specker(const ScenarioSpec& s, RunResult& r) {
  const DemoParams& d = s.demo;
  Enumeration e1 = Enumeration::table({{d.index, d.delay}}), e2;
  if (s.map && s.map->kind == "specker") {
    e1 = s.map->e1;
    e2 = s.map->e2;
  }
  const Stage prefix = d.rate_prefix.value_or(d.delay);
  const auto [a, b] = synth::specker_endpoints(e1, e2);
  // the lower name of a, read stage by stage
  const Stage horizon = 2 * d.delay + 1;
  std::vector<Dyadic> xs;
  std::vector<DyVec> points;
  for (Stage st = 0; st <= horizon; ++st) {
    xs.push_back(a.at(st));
    points.push_back({xs.back()});
  }
  const auto phi = prefix_rate(xs, prefix, d.n_max);
  const iterate::RateReport rep = iterate::certify_rate(
      points, [&](int n) { return phi[static_cast<std::size_t>(n)]; }, std::nullopt, d.n_max);
  r.report["scheme"] = "demo/specker";
  r.report["params"] = {{"delay", d.delay}, {"rate_prefix", prefix}, {"n_max", d.n_max}, {"horizon", horizon},
                        {"e1", e1}, {"e2", e2}};
  r.report["witness"] = {{"rate", phi}, {"a_at_horizon", dual(xs.back())}, {"b_at_horizon", dual(b.at(horizon))},
                         {"checked_upto", rep.checked_upto}};
  if (rep.violation) {
    json v = violation_json(*rep.violation);
    v["after_delay"] = rep.violation->index >= d.delay;
    r.report["violations"].push_back(v);
  }
  std::ostringstream csv;
  csv << "stage,a,a_exact\n";
  for (std::size_t st = 0; st < xs.size(); ++st) csv << st << "," << xs[st].decimal() << "," << xs[st].str() << "\n";
  add_artifact(r, "sequence.csv", csv.str());
}

void demo_cube(const ScenarioSpec& s, RunResult& r) {
  Enumeration alpha = Enumeration::table({{0, 2}, {2, 4}}), beta = Enumeration::table({{1, 3}, {3, 1}});
  if (s.map && s.map->kind == "cube-family") {
    alpha = s.map->e1;
    beta = s.map->e2;
  }
  std::size_t dim = 4;
  if (s.domain && s.domain->type == "cube") dim = s.domain->dim;
  for (const auto& [k, st] : alpha.entries()) dim = std::max(dim, static_cast<std::size_t>(k) + 1);
  for (const auto& [k, st] : beta.entries()) dim = std::max(dim, static_cast<std::size_t>(k) + 1);
  const MapName f = synth::cube_no_computable_fix(alpha, beta, dim);
  DyVec x0(dim);
  for (std::size_t k = 0; k < dim; ++k) x0[k] = Dyadic::pow2(-static_cast<std::int64_t>(k) - 1);
  IterateParams ip = s.iterate;
  ip.scheme = "km";
  ip.start = x0;
  const IterationTrace t = run_iteration(f, ip);
  const DyVec& x = t.points.back();
  std::vector<Real> coords(x.begin(), x.end());
  const auto sides = synth::separate_cube_indices(coords);
  const Dyadic tol(Dyadic::pow2(-14));  // below 10^-4
  json classes = json::array();
  for (std::size_t k = 0; k < dim; ++k) {
    const auto ik = static_cast<std::int64_t>(k);
    const bool a = alpha.first_stage(ik, t.precision).has_value();
    const bool b = beta.first_stage(ik, t.precision).has_value();
    const char* side = sides[k] == synth::CubeSide::alpha_side ? "alpha" : "beta";
    classes.push_back(side);
    if (!a && !b) continue;
    const Dyadic target = a ? Dyadic() : Dyadic::pow2(-ik);
    if (tol < (x[k] - target).abs()) {
      r.report["violations"].push_back({{"index", ik}, {"kind", "not converged"}, {"value", dual(x[k])}, {"target", dual(target)}});
    }
    if ((a && sides[k] != synth::CubeSide::alpha_side) || (b && sides[k] != synth::CubeSide::beta_side)) {
      r.report["violations"].push_back({{"index", ik}, {"kind", "misclassified"}, {"side", side}});
    }
  }
  r.report["scheme"] = "demo/cube";
  json params = trace_params(t);
  params["alpha"] = alpha;
  params["beta"] = beta;
  params["dim"] = dim;
  r.report["params"] = params;
  r.report["witness"] = {{"final", dual_vec(x)}, {"sides", classes}};
  add_artifact(r, "trace.csv", trace_csv(t));
}

void demo_pseudo(const ScenarioSpec& s, RunResult& r) {
  const MapName f = nonexp::chidume_mutangadura_map();
  Sampler sampler(s.seed);
  const Precision p = s.report_precision;
  const Dyadic slack = Dyadic::pow2(-20);
  const Dyadic L = Dyadic(5) + Dyadic::pow2(-10);
  double max_ratio = 0;
  for (std::int64_t i = 0; i < s.demo.pairs; ++i) {
    const DyVec x = sampler.in(f.domain()), y = sampler.in(f.domain());
    const DyVec dx = x - y;
    if (dx == spaces::zeros(2)) continue;
    const DyVec df = f.eval(x, p) - f.eval(y, p);
    // <f(x) - f(y), x - y> <= ||x - y||^2, up to evaluation error
    if (norm_sq(dx) + slack < dot(df, dx)) {
      r.report["violations"].push_back({{"kind", "pseudocontractive"}, {"x", dual_vec(x)}, {"y", dual_vec(y)}});
    }
    if (L * L * norm_sq(dx) < norm_sq(df)) {
      r.report["violations"].push_back({{"kind", "lipschitz"}, {"x", dual_vec(x)}, {"y", dual_vec(y)}});
    }
    max_ratio = std::max(max_ratio, std::sqrt(norm_sq(df).to_double() / norm_sq(dx).to_double()));
  }
  IterateParams ip = s.iterate;
  ip.scheme = "km";
  if (!ip.start) ip.start = DyVec{Dyadic::from_double(0.9), Dyadic()};
  const IterationTrace t = run_iteration(f, ip);
  Dyadic min_norm = exactreal::sqrt_floor(norm_sq(t.points.front()), t.precision);
  for (const auto& x : t.points) min_norm = min(min_norm, exactreal::sqrt_floor(norm_sq(x), t.precision));
  r.report["scheme"] = "demo/pseudo";
  json params = trace_params(t);
  params["pairs"] = s.demo.pairs;
  r.report["params"] = params;
  r.report["witness"] = {{"final", dual_vec(t.points.back())},
                         {"min_norm_lb", dual(min_norm)},
                         {"max_lipschitz_ratio", max_ratio}};
  add_artifact(r, "trace.csv", trace_csv(t));
}

void demo_tmap(const ScenarioSpec& s, RunResult& r) {
  const auto& seq = s.demo.sequence;
  const auto x = [&seq](std::int64_t n) {
    return Real(seq[static_cast<std::size_t>(std::min<std::int64_t>(n, static_cast<std::int64_t>(seq.size()) - 1))]);
  };
  const spaces::WeakPoint a = synth::tmap(x);
  const Precision p = s.report_precision;
  json coords = json::array();
  Dyadic sum_sq;
  for (std::int64_t k = 0; k < s.demo.coordinates; ++k) {
    const Dyadic c = a.coord(k).query(p);
    coords.push_back(dual(c));
    sum_sq += c * c;
  }
  const Dyadic limit = seq.back();
  r.report["scheme"] = "demo/tmap";
  r.report["params"] = {{"sequence", dual_vec(seq)}, {"coordinates", s.demo.coordinates}, {"precision", p}};
  r.report["witness"] = {{"coordinates", coords},
                         {"norm_bound", dual(a.norm_bound)},
                         {"norm", dual(exactreal::sqrt_floor(sum_sq, p - 2))},
                         {"limit", dual(limit)}};
}

void run_demo(const ScenarioSpec& s, RunResult& r) {
  const std::string& name = s.demo.name;
  if (name == "specker") return demo_specker(s, r);
  if (name == "cube") return demo_cube(s, r);
  if (name == "pseudo") return demo_pseudo(s, r);
  return demo_tmap(s, r);
}

json error_json(const std::string& path, const std::string& message) { return json{{"path", path}, {"message", message}}; }

}  // namespace

RunResult run_scenario(const ScenarioSpec& s) {
  RunResult r;
  r.report = make_report(s.action, s);
  try {
    if (s.action == "iterate") {
      run_iterate(s, r);
    } else if (s.action == "metastable") {
      run_metastable(s, r);
    } else if (s.action == "certify-rate") {
      run_certify(s, r);
    } else if (s.action == "synth") {
      run_synth(s, r);
    } else if (s.action == "enumerate-halfspaces") {
      run_enumerate(s, r);
    } else {
      run_demo(s, r);
    }
  } catch (const BudgetExhausted& e) {
    r.status = exit_budget;
    r.report["status"] = "budget exhausted";
    r.report["message"] = e.what();
  } catch (const SpecError& e) {
    r.status = exit_spec_error;
    r.report["status"] = "spec error";
    r.report["errors"] = json::array({error_json(e.path(), e.message())});
  } catch (const Error& e) {
    r.status = exit_spec_error;
    r.report["status"] = "spec error";
    r.report["errors"] = json::array({error_json("(run)", e.what())});
  }
  r.artifacts.insert(r.artifacts.begin(), Artifact{"report.json", r.report.dump(2) + "\n"});
  return r;
}

RunResult spec_error_result(const std::vector<SpecError>& errors) {
  RunResult r;
  r.status = exit_spec_error;
  json errs = json::array();
  for (const auto& e : errors) errs.push_back(error_json(e.path(), e.message()));
  r.report = {{"status", "spec error"}, {"errors", errs}};
  r.artifacts.push_back({"report.json", r.report.dump(2) + "\n"});
  return r;
}

void write_artifacts(const RunResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : result.artifacts) {
    std::ofstream out(std::filesystem::path(dir) / a.name, std::ios::binary);
    if (!out) throw Error("cannot write " + (std::filesystem::path(dir) / a.name).string());
    out << a.content;
  }
}

}  // namespace fixpt::cli
