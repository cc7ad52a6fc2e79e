#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fixpt/nonexp/map.hpp"

namespace fixpt::iterate {

using exactreal::Dyadic;
using exactreal::Precision;
using exactreal::Real;
using nonexp::MapName;
using spaces::DyVec;
using spaces::VecName;

struct IterationTrace {
  std::string scheme;
  nlohmann::json params = nlohmann::json::object();
  DyVec start;
  DyVec anchor;  // Halpern and Reich
  /// Working precision: f is evaluated within 2^-p, iterates are rounded to
  /// the 2^-(p+1) grid.
  Precision precision = 0;
  std::vector<DyVec> points;
  /// residuals[n] is within 2^-(p-1) of ||f(x_n) - x_n||.
  std::vector<Dyadic> residuals;

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

/// p = 20 + ceil log2 N + ceil log2 sqrt(d) + 2, enough that N rounding and
/// evaluation errors stay below 2^-20 in total.
Precision schedule_precision(std::int64_t N, std::size_t dim);

using Alphas = std::function<Dyadic(std::int64_t)>;

// Every scheme takes an optional working precision; 0 means
// schedule_precision(N, dim).

/// x_{n+1} = (1 - a_n) x_n + a_n f(x_n). Throws DomainError if an output of f
/// leaves the domain by more than the evaluation tolerance.
IterationTrace mann(const MapName& f, const DyVec& x0, const Alphas& alphas, std::int64_t N, Precision precision = 0);
/// Krasnoselski: a_n = 1/2.
IterationTrace krasnoselski(const MapName& f, const DyVec& x0, std::int64_t N, Precision precision = 0);
/// x_{n+1} = y/(n+2) + (1 - 1/(n+2)) f(x_n); the anchor defaults to x0.
IterationTrace halpern(const MapName& f, const DyVec& x0, std::int64_t N, std::optional<DyVec> anchor = std::nullopt,
                       Precision precision = 0);
/// x_{n+1} = (1 - a_n) x0 + a_n f(x_n) with a_n = 1 - (n+2)^-1/2.
IterationTrace reich(const MapName& f, const DyVec& x0, std::int64_t N, Precision precision = 0);

using Adversary = std::function<std::int64_t(std::int64_t)>;

/// Smallest k <= k_max with ||x_i - x_j|| < 2^-n for all i, j in [k, k + g(k)];
/// empty when the budget or the trace runs out first. Ties fail.
std::optional<std::int64_t> metastability_witness(const std::vector<DyVec>& points, const Adversary& g, int n,
                                                  std::int64_t k_max);

struct Violation {
  int n = 0;
  std::int64_t index = 0;
  std::int64_t other = -1;  // second index in the Cauchy form
  /// Certified lower bound on the offending distance.
  Dyadic distance_lb;
};

struct RateReport {
  std::optional<Violation> violation;
  int checked_upto = -1;  // largest n fully checked
  bool ok() const { return !violation.has_value(); }
};

using Rate = std::function<std::int64_t(int)>;

/// Checks ||x_l - lim|| < 2^-n for phi(n) <= l < trace length, n = 0..n_max;
/// without a limit, the Cauchy form ||x_l - x_m|| <= 2^-(n-1). Only
/// certified failures count: a distance equal to the bound is not a violation.
RateReport certify_rate(const std::vector<DyVec>& points, const Rate& phi, const std::optional<VecName>& limit,
                        int n_max);

/// Smallest m with L^m D <= 2^-n: a rate for the iterates of an L-contraction
/// started within D of its fixed point. Requires 0 <= L < 1.
Rate contraction_rate(const Dyadic& L, const Dyadic& D);

/// CSV: n, x0 .. x{d-1}, residual as 12-digit decimals, followed by the same
/// values in exact form (columns suffixed _exact).
void write_trace_csv(std::ostream& out, const IterationTrace& trace);

}  // namespace fixpt::iterate
