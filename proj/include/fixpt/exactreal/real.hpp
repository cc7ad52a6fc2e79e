#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "fixpt/exactreal/dyadic.hpp"

namespace fixpt::exactreal {

/// Cauchy name of a real number: query(n) is a dyadic within 2^-n of it.
///
/// Values are immutable and cheap to copy (shared node). Queries built
/// through from_query() are memoized behind a mutex, so concurrent callers
/// always observe one value per precision.
class Real {
 public:
  using Query = std::function<Dyadic(Precision)>;

  Real() : Real(Dyadic()) {}
  Real(const Dyadic& value);  // NOLINT: exact dyadics are names of themselves
  Real(long value) : Real(Dyadic(value)) {}  // NOLINT
  Real(int value) : Real(Dyadic(value)) {}  // NOLINT

  /// Wraps an arbitrary query. The query must be deterministic and honour the
  /// 2^-n error contract.
  static Real from_query(Query query);
  /// Name of num/den computed by truncated division.
  static Real ratio(long num, long den);

  Dyadic query(Precision n) const;
  /// The exact value when this name wraps a dyadic constant.
  const std::optional<Dyadic>& exact() const;

 private:
  struct Node;
  explicit Real(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Real operator+(const Real& x, const Real& y);
Real operator-(const Real& x, const Real& y);
Real operator-(const Real& x);
Real operator*(const Real& x, const Real& y);

Real add(const Real& x, const Real& y);
Real sub(const Real& x, const Real& y);
Real neg(const Real& x);
Real mul(const Real& x, const Real& y);
Real scale(const Real& x, const Dyadic& c);

enum class ArithOp { add, sub, neg, mul, scale };
/// Dispatcher over the arithmetic constructors. `neg` ignores y; `scale`
/// requires y to wrap an exact dyadic.
Real arith(ArithOp op, const Real& x, const Real& y);

/// Name of sqrt(x). Throws DomainError once a queried approximation
/// certifies x < 0.
Real sqrt(const Real& x);

}  // namespace fixpt::exactreal
