#include "fixpt/exactreal/real.hpp"

#include <map>
#include <mutex>

#include "fixpt/errors.hpp"
#include "fixpt/exactreal/slack.hpp"

namespace fixpt::exactreal {

struct Real::Node {
  std::optional<Dyadic> exact;
  Query query;
  mutable std::mutex mutex;
  mutable std::map<Precision, Dyadic> memo;
};

Real::Real(const Dyadic& value) {
  auto node = std::make_shared<Node>();
  node->exact = value;
  node_ = std::move(node);
}

Real Real::from_query(Query query) {
  auto node = std::make_shared<Node>();
  node->query = std::move(query);
  return Real(std::shared_ptr<const Node>(std::move(node)));
}

Real Real::ratio(long num, long den) {
  if (den == 0) throw DomainError("ratio with zero denominator");
  const Dyadic a(num);
  const Dyadic b(den);
  // exact when the denominator is a power of two
  if (const Dyadic q = div_approx(a, b, 64); q * b == a) return Real(q);
  return from_query([a, b](Precision n) { return div_approx(a, b, n + 1); });
}

Dyadic Real::query(Precision n) const {
  const Node& node = *node_;
  if (node.exact) return *node.exact;
  {
    std::lock_guard<std::mutex> lock(node.mutex);
    if (auto it = node.memo.find(n); it != node.memo.end()) return it->second;
  }
  // Evaluated outside the lock; determinism makes racing writers agree, and
  // emplace keeps whichever value landed first.
  Dyadic value = node.query(n);
  std::lock_guard<std::mutex> lock(node.mutex);
  return node.memo.emplace(n, std::move(value)).first->second;
}

const std::optional<Dyadic>& Real::exact() const { return node_->exact; }

Real add(const Real& x, const Real& y) {
  if (x.exact() && y.exact()) return Real(*x.exact() + *y.exact());
  return Real::from_query([x, y](Precision n) {
    const Dyadic s = x.query(n + slack::kAddOperand) + y.query(n + slack::kAddOperand);
    return s.round_to(n + slack::kAddGrid);
  });
}

Real neg(const Real& x) {
  if (x.exact()) return Real(-*x.exact());
  return Real::from_query([x](Precision n) { return -x.query(n); });
}

Real sub(const Real& x, const Real& y) { return add(x, neg(y)); }

Real scale(const Real& x, const Dyadic& c) {
  if (c.is_zero()) return Real();
  if (x.exact()) return Real(*x.exact() * c);
  const auto k = static_cast<Precision>(c.ceil_log2_abs());
  return Real::from_query([x, c, k](Precision n) {
    const Dyadic v = x.query(n + k + slack::kScaleOperand) * c;
    return v.round_to(n + slack::kScaleGrid);
  });
}

Real mul(const Real& x, const Real& y) {
  if (x.exact() && y.exact()) return Real(*x.exact() * *y.exact());
  if (x.exact()) return scale(y, *x.exact());
  if (y.exact()) return scale(x, *y.exact());
  return Real::from_query([x, y](Precision n) {
    const Dyadic bx = x.query(slack::kMulBoundQuery).abs() + Dyadic(1);
    const Dyadic by = y.query(slack::kMulBoundQuery).abs() + Dyadic(1);
    const auto kx = static_cast<Precision>(bx.ceil_log2_abs());
    const auto ky = static_cast<Precision>((by + Dyadic(1)).ceil_log2_abs());
    const Dyadic v = x.query(n + ky + slack::kMulOperand) * y.query(n + kx + slack::kMulOperand);
    return v.round_to(n + slack::kMulGrid);
  });
}

Real operator+(const Real& x, const Real& y) { return add(x, y); }
Real operator-(const Real& x, const Real& y) { return sub(x, y); }
Real operator-(const Real& x) { return neg(x); }
Real operator*(const Real& x, const Real& y) { return mul(x, y); }

Real arith(ArithOp op, const Real& x, const Real& y) {
  switch (op) {
    case ArithOp::add: return add(x, y);
    case ArithOp::sub: return sub(x, y);
    case ArithOp::neg: return neg(x);
    case ArithOp::mul: return mul(x, y);
    case ArithOp::scale:
      if (!y.exact()) throw DomainError("scale needs an exact dyadic factor");
      return scale(x, *y.exact());
  }
  throw DomainError("unknown arithmetic operation");
}

Real sqrt(const Real& x) {
  return Real::from_query([x](Precision n) {
    const Precision in = slack::kSqrtInputFactor * n + slack::kSqrtInputOffset;
    const Dyadic q = x.query(in);
    const Dyadic tol = Dyadic::pow2(-in);
    if ((q + tol).sign() < 0) {
      throw DomainError("sqrt of a certified negative number (approximation " + q.decimal() + ")");
    }
    // |sqrt(max(q,0)) - sqrt(x)| <= sqrt(|q - x|) <= 2^-(n+1)
    const Dyadic clipped = q.sign() < 0 ? Dyadic() : q;
    return sqrt_floor(clipped, n + slack::kSqrtGrid);
  });
}

}  // namespace fixpt::exactreal
