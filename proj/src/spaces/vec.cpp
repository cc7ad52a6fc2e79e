#include "fixpt/spaces/vec.hpp"

#include <map>
#include <mutex>

#include "fixpt/errors.hpp"

namespace fixpt::spaces {

void require_same_dim(const DyVec& a, const DyVec& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("dimension " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
}

DyVec operator+(const DyVec& a, const DyVec& b) {
  require_same_dim(a, b);
  DyVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

DyVec operator-(const DyVec& a, const DyVec& b) {
  require_same_dim(a, b);
  DyVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

DyVec operator*(const Dyadic& c, const DyVec& v) {
  DyVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
  return r;
}

Dyadic dot(const DyVec& a, const DyVec& b) {
  require_same_dim(a, b);
  Dyadic s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Dyadic norm_sq(const DyVec& v) { return dot(v, v); }

Dyadic norm_ub(const DyVec& v, Precision n) { return exactreal::sqrt_ceil(norm_sq(v), n); }
Dyadic norm_lb(const DyVec& v, Precision n) { return exactreal::sqrt_floor(norm_sq(v), n); }

DyVec round_vec(const DyVec& v, Precision n) {
  DyVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].round_to(n);
  return r;
}

DyVec zeros(std::size_t dim) { return DyVec(dim); }

std::vector<double> to_doubles(const DyVec& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].to_double();
  return r;
}

Precision ceil_log2(std::size_t d) {
  Precision k = 0;
  while ((std::size_t{1} << k) < d) ++k;
  return k;
}

struct VecName::Node {
  std::optional<DyVec> exact;
  Query query;
  mutable std::mutex mutex;
  mutable std::map<Precision, DyVec> memo;
};

VecName::VecName(DyVec exact) : dim_(exact.size()) {
  auto node = std::make_shared<Node>();
  node->exact = std::move(exact);
  node_ = std::move(node);
}

VecName VecName::from_query(std::size_t dim, Query query) {
  auto node = std::make_shared<Node>();
  node->query = std::move(query);
  VecName v;
  v.dim_ = dim;
  v.node_ = std::move(node);
  return v;
}

VecName VecName::from_coords(std::vector<Real> coords) {
  bool all_exact = true;
  for (const auto& c : coords) all_exact = all_exact && c.exact().has_value();
  if (all_exact) {
    DyVec v;
    v.reserve(coords.size());
    for (const auto& c : coords) v.push_back(*c.exact());
    return VecName(std::move(v));
  }
  const std::size_t d = coords.size();
  const Precision extra = ceil_log2(d) + 1;
  return from_query(d, [coords = std::move(coords), extra](Precision n) {
    DyVec v;
    v.reserve(coords.size());
    for (const auto& c : coords) v.push_back(c.query(n + extra));
    return v;
  });
}

DyVec VecName::query(Precision n) const {
  if (!node_) return {};
  if (node_->exact) return *node_->exact;
  {
    std::lock_guard<std::mutex> lock(node_->mutex);
    if (auto it = node_->memo.find(n); it != node_->memo.end()) return it->second;
  }
  DyVec v = node_->query(n);
  if (v.size() != dim_) throw DimensionMismatch("vector name returned the wrong dimension");
  std::lock_guard<std::mutex> lock(node_->mutex);
  return node_->memo.emplace(n, std::move(v)).first->second;
}

const std::optional<DyVec>& VecName::exact() const {
  static const std::optional<DyVec> none;
  return node_ ? node_->exact : none;
}

Real VecName::coord(std::size_t i) const {
  if (i >= dim_) throw DimensionMismatch("coordinate index out of range");
  if (exact()) return Real((*exact())[i]);
  VecName self = *this;
  // |x_i - q_i| <= ||x - q||
  return Real::from_query([self, i](Precision n) { return self.query(n)[i]; });
}

Real norm(const VecName& x) {
  if (x.exact()) {
    const Dyadic sq = norm_sq(*x.exact());
    if (const Dyadic r = exactreal::sqrt_floor(sq, 64); r * r == sq) return Real(r);
    return exactreal::sqrt(Real(sq));
  }
  // | ||q|| - ||x|| | <= ||q - x|| <= 2^-(n+1); root taken on the 2^-(n+2) grid
  return Real::from_query([x](Precision n) {
    return exactreal::sqrt_floor(norm_sq(x.query(n + 1)), n + 2);
  });
}

Real distance(const VecName& x, const VecName& y) {
  if (x.dim() != y.dim()) throw DimensionMismatch("distance between different dimensions");
  if (x.exact() && y.exact()) return norm(VecName(*x.exact() - *y.exact()));
  return norm(VecName::from_query(x.dim(), [x, y](Precision n) {
    return x.query(n + 1) - y.query(n + 1);
  }));
}

}  // namespace fixpt::spaces
