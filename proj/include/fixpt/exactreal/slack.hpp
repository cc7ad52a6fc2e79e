#pragma once

#include "fixpt/exactreal/dyadic.hpp"

// Extra precision requested from operands so that the errors of every
// constructor sum to at most 2^-n. All inflation constants live here.
namespace fixpt::exactreal::slack {

// add/sub: operands at n+2 give 2^-(n+1); result rounded to the 2^-(n+2) grid.
inline constexpr Precision kAddOperand = 2;
inline constexpr Precision kAddGrid = 2;

// scale by c: operand at n + ceil(log2|c|) + 1; result rounded at n+2.
inline constexpr Precision kScaleOperand = 1;
inline constexpr Precision kScaleGrid = 2;

// mul: magnitude bounds come from precision-0 queries inflated by 1.
inline constexpr Precision kMulBoundQuery = 0;
inline constexpr Precision kMulOperand = 2;
inline constexpr Precision kMulGrid = 2;

// sqrt: input precision 2n + 2 bounds the input error contribution by
// sqrt(2^-(2n+2)) = 2^-(n+1); the root is extracted on the 2^-(n+3) grid.
inline constexpr Precision kSqrtInputFactor = 2;
inline constexpr Precision kSqrtInputOffset = 2;
inline constexpr Precision kSqrtGrid = 3;

// limit_with_rate: term(rate(n+1)) queried at n+1.
inline constexpr Precision kLimitShift = 1;

// lt_semidecide: probe at stage s fires when y(s) - x(s) > 2^-(s-1).
inline constexpr Precision kSemidecideSlack = 1;

// real_from_bounds: stop when hi - lo <= 2^-(n-1), return the midpoint.
inline constexpr Precision kBoundsGap = 1;

}  // namespace fixpt::exactreal::slack
