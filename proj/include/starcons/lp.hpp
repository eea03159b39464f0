#pragma once

// Small dense simplex solver for the feasibility programs in the analysis module.

#include "starcons/types.hpp"

namespace starcons::lp {

enum class Status { optimal, unbounded };

struct Result {
  Status status = Status::optimal;
  double value = 0.0;
  Vector x;
};

/// maximize c.x subject to A x <= b, x >= 0, with b >= 0 (the origin is feasible).
/// Tableau simplex with Bland's rule, so degenerate pivots cannot cycle.
Result maximize(const Vector& c, const Matrix& a, const Vector& b);

}  // namespace starcons::lp
