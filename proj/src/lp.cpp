#include "starcons/lp.hpp"

#include <cmath>
#include <limits>

namespace starcons::lp {

Result maximize(const Vector& c, const Matrix& a, const Vector& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) throw DimensionMismatch("lp::maximize: shape mismatch");
  if ((b.array() < 0.0).any()) throw ContractViolation("lp::maximize: b must be nonnegative");

  constexpr double eps = 1e-12;
  // Columns 0..n-1 structural, n..n+m-1 slack, last column rhs. Row m is the
  // objective row holding reduced costs -c.
  Matrix t = Matrix::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = a;
  t.block(0, n, m, m).setIdentity();
  t.topRightCorner(m, 1) = b;
  t.bottomLeftCorner(1, n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const Eigen::Index rhs = n + m;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n + m; ++j)
      if (t(m, j) < -eps) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t(i, enter) > eps) {
        const double ratio = t(i, rhs) / t(i, enter);
        const bool better = ratio < best - eps;
        const bool tie = std::abs(ratio - best) <= eps && leave >= 0 &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)];
        if (better || tie) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return Result{Status::unbounded, std::numeric_limits<double>::infinity(), Vector()};

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  Result out{Status::optimal, t(m, rhs), Vector::Zero(n)};
  for (Eigen::Index i = 0; i < m; ++i)
    if (basis[static_cast<std::size_t>(i)] < n) out.x[basis[static_cast<std::size_t>(i)]] = t(i, rhs);
  return out;
}

}  // namespace starcons::lp
