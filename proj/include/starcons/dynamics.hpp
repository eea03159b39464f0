#pragma once

// The projected consensus iteration X(t+1) = P(A X(t)) and the row-normalized
// product of its effective factors D(A X(t)) A.

#include "starcons/geometry.hpp"
#include "starcons/graph.hpp"
#include "starcons/types.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace starcons {

/// Diagonal of D with P(AX) = D (AX): entry i is gamma_i(r_i/|r_i|)/|r_i|, r_i = [AX]_i.
Vector d_gamma_diag(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x);

/// One iteration P(A X).
Matrix step(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x);

/// Plain linear consensus update A X, no projection.
Matrix linear_step(const Matrix& a, const Matrix& x);

/// max_{i,j} | x_i/|x_i| - x_j/|x_j| |, in [0, 2].
double pairwise_direction_error(const Matrix& x);

enum class StopReason { converged, max_iters, degenerate };
std::string_view to_string(StopReason r);

struct SimulationOptions {
  std::size_t max_iters = 100000;
  double tol = 1e-9;  // pairwise direction error that counts as consensus
  bool record_states = true;
  bool track_product = false;
};

struct SimulationTrace {
  /// X(t0..t0+k) when states were recorded, otherwise {X(t0), X(t0+k)}.
  std::vector<Matrix> states;
  std::vector<double> phi_history;
  std::vector<double> pairwise_error;
  // Filled only when the product was tracked alongside; index t is Y(t).
  std::vector<double> phiY_history;
  std::vector<double> min_ratio;
  std::vector<double> max_ratio;
  std::size_t t0 = 0;
  StopReason stop_reason = StopReason::max_iters;

  std::size_t iterations() const noexcept { return pairwise_error.empty() ? 0 : pairwise_error.size() - 1; }
  const Matrix& final_state() const { return states.back(); }
  bool converged() const noexcept { return stop_reason == StopReason::converged; }
};

/// Running Y(k) = rows of the product D(AX(k-1))A ... D(AX(0))A normalized to
/// unit length. The relative row scales |row_i| / |row_0| of the unnormalized
/// product are carried along so that renormalizing every step is exact.
class ProductTracker {
 public:
  explicit ProductTracker(std::size_t n, bool keep_log = true);

  /// Left-multiplies the factor diag(d) * a onto the product.
  void advance(const Vector& d, const Matrix& a);

  const Matrix& y() const noexcept { return y_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(y_.rows()); }

  /// |row_i| / |row_0| of the unnormalized product after the latest step.
  const Vector& ratios() const noexcept { return ratios_; }
  /// ratios() after step s (s = 1..k); empty when the log is off.
  Vector ratio_log(std::size_t s) const;
  /// phi_max(Y(s)) for s = 0..k; Y(0) = I.
  const std::vector<double>& phiY_history() const noexcept { return phi_history_; }
  double phi() const noexcept { return phi_history_.back(); }

  /// Extremes of the positive entries of every factor seen so far.
  double factor_sigma_l() const noexcept { return factor_sigma_l_; }
  double factor_sigma_u() const noexcept { return factor_sigma_u_; }

  /// Normalized arithmetic mean of the rows of Y.
  Vector mean_row() const;

 private:
  Matrix y_;
  Vector ratios_;
  std::size_t k_ = 0;
  bool keep_log_;
  std::vector<double> ratio_log_;  // k x n, row-major
  std::vector<double> phi_history_;
  double factor_sigma_l_;
  double factor_sigma_u_ = 0.0;
  Matrix scratch_;
};

/// Folds the factor D(AX)A for the current state x into the tracker.
ProductTracker product_step(ProductTracker tracker, const WeightMatrix& a,
                            const BoundaryFamily& family, const Matrix& x);

SimulationTrace simulate(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                         const SimulationOptions& options = {});

struct JointRun {
  SimulationTrace trace;
  ProductTracker tracker;
};

/// Runs the iteration and the product together. The product keeps advancing
/// after the states reach consensus until phi(Y) < tol_phi; the trace stops
/// at consensus. max_iters bounds both.
JointRun simulate_with_product(const WeightMatrix& a, const BoundaryFamily& family,
                               const Matrix& x0, const SimulationOptions& options, double tol_phi);

struct LimitVector {
  Vector v;               // unit, entrywise positive
  double residual = 0.0;  // phi_max(Y) at acceptance
  std::size_t iterations = 0;
};

inline constexpr double kDefaultTolPhi = 1e-10;
inline constexpr double kDefaultTolDirection = 1e-9;
inline constexpr std::size_t kDefaultMaxIters = 100000;

/// Limit of the normalized product rows. Throws NonConvergence when phi(Y)
/// stays above tol_phi for max_iters steps.
LimitVector estimate_v(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                       double tol_phi = kDefaultTolPhi, std::size_t max_iters = kDefaultMaxIters);

/// Extracts v from a tracker that already satisfied its tolerance.
LimitVector limit_from_tracker(const ProductTracker& tracker);

}  // namespace starcons
