#include "starcons/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace starcons {

namespace {

// Normalizes the rows of x into unit and returns the largest distance
// between two of them.
double max_pair_distance(const Matrix& x, Matrix& unit) {
  unit.resize(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nrm = x.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(static_cast<std::size_t>(i));
    unit.row(i) = x.row(i) / nrm;
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < unit.rows(); ++i)
    for (Eigen::Index j = i + 1; j < unit.rows(); ++j)
      worst = std::max(worst, (unit.row(i) - unit.row(j)).squaredNorm());
  return std::sqrt(worst);
}

// Angle between unit vectors at the given chord length.
double angle_from_distance(double dist) { return 2.0 * std::asin(std::clamp(0.5 * dist, 0.0, 1.0)); }

void check_shapes(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (family.size() != a.size()) throw DimensionMismatch("weight matrix and family differ in n");
  if (x.rows() != n || x.cols() != family.dim())
    throw DimensionMismatch("state matrix shape does not match (n, d)");
}

}  // namespace

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::converged:
      return "converged";
    case StopReason::max_iters:
      return "max_iters";
    case StopReason::degenerate:
      return "degenerate";
  }
  return "unknown";
}

Vector d_gamma_diag(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x) {
  check_shapes(a, family, x);
  const Matrix ax = a.entries() * x;
  Vector d(ax.rows());
  for (Eigen::Index i = 0; i < ax.rows(); ++i) {
    const double nrm = ax.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(static_cast<std::size_t>(i));
    const RowVector u = ax.row(i) / nrm;
    d[i] = family[static_cast<std::size_t>(i)](u) / nrm;
  }
  return d;
}

Matrix step(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x) {
  check_shapes(a, family, x);
  Matrix ax = a.entries() * x;
  rowwise_project_into(family, ax, ax);
  return ax;
}

Matrix linear_step(const Matrix& a, const Matrix& x) {
  if (a.cols() != x.rows()) throw DimensionMismatch("linear_step: shape mismatch");
  return a * x;
}

double pairwise_direction_error(const Matrix& x) {
  Matrix unit;
  return max_pair_distance(x, unit);
}

// ---------------------------------------------------------------------------

ProductTracker::ProductTracker(std::size_t n, bool keep_log)
    : y_(Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))),
      ratios_(Vector::Ones(static_cast<Eigen::Index>(n))),
      keep_log_(keep_log),
      factor_sigma_l_(std::numeric_limits<double>::infinity()) {
  phi_history_.push_back(n > 1 ? std::numbers::pi / 2 : 0.0);
}

void ProductTracker::advance(const Vector& d, const Matrix& a) {
  const auto n = y_.rows();
  if (a.rows() != n || a.cols() != n || d.size() != n)
    throw DimensionMismatch("ProductTracker::advance: shape mismatch");
  // Unnormalized product = |row_0| diag(ratios) Y, so the new one is
  // |row_0| diag(d) A diag(ratios) Y.
  scratch_.noalias() = a * (ratios_.asDiagonal() * y_);
  double row0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nrm = d[i] * scratch_.row(i).norm();
    if (!(nrm >= kZeroRowThreshold) || !std::isfinite(nrm))
      throw ZeroRowError(static_cast<std::size_t>(i));
    y_.row(i) = scratch_.row(i) * (d[i] / nrm);
    if (i == 0) row0 = nrm;
    ratios_[i] = nrm / row0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) > 0.0) {
        factor_sigma_l_ = std::min(factor_sigma_l_, d[i] * a(i, j));
        factor_sigma_u_ = std::max(factor_sigma_u_, d[i] * a(i, j));
      }
  }
  ++k_;
  if (keep_log_) ratio_log_.insert(ratio_log_.end(), ratios_.data(), ratios_.data() + n);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      worst = std::max(worst, (y_.row(i) - y_.row(j)).squaredNorm());
  phi_history_.push_back(angle_from_distance(std::sqrt(worst)));
}

Vector ProductTracker::ratio_log(std::size_t s) const {
  const auto n = static_cast<std::size_t>(y_.rows());
  if (!keep_log_ || s == 0 || s > k_) return Vector();
  return Eigen::Map<const Vector>(ratio_log_.data() + (s - 1) * n, static_cast<Eigen::Index>(n));
}

Vector ProductTracker::mean_row() const {
  Vector v = y_.colwise().sum().transpose();
  return v / v.norm();
}

ProductTracker product_step(ProductTracker tracker, const WeightMatrix& a,
                            const BoundaryFamily& family, const Matrix& x) {
  tracker.advance(d_gamma_diag(a, family, x), a.entries());
  return tracker;
}

// ---------------------------------------------------------------------------

namespace {

struct RunSettings {
  bool wait_for_consensus = true;
  double tol_phi = 0.0;
};

JointRun run_impl(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                  const SimulationOptions& opt, const RunSettings& settings) {
  check_shapes(a, family, x0);
  const auto n = x0.rows();
  JointRun out{SimulationTrace{}, ProductTracker(static_cast<std::size_t>(n), opt.track_product)};
  SimulationTrace& trace = out.trace;
  ProductTracker& tracker = out.tracker;
  const Matrix& am = a.entries();

  Matrix x = x0;
  Matrix ax(n, x0.cols());
  Matrix unit;
  Vector d(n);

  auto record = [&](const Matrix& state) {
    const double dist = max_pair_distance(state, unit);
    trace.pairwise_error.push_back(dist);
    trace.phi_history.push_back(angle_from_distance(dist));
    if (opt.record_states) trace.states.push_back(state);
    if (opt.track_product) {
      trace.phiY_history.push_back(tracker.phi());
      const double hi = tracker.ratios().maxCoeff();
      const double lo = tracker.ratios().minCoeff();
      trace.min_ratio.push_back(lo / hi);
      trace.max_ratio.push_back(hi / lo);
    }
    return dist;
  };

  bool sim_done = record(x) < opt.tol;
  bool degenerate = false;
  Matrix stop_state;
  if (sim_done) stop_state = x;
  bool prod_done = !opt.track_product || tracker.phi() < settings.tol_phi;

  std::size_t t = 0;
  while (((settings.wait_for_consensus && !sim_done) || !prod_done) && t < opt.max_iters) {
    ax.noalias() = am * x;
    bool zero_row = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double nrm = ax.row(i).norm();
      if (!(nrm >= kZeroRowThreshold) || !std::isfinite(nrm)) {
        zero_row = true;
        break;
      }
      x.row(i) = ax.row(i) / nrm;
      const double radius = family[static_cast<std::size_t>(i)](x.row(i));
      d[i] = radius / nrm;
      x.row(i) *= radius;
    }
    if (zero_row) {
      degenerate = true;
      break;
    }
    if (opt.track_product) {
      tracker.advance(d, am);
      prod_done = tracker.phi() < settings.tol_phi;
    }
    ++t;
    if (!sim_done) {
      sim_done = record(x) < opt.tol;
      if (sim_done) stop_state = x;
    }
  }

  if (sim_done)
    trace.stop_reason = StopReason::converged;
  else
    trace.stop_reason = degenerate ? StopReason::degenerate : StopReason::max_iters;
  if (!opt.record_states) {
    trace.states.clear();
    trace.states.push_back(x0);
    trace.states.push_back(sim_done ? stop_state : x);
  }
  return out;
}

}  // namespace

SimulationTrace simulate(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                         const SimulationOptions& options) {
  if (!(options.tol > 0.0)) throw ContractViolation("simulate: tol must be positive");
  return run_impl(a, family, x0, options, RunSettings{true, 0.0}).trace;
}

JointRun simulate_with_product(const WeightMatrix& a, const BoundaryFamily& family,
                               const Matrix& x0, const SimulationOptions& options, double tol_phi) {
  if (!(options.tol > 0.0)) throw ContractViolation("simulate: tol must be positive");
  SimulationOptions opt = options;
  opt.track_product = true;
  return run_impl(a, family, x0, opt, RunSettings{true, tol_phi});
}

LimitVector limit_from_tracker(const ProductTracker& tracker) {
  LimitVector out{tracker.mean_row(), tracker.phi(), tracker.k()};
  if (!(out.v.array() > 0.0).all())
    throw ContractViolation("limit vector has a nonpositive entry; is the weight matrix valid?");
  return out;
}

LimitVector estimate_v(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                       double tol_phi, std::size_t max_iters) {
  if (!(tol_phi > 0.0)) throw ContractViolation("estimate_v: tol_phi must be positive");
  SimulationOptions opt;
  opt.max_iters = max_iters;
  opt.record_states = false;
  opt.track_product = true;
  const JointRun run = run_impl(a, family, x0, opt, RunSettings{false, tol_phi});
  if (run.trace.stop_reason == StopReason::degenerate)
    throw ContractViolation("estimate_v: a row of AX vanished; the weight matrix violates the row inequality");
  if (!(run.tracker.phi() < tol_phi))
    throw NonConvergence("estimate_v: normalized product did not settle", run.tracker.phi(),
                         run.tracker.k());
  return limit_from_tracker(run.tracker);
}

}  // namespace starcons
