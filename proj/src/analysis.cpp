#include "starcons/analysis.hpp"

#include "starcons/lp.hpp"
#include "starcons/random.hpp"

#include <algorithm>
#include <cmath>

namespace starcons {

namespace {

ConsensusVerdict verdict_from_limit(const BoundaryFamily& family, const Matrix& x0,
                                    const LimitVector& limit, const DecisionOptions& options) {
  ConsensusVerdict out;
  out.v = limit.v;
  out.v_residual = limit.residual;
  out.vX0 = limit.v.transpose() * x0;
  out.vX0_norm = out.vX0.norm();
  out.threshold = options.decision_threshold * x0.rowwise().norm().maxCoeff();
  out.consensus_predicted = out.vX0_norm > out.threshold;
  if (out.consensus_predicted) {
    out.limit_direction = out.vX0 / out.vX0_norm;
    const Matrix repeated = Matrix::Ones(x0.rows(), 1) * out.vX0;
    out.limit_states = rowwise_project(family, repeated);
  }
  return out;
}

void require_valid(const WeightMatrix& a, const BoundaryFamily& family) {
  if (!check_well_posed(a, family))
    throw ContractViolation("weight matrix and boundaries do not satisfy the well-posedness assumption");
}

}  // namespace

ConsensusVerdict predict_consensus(const WeightMatrix& a, const BoundaryFamily& family,
                                   const Matrix& x0, const DecisionOptions& options) {
  require_valid(a, family);
  const LimitVector limit = estimate_v(a, family, x0, options.tol_phi, options.max_iters);
  return verdict_from_limit(family, x0, limit, options);
}

ConsensusVerdict decide_consensus(const WeightMatrix& a, const BoundaryFamily& family,
                                 const Matrix& x0, const DecisionOptions& options) {
  require_valid(a, family);
  SimulationOptions sim;
  sim.max_iters = options.max_iters;
  sim.tol = options.tol_direction;
  sim.record_states = options.record_states;
  JointRun run = simulate_with_product(a, family, x0, sim, options.tol_phi);
  if (!(run.tracker.phi() < options.tol_phi))
    throw NonConvergence("decide_consensus: normalized product did not settle", run.tracker.phi(),
                         run.tracker.k());
  ConsensusVerdict out = verdict_from_limit(family, x0, limit_from_tracker(run.tracker), options);
  out.simulated = true;
  out.empirical_converged = run.trace.converged();
  out.empirical_agreement = out.empirical_converged == out.consensus_predicted;
  out.trace = std::move(run.trace);
  return out;
}

// ---------------------------------------------------------------------------

HalfspaceResult check_halfspace(const Matrix& x0) {
  const Eigen::Index n = x0.rows();
  const Eigen::Index d = x0.cols();
  Matrix u(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nrm = x0.row(i).norm();
    if (!(nrm >= kZeroRowThreshold)) throw ZeroRowError(static_cast<std::size_t>(i));
    u.row(i) = x0.row(i) / nrm;
  }
  // h = p - q with p, q >= 0; the box |h_j| <= 1 takes 2d rows.
  Matrix box(2 * d, 2 * d);
  box << Matrix::Identity(d, d), -Matrix::Identity(d, d), -Matrix::Identity(d, d),
      Matrix::Identity(d, d);
  auto h_of = [d](const Vector& x) -> RowVector {
    return (x.head(d) - x.segment(d, d)).transpose();
  };

  HalfspaceResult out;

  // Max margin: maximize t with u_i.h >= t; t = t+ - t-.
  {
    Matrix a = Matrix::Zero(n + 2 * d, 2 * d + 2);
    a.topLeftCorner(n, d) = -u;
    a.block(0, d, n, d) = u;
    a.block(0, 2 * d, n, 1).setOnes();
    a.block(0, 2 * d + 1, n, 1).setConstant(-1.0);
    a.bottomLeftCorner(2 * d, 2 * d) = box;
    Vector b = Vector::Zero(n + 2 * d);
    b.tail(2 * d).setOnes();
    Vector c = Vector::Zero(2 * d + 2);
    c[2 * d] = 1.0;
    c[2 * d + 1] = -1.0;
    const lp::Result res = lp::maximize(c, a, b);
    out.margin = res.value;
    if (res.value > 1e-12) {
      out.holds = true;
      const RowVector h = h_of(res.x);
      out.witness_h = h / h.norm();
      return out;
    }
  }

  // No strict witness. Maximize sum_i u_i.h over the closed cone u h >= 0; a
  // positive optimum gives h with X0 h >= 0 and X0 h != 0.
  {
    Matrix a(n + 2 * d, 2 * d);
    a.topLeftCorner(n, d) = -u;
    a.topRightCorner(n, d) = u;
    a.bottomRows(2 * d) = box;
    Vector b = Vector::Zero(n + 2 * d);
    b.tail(2 * d).setOnes();
    const RowVector s = u.colwise().sum();
    Vector c(2 * d);
    c << s.transpose(), -s.transpose();
    const lp::Result res = lp::maximize(c, a, b);
    if (res.value > 1e-10) {
      out.holds = true;
      out.boundary = true;
      const RowVector h = h_of(res.x);
      out.witness_h = h / h.norm();
    }
  }
  return out;
}

RankResult check_rank(const Matrix& x0, double rel_tol) {
  RankResult out;
  if (x0.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x0);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * s[0];
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) ++out.numerical_rank;
  out.holds = out.numerical_rank == x0.rows();
  out.smallest_singular_value = x0.rows() > x0.cols() ? 0.0 : s[s.size() - 1];
  return out;
}

ConeColumnResult check_cone_column(const WeightMatrix& a, const Matrix& x0) {
  if (static_cast<std::size_t>(x0.rows()) != a.size())
    throw DimensionMismatch("check_cone_column: X0 rows differ from n");
  ConeColumnResult out;
  for (Eigen::Index j = 0; j < x0.cols(); ++j) {
    const Vector c = x0.col(j);
    if (!(c.norm() >= kZeroRowThreshold)) continue;
    if (!cone_perp_membership(a.entries(), c)) {
      out.holds = true;
      out.witness_column_index = static_cast<std::size_t>(j);
      break;
    }
  }
  return out;
}

ConditionReport check_sufficient_conditions(const WeightMatrix& a, const Matrix& x0,
                                            double rank_tol) {
  return ConditionReport{check_halfspace(x0), check_rank(x0, rank_tol), check_cone_column(a, x0)};
}

// ---------------------------------------------------------------------------

RateEstimate fit_rate(const SimulationTrace& trace, double tail_fraction, double floor) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw ContractViolation("fit_rate: tail_fraction must lie in (0, 1]");
  const auto& err = trace.pairwise_error;
  if (err.size() < 20) throw ContractViolation("fit_rate: trace has fewer than 20 recorded steps");

  // The step that crossed the tolerance is not a pre-convergence step.
  const std::size_t usable = trace.converged() ? err.size() - 1 : err.size();
  std::vector<double> ts, ys;
  for (std::size_t t = 0; t < usable; ++t)
    if (err[t] > floor) {
      ts.push_back(static_cast<double>(t));
      ys.push_back(std::log10(err[t]));
    }
  const auto start = static_cast<std::size_t>(std::floor(static_cast<double>(ts.size()) * (1.0 - tail_fraction)));
  const std::size_t m = ts.size() - std::min(start, ts.size());
  if (m < 3) throw ContractViolation("fit_rate: fewer than 3 points in the fit window");

  double mt = 0.0, my = 0.0;
  for (std::size_t i = start; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = start; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateEstimate out;
  out.window = tail_fraction;
  out.points = m;
  out.slope = sty / stt;
  if (syy <= 1e-24 * static_cast<double>(m)) {
    out.r2 = 0.0;
    out.flat = true;
  } else {
    out.r2 = (sty * sty) / (stt * syy);
    out.flat = std::abs(out.slope) < 1e-12;
  }
  return out;
}

Matrix tangential_perturbation(const BoundaryFamily& family, const Matrix& x, double eps,
                               std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss;
  Matrix moved = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double nrm = x.row(i).norm();
    const RowVector u = x.row(i) / nrm;
    RowVector g(x.cols());
    RowVector tangent;
    do {
      for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = gauss(rng);
      tangent = g - g.dot(u) * u;
    } while (tangent.norm() < 1e-8);
    moved.row(i) = x.row(i) + eps * nrm * tangent / tangent.norm();
  }
  return rowwise_project(family, moved);
}

double continuity_probe(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                        double eps, int trials, std::uint64_t seed, const DecisionOptions& options) {
  if (eps < 0.0 || trials < 1) throw ContractViolation("continuity_probe: need eps >= 0 and trials >= 1");
  const ConsensusVerdict base = predict_consensus(a, family, x0, options);
  if (!base.consensus_predicted)
    throw ContractViolation("continuity_probe: no consensus predicted at X0");
  Rng rng = make_rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = child_seed(rng);
    const Matrix moved = eps > 0.0 ? tangential_perturbation(family, x0, eps, trial_seed) : x0;
    const ConsensusVerdict other = predict_consensus(a, family, moved, options);
    if (!other.consensus_predicted)
      throw ContractViolation("continuity_probe: perturbation left the consensus region");
    worst = std::max(worst, (*other.limit_direction - *base.limit_direction).norm());
  }
  return worst;
}

}  // namespace starcons
