#pragma once

// Consensus decision from the limit vector v(X0), sufficient conditions on the
// initial state, convergence-rate fits and continuity probes.

#include "starcons/dynamics.hpp"
#include "starcons/geometry.hpp"
#include "starcons/graph.hpp"

#include <cstdint>
#include <optional>

namespace starcons {

struct DecisionOptions {
  double tol_phi = kDefaultTolPhi;
  /// Consensus is predicted when |v X0| exceeds this times the largest row norm of X0.
  double decision_threshold = 1e-8;
  double tol_direction = kDefaultTolDirection;
  std::size_t max_iters = kDefaultMaxIters;
  bool record_states = false;
};

struct ConsensusVerdict {
  Vector v;
  double v_residual = 0.0;
  RowVector vX0;
  double vX0_norm = 0.0;
  double threshold = 0.0;  // absolute threshold applied to vX0_norm
  bool consensus_predicted = false;
  std::optional<RowVector> limit_direction;
  std::optional<Matrix> limit_states;

  // Simulation outcome; unset when only the prediction was computed.
  bool simulated = false;
  bool empirical_converged = false;
  bool empirical_agreement = false;
  SimulationTrace trace;
};

/// Decision from v(X0) alone, no simulation.
ConsensusVerdict predict_consensus(const WeightMatrix& a, const BoundaryFamily& family,
                                   const Matrix& x0, const DecisionOptions& options = {});

/// Decision from v(X0) plus a simulation run to compare against.
ConsensusVerdict decide_consensus(const WeightMatrix& a, const BoundaryFamily& family,
                                 const Matrix& x0, const DecisionOptions& options = {});

struct HalfspaceResult {
  bool holds = false;
  std::optional<RowVector> witness_h;  // unit, X0 h^T >= 0 and nonzero
  double margin = 0.0;                 // max over |h|_inf <= 1 of min_i u_i.h
  bool boundary = false;               // holds, but no h with every entry strictly positive
};

struct RankResult {
  bool holds = false;
  int numerical_rank = 0;
  double smallest_singular_value = 0.0;
};

struct ConeColumnResult {
  bool holds = false;
  std::optional<std::size_t> witness_column_index;
};

struct ConditionReport {
  HalfspaceResult halfspace;
  RankResult full_rank;
  ConeColumnResult cone_column;
  bool any() const noexcept { return halfspace.holds || full_rank.holds || cone_column.holds; }
};

HalfspaceResult check_halfspace(const Matrix& x0);
RankResult check_rank(const Matrix& x0, double rel_tol = 1e-10);
ConeColumnResult check_cone_column(const WeightMatrix& a, const Matrix& x0);
ConditionReport check_sufficient_conditions(const WeightMatrix& a, const Matrix& x0,
                                            double rank_tol = 1e-10);

struct RateEstimate {
  double slope = 0.0;  // log10(error) per iteration
  double r2 = 0.0;
  double window = 0.5;
  std::size_t points = 0;
  bool flat = false;  // no measurable decay (constant error)
};

/// Least-squares line through log10(pairwise error) over the last
/// tail_fraction of the pre-convergence steps. Errors below floor are dropped.
RateEstimate fit_rate(const SimulationTrace& trace, double tail_fraction = 0.5,
                      double floor = 1e-14);

/// Largest change of the predicted limit direction when every row of X0 is
/// moved by eps (relative) along a random tangent direction and re-projected.
double continuity_probe(const WeightMatrix& a, const BoundaryFamily& family, const Matrix& x0,
                        double eps, int trials, std::uint64_t seed,
                        const DecisionOptions& options = {});

/// Rows of x moved by eps * |x_i| along random unit tangents, then projected back.
Matrix tangential_perturbation(const BoundaryFamily& family, const Matrix& x, double eps,
                               std::uint64_t seed);

}  // namespace starcons
