#include "doctest.h"
#include "support.hpp"

#include "starcons/analysis.hpp"

using namespace starcons;
using namespace starcons::testing;

namespace {

using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

BoundaryFamily unit_circles(std::size_t n, int d = 2) { return BoundaryFamily::uniform(make_lp_gamma(2, 1, d), n); }

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.row(i) /= m.row(i).norm();
  return out;
}

Matrix normalize_rows(const LMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const long double nrm = m.row(i).norm();
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = static_cast<double>(m(i, j) / nrm);
  }
  return out;
}

}  // namespace

TEST_CASE("d_gamma examples") {
  const WeightMatrix a(rows({{3, 1}, {1, 3}}));
  const Matrix x = rows({{1, 0}, {0, 1}});
  const Vector d = d_gamma_diag(a, unit_circles(2), x);
  CHECK(d[0] == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));

  // Consensus state u on every row: [AX]_i = s_i u.
  const WeightMatrix b(rows({{3, 1, 0}, {0, 2, 0.5}, {1, 0, 4}}));
  const double s = 1.0 / std::sqrt(2.0);
  Matrix consensus(3, 2);
  consensus.rowwise() = (RowVector(2) << s, s).finished();
  const Vector dc = d_gamma_diag(b, unit_circles(3), consensus);
  CHECK(dc[0] == doctest::Approx(1.0 / 4.0).epsilon(1e-15));
  CHECK(dc[1] == doctest::Approx(1.0 / 2.5).epsilon(1e-15));
  CHECK(dc[2] == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("d_gamma factorization identity") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = random_instance(seed);
    const Vector d = d_gamma_diag(inst.a, inst.family, inst.x0);
    CHECK((d.array() > 0.0).all());
    const Matrix lhs = rowwise_project(inst.family, inst.a.entries() * inst.x0);
    const Matrix rhs = d.asDiagonal() * (inst.a.entries() * inst.x0);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("step examples") {
  const WeightMatrix a(rows({{3, 1}, {1, 3}}));
  const Matrix out = step(a, unit_circles(2), rows({{1, 0}, {0, 1}}));
  const double r = std::sqrt(10.0);
  CHECK(max_abs_diff(out, rows({{3 / r, 1 / r}, {1 / r, 3 / r}})) < 1e-15);

  const Matrix antipodal = rows({{1, 0}, {-1, 0}});
  CHECK(max_abs_diff(step(a, unit_circles(2), antipodal), antipodal) == 0.0);

  // Consensus fixed point on a shared star boundary.
  const DirectionalFunction g = make_random_star_gamma(3, 4);
  const auto fam = BoundaryFamily::uniform(g, 4);
  const WeightMatrix w = random_weight_matrix(random_scc_graph(4, 0.5, 1), fam, 2);
  Matrix x(4, 3);
  x.rowwise() = radial_project(g, (RowVector(3) << 0.3, -1.0, 0.2).finished());
  CHECK(max_abs_diff(step(w, fam, x), x) < 1e-14);
}

TEST_CASE("step is invariant under positive scaling of A") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = random_instance(seed);
    const Matrix base = step(inst.a, inst.family, inst.x0);
    for (double alpha : {0.5, 3.0}) CHECK(max_abs_diff(step(inst.a.scaled(alpha), inst.family, inst.x0), base) < 1e-12);
  }
}

TEST_CASE("simulate examples") {
  const WeightMatrix a(rows({{3, 1}, {1, 3}}));
  SimulationOptions opt;
  opt.max_iters = 1000;

  const auto at_consensus = simulate(a, unit_circles(2), rows({{0.6, 0.8}, {0.6, 0.8}}), opt);
  CHECK(at_consensus.converged());
  CHECK(at_consensus.iterations() == 0);

  const auto stalled = simulate(a, unit_circles(2), rows({{1, 0}, {-1, 0}}), opt);
  CHECK(stalled.stop_reason == StopReason::max_iters);
  CHECK(stalled.iterations() == 1000);
  for (double e : stalled.pairwise_error) CHECK(e == 2.0);
  CHECK(to_string(stalled.stop_reason) == "max_iters");
}

TEST_CASE("half-space start converges to the direction of v X0") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = random_instance(seed);
    inst.x0.col(0) = inst.x0.col(0).cwiseAbs();
    inst.x0 = rowwise_project(inst.family, inst.x0);
    if (!check_halfspace(inst.x0).holds) continue;
    const auto trace = simulate(inst.a, inst.family, inst.x0);
    REQUIRE(trace.converged());
    const LimitVector v = estimate_v(inst.a, inst.family, inst.x0);
    RowVector dir = v.v.transpose() * inst.x0;
    dir /= dir.norm();
    const Matrix fin = trace.final_state();
    for (Eigen::Index i = 0; i < fin.rows(); ++i) CHECK((fin.row(i) / fin.row(i).norm() - dir).norm() < 1e-8);
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("trace invariants") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = random_instance(seed);
    const auto trace = simulate(inst.a, inst.family, inst.x0);
    CHECK(trace.states.size() == trace.pairwise_error.size());
    CHECK(trace.phi_history.size() == trace.pairwise_error.size());
    for (const auto& s : trace.states) CHECK(is_on_boundary(inst.family, s, 1e-10));
    for (double e : trace.pairwise_error) {
      CHECK(e >= 0.0);
      CHECK(e <= 2.0);
    }
    SimulationOptions light;
    light.record_states = false;
    const auto lean = simulate(inst.a, inst.family, inst.x0, light);
    CHECK(lean.states.size() == 2);
    CHECK(max_abs_diff(lean.final_state(), trace.final_state()) == 0.0);
    CHECK(lean.pairwise_error == trace.pairwise_error);
  }
  CHECK_THROWS_AS(simulate(WeightMatrix(rows({{3, 1}, {1, 3}})), unit_circles(2), rows({{1, 0}, {0, 1}}),
                           SimulationOptions{10, 0.0, true, false}),
                  ContractViolation);
}

TEST_CASE("degenerate stop when a row of AX vanishes") {
  // Violates the row inequality: row 0 of AX is (1,0) + (-1,0) = 0.
  const WeightMatrix a(rows({{1, 1}, {1, 3}}));
  const auto trace = simulate(a, unit_circles(2), rows({{1, 0}, {-1, 0}}));
  CHECK(trace.stop_reason == StopReason::degenerate);
  CHECK_THROWS_AS(estimate_v(a, unit_circles(2), rows({{1, 0}, {-1, 0}})), ContractViolation);
  CHECK_THROWS_AS(d_gamma_diag(a, unit_circles(2), rows({{1, 0}, {-1, 0}})), ZeroRowError);
}

TEST_CASE("product tracker starts at the identity and one step gives normalized A") {
  ProductTracker t(3);
  CHECK(max_abs_diff(t.y(), Matrix::Identity(3, 3)) == 0.0);
  CHECK(t.k() == 0);
  const WeightMatrix a(rows({{3, 1, 0}, {0, 3, 1}, {1, 0, 3}}));
  const auto fam = unit_circles(3);
  const Matrix x = rows({{1, 0}, {0, 1}, {-0.6, 0.8}});
  t = product_step(t, a, fam, x);
  CHECK(t.k() == 1);
  CHECK(max_abs_diff(t.y(), normalize_rows(a.entries())) < 1e-15);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(t.y().row(i).norm() - 1.0) < 1e-12);
}

TEST_CASE("product entries turn positive once every walk length is covered") {
  const WeightMatrix a(rows({{3, 1, 0}, {0, 3, 1}, {1, 0, 3}}));
  const auto fam = unit_circles(3);
  Matrix x = rows({{1, 0}, {0, 1}, {-0.6, 0.8}});
  ProductTracker t(3);
  LMatrix explicit_product = LMatrix::Identity(3, 3);
  for (int k = 0; k < 3; ++k) {
    const Vector d = d_gamma_diag(a, fam, x);
    explicit_product = (d.cast<long double>().asDiagonal() * a.entries().cast<long double>()) * explicit_product;
    t = product_step(t, a, fam, x);
    x = step(a, fam, x);
    // Self loops plus a 3-cycle: every pair is joined by a walk of length 2.
    CHECK((explicit_product.array() > 0).all() == (k >= 1));
  }
  CHECK((t.y().array() > 0.0).all());
  CHECK(max_abs_diff(t.y(), normalize_rows(explicit_product)) < 1e-14);
}

TEST_CASE("step and product agree with an extended-precision explicit product") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = random_instance(seed);
    const auto n = inst.x0.rows();
    SimulationOptions opt;
    opt.max_iters = 50;
    opt.tol = 1e-300;
    const JointRun run = simulate_with_product(inst.a, inst.family, inst.x0, opt, 0.0);
    REQUIRE(run.trace.states.size() == 51);

    LMatrix product = LMatrix::Identity(n, n);
    const LMatrix x0 = inst.x0.cast<long double>();
    const LMatrix am = inst.a.entries().cast<long double>();
    Matrix x = inst.x0;
    for (std::size_t k = 1; k <= 50; ++k) {
      const Vector d = d_gamma_diag(inst.a, inst.family, x);
      product = d.cast<long double>().asDiagonal() * am * product;
      // Keep the oracle in range; a common scalar does not change directions.
      product /= product.cwiseAbs().maxCoeff();
      x = run.trace.states[k];
      const Matrix predicted = normalize_rows(LMatrix(product * x0));
      CHECK(max_abs_diff(predicted, normalize_rows(run.trace.states[k])) < 1e-8);
    }
    CHECK(max_abs_diff(run.tracker.y(), normalize_rows(product)) < 1e-10);
  }
}

TEST_CASE("normalized product invariants") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const auto inst = random_instance(seed);
    const auto n = static_cast<std::size_t>(inst.x0.rows());
    SimulationOptions opt;
    opt.max_iters = 200;
    opt.record_states = false;
    const JointRun run = simulate_with_product(inst.a, inst.family, inst.x0, opt, 1e-300);
    const auto& phi = run.tracker.phiY_history();
    REQUIRE(phi.size() == run.tracker.k() + 1);
    for (std::size_t k = 1; k < phi.size(); ++k) CHECK(phi[k] <= phi[k - 1] + 1e-10);
    for (std::size_t s = 1; (s + 1) * n < phi.size(); ++s)
      CHECK(std::cos(phi[(s + 1) * n]) >= std::cos(phi[s * n]) - 1e-12);
    for (Eigen::Index i = 0; i < run.tracker.y().rows(); ++i)
      CHECK(std::abs(run.tracker.y().row(i).norm() - 1.0) < 1e-12);
    if (run.tracker.k() >= n) CHECK((run.tracker.y().array() > 0.0).all());

    // Row-norm ratios inside the bounds built from the measured factor extremes.
    const double nn = static_cast<double>(n);
    const double log_d11 = nn * (std::log(run.tracker.factor_sigma_l()) - std::log(run.tracker.factor_sigma_u()) - std::log(nn));
    const double lo = std::exp(log_d11 - 0.5 * std::log(nn));
    const double hi = std::exp(-log_d11 + 0.5 * std::log(nn));
    for (std::size_t s = 1; s <= run.tracker.k(); ++s) {
      const Vector r = run.tracker.ratio_log(s);
      const double rmax = r.maxCoeff(), rmin = r.minCoeff();
      CHECK(rmin / rmax >= lo);
      CHECK(rmax / rmin <= hi);
    }
  }
}

TEST_CASE("limit vector of a symmetric 2x2 instance") {
  const WeightMatrix a(rows({{3, 1}, {1, 3}}));
  const auto fam = unit_circles(2);
  const Matrix x0 = rows({{0.6, 0.8}, {0.6, 0.8}});
  const LimitVector v = estimate_v(a, fam, x0);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(v.v[0] - s) < 1e-10);
  CHECK(std::abs(v.v[1] - s) < 1e-10);

  // Brute force: 200 explicit factors, D is 1/4 on the consensus state.
  LMatrix p = LMatrix::Identity(2, 2);
  Matrix x = x0;
  for (int k = 0; k < 200; ++k) {
    p = d_gamma_diag(a, fam, x).cast<long double>().asDiagonal() * a.entries().cast<long double>() * p;
    x = step(a, fam, x);
  }
  const Matrix y = normalize_rows(p);
  Vector mean = y.colwise().sum().transpose();
  mean /= mean.norm();
  CHECK((mean - v.v).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(v.residual < kDefaultTolPhi);
}

TEST_CASE("limit vector is positive and the residual decays linearly") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = random_instance(seed);
    const LimitVector v = estimate_v(inst.a, inst.family, inst.x0);
    CHECK(std::abs(v.v.norm() - 1.0) < 1e-12);
    CHECK((v.v.array() > 0.0).all());
    CHECK(v.residual < kDefaultTolPhi);

    SimulationOptions opt;
    opt.record_states = false;
    const JointRun run = simulate_with_product(inst.a, inst.family, inst.x0, opt, kDefaultTolPhi);
    const auto& phi = run.tracker.phiY_history();
    const std::size_t n = inst.family.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t k = n; k < phi.size(); ++k) {
      const double y = std::log(phi[k]);
      sx += static_cast<double>(k);
      sy += y;
      sxx += static_cast<double>(k * k);
      sxy += static_cast<double>(k) * y;
      ++m;
    }
    REQUIRE(m >= 3);
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope < 0.0);
  }
}

TEST_CASE("estimate_v reports non-convergence") {
  const auto inst = random_instance(3);
  try {
    estimate_v(inst.a, inst.family, inst.x0, 1e-10, 2);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.best_residual() > 1e-10);
  }
  CHECK_THROWS_AS(estimate_v(inst.a, inst.family, inst.x0, 0.0), ContractViolation);
}

TEST_CASE("linear step baseline") {
  Rng rng = make_rng(8);
  const Matrix x = gaussian_matrix(3, 2, rng);
  CHECK(max_abs_diff(linear_step(Matrix::Identity(3, 3), x), x) == 0.0);

  // Path graph Laplacian; I - eta L drives rows to their mean, checked
  // against the eigendecomposition of L.
  const Matrix lap = rows({{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}});
  const double eta = 0.2;
  const Matrix w = Matrix::Identity(3, 3) - eta * lap;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  Matrix xt = x;
  for (int t = 1; t <= 60; ++t) {
    xt = linear_step(w, xt);
    const Eigen::VectorXd pow = (1.0 - eta * es.eigenvalues().array()).pow(t);
    const Matrix oracle = es.eigenvectors() * pow.asDiagonal() * es.eigenvectors().transpose() * x;
    CHECK(max_abs_diff(xt, oracle) < 1e-12);
  }
  const RowVector mean = x.colwise().mean();
  for (Eigen::Index i = 0; i < 3; ++i) CHECK((xt.row(i) - mean).norm() < 1e-3);
  CHECK_THROWS_AS(linear_step(Matrix::Identity(2, 2), x), DimensionMismatch);
}

TEST_CASE("ten times a valid A blows up the linear iteration but not the projected one") {
  const auto inst = random_instance(12);
  const WeightMatrix big = inst.a.scaled(10.0);
  Matrix x = inst.x0;
  bool exploded = false;
  for (int t = 0; t < 100 && !exploded; ++t) {
    x = linear_step(big.entries(), x);
    exploded = x.norm() > 1e6;
  }
  CHECK(exploded);
  const auto t1 = simulate(inst.a, inst.family, inst.x0);
  const auto t10 = simulate(big, inst.family, inst.x0);
  CHECK(t1.converged());
  CHECK(t10.iterations() == t1.iterations());
  CHECK(max_abs_diff(t10.final_state(), t1.final_state()) < 1e-10);
}

TEST_CASE("antipodal fixed point is unstable") {
  const WeightMatrix a(rows({{3, 1}, {1, 3}}));
  const auto fam = unit_circles(2);
  const Matrix x0 = rows({{1, 0}, {-1, 0}});
  // Moving both agents can keep the pair antipodal, which the symmetric A
  // preserves; nudge one agent along its tangent.
  Matrix nudged = x0;
  nudged(0, 1) = 1e-6;
  nudged = rowwise_project(fam, nudged);
  SimulationOptions opt;
  opt.max_iters = 10000;
  const auto trace = simulate(a, fam, nudged, opt);
  CHECK(trace.converged());
}
