#pragma once

#include "starcons/dynamics.hpp"
#include "starcons/geometry.hpp"
#include "starcons/graph.hpp"
#include "starcons/random.hpp"

#include <cmath>
#include <numbers>

namespace starcons::testing {

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Matrix gaussian_matrix(Eigen::Index n, Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

inline RowVector unit_row(Eigen::Index d, Rng& rng) {
  RowVector u = gaussian_matrix(1, d, rng).row(0);
  return u / u.norm();
}

/// lp with p drawn from {1, 2, 3, inf} or a random star boundary.
inline DirectionalFunction random_gamma(int d, Rng& rng) {
  static const double ps[] = {1.0, 2.0, 3.0, kInfiniteP};
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  const int k = kind(rng);
  if (k == 4) return make_random_star_gamma(d, child_seed(rng));
  return make_lp_gamma(ps[k], radius(rng), d);
}

struct TestInstance {
  BoundaryFamily family;
  WeightMatrix a;
  Matrix x0;
};

/// Valid random instance; n in [2, max_n], d in [2, max_d].
inline TestInstance random_instance(std::uint64_t seed, int max_n = 6, int max_d = 6, bool shared = false) {
  Rng rng = make_rng(seed);
  const int n = std::uniform_int_distribution<int>(2, max_n)(rng);
  const int d = std::uniform_int_distribution<int>(2, max_d)(rng);
  std::vector<DirectionalFunction> g;
  if (shared) {
    g.assign(static_cast<std::size_t>(n), random_gamma(d, rng));
  } else {
    for (int i = 0; i < n; ++i) g.push_back(random_gamma(d, rng));
  }
  BoundaryFamily family(std::move(g));
  WeightMatrix a = random_weight_matrix(random_scc_graph(static_cast<std::size_t>(n), 0.3, child_seed(rng)),
                                        family, child_seed(rng));
  Matrix x0 = rowwise_project(family, gaussian_matrix(n, d, rng));
  return {std::move(family), std::move(a), std::move(x0)};
}

}  // namespace starcons::testing
