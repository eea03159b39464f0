#include "starcons/graph.hpp"

#include "starcons/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace starcons {

DirectedGraph::DirectedGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n_ == 0) throw ContractViolation("graph needs at least one node");
  for (const auto& e : edges_)
    if (e.from >= n_ || e.to >= n_)
      throw ContractViolation("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                              ") out of range");
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw ContractViolation("duplicate edge in graph");
}

bool DirectedGraph::has_edge(std::size_t from, std::size_t to) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

bool DirectedGraph::has_all_self_loops() const {
  for (std::size_t i = 0; i < n_; ++i)
    if (!has_edge(i, i)) return false;
  return true;
}

namespace {

std::size_t reach_count(const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const DirectedGraph& g) {
  const auto n = g.size();
  std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
  for (const auto& e : g.edges()) {
    fwd[e.from].push_back(e.to);
    bwd[e.to].push_back(e.from);
  }
  return reach_count(fwd) == n && reach_count(bwd) == n;
}

DirectedGraph random_scc_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed) {
  if (n < 2) throw ContractViolation("random_scc_graph: n must be at least 2");
  if (!(extra_edge_prob >= 0.0 && extra_edge_prob <= 1.0))
    throw ContractViolation("random_scc_graph: probability outside [0, 1]");
  Rng rng = make_rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<char> present(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    present[i * n + i] = 1;
    present[order[i] * n + order[(i + 1) % n]] = 1;
  }
  std::bernoulli_distribution extra(extra_edge_prob);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // Always draw so the stream does not depend on the cycle layout.
      const bool add = extra(rng);
      if (add) present[i * n + j] = 1;
    }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (present[i * n + j]) edges.push_back({i, j});
  return DirectedGraph(n, std::move(edges));
}

namespace {

DirectedGraph pattern_of(const Matrix& entries) {
  if (entries.rows() != entries.cols()) throw DimensionMismatch("weight matrix must be square");
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < entries.rows(); ++i)
    for (Eigen::Index j = 0; j < entries.cols(); ++j)
      if (entries(i, j) > 0.0)
        edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  return DirectedGraph(static_cast<std::size_t>(entries.rows()), std::move(edges));
}

}  // namespace

WeightMatrix::WeightMatrix(Matrix entries) : WeightMatrix(pattern_of(entries), entries) {}

WeightMatrix::WeightMatrix(DirectedGraph graph, Matrix entries)
    : graph_(std::move(graph)), entries_(std::move(entries)) {
  const auto n = static_cast<Eigen::Index>(graph_.size());
  if (entries_.rows() != n || entries_.cols() != n)
    throw DimensionMismatch("weight matrix shape does not match graph");
  sigma_l_ = std::numeric_limits<double>::infinity();
  sigma_u_ = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = entries_(i, j);
      if (!std::isfinite(a) || a < 0.0) throw ContractViolation("weight matrix must be nonnegative");
      const bool edge = graph_.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if ((a > 0.0) != edge)
        throw ContractViolation("weight pattern differs from graph at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
      if (a > 0.0) {
        sigma_l_ = std::min(sigma_l_, a);
        sigma_u_ = std::max(sigma_u_, a);
      }
    }
  if (sigma_u_ == 0.0) sigma_l_ = 0.0;
}

WeightMatrix WeightMatrix::scaled(double alpha) const {
  if (!(alpha > 0.0)) throw ContractViolation("scale factor must be positive");
  return WeightMatrix(graph_, entries_ * alpha);
}

RowDominanceReport check_row_dominance(const WeightMatrix& a, const BoundaryFamily& family) {
  const auto n = a.size();
  if (family.size() != n) throw DimensionMismatch("check_row_dominance: family size differs from n");
  RowDominanceReport report{true, Vector(static_cast<Eigen::Index>(n))};
  const Matrix& e = a.entries();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rhs += e(ii, static_cast<Eigen::Index>(j)) * family[j].gamma_max();
    report.margins[ii] = e(ii, ii) * family[i].gamma_min() - rhs;
    if (!(report.margins[ii] > 0.0)) report.holds = false;
  }
  return report;
}

bool check_well_posed(const WeightMatrix& a, const BoundaryFamily& family) {
  if (family.size() != a.size()) return false;
  return is_strongly_connected(a.graph()) && a.graph().has_all_self_loops() &&
         check_row_dominance(a, family).holds;
}

WeightMatrix random_weight_matrix(const DirectedGraph& g, const BoundaryFamily& family,
                                  std::uint64_t seed) {
  const auto n = g.size();
  if (family.size() != n) throw DimensionMismatch("random_weight_matrix: family size differs");
  if (!g.has_all_self_loops()) throw ContractViolation("random_weight_matrix: graph lacks a self-loop");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> off(0.1, 1.0);
  std::uniform_real_distribution<double> margin(0.05, 1.0);

  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& edge : g.edges())
    if (edge.from != edge.to)
      e(static_cast<Eigen::Index>(edge.from), static_cast<Eigen::Index>(edge.to)) = off(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double rhs = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rhs += e(ii, static_cast<Eigen::Index>(j)) * family[j].gamma_max();
    const double mu = margin(rng);
    // A lone self-loop row has rhs = 0; any positive weight works.
    e(ii, ii) = rhs > 0.0 ? rhs / family[i].gamma_min() * (1.0 + mu) : 1.0 + mu;
  }
  return WeightMatrix(g, std::move(e));
}

}  // namespace starcons
