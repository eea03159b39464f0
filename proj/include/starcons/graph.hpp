#pragma once

// Directed interaction graphs and nonnegative weight matrices.

#include "starcons/geometry.hpp"
#include "starcons/types.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace starcons {

/// Edge (from, to) means agent `from` listens to agent `to`: a_{from,to} > 0.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  auto operator<=>(const Edge&) const = default;
};

class DirectedGraph {
 public:
  /// Throws on out-of-range endpoints or duplicate edges. Edges are kept sorted.
  DirectedGraph(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(std::size_t from, std::size_t to) const;
  bool has_all_self_loops() const;

  bool operator==(const DirectedGraph&) const = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

bool is_strongly_connected(const DirectedGraph& g);

/// Hamiltonian cycle on a random permutation, all self-loops, and every other
/// ordered pair with probability extra_edge_prob.
DirectedGraph random_scc_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed);

/// Nonnegative n x n matrix whose positive pattern is exactly its graph's edge set.
class WeightMatrix {
 public:
  /// Graph is read off the positive entries.
  explicit WeightMatrix(Matrix entries);
  /// Throws unless entries are positive exactly on the edges of graph.
  WeightMatrix(DirectedGraph graph, Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  const DirectedGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.size(); }
  double sigma_l() const noexcept { return sigma_l_; }
  double sigma_u() const noexcept { return sigma_u_; }

  WeightMatrix scaled(double alpha) const;

 private:
  DirectedGraph graph_;
  Matrix entries_;
  double sigma_l_ = 0.0;
  double sigma_u_ = 0.0;
};

struct RowDominanceReport {
  bool holds = false;
  Vector margins;  // a_ii gamma_min_i - sum_{j != i} a_ij gamma_max_j
};

RowDominanceReport check_row_dominance(const WeightMatrix& a, const BoundaryFamily& family);

/// Strong connectivity, all self-loops present, and the row inequality of check_row_dominance.
bool check_well_posed(const WeightMatrix& a, const BoundaryFamily& family);

/// Off-diagonal weights uniform in [0.1, 1]; each diagonal entry is the
/// smallest value satisfying the row inequality, inflated by (1 + mu) with
/// mu uniform in [0.05, 1].
WeightMatrix random_weight_matrix(const DirectedGraph& g, const BoundaryFamily& family,
                                  std::uint64_t seed);

}  // namespace starcons
