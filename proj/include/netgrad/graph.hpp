#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netgrad {

/// Undirected, unweighted communication topology. Vertices are 0-indexed.
/// Neighbor lists are sorted, duplicate-free, symmetric and loop-free.
class Graph {
 public:
  Graph() = default;

  std::size_t size() const { return adjacency_.size(); }
  std::size_t edge_count() const;
  std::size_t degree(std::size_t v) const { return adjacency_.at(v).size(); }
  std::size_t max_degree() const;

  std::span<const std::size_t> neighbors(std::size_t v) const {
    return adjacency_.at(v);
  }

  /// Canonical edge list with i < j, lexicographically sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend Graph make_from_edges(
      std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Throws std::invalid_argument on out-of-range endpoints or self-loops.
/// Duplicate and reversed pairs collapse to one edge.
Graph make_from_edges(std::size_t n,
                      std::span<const std::pair<std::size_t, std::size_t>> edges);

Graph make_cycle(std::size_t n);

/// Outer 5-cycle, inner pentagram, five spokes.
Graph make_petersen();

Graph make_complete(std::size_t n);

bool is_connected(const Graph& g);

/// L = D - A.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto nb = g.neighbors(static_cast<std::size_t>(v));
    L(v, v) = static_cast<Scalar>(nb.size());
    for (std::size_t u : nb) L(v, static_cast<Eigen::Index>(u)) = Scalar(-1);
  }
  return L;
}

/// Laplacian eigenvalues in ascending order.
Eigen::VectorXd laplacian_spectrum(const Graph& g);

/// Second-smallest Laplacian eigenvalue (0 for a single vertex).
double algebraic_connectivity(const Graph& g);

/// Edge-list text: first non-comment line is N, then one `i j` pair per line.
/// `#` starts a comment. Errors name the offending line.
Graph parse_edge_list(std::istream& in);

}  // namespace netgrad
