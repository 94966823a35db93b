#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mgrid {

/// One undirected edge between agents `i` and `j` (1-based) with weight `w > 0`.
struct Edge {
  int i;
  int j;
  double w;
};

/// Weighted undirected communication graph over `n` agents.
///
/// Vertices are numbered 1..n in every public interface (matrix storage and
/// per-agent vectors are 0-based as usual: entry (r, c) of weights() is the
/// weight between agents r+1 and c+1). The weight matrix is symmetric with a
/// zero diagonal; a_ij > 0 iff the edge (i, j) exists. Instances are immutable
/// after construction and safe to share across threads.
class CommGraph {
 public:
  /// Builds and validates the graph. Throws std::invalid_argument on a
  /// self-loop ("self-loop"), a repeated (i,j)/(j,i) pair ("duplicate edge"),
  /// an endpoint outside 1..n ("bad index"), or a non-positive weight.
  CommGraph(int n, const std::vector<Edge>& edges);

  int size() const { return n_; }

  /// Symmetric n×n weight matrix a_ij, zero diagonal.
  const Eigen::MatrixXd& weights() const { return w_; }

  /// Diagonal degree matrix D, d_ii = sum_j a_ij.
  Eigen::MatrixXd degree_matrix() const;

  /// Laplacian L = D - A. Symmetric, zero row sums.
  Eigen::MatrixXd laplacian() const;

  /// True iff every vertex pair is joined by a path of positive-weight edges.
  /// Decided by breadth-first traversal (no spectral tolerances involved).
  bool is_connected() const;

  /// Neighbors of agent `i` (1-based), as 0-based indices in ascending order.
  /// The ascending order is part of the bit-reproducibility contract: every
  /// per-agent accumulation in the simulator walks neighbors in this order.
  const std::vector<int>& neighbors0(int i) const;

 private:
  int n_;
  Eigen::MatrixXd w_;
  std::vector<std::vector<int>> nbrs0_;
};

}  // namespace mgrid
