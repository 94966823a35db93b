#include "mgrid/graph.hpp"

#include <stdexcept>
#include <string>

namespace mgrid {

CommGraph::CommGraph(int n, const std::vector<Edge>& edges) : n_(n) {
  if (n < 1) throw std::invalid_argument("bad index: agent count must be positive");
  w_ = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : edges) {
    if (e.i < 1 || e.i > n || e.j < 1 || e.j > n)
      throw std::invalid_argument("bad index: edge (" + std::to_string(e.i) +
                                  ", " + std::to_string(e.j) +
                                  ") outside 1.." + std::to_string(n));
    if (e.i == e.j)
      throw std::invalid_argument("self-loop: agent " + std::to_string(e.i));
    if (!(e.w > 0.0))
      throw std::invalid_argument("edge weight must be positive: (" +
                                  std::to_string(e.i) + ", " +
                                  std::to_string(e.j) + ")");
    const int r = e.i - 1;
    const int c = e.j - 1;
    if (w_(r, c) != 0.0)
      throw std::invalid_argument("duplicate edge: (" + std::to_string(e.i) +
                                  ", " + std::to_string(e.j) + ")");
    w_(r, c) = e.w;
    w_(c, r) = e.w;
  }
  nbrs0_.resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w_(i, j) != 0.0) nbrs0_[i].push_back(j);
}

Eigen::MatrixXd CommGraph::degree_matrix() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int j : nbrs0_[i]) acc += w_(i, j);
    d(i, i) = acc;
  }
  return d;
}

Eigen::MatrixXd CommGraph::laplacian() const { return degree_matrix() - w_; }

bool CommGraph::is_connected() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : nbrs0_[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n_;
}

const std::vector<int>& CommGraph::neighbors0(int i) const {
  if (i < 1 || i > n_)
    throw std::invalid_argument("bad index: agent " + std::to_string(i) +
                                " outside 1.." + std::to_string(n_));
  return nbrs0_[i - 1];
}

}  // namespace mgrid
