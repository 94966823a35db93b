#include "mgrid/consensus.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "mgrid/spectral.hpp"

namespace mgrid {

ConsensusState init_consensus(double p_t, int n, int k, double delta, double h,
                              double dt) {
  if (n < 2) throw std::invalid_argument("need at least two agents");
  if (!(p_t > 0.0)) throw std::invalid_argument("total capacity must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (k < 1 || k > n)
    throw std::invalid_argument("bad index: informed agent " +
                                std::to_string(k) + " outside 1.." +
                                std::to_string(n));
  ConsensusState st;
  st.s = Eigen::VectorXd::Constant(n, p_t);
  st.h = h;
  st.k = k;
  st.p_tilde_t = p_t + delta;
  st.w = 0;
  st.dt = dt;
  return st;
}

Eigen::VectorXd step_increment(const ConsensusState& st, const CommGraph& g) {
  const int n = static_cast<int>(st.s.size());
  if (g.size() != n)
    throw std::invalid_argument("graph size does not match state");
  const Eigen::MatrixXd& a = g.weights();
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    // Contractual order: pinning term first, then neighbors ascending.
    double acc = 0.0;
    if (st.k == i + 1) acc += st.h * (st.s[i] - st.p_tilde_t);
    for (int j : g.neighbors0(i + 1)) acc += a(i, j) * (st.s[i] - st.s[j]);
    u[i] = st.dt * (-acc);
  }
  return u;
}

void step(ConsensusState& st, const CommGraph& g) {
  const Eigen::VectorXd u = step_increment(st, g);
  const int n = static_cast<int>(st.s.size());
  for (int i = 0; i < n; ++i) st.s[i] = st.s[i] + u[i];
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(st.s[i]))
      throw std::runtime_error("numerical divergence");
  ++st.w;
}

bool has_converged(const ConsensusState& st, const CommGraph& g,
                   double eps_rel) {
  if (!(eps_rel > 0.0)) throw std::invalid_argument("eps_rel must be positive");
  const int n = static_cast<int>(st.s.size());
  double mx = st.s[0];
  double mn = st.s[0];
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (st.s[i] > mx) mx = st.s[i];
    if (st.s[i] < mn) mn = st.s[i];
    sum += st.s[i];
  }
  const double mean = sum / static_cast<double>(n);
  const double tol = eps_rel * std::abs(mean);
  if (!(mx - mn <= tol)) return false;
  const Eigen::VectorXd u = step_increment(st, g);
  double drift = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ai = std::abs(u[i]);
    if (ai > drift) drift = ai;
  }
  return drift <= tol;
}

Eigen::VectorXd closed_form_solution(const CommGraph& g, int k, double h,
                                     double p_t, double delta, double t) {
  if (!g.is_connected()) throw std::invalid_argument("graph not connected");
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");
  const int n = g.size();
  const Eigen::MatrixXd M = perturbed_system_matrix(g.laplacian(), k, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();
  const Eigen::VectorXd c =
      V.transpose() * Eigen::VectorXd::Constant(n, -delta);
  const Eigen::VectorXd y =
      V * (lam.array() * t).exp().cwiseProduct(c.array()).matrix();
  return Eigen::VectorXd::Constant(n, p_t + delta) + y;
}

}  // namespace mgrid
