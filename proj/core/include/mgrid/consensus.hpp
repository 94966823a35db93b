#pragma once

#include <Eigen/Dense>

#include "mgrid/graph.hpp"

namespace mgrid {

/// State of the capacity-estimation consensus
///
///   s_i' = -h·[i = k]·(s_i - P~_T) - sum_{j in N_i} a_ij·(s_i - s_j)
///
/// discretized by forward Euler with step dt. All agents start at the known
/// total capacity P_T; only the informed agent k targets the post-event total
/// p_tilde_t = P_T + delta, and the gain h pulls the whole network there.
struct ConsensusState {
  Eigen::VectorXd s;   // estimates s_i, kW
  double h;            // consensus gain, 1/s
  int k;               // informed agent, 1-based; 0 = no informed agent
  double p_tilde_t;    // target total known only to agent k, kW
  long w;              // step counter
  double dt;           // step size, s
};

/// s = P_T·1, p_tilde_t = P_T + delta, w = 0. Throws on n < 2, h <= 0,
/// dt <= 0, or k outside 1..n ("bad index").
ConsensusState init_consensus(double p_t, int n, int k, double delta, double h,
                              double dt);

/// The Euler increment dt·(-h·[i=k]·(s_i - p~) - sum_j a_ij·(s_i - s_j)) for
/// every agent, accumulated h-term first, then neighbors in ascending index
/// order. This exact evaluation order is the bit-reproducibility contract
/// shared with the message-passing layer.
Eigen::VectorXd step_increment(const ConsensusState& st, const CommGraph& g);

/// One forward-Euler step in place; increments w. Throws "numerical
/// divergence" if any estimate leaves the finite range (dt too large for the
/// system's spectrum).
void step(ConsensusState& st, const CommGraph& g);

/// True iff spread and drift are both small relative to the mean estimate:
///   max_i s_i - min_i s_i  <= eps_rel·|mean(s)|   and
///   ||one-step increment||_inf <= eps_rel·|mean(s)|.
bool has_converged(const ConsensusState& st, const CommGraph& g, double eps_rel);

/// Closed-form S(t) = p~·1 + e^{-(L+Delta)t}·(-delta·1) via symmetric
/// eigendecomposition. Throws "graph not connected".
Eigen::VectorXd closed_form_solution(const CommGraph& g, int k, double h,
                                     double p_t, double delta, double t);

}  // namespace mgrid
