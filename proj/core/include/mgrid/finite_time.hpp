#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mgrid/graph.hpp"

namespace mgrid {

/// Column-stochastic iteration weights for the finite-time average protocol:
/// p_ij = 1/(1 + |N_j|) for i in N_j ∪ {j}, else 0 (|N_j| counts neighbors,
/// independent of edge weights).
struct FtWeights {
  Eigen::MatrixXd p;
  // in0[i]: sorted 0-based senders {i} ∪ N_i feeding agent i's update; fixes
  // the accumulation order for bit-reproducibility.
  std::vector<std::vector<int>> in0;
};

/// Per-agent iteration histories gbar_i(0..steps), g_i(0..steps).
struct FtSequences {
  std::vector<std::vector<double>> gbar;
  std::vector<std::vector<double>> g;
};

/// First Hankel rank defect of an agent's difference sequences: the order M
/// and the kernel vector beta (last entry normalized to 1).
struct Defect {
  int m;
  Eigen::VectorXd beta;
};

/// Full protocol result: histories, per-agent defect orders and kernels, and
/// each agent's locally computed network average c_a (each within 1e-6
/// relative of the true mean; on ill-conditioned histories the per-agent
/// values can differ from each other by ~1e-7 relative).
struct FiniteTimeRun {
  FtSequences seqs;
  std::vector<int> m;
  std::vector<Eigen::VectorXd> beta;
  std::vector<double> c_a;
};

/// Throws "graph not connected" (needs n >= 2 and a connected topology).
FtWeights build_ft_weights(const CommGraph& g);

/// Runs gbar(m+1) = P·gbar(m), g(m+1) = P·g(m) from gbar(0) = gbar0,
/// g(0) = 1, retaining all steps+1 vectors. `steps` must equal 2N+1.
FtSequences iterate(const FtWeights& w, const std::vector<double>& gbar0,
                    int steps);

/// Successive differences seq(t) - seq(t-1), t = 1..2m+1.
/// Throws if seq has fewer than 2m+2 entries.
std::vector<double> difference_vectors(const std::vector<double>& seq, int m);

/// (m+1)×(m+1) Hankel matrix of a difference vector of length exactly 2m+1:
/// entry (r, c) = diff(r + c).
Eigen::MatrixXd hankel(const std::vector<double>& diff);

/// Smallest m >= 1 at which the two difference-Hankel matrices share a kernel
/// vector, found by stacking Γ{gbar} on Γ{g} and testing rank deficiency via
/// SVD (defective iff sigma_min <= eps_rank·sigma_max). A kernel shared by
/// both matrices — rather than a kernel of either one alone — is what makes
/// the average exact on every topology: on regular graphs the g-sequence is
/// constant and its lone Hankel is defective at m = 1 with an arbitrary
/// kernel. Sequences must have length 2N+2; throws "no defective Hankel
/// within 2N+1 steps" when no m <= N qualifies and "kernel normalization
/// failed" when the kernel's last entry vanishes.
Defect find_defect(const std::vector<double>& gbar_seq,
                   const std::vector<double>& g_seq, double eps_rank = 1e-8);

/// C_a = (gbar(0..M)·beta)/(g(0..M)·beta). Throws "degenerate kernel
/// denominator" when |g(0..M)·beta| < 1e-12·||g(0..M)||.
double finite_time_average(const std::vector<double>& gbar_seq,
                           const std::vector<double>& g_seq, const Defect& d);

/// Runs the full protocol: 2N+1 iterations, then each agent's defect search
/// and average from its own history alone.
FiniteTimeRun run_finite_time(const FtWeights& w,
                              const std::vector<double>& gbar0,
                              double eps_rank = 1e-8);

/// sum_{i != k} P_i,max/s_i recovered by the informed agent from the network
/// average: N·C_a - P_k,max/s_k. Throws if s_k <= 0.
double sum_excluding_k(double c_a, int n, double p_k_max, double s_k);

}  // namespace mgrid
