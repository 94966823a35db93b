#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mgrid/graph.hpp"

namespace mgrid {

/// Eigenvalues of a symmetric system matrix, sorted ascending.
/// `dominant` is the largest eigenvalue (the slowest mode of -(L+Delta);
/// strictly negative for a connected graph and h > 0).
struct SpectralReport {
  Eigen::VectorXd eigenvalues;  // ascending
  double dominant;
};

/// Admissible estimate-perturbation bound: for any capacity step with
/// |delta| < delta_max, every estimate stays inside the band
/// [(1-theta)·P_T, (1+theta)·P_T] for the whole transient.
struct DeltaBound {
  double theta;      // required: 0 < theta < 1 - P_L/P_T
  double delta_max;  // theta·P_T / (1 + sqrt(N)), in kW
};

/// Returns -(L + Delta) where Delta adds the consensus gain h at the diagonal
/// entry of the informed agent k (1-based). Throws "h must be positive" for
/// h <= 0 and "bad index" for k outside 1..n.
Eigen::MatrixXd perturbed_system_matrix(const Eigen::MatrixXd& L, int k, double h);

/// Eigenvalues of a symmetric matrix via a symmetric eigensolver.
/// Throws "matrix not symmetric" if asymmetry exceeds 1e-9·||M||.
SpectralReport eigenvalues_sym(const Eigen::MatrixXd& M);

/// True iff every eigenvalue of -(L+Delta) is strictly negative
/// (max eigenvalue < -1e-12·||L+Delta||_inf). Accepts h = 0, for which the
/// Laplacian's zero eigenvalue survives and the result is false.
/// Throws "graph not connected" on a disconnected graph.
std::pair<bool, SpectralReport> verify_hurwitz(const CommGraph& g, int k, double h);

/// Dominant eigenvalue of -(L+Delta(h)) for each gain in `h_grid`
/// (strictly ascending, all positive). The returned sequence is strictly
/// decreasing in h and bounded below by the second-largest eigenvalue of -L.
std::vector<double> dominant_eigenvalue_sweep(const CommGraph& g, int k,
                                              const std::vector<double>& h_grid);

/// delta_max = theta·P_T/(1+sqrt(N)). Throws "theta out of range" unless
/// 0 < theta < 1 - P_L/P_T, and "load exceeds capacity" if P_L >= P_T.
DeltaBound delta_bound(double p_t, double p_l, int n, double theta);

/// The estimate band ((1-theta)·P_T, (1+theta)·P_T) used by runtime guards.
std::pair<double, double> transient_band(double p_t, double theta);

/// Minimum capacity of an added (N+1)-th generator for which the admissible
/// |delta| bound grows: [(sqrt(N+1) - sqrt(N)) / (1 + sqrt(N))]·P_T.
double capacity_addition_threshold(double p_t, long long n);

/// N·(sqrt(N+1) - sqrt(N))/(1 + sqrt(N)); strictly below 1/2 for every N >= 1
/// and approaching 1/2 from below as N grows.
double addition_ratio(long long n);

}  // namespace mgrid
