#include "mgrid/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mgrid {

namespace {

void check_agent_index(int k, Eigen::Index n) {
  if (k < 1 || k > static_cast<int>(n))
    throw std::invalid_argument("bad index: agent " + std::to_string(k) +
                                " outside 1.." + std::to_string(n));
}

/// -(L + h e_k e_k^T) without the h > 0 precondition (h = 0 is meaningful
/// for the Hurwitz check: the Laplacian's zero mode survives).
Eigen::MatrixXd perturbed_unchecked(const Eigen::MatrixXd& L, int k, double h) {
  Eigen::MatrixXd m = -L;
  m(k - 1, k - 1) -= h;
  return m;
}

}  // namespace

Eigen::MatrixXd perturbed_system_matrix(const Eigen::MatrixXd& L, int k,
                                        double h) {
  if (L.rows() != L.cols())
    throw std::invalid_argument("matrix not symmetric: not square");
  check_agent_index(k, L.rows());
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  return perturbed_unchecked(L, k, h);
}

SpectralReport eigenvalues_sym(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("matrix not symmetric: not square");
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    throw std::invalid_argument("matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  SpectralReport rep;
  rep.eigenvalues = es.eigenvalues();  // ascending
  rep.dominant = rep.eigenvalues[rep.eigenvalues.size() - 1];
  return rep;
}

std::pair<bool, SpectralReport> verify_hurwitz(const CommGraph& g, int k,
                                               double h) {
  if (!g.is_connected()) throw std::invalid_argument("graph not connected");
  check_agent_index(k, g.size());
  if (h < 0.0) throw std::invalid_argument("h must be positive");
  const Eigen::MatrixXd L = g.laplacian();
  SpectralReport rep = eigenvalues_sym(perturbed_unchecked(L, k, h));
  // Strict negativity against a spectrum-scaled margin so that the h = 0
  // zero mode (computed as ~1e-15 by the solver) is classified as failing.
  double scale = L.cwiseAbs().maxCoeff() + h;
  if (scale < 1.0) scale = 1.0;
  const bool hurwitz = rep.dominant < -1e-12 * scale;
  return {hurwitz, rep};
}

std::vector<double> dominant_eigenvalue_sweep(const CommGraph& g, int k,
                                              const std::vector<double>& h_grid) {
  if (!g.is_connected()) throw std::invalid_argument("graph not connected");
  check_agent_index(k, g.size());
  const Eigen::MatrixXd L = g.laplacian();
  std::vector<double> out;
  out.reserve(h_grid.size());
  double prev = 0.0;
  bool first = true;
  for (double h : h_grid) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (!first && !(h > prev))
      throw std::invalid_argument("h grid must be strictly ascending");
    out.push_back(eigenvalues_sym(perturbed_unchecked(L, k, h)).dominant);
    prev = h;
    first = false;
  }
  return out;
}

DeltaBound delta_bound(double p_t, double p_l, int n, double theta) {
  if (!(p_t > 0.0)) throw std::invalid_argument("total capacity must be positive");
  if (p_l >= p_t) throw std::invalid_argument("load exceeds capacity");
  if (!(p_l > 0.0)) throw std::invalid_argument("load must be positive");
  if (n < 1) throw std::invalid_argument("bad index: agent count must be positive");
  const double theta_sup = 1.0 - p_l / p_t;
  if (!(theta > 0.0) || !(theta < theta_sup))
    throw std::invalid_argument("theta out of range");
  DeltaBound b;
  b.theta = theta;
  b.delta_max = theta * p_t / (1.0 + std::sqrt(static_cast<double>(n)));
  return b;
}

std::pair<double, double> transient_band(double p_t, double theta) {
  if (!(p_t > 0.0)) throw std::invalid_argument("total capacity must be positive");
  if (!(theta > 0.0) || !(theta < 1.0))
    throw std::invalid_argument("theta out of range");
  return {(1.0 - theta) * p_t, (1.0 + theta) * p_t};
}

double capacity_addition_threshold(double p_t, long long n) {
  if (!(p_t > 0.0)) throw std::invalid_argument("total capacity must be positive");
  if (n < 1) throw std::invalid_argument("bad index: agent count must be positive");
  const double nn = static_cast<double>(n);
  const double coef = (std::sqrt(nn + 1.0) - std::sqrt(nn)) / (1.0 + std::sqrt(nn));
  return coef * p_t;
}

double addition_ratio(long long n) {
  if (n < 1) throw std::invalid_argument("bad index: agent count must be positive");
  const double nn = static_cast<double>(n);
  return (nn * (std::sqrt(nn + 1.0) - std::sqrt(nn))) / (1.0 + std::sqrt(nn));
}

}  // namespace mgrid
