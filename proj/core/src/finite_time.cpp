#include "mgrid/finite_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace mgrid {

FtWeights build_ft_weights(const CommGraph& g) {
  if (g.size() < 2 || !g.is_connected())
    throw std::invalid_argument("graph not connected");
  const int n = g.size();
  FtWeights w;
  w.p = Eigen::MatrixXd::Zero(n, n);
  w.in0.resize(n);
  for (int j = 0; j < n; ++j) {
    const std::vector<int>& nb = g.neighbors0(j + 1);
    const double pj = 1.0 / (1.0 + static_cast<double>(nb.size()));
    w.p(j, j) = pj;
    for (int i : nb) w.p(i, j) = pj;
  }
  for (int i = 0; i < n; ++i) {
    w.in0[i].push_back(i);
    const std::vector<int>& nb = g.neighbors0(i + 1);
    w.in0[i].insert(w.in0[i].end(), nb.begin(), nb.end());
    std::sort(w.in0[i].begin(), w.in0[i].end());
  }
  return w;
}

FtSequences iterate(const FtWeights& w, const std::vector<double>& gbar0,
                    int steps) {
  const int n = static_cast<int>(w.p.rows());
  if (static_cast<int>(gbar0.size()) != n)
    throw std::invalid_argument("gbar0 size does not match weight matrix");
  if (steps != 2 * n + 1)
    throw std::invalid_argument("steps must equal 2N+1, got " +
                                std::to_string(steps));
  for (double v : gbar0)
    if (!std::isfinite(v))
      throw std::invalid_argument("gbar0 must be finite");
  FtSequences sq;
  sq.gbar.assign(n, std::vector<double>(steps + 1));
  sq.g.assign(n, std::vector<double>(steps + 1));
  std::vector<double> gb = gbar0;
  std::vector<double> gg(n, 1.0);
  std::vector<double> nb(n);
  std::vector<double> ng(n);
  for (int i = 0; i < n; ++i) {
    sq.gbar[i][0] = gb[i];
    sq.g[i][0] = 1.0;
  }
  for (int m = 0; m < steps; ++m) {
    for (int i = 0; i < n; ++i) {
      double ab = 0.0;
      double ag = 0.0;
      for (int j : w.in0[i]) {
        ab += w.p(i, j) * gb[j];
        ag += w.p(i, j) * gg[j];
      }
      nb[i] = ab;
      ng[i] = ag;
    }
    gb.swap(nb);
    gg.swap(ng);
    for (int i = 0; i < n; ++i) {
      sq.gbar[i][m + 1] = gb[i];
      sq.g[i][m + 1] = gg[i];
    }
  }
  return sq;
}

std::vector<double> difference_vectors(const std::vector<double>& seq, int m) {
  if (m < 0) throw std::invalid_argument("m must be nonnegative");
  if (static_cast<int>(seq.size()) < 2 * m + 2)
    throw std::invalid_argument("insufficient history: need " +
                                std::to_string(2 * m + 2) + " entries, have " +
                                std::to_string(seq.size()));
  std::vector<double> d(2 * m + 1);
  for (int t = 0; t < 2 * m + 1; ++t) d[t] = seq[t + 1] - seq[t];
  return d;
}

Eigen::MatrixXd hankel(const std::vector<double>& diff) {
  const int len = static_cast<int>(diff.size());
  if (len < 1 || len % 2 == 0)
    throw std::invalid_argument("difference vector length must be 2m+1");
  const int m1 = (len + 1) / 2;
  Eigen::MatrixXd h(m1, m1);
  for (int r = 0; r < m1; ++r)
    for (int c = 0; c < m1; ++c) h(r, c) = diff[r + c];
  return h;
}

Defect find_defect(const std::vector<double>& gbar_seq,
                   const std::vector<double>& g_seq, double eps_rank) {
  if (gbar_seq.size() != g_seq.size())
    throw std::invalid_argument("sequence lengths differ");
  const int len = static_cast<int>(gbar_seq.size());
  if (len < 4 || len % 2 != 0)
    throw std::invalid_argument("sequences must have length 2N+2");
  const int n = len / 2 - 1;
  for (int m = 1; m <= n; ++m) {
    const Eigen::MatrixXd hb = hankel(difference_vectors(gbar_seq, m));
    const Eigen::MatrixXd hg = hankel(difference_vectors(g_seq, m));
    const int m1 = m + 1;
    Eigen::MatrixXd stacked(2 * m1, m1);
    stacked.topRows(m1) = hb;
    stacked.bottomRows(m1) = hg;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv[0] == 0.0 || sv[m1 - 1] <= eps_rank * sv[0]) {
      Eigen::VectorXd beta = svd.matrixV().col(m1 - 1);
      if (std::abs(beta[m1 - 1]) < 1e-10 * beta.norm())
        throw std::runtime_error("kernel normalization failed");
      beta /= beta[m1 - 1];
      // The division leaves the pivot at value/value rather than exactly 1.
      beta[m1 - 1] = 1.0;
      return {m, beta};
    }
  }
  throw std::runtime_error("no defective Hankel within 2N+1 steps");
}

double finite_time_average(const std::vector<double>& gbar_seq,
                           const std::vector<double>& g_seq, const Defect& d) {
  const int m1 = d.m + 1;
  if (static_cast<int>(gbar_seq.size()) < m1 ||
      static_cast<int>(g_seq.size()) < m1)
    throw std::invalid_argument("insufficient history: need " +
                                std::to_string(m1) + " entries");
  if (static_cast<int>(d.beta.size()) != m1)
    throw std::invalid_argument("kernel size does not match defect order");
  double num = 0.0;
  double den = 0.0;
  double gnorm2 = 0.0;
  for (int t = 0; t < m1; ++t) {
    num += gbar_seq[t] * d.beta[t];
    den += g_seq[t] * d.beta[t];
    gnorm2 += g_seq[t] * g_seq[t];
  }
  if (std::abs(den) < 1e-12 * std::sqrt(gnorm2))
    throw std::runtime_error("degenerate kernel denominator");
  return num / den;
}

FiniteTimeRun run_finite_time(const FtWeights& w,
                              const std::vector<double>& gbar0,
                              double eps_rank) {
  const int n = static_cast<int>(w.p.rows());
  FiniteTimeRun out;
  out.seqs = iterate(w, gbar0, 2 * n + 1);
  out.m.resize(n);
  out.beta.resize(n);
  out.c_a.resize(n);
  for (int i = 0; i < n; ++i) {
    Defect d = find_defect(out.seqs.gbar[i], out.seqs.g[i], eps_rank);
    out.c_a[i] = finite_time_average(out.seqs.gbar[i], out.seqs.g[i], d);
    out.m[i] = d.m;
    out.beta[i] = std::move(d.beta);
  }
  return out;
}

double sum_excluding_k(double c_a, int n, double p_k_max, double s_k) {
  if (n < 1) throw std::invalid_argument("bad index: agent count must be positive");
  if (!(s_k > 0.0)) throw std::invalid_argument("s_k must be positive");
  return static_cast<double>(n) * c_a - p_k_max / s_k;
}

}  // namespace mgrid
