#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace mgrid {

/// One outer simulation step. Estimates are the pre-update values s(w) that
/// produced this step's commands; p_o/e aggregate the delivered powers.
struct TelemetryRecord {
  double t = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd p_cmd;
  Eigen::VectorXd p_delivered;
  double p_o = 0.0;
  double p_l = 0.0;
  double e = 0.0;
  Eigen::VectorXd r;  // per-agent ratios P_L/s_i
  std::optional<double> c_a;  // finite-time average (transient_match only)
};

/// Header plus one row per record; all numbers in %.17e scientific notation
/// so identical runs produce byte-identical output. c_a prints as nan when
/// absent. Columns: t, s_1..n, p_cmd_1..n, p_del_1..n, p_o, p_l, e, r_1..n,
/// c_a.
void write_csv(const std::vector<TelemetryRecord>& records, std::ostream& os);

}  // namespace mgrid
