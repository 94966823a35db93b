#include "mgrid/telemetry.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace mgrid {

namespace {

void append_num(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  row += buf;
}

}  // namespace

void write_csv(const std::vector<TelemetryRecord>& records, std::ostream& os) {
  const Eigen::Index n = records.empty() ? 0 : records.front().s.size();
  std::string line = "t";
  for (Eigen::Index i = 1; i <= n; ++i) line += ",s_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) line += ",p_cmd_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) line += ",p_del_" + std::to_string(i);
  line += ",p_o,p_l,e";
  for (Eigen::Index i = 1; i <= n; ++i) line += ",r_" + std::to_string(i);
  line += ",c_a\n";
  os << line;
  std::string row;
  for (const TelemetryRecord& rec : records) {
    row.clear();
    append_num(row, rec.t);
    for (Eigen::Index i = 0; i < n; ++i) {
      row += ',';
      append_num(row, rec.s[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      row += ',';
      append_num(row, rec.p_cmd[i]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      row += ',';
      append_num(row, rec.p_delivered[i]);
    }
    row += ',';
    append_num(row, rec.p_o);
    row += ',';
    append_num(row, rec.p_l);
    row += ',';
    append_num(row, rec.e);
    for (Eigen::Index i = 0; i < n; ++i) {
      row += ',';
      append_num(row, rec.r[i]);
    }
    row += ',';
    if (rec.c_a)
      append_num(row, *rec.c_a);
    else
      row += "nan";
    row += '\n';
    os << row;
  }
}

}  // namespace mgrid
