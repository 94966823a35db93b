#include "mgrid/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mgrid/consensus.hpp"

namespace mgrid {

const char* payload_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::estimate:
      return "estimate";
    case PayloadKind::ft_gbar:
      return "ft_gbar";
    case PayloadKind::ft_g:
      return "ft_g";
  }
  return "unknown";
}

AgentNetwork::AgentNetwork(const CommGraph& g, const Eigen::VectorXd& capacities,
                           double h, double dt, double eps_rel)
    : g_(g), ftw_(build_ft_weights(g_)), h_(h), dt_(dt), eps_rel_(eps_rel) {
  const int n = g_.size();
  if (capacities.size() != n)
    throw std::invalid_argument("capacity vector size does not match graph");
  for (int i = 0; i < n; ++i)
    if (!(capacities[i] > 0.0))
      throw std::invalid_argument("capacity must be positive: agent " +
                                  std::to_string(i + 1));
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(eps_rel > 0.0)) throw std::invalid_argument("eps_rel must be positive");
  double p_t = 0.0;
  for (int i = 0; i < n; ++i) p_t += capacities[i];
  agents_.resize(n);
  for (int i = 0; i < n; ++i) {
    agents_[i].id = i + 1;
    agents_[i].own_capacity = capacities[i];
    agents_[i].estimate = p_t;
  }
}

const AgentState& AgentNetwork::agent(int id) const {
  if (id < 1 || id > size())
    throw std::invalid_argument("bad index: agent " + std::to_string(id) +
                                " outside 1.." + std::to_string(size()));
  return agents_[id - 1];
}

Eigen::VectorXd AgentNetwork::estimates() const {
  Eigen::VectorXd s(size());
  for (int i = 0; i < size(); ++i) s[i] = agents_[i].estimate;
  return s;
}

Eigen::VectorXd AgentNetwork::capacities() const {
  Eigen::VectorXd c(size());
  for (int i = 0; i < size(); ++i) c[i] = agents_[i].own_capacity;
  return c;
}

void AgentNetwork::deliver_message(int from, int to, PayloadKind kind,
                                   double value) {
  if (from < 1 || from > size() || to < 1 || to > size())
    throw std::invalid_argument("bad index: message endpoints (" +
                                std::to_string(from) + ", " +
                                std::to_string(to) + ")");
  if (g_.weights()(from - 1, to - 1) == 0.0)
    throw std::runtime_error("locality violation: message from agent " +
                             std::to_string(from) + " to non-neighbor " +
                             std::to_string(to));
  agents_[to - 1].inbox.push_back({from, kind, value});
  if (logging_) log_.push_back({round_, from, to, kind, value});
}

void AgentNetwork::post_to_neighbors(int from, PayloadKind kind, double value) {
  for (int j0 : g_.neighbors0(from)) deliver_message(from, j0 + 1, kind, value);
}

void AgentNetwork::run_consensus_round() {
  const int n = size();
  for (AgentState& a : agents_) a.inbox.clear();
  // Send phase: ascending sender ids, so every inbox is sorted by sender.
  for (int i = 1; i <= n; ++i)
    post_to_neighbors(i, PayloadKind::estimate, agents_[i - 1].estimate);
  // Update phase from the frozen inboxes. Accumulation order (pinning term
  // first, then inbox entries, which arrive in ascending-sender order)
  // reproduces consensus::step_increment bit-for-bit.
  std::vector<double> upd(n);
  for (int i = 0; i < n; ++i) {
    const AgentState& ag = agents_[i];
    double acc = 0.0;
    if (ag.informed) acc += h_ * (ag.estimate - ag.p_tilde_t);
    for (const RoundMessage& msg : ag.inbox)
      acc += g_.weights()(i, msg.from - 1) * (ag.estimate - msg.value);
    upd[i] = dt_ * (-acc);
  }
  for (int i = 0; i < n; ++i) {
    agents_[i].estimate = agents_[i].estimate + upd[i];
    if (!std::isfinite(agents_[i].estimate))
      throw std::runtime_error("numerical divergence");
  }
  ++round_;
}

bool AgentNetwork::has_converged() const {
  ConsensusState st;
  st.s = estimates();
  st.h = h_;
  st.k = informed_;
  st.p_tilde_t = informed_ != 0 ? agents_[informed_ - 1].p_tilde_t : 0.0;
  st.w = round_;
  st.dt = dt_;
  return mgrid::has_converged(st, g_, eps_rel_);
}

void AgentNetwork::inject_capacity_event(int k, double delta,
                                         double p_tilde_t) {
  if (k < 1 || k > size())
    throw std::invalid_argument("bad index: agent " + std::to_string(k) +
                                " outside 1.." + std::to_string(size()));
  if (informed_ != 0 && !has_converged())
    throw std::runtime_error("consensus in progress");
  if (informed_ != 0) {
    agents_[informed_ - 1].informed = false;
    agents_[informed_ - 1].delta = 0.0;
    agents_[informed_ - 1].p_tilde_t = 0.0;
  }
  AgentState& ag = agents_[k - 1];
  ag.own_capacity = ag.own_capacity + delta;
  ag.informed = true;
  ag.delta = delta;
  ag.p_tilde_t = p_tilde_t;
  informed_ = k;
}

FiniteTimeRun AgentNetwork::run_finite_time_protocol(double eps_rank) {
  const int n = size();
  const int steps = 2 * n + 1;
  FiniteTimeRun out;
  out.seqs.gbar.assign(n, std::vector<double>(steps + 1));
  out.seqs.g.assign(n, std::vector<double>(steps + 1));
  std::vector<double> gb(n);
  std::vector<double> gg(n, 1.0);
  for (int i = 0; i < n; ++i) {
    gb[i] = agents_[i].own_capacity / agents_[i].estimate;
    if (!std::isfinite(gb[i])) throw std::runtime_error("numerical divergence");
    out.seqs.gbar[i][0] = gb[i];
    out.seqs.g[i][0] = 1.0;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rb(n);
  std::vector<double> rg(n);
  std::vector<double> nb(n);
  std::vector<double> ng(n);
  for (int m = 0; m < steps; ++m) {
    for (AgentState& a : agents_) a.inbox.clear();
    for (int i = 1; i <= n; ++i) {
      post_to_neighbors(i, PayloadKind::ft_gbar, gb[i - 1]);
      post_to_neighbors(i, PayloadKind::ft_g, gg[i - 1]);
    }
    for (int i = 0; i < n; ++i) {
      std::fill(rb.begin(), rb.end(), nan);
      std::fill(rg.begin(), rg.end(), nan);
      for (const RoundMessage& msg : agents_[i].inbox)
        (msg.kind == PayloadKind::ft_gbar ? rb : rg)[msg.from - 1] = msg.value;
      // Same accumulation order as finite_time::iterate: ascending over
      // {i} and its neighbors, with the agent's own value in place.
      double ab = 0.0;
      double ag = 0.0;
      for (int j : ftw_.in0[i]) {
        ab += ftw_.p(i, j) * (j == i ? gb[i] : rb[j]);
        ag += ftw_.p(i, j) * (j == i ? gg[i] : rg[j]);
      }
      nb[i] = ab;
      ng[i] = ag;
    }
    gb = nb;
    gg = ng;
    for (int i = 0; i < n; ++i) {
      out.seqs.gbar[i][m + 1] = gb[i];
      out.seqs.g[i][m + 1] = gg[i];
    }
    ++round_;
  }
  for (AgentState& a : agents_) a.inbox.clear();
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

void AgentNetwork::enable_message_log() {
  logging_ = true;
  log_.clear();
}

void write_message_csv(const std::vector<MessageLogEntry>& log,
                       std::ostream& os) {
  os << "round,sender,receiver,kind,value\n";
  char buf[96];
  for (const MessageLogEntry& m : log) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%d,%s,%.17e\n", m.round, m.sender,
                  m.receiver, payload_name(m.kind), m.value);
    os << buf;
  }
}

}  // namespace mgrid
