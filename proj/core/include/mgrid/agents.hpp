#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "mgrid/finite_time.hpp"
#include "mgrid/graph.hpp"

namespace mgrid {

enum class PayloadKind { estimate, ft_gbar, ft_g };

const char* payload_name(PayloadKind kind);

struct RoundMessage {
  int from = 0;  // 1-based sender
  PayloadKind kind = PayloadKind::estimate;
  double value = 0.0;
};

/// One agent of the cyber layer. `delta` and `p_tilde_t` are private to the
/// informed agent; nothing in this module ever reads them for any agent with
/// informed == false, and no message carries them.
struct AgentState {
  int id = 0;  // 1-based
  double own_capacity = 0.0;
  double estimate = 0.0;
  std::vector<RoundMessage> inbox;
  bool informed = false;
  double delta = 0.0;
  double p_tilde_t = 0.0;
};

struct MessageLogEntry {
  long round = 0;
  int sender = 0;
  int receiver = 0;
  PayloadKind kind = PayloadKind::estimate;
  double value = 0.0;
};

/// Synchronous-round message-passing network. A round is: every agent posts
/// its payload to all its neighbors, a barrier, then every agent applies its
/// local update from the frozen inbox. Consensus rounds reproduce
/// consensus::step bit-for-bit: senders post in ascending id order so each
/// inbox is sorted by sender, and the update accumulates the informed-agent
/// pinning term first, then one weighted difference per inbox entry.
class AgentNetwork {
 public:
  /// Agents start at s_i = P_T with P_T accumulated over capacities in
  /// ascending index order. Throws "graph not connected" and validates
  /// h > 0, dt > 0, eps_rel > 0, capacities > 0.
  AgentNetwork(const CommGraph& g, const Eigen::VectorXd& capacities,
               double h, double dt, double eps_rel);

  int size() const { return static_cast<int>(agents_.size()); }
  const AgentState& agent(int id) const;  // 1-based
  const CommGraph& graph() const { return g_; }
  double h() const { return h_; }
  double dt() const { return dt_; }
  long round() const { return round_; }
  int informed_agent() const { return informed_; }  // 1-based, 0 = none

  Eigen::VectorXd estimates() const;
  Eigen::VectorXd capacities() const;

  /// One consensus round (message exchange + Euler update). Throws
  /// "numerical divergence" if an estimate leaves the finite range.
  void run_consensus_round();

  /// Spread and one-round drift both within eps_rel of |mean estimate|.
  bool has_converged() const;

  /// Registers a capacity change at agent k: updates k's own_capacity by
  /// delta and plants the exact post-event total as k's private p_tilde_t.
  /// Any previously informed agent is demoted. Throws "consensus in
  /// progress" when an earlier event has not converged yet, "bad index" for
  /// k outside 1..n.
  void inject_capacity_event(int k, double delta, double p_tilde_t);

  /// The embedded finite-time average protocol: 2N+1 message rounds over
  /// ratio pairs (gbar_i, g_i) starting from gbar_i(0) =
  /// own_capacity/estimate, then each agent extracts its defect and average
  /// from its own history alone. Estimates are untouched.
  FiniteTimeRun run_finite_time_protocol(double eps_rank = 1e-8);

  /// Test instrumentation: hand-deliver one message. Throws "locality
  /// violation" when (from, to) is not a graph edge.
  void deliver_message(int from, int to, PayloadKind kind, double value);

  /// Message log (off by default; enabling clears any previous log).
  void enable_message_log();
  const std::vector<MessageLogEntry>& message_log() const { return log_; }

 private:
  void post_to_neighbors(int from, PayloadKind kind, double value);

  CommGraph g_;
  FtWeights ftw_;
  std::vector<AgentState> agents_;
  double h_;
  double dt_;
  double eps_rel_;
  int informed_ = 0;
  long round_ = 0;
  bool logging_ = false;
  std::vector<MessageLogEntry> log_;
};

/// Columns: round, sender, receiver, kind, value (%.17e).
void write_message_csv(const std::vector<MessageLogEntry>& log,
                       std::ostream& os);

}  // namespace mgrid
