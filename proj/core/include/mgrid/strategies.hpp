#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace mgrid {

enum class StrategyKind { strategy1, strategy2, strategy3, transient_match };

/// Static plant data shared by the power-sharing strategies.
///
/// `capacities` holds the per-DG maxima P_i,max as of the moment the current
/// capacity event fired; the event itself is carried separately as (k,
/// delta), so agent k's present maximum is capacities[k-1] + delta and the
/// post-event total is p_t + delta. When the next event arrives the pending
/// (k, delta) is folded into `capacities` first (see apply_event).
struct MicrogridModel {
  Eigen::VectorXd capacities;  // P_i,max baseline for the current event (kW)
  double p_t = 0.0;            // sum of capacities, exact by construction
  double p_l = 0.0;            // load demand P_L (kW), time-varying
  int k = 0;                   // perturbed agent (1-based); 0 = no event yet
  double delta = 0.0;          // capacity change delta (kW)
};

/// Builds a model with p_t accumulated over capacities in ascending index
/// order (the ordering other components rely on for reproducibility).
/// Requires every capacity > 0 and 0 < p_l < p_t.
MicrogridModel make_model(const Eigen::VectorXd& capacities, double p_l);

/// Registers a new capacity event: folds any pending (k, delta) into
/// `capacities`, recomputes p_t as the ascending-order sum, then stores the
/// new perturbation. Throws "bad index" for k outside 1..n.
void apply_event(MicrogridModel& model, int k, double delta);

/// Current maximum of agent k, capacities[k-1] + delta. Throws "bad index"
/// when no event is registered (k == 0).
double perturbed_capacity(const MicrogridModel& model);

/// Post-event total capacity p_t + delta; equals p_t when k == 0.
double perturbed_total(const MicrogridModel& model);

/// One step's commanded outputs.
struct PowerCommand {
  Eigen::VectorXd p;  // commanded P_i (kW)
  double p_o = 0.0;   // total, accumulated over p in ascending index order
  double e = 0.0;     // mismatch E = P_O - P_L
};

/// Auxiliary state of the transient-match controller.
struct TransientMatchState {
  double p_k_max_prime = 0.0;  // P'_k,max (kW); equals P_k,max at event time
};

/// Proportional power share ratio r = P_L/P_T. Throws when p_t <= 0.
double share_ratio(double p_l, double p_t);

/// Per-agent command laws. These are the only functions the agent layer
/// calls, so the information each rule may use is fixed by its parameter
/// list: a follower sees nothing beyond (P_L, s_i, P_i,max); only agent k's
/// informed rules receive the event quantities.
double follower_command(double p_l, double s_i, double cap_i);
double informed_command_s2(double p_l, double p_tilde_t, double cap_k_new);
double informed_command_s3(double p_l, double s_k, double cap_k_new,
                           double p_tilde_t);
double informed_command_tm(double p_l, double s_k, double sum_excl_k);

/// Whole-network command vectors. All three throw "estimate below load" when
/// min_i s_i <= max(p_l, 1e-9 * p_t): the proportional law would command at
/// or above capacity. With no event registered (model.k == 0) every strategy
/// reduces to the uniform proportional rule.
///
/// strategy1: P_k = (P_L/s_k)(P_k,max + delta), P_i = (P_L/s_i) P_i,max.
PowerCommand strategy1(const MicrogridModel& model, const Eigen::VectorXd& s);
/// strategy2: agent k uses the exact post-event total,
/// P_k = (P_L/(P_T + delta))(P_k,max + delta).
PowerCommand strategy2(const MicrogridModel& model, const Eigen::VectorXd& s);
/// strategy3: P_k = (P_L/s_k)((P_k,max + delta) + s_k - (P_T + delta));
/// E vanishes at the event instant but grows at rate
/// P_L h delta (P_T - P_k,max)/P_T^2.
PowerCommand strategy3(const MicrogridModel& model, const Eigen::VectorXd& s);

/// Transient-match controller: P'_k,max = s_k (1 - sum_excl_k) with
/// sum_excl_k = N C_a - P_k,max/s_k supplied by the finite-time protocol for
/// the current s, and P_k = (P_L/s_k) P'_k,max. Delivered total matches P_L
/// up to rounding at every step.
std::pair<PowerCommand, TransientMatchState> transient_match(
    const MicrogridModel& model, const Eigen::VectorXd& s, double sum_excl_k);

/// Dispatch helper used by the scenario driver. transient_match requires
/// sum_excl_k once an event is registered.
PowerCommand commands(StrategyKind kind, const MicrogridModel& model,
                      const Eigen::VectorXd& s,
                      std::optional<double> sum_excl_k = std::nullopt);

/// Analytic mismatch at the event instant and, where defined, its initial
/// slope. edot0 is only specified for strategy3 (needs the consensus gain h)
/// and transient_match (identically zero).
struct InitialError {
  double e0 = 0.0;
  std::optional<double> edot0;
};

InitialError initial_error_oracle(StrategyKind kind,
                                  const MicrogridModel& model, double h);

}  // namespace mgrid
