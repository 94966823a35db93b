#include "mgrid/strategies.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mgrid {

namespace {

double ascending_sum(const Eigen::VectorXd& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v[i];
  return acc;
}

void check_model(const MicrogridModel& model) {
  if (model.capacities.size() < 1)
    throw std::invalid_argument("bad index: agent count must be positive");
  if (model.k < 0 || model.k > static_cast<int>(model.capacities.size()))
    throw std::invalid_argument("bad index: informed agent " +
                                std::to_string(model.k));
}

/// Runtime guard shared by every strategy: the proportional law P_i =
/// (P_L/s_i) P_i,max commands at or above capacity once an estimate falls to
/// the load level, so evaluation is aborted instead.
void check_estimates(const MicrogridModel& model, const Eigen::VectorXd& s) {
  if (s.size() != model.capacities.size())
    throw std::invalid_argument("estimate vector size does not match model");
  double mn = s[0];
  for (Eigen::Index i = 1; i < s.size(); ++i)
    if (s[i] < mn) mn = s[i];
  const double floor = std::max(model.p_l, 1e-9 * model.p_t);
  if (!(mn > floor)) throw std::runtime_error("estimate below load");
}

double current_capacity(const MicrogridModel& model, int i0) {
  if (model.k != 0 && i0 == model.k - 1)
    return model.capacities[i0] + model.delta;
  return model.capacities[i0];
}

PowerCommand finish(const MicrogridModel& model, Eigen::VectorXd p) {
  PowerCommand c;
  c.p = std::move(p);
  c.p_o = ascending_sum(c.p);
  c.e = c.p_o - model.p_l;
  return c;
}

}  // namespace

MicrogridModel make_model(const Eigen::VectorXd& capacities, double p_l) {
  MicrogridModel m;
  if (capacities.size() < 1)
    throw std::invalid_argument("bad index: agent count must be positive");
  for (Eigen::Index i = 0; i < capacities.size(); ++i)
    if (!(capacities[i] > 0.0))
      throw std::invalid_argument("capacity must be positive: agent " +
                                  std::to_string(i + 1));
  m.capacities = capacities;
  m.p_t = ascending_sum(capacities);
  if (!(p_l > 0.0)) throw std::invalid_argument("load must be positive");
  if (p_l >= m.p_t) throw std::invalid_argument("load exceeds capacity");
  m.p_l = p_l;
  return m;
}

void apply_event(MicrogridModel& model, int k, double delta) {
  check_model(model);
  if (k < 1 || k > static_cast<int>(model.capacities.size()))
    throw std::invalid_argument("bad index: informed agent " +
                                std::to_string(k) + " outside 1.." +
                                std::to_string(model.capacities.size()));
  if (model.k != 0) {
    model.capacities[model.k - 1] += model.delta;
    model.p_t = ascending_sum(model.capacities);
  }
  model.k = k;
  model.delta = delta;
}

double perturbed_capacity(const MicrogridModel& model) {
  check_model(model);
  if (model.k == 0)
    throw std::invalid_argument("bad index: no informed agent");
  return model.capacities[model.k - 1] + model.delta;
}

double perturbed_total(const MicrogridModel& model) {
  check_model(model);
  return model.k == 0 ? model.p_t : model.p_t + model.delta;
}

double share_ratio(double p_l, double p_t) {
  if (!(p_t > 0.0))
    throw std::invalid_argument("total capacity must be positive");
  return p_l / p_t;
}

double follower_command(double p_l, double s_i, double cap_i) {
  return (p_l / s_i) * cap_i;
}

double informed_command_s2(double p_l, double p_tilde_t, double cap_k_new) {
  return (p_l / p_tilde_t) * cap_k_new;
}

double informed_command_s3(double p_l, double s_k, double cap_k_new,
                           double p_tilde_t) {
  return (p_l / s_k) * ((cap_k_new + s_k) - p_tilde_t);
}

double informed_command_tm(double p_l, double s_k, double sum_excl_k) {
  return (p_l / s_k) * (s_k * (1.0 - sum_excl_k));
}

PowerCommand strategy1(const MicrogridModel& model, const Eigen::VectorXd& s) {
  check_model(model);
  check_estimates(model, s);
  Eigen::VectorXd p(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    p[i] = follower_command(model.p_l, s[i],
                            current_capacity(model, static_cast<int>(i)));
  return finish(model, std::move(p));
}

PowerCommand strategy2(const MicrogridModel& model, const Eigen::VectorXd& s) {
  check_model(model);
  check_estimates(model, s);
  Eigen::VectorXd p(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (model.k != 0 && i == model.k - 1)
      p[i] = informed_command_s2(model.p_l, perturbed_total(model),
                                 current_capacity(model, static_cast<int>(i)));
    else
      p[i] = follower_command(model.p_l, s[i], model.capacities[i]);
  }
  return finish(model, std::move(p));
}

PowerCommand strategy3(const MicrogridModel& model, const Eigen::VectorXd& s) {
  check_model(model);
  check_estimates(model, s);
  Eigen::VectorXd p(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (model.k != 0 && i == model.k - 1)
      p[i] = informed_command_s3(model.p_l, s[i],
                                 current_capacity(model, static_cast<int>(i)),
                                 perturbed_total(model));
    else
      p[i] = follower_command(model.p_l, s[i], model.capacities[i]);
  }
  return finish(model, std::move(p));
}

std::pair<PowerCommand, TransientMatchState> transient_match(
    const MicrogridModel& model, const Eigen::VectorXd& s, double sum_excl_k) {
  check_model(model);
  check_estimates(model, s);
  Eigen::VectorXd p(s.size());
  TransientMatchState state;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (model.k != 0 && i == model.k - 1) {
      state.p_k_max_prime = s[i] * (1.0 - sum_excl_k);
      p[i] = (model.p_l / s[i]) * state.p_k_max_prime;
    } else {
      p[i] = follower_command(model.p_l, s[i], model.capacities[i]);
    }
  }
  return {finish(model, std::move(p)), state};
}

PowerCommand commands(StrategyKind kind, const MicrogridModel& model,
                      const Eigen::VectorXd& s,
                      std::optional<double> sum_excl_k) {
  switch (kind) {
    case StrategyKind::strategy1:
      return strategy1(model, s);
    case StrategyKind::strategy2:
      return strategy2(model, s);
    case StrategyKind::strategy3:
      return strategy3(model, s);
    case StrategyKind::transient_match:
      if (model.k != 0 && !sum_excl_k)
        throw std::invalid_argument(
            "transient_match requires sum_excl_k once an event is registered");
      return transient_match(model, s, sum_excl_k.value_or(0.0)).first;
  }
  throw std::invalid_argument("unknown strategy");
}

InitialError initial_error_oracle(StrategyKind kind,
                                  const MicrogridModel& model, double h) {
  check_model(model);
  InitialError out;
  const bool specified_slope =
      kind == StrategyKind::strategy3 || kind == StrategyKind::transient_match;
  if (model.k == 0 || model.delta == 0.0) {
    out.e0 = 0.0;
    if (specified_slope) out.edot0 = 0.0;
    return out;
  }
  const double p_l = model.p_l;
  const double p_t = model.p_t;
  const double delta = model.delta;
  const double cap_k = model.capacities[model.k - 1];
  switch (kind) {
    case StrategyKind::strategy1:
      out.e0 = p_l * delta / p_t;
      break;
    case StrategyKind::strategy2:
      out.e0 = ((p_l * delta) * (p_t - cap_k)) / (p_t * (p_t + delta));
      break;
    case StrategyKind::strategy3:
      if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
      out.e0 = 0.0;
      out.edot0 = (((p_l * h) * delta) * (p_t - cap_k)) / (p_t * p_t);
      break;
    case StrategyKind::transient_match:
      out.e0 = 0.0;
      out.edot0 = 0.0;
      break;
  }
  return out;
}

}  // namespace mgrid
