#include "mgrid/plant.hpp"

#include <stdexcept>

namespace mgrid {

void validate(const PlantConfig& cfg) {
  if (cfg.loss_fraction < 0.0 || cfg.loss_fraction > 0.05)
    throw std::invalid_argument("loss fraction out of range [0, 0.05]");
  if (cfg.mode == PlantMode::first_order && !(cfg.tau > 0.0))
    throw std::invalid_argument("tau must be positive");
}

Eigen::VectorXd deliver(const PowerCommand& cmd, const PlantConfig& cfg,
                        const Eigen::VectorXd& prev_delivered, double dt) {
  validate(cfg);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.mode == PlantMode::ideal) {
    if (cfg.loss_fraction == 0.0) return cmd.p;  // bitwise pass-through
    const double q = 1.0 - cfg.loss_fraction;
    Eigen::VectorXd out(cmd.p.size());
    for (Eigen::Index i = 0; i < cmd.p.size(); ++i) out[i] = q * cmd.p[i];
    return out;
  }
  if (!(dt < cfg.tau / 2.0))
    throw std::invalid_argument("dt must be below tau/2 in first_order mode");
  if (prev_delivered.size() != cmd.p.size())
    throw std::invalid_argument("delivered vector size does not match command");
  const double a = dt / cfg.tau;
  const double q = 1.0 - cfg.loss_fraction;
  Eigen::VectorXd out(cmd.p.size());
  for (Eigen::Index i = 0; i < cmd.p.size(); ++i)
    out[i] = prev_delivered[i] + a * (q * cmd.p[i] - prev_delivered[i]);
  return out;
}

}  // namespace mgrid
