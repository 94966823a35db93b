#pragma once

#include <Eigen/Dense>

#include "mgrid/strategies.hpp"

namespace mgrid {

enum class PlantMode { ideal, first_order };

/// Idealized physical layer: the inverter control loops are abstracted into
/// either an instantaneous pass-through or a first-order lag, with an
/// optional resistive loss fraction.
struct PlantConfig {
  PlantMode mode = PlantMode::ideal;
  double tau = 0.0;            // lag time constant (s), first_order only
  double loss_fraction = 0.0;  // rho in [0, 0.05]
};

/// Throws on tau <= 0 in first_order mode or loss_fraction outside
/// [0, 0.05].
void validate(const PlantConfig& cfg);

/// Delivered power for one step. ideal: (1 - rho) * cmd.p (bitwise cmd.p
/// when rho == 0); first_order: prev += (dt/tau) * ((1 - rho) * cmd.p -
/// prev). Throws when dt <= 0, or dt >= tau/2 in first_order mode (explicit
/// Euler stability guard).
Eigen::VectorXd deliver(const PowerCommand& cmd, const PlantConfig& cfg,
                        const Eigen::VectorXd& prev_delivered, double dt);

}  // namespace mgrid
