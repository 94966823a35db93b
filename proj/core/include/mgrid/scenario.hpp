#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mgrid/agents.hpp"
#include "mgrid/graph.hpp"
#include "mgrid/plant.hpp"
#include "mgrid/strategies.hpp"
#include "mgrid/telemetry.hpp"

namespace mgrid {

struct LoadPoint {
  double t = 0.0;
  double p_l = 0.0;
};

struct CapacityEvent {
  double t = 0.0;
  int k = 0;  // 1-based
  double delta = 0.0;
};

/// A full experiment definition. See parse_scenario for the file format.
struct Scenario {
  int n = 0;
  std::vector<Edge> edges;
  Eigen::VectorXd capacities;
  std::vector<LoadPoint> load_profile;  // strictly increasing t, first at 0
  std::vector<CapacityEvent> events;    // strictly increasing t
  double h = 10.0;
  double dt = 1e-3;
  double t_end = 0.0;
  double eps_rel = 1e-6;
  StrategyKind strategy = StrategyKind::strategy1;
  PlantConfig plant;

  CommGraph graph() const { return CommGraph(n, edges); }
  double load_at(double t) const;  // last breakpoint with time <= t
};

/// Line-oriented format, one directive per line, `#` starts a comment:
///
///   agents N                     (required, first directive)
///   edge i j w
///   capacity i kW                (required for every agent)
///   load t kW                    (piecewise-constant; t=0 required)
///   event t k delta
///   h v | dt v | t_end v | eps_rel v
///   strategy strategy1|strategy2|strategy3|transient_match
///   plant ideal [loss] | plant first_order tau [loss]
///
/// Defaults: h=10, dt=1e-3, eps_rel=1e-6, strategy1, ideal lossless plant.
/// Rejects malformed lines with their line number, plus semantic errors:
/// "disconnected graph", "load exceeds capacity" (any breakpoint at or above
/// the initial total), events out of order or beyond t_end, "bad index".
Scenario parse_scenario(const std::string& text);

/// Reads the file and delegates to parse_scenario. Errors mention the path.
Scenario load_scenario_file(const std::string& path);

struct RunOptions {
  bool log_messages = false;  // collect the full message log
  bool dump_ft = false;       // retain finite-time histories per outer step
};

struct RunResult {
  std::vector<TelemetryRecord> records;  // one per outer step, t = w*dt
  std::vector<std::string> warnings;
  std::vector<MessageLogEntry> messages;
  std::vector<std::pair<long, FiniteTimeRun>> ft_dumps;  // (w, run)
};

/// The outer simulation loop. Per step w at t = w*dt: apply a due capacity
/// event (gated on convergence of the previous one); for transient_match run
/// the embedded finite-time protocol; evaluate the strategy commands from
/// the pre-update estimates; deliver through the plant; emit the telemetry
/// record; one consensus Euler round. Before the loop, dt is checked
/// against the Euler stability limit 2/|lambda_min(-(L+Delta))| of every
/// event's system matrix ("dt exceeds stability limit"). Out-of-band event
/// magnitudes and negative commands produce warnings, not errors.
/// "numerical divergence" is rethrown with the offending step index.
RunResult run(const Scenario& sc, const RunOptions& opts = {});

/// Columns: w, agent, series (gbar|g), v0..v{2N+1} (%.17e).
void write_ft_csv(const std::vector<std::pair<long, FiniteTimeRun>>& dumps,
                  std::ostream& os);

}  // namespace mgrid
