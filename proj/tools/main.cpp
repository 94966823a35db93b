#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mgrid/agents.hpp"
#include "mgrid/scenario.hpp"
#include "mgrid/spectral.hpp"
#include "mgrid/strategies.hpp"
#include "mgrid/telemetry.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

int run_simulate(const std::string& scn_path, const std::string& out_path,
                 const std::string& msg_path, const std::string& ft_path) {
  const mgrid::Scenario sc = mgrid::load_scenario_file(scn_path);
  mgrid::RunOptions opts;
  opts.log_messages = !msg_path.empty();
  opts.dump_ft = !ft_path.empty();
  const mgrid::RunResult res = mgrid::run(sc, opts);
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
  if (out_path.empty()) {
    mgrid::write_csv(res.records, std::cout);
  } else {
    auto f = open_out(out_path);
    mgrid::write_csv(res.records, f);
  }
  if (!msg_path.empty()) {
    auto f = open_out(msg_path);
    mgrid::write_message_csv(res.messages, f);
  }
  if (!ft_path.empty()) {
    auto f = open_out(ft_path);
    mgrid::write_ft_csv(res.ft_dumps, f);
  }
  return 0;
}

void print_num(const char* label, double v) {
  std::printf("%s%.12g\n", label, v);
}

int run_analyze(const std::string& scn_path, double theta_opt) {
  const mgrid::Scenario sc = mgrid::load_scenario_file(scn_path);
  const mgrid::CommGraph g = sc.graph();
  double p_t = 0.0;
  for (int i = 0; i < sc.n; ++i) p_t += sc.capacities[i];
  const double p_l = sc.load_at(0.0);
  std::printf("agents: %d\n", sc.n);
  std::printf("edges: %zu\n", sc.edges.size());
  print_num("total capacity P_T: ", p_t);
  print_num("load P_L: ", p_l);
  print_num("share ratio r: ", mgrid::share_ratio(p_l, p_t));
  print_num("gain h: ", sc.h);
  print_num("dt: ", sc.dt);

  std::vector<int> informed;
  if (sc.events.empty()) {
    informed.push_back(1);
    std::printf("no events; reporting the spectrum for informed agent 1\n");
  } else {
    for (const mgrid::CapacityEvent& ev : sc.events) informed.push_back(ev.k);
  }
  for (int k : informed) {
    auto [hurwitz, rep] = mgrid::verify_hurwitz(g, k, sc.h);
    std::printf("informed agent %d:\n", k);
    std::printf("  hurwitz: %s\n", hurwitz ? "yes" : "no");
    std::printf("  eigenvalues:");
    for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i)
      std::printf(" %.12g", rep.eigenvalues[i]);
    std::printf("\n");
    print_num("  dominant: ", rep.dominant);
    print_num("  settling time 5/|dominant|: ", 5.0 / std::abs(rep.dominant));
    const double limit = 2.0 / std::abs(rep.eigenvalues[0]);
    print_num("  euler dt limit 2/|lambda_min|: ", limit);
    const std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
    const std::vector<double> doms = mgrid::dominant_eigenvalue_sweep(g, k, grid);
    std::printf("  dominant vs h:");
    for (std::size_t i = 0; i < grid.size(); ++i)
      std::printf(" h=%g:%.12g", grid[i], doms[i]);
    std::printf("\n");
  }

  const double theta_sup = 1.0 - p_l / p_t;
  const double theta = theta_opt > 0.0 ? theta_opt : theta_sup / 2.0;
  const mgrid::DeltaBound bound = mgrid::delta_bound(p_t, p_l, sc.n, theta);
  print_num("theta: ", bound.theta);
  print_num("admissible |delta| bound: ", bound.delta_max);
  const auto band = mgrid::transient_band(p_t, theta);
  std::printf("transient band: [%.12g, %.12g]\n", band.first, band.second);
  print_num("capacity addition threshold: ",
            mgrid::capacity_addition_threshold(p_t, sc.n));
  print_num("addition ratio: ", mgrid::addition_ratio(sc.n));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-agent microgrid power-sharing simulator"};
  app.require_subcommand(1);

  std::string scn_path;
  std::string out_path;
  std::string msg_path;
  std::string ft_path;
  CLI::App* sim = app.add_subcommand("simulate", "run a scenario, emit CSV telemetry");
  sim->add_option("scenario", scn_path, "scenario file")->required();
  sim->add_option("--out", out_path, "telemetry CSV path (default: stdout)");
  sim->add_option("--dump-messages", msg_path, "agent message log CSV path");
  sim->add_option("--dump-ft", ft_path, "finite-time sequence dump CSV path");

  std::string an_path;
  double theta = -1.0;
  CLI::App* an = app.add_subcommand(
      "analyze", "spectral report and admissible perturbation bounds");
  an->add_option("scenario", an_path, "scenario file")->required();
  an->add_option("--theta", theta,
                 "band parameter (default (1 - P_L/P_T)/2)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed())
      return run_simulate(scn_path, out_path, msg_path, ft_path);
    return run_analyze(an_path, theta);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
