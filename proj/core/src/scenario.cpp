#include "mgrid/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mgrid/consensus.hpp"
#include "mgrid/finite_time.hpp"
#include "mgrid/spectral.hpp"

namespace mgrid {

double Scenario::load_at(double t) const {
  double v = load_profile.front().p_l;
  for (const LoadPoint& lp : load_profile) {
    if (lp.t <= t)
      v = lp.p_l;
    else
      break;
  }
  return v;
}

namespace {

[[noreturn]] void fail_line(int lineno, const std::string& msg) {
  throw std::runtime_error("parse error (line " + std::to_string(lineno) +
                           "): " + msg);
}

double parse_num(const std::string& tok, int lineno, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail_line(lineno, std::string("invalid ") + what + " '" + tok + "'");
  }
  if (pos != tok.size())
    fail_line(lineno, std::string("invalid ") + what + " '" + tok + "'");
  return v;
}

int parse_int(const std::string& tok, int lineno, const char* what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    fail_line(lineno, std::string("invalid ") + what + " '" + tok + "'");
  }
  if (pos != tok.size())
    fail_line(lineno, std::string("invalid ") + what + " '" + tok + "'");
  return static_cast<int>(v);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  bool have_agents = false;
  bool have_t_end = false;
  std::map<int, double> caps;
  std::set<std::pair<int, int>> edge_seen;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& d = tok[0];
    if (!have_agents && d != "agents")
      fail_line(lineno, "'agents N' must be the first directive");
    if (d == "agents") {
      if (have_agents) fail_line(lineno, "duplicate 'agents' directive");
      if (tok.size() != 2) fail_line(lineno, "usage: agents N");
      sc.n = parse_int(tok[1], lineno, "agent count");
      if (sc.n < 2) fail_line(lineno, "need at least two agents");
      have_agents = true;
    } else if (d == "edge") {
      if (tok.size() != 4) fail_line(lineno, "usage: edge i j w");
      const int i = parse_int(tok[1], lineno, "agent index");
      const int j = parse_int(tok[2], lineno, "agent index");
      const double w = parse_num(tok[3], lineno, "edge weight");
      if (i < 1 || i > sc.n || j < 1 || j > sc.n)
        fail_line(lineno, "bad index: edge endpoints outside 1.." +
                              std::to_string(sc.n));
      if (i == j) fail_line(lineno, "self-loop: agent " + std::to_string(i));
      if (!(w > 0.0)) fail_line(lineno, "edge weight must be positive");
      const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
      if (!edge_seen.insert(key).second)
        fail_line(lineno, "duplicate edge: (" + std::to_string(i) + ", " +
                              std::to_string(j) + ")");
      sc.edges.push_back({i, j, w});
    } else if (d == "capacity") {
      if (tok.size() != 3) fail_line(lineno, "usage: capacity i kW");
      const int i = parse_int(tok[1], lineno, "agent index");
      const double v = parse_num(tok[2], lineno, "capacity");
      if (i < 1 || i > sc.n)
        fail_line(lineno, "bad index: agent " + std::to_string(i) +
                              " outside 1.." + std::to_string(sc.n));
      if (!(v > 0.0)) fail_line(lineno, "capacity must be positive");
      if (!caps.emplace(i, v).second)
        fail_line(lineno, "duplicate capacity for agent " + std::to_string(i));
    } else if (d == "load") {
      if (tok.size() != 3) fail_line(lineno, "usage: load t kW");
      const double t = parse_num(tok[1], lineno, "time");
      const double v = parse_num(tok[2], lineno, "load");
      if (t < 0.0) fail_line(lineno, "load time must be nonnegative");
      if (!(v > 0.0)) fail_line(lineno, "load must be positive");
      sc.load_profile.push_back({t, v});
    } else if (d == "event") {
      if (tok.size() != 4) fail_line(lineno, "usage: event t k delta");
      const double t = parse_num(tok[1], lineno, "time");
      const int k = parse_int(tok[2], lineno, "agent index");
      const double delta = parse_num(tok[3], lineno, "delta");
      if (t < 0.0) fail_line(lineno, "event time must be nonnegative");
      if (k < 1 || k > sc.n)
        fail_line(lineno, "bad index: agent " + std::to_string(k) +
                              " outside 1.." + std::to_string(sc.n));
      sc.events.push_back({t, k, delta});
    } else if (d == "h") {
      if (tok.size() != 2) fail_line(lineno, "usage: h v");
      sc.h = parse_num(tok[1], lineno, "gain");
      if (!(sc.h > 0.0)) fail_line(lineno, "h must be positive");
    } else if (d == "dt") {
      if (tok.size() != 2) fail_line(lineno, "usage: dt v");
      sc.dt = parse_num(tok[1], lineno, "step size");
      if (!(sc.dt > 0.0)) fail_line(lineno, "dt must be positive");
    } else if (d == "t_end") {
      if (tok.size() != 2) fail_line(lineno, "usage: t_end v");
      sc.t_end = parse_num(tok[1], lineno, "duration");
      if (!(sc.t_end > 0.0)) fail_line(lineno, "t_end must be positive");
      have_t_end = true;
    } else if (d == "eps_rel") {
      if (tok.size() != 2) fail_line(lineno, "usage: eps_rel v");
      sc.eps_rel = parse_num(tok[1], lineno, "tolerance");
      if (!(sc.eps_rel > 0.0)) fail_line(lineno, "eps_rel must be positive");
    } else if (d == "strategy") {
      if (tok.size() != 2) fail_line(lineno, "usage: strategy name");
      if (tok[1] == "strategy1")
        sc.strategy = StrategyKind::strategy1;
      else if (tok[1] == "strategy2")
        sc.strategy = StrategyKind::strategy2;
      else if (tok[1] == "strategy3")
        sc.strategy = StrategyKind::strategy3;
      else if (tok[1] == "transient_match")
        sc.strategy = StrategyKind::transient_match;
      else
        fail_line(lineno, "unknown strategy '" + tok[1] + "'");
    } else if (d == "plant") {
      if (tok.size() < 2) fail_line(lineno, "usage: plant ideal [loss] | plant first_order tau [loss]");
      if (tok[1] == "ideal") {
        sc.plant.mode = PlantMode::ideal;
        sc.plant.tau = 0.0;
        if (tok.size() > 3) fail_line(lineno, "usage: plant ideal [loss]");
        sc.plant.loss_fraction =
            tok.size() == 3 ? parse_num(tok[2], lineno, "loss fraction") : 0.0;
      } else if (tok[1] == "first_order") {
        if (tok.size() < 3 || tok.size() > 4)
          fail_line(lineno, "usage: plant first_order tau [loss]");
        sc.plant.mode = PlantMode::first_order;
        sc.plant.tau = parse_num(tok[2], lineno, "tau");
        sc.plant.loss_fraction =
            tok.size() == 4 ? parse_num(tok[3], lineno, "loss fraction") : 0.0;
      } else {
        fail_line(lineno, "unknown plant mode '" + tok[1] + "'");
      }
      try {
        validate(sc.plant);
      } catch (const std::exception& e) {
        fail_line(lineno, e.what());
      }
    } else {
      fail_line(lineno, "unknown directive '" + d + "'");
    }
  }
  if (!have_agents) throw std::runtime_error("parse error: missing 'agents N'");
  // Per-agent capacities, ascending.
  sc.capacities.resize(sc.n);
  for (int i = 1; i <= sc.n; ++i) {
    auto it = caps.find(i);
    if (it == caps.end())
      throw std::runtime_error("missing capacity for agent " +
                               std::to_string(i));
    sc.capacities[i - 1] = it->second;
  }
  // Load profile: breakpoint at t=0, strictly increasing.
  if (sc.load_profile.empty() || sc.load_profile.front().t != 0.0)
    throw std::runtime_error("load profile must start at t=0");
  for (std::size_t i = 1; i < sc.load_profile.size(); ++i)
    if (!(sc.load_profile[i].t > sc.load_profile[i - 1].t))
      throw std::runtime_error("load breakpoints must be strictly increasing");
  // Events strictly increasing and inside the horizon.
  for (std::size_t i = 1; i < sc.events.size(); ++i)
    if (!(sc.events[i].t > sc.events[i - 1].t))
      throw std::runtime_error("events must be strictly increasing in time");
  if (!have_t_end) throw std::runtime_error("t_end is required");
  if (!sc.events.empty() && !(sc.t_end > sc.events.back().t))
    throw std::runtime_error("t_end must exceed the last event time");
  // Connectivity.
  const CommGraph g = sc.graph();
  if (!g.is_connected()) throw std::runtime_error("disconnected graph");
  // Static load check against the initial total capacity.
  double p_t = 0.0;
  for (int i = 0; i < sc.n; ++i) p_t += sc.capacities[i];
  for (const LoadPoint& lp : sc.load_profile)
    if (lp.p_l >= p_t) throw std::runtime_error("load exceeds capacity");
  // Capacities must stay positive through the event sequence.
  {
    Eigen::VectorXd c = sc.capacities;
    for (const CapacityEvent& ev : sc.events) {
      c[ev.k - 1] += ev.delta;
      if (!(c[ev.k - 1] > 0.0))
        throw std::runtime_error(
            "capacity must be positive after event at t=" +
            std::to_string(ev.t));
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

RunResult run(const Scenario& sc, const RunOptions& opts) {
  RunResult out;
  const int n = sc.n;
  const CommGraph g = sc.graph();
  MicrogridModel model = make_model(sc.capacities, sc.load_at(0.0));
  AgentNetwork net(g, sc.capacities, sc.h, sc.dt, sc.eps_rel);
  if (opts.log_messages) net.enable_message_log();

  // Explicit-Euler stability: dt must sit inside the stability region of
  // every system matrix the run will integrate.
  const Eigen::MatrixXd L = g.laplacian();
  const auto check_dt = [&](const Eigen::MatrixXd& m) {
    const SpectralReport rep = eigenvalues_sym(m);
    const double limit = 2.0 / std::abs(rep.eigenvalues[0]);
    if (!(sc.dt < limit)) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "dt exceeds stability limit: dt=%g, limit=%g", sc.dt,
                    limit);
      throw std::runtime_error(buf);
    }
  };
  if (sc.events.empty()) {
    check_dt(-L);
  } else {
    for (const CapacityEvent& ev : sc.events)
      check_dt(perturbed_system_matrix(L, ev.k, sc.h));
  }

  const long nsteps = std::lround(sc.t_end / sc.dt);
  out.records.reserve(static_cast<std::size_t>(nsteps) + 1);
  Eigen::VectorXd delivered = Eigen::VectorXd::Zero(n);
  std::size_t evi = 0;
  bool warned_negative = false;
  for (long w = 0; w <= nsteps; ++w) {
    const double t = static_cast<double>(w) * sc.dt;
    model.p_l = sc.load_at(t);
    if (evi < sc.events.size() &&
        std::abs(t - sc.events[evi].t) < 0.5 * sc.dt) {
      const CapacityEvent& ev = sc.events[evi];
      ++evi;
      apply_event(model, ev.k, ev.delta);
      const double admissible =
          ((1.0 - model.p_l / model.p_t) * model.p_t) /
          (1.0 + std::sqrt(static_cast<double>(n)));
      if (std::abs(ev.delta) >= admissible) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "event at t=%g: |delta|=%g is outside the admissible "
                      "band bound %g; estimates may leave the transient band",
                      ev.t, std::abs(ev.delta), admissible);
        out.warnings.push_back(buf);
      }
      net.inject_capacity_event(ev.k, ev.delta, perturbed_total(model));
    }

    std::optional<double> ca_record;
    std::optional<double> sek;
    if (sc.strategy == StrategyKind::transient_match) {
      FiniteTimeRun ft = net.run_finite_time_protocol();
      ca_record = ft.c_a[0];
      if (model.k != 0) {
        const AgentState& informed = net.agent(model.k);
        sek = sum_excluding_k(ft.c_a[model.k - 1], n, informed.own_capacity,
                              informed.estimate);
      }
      if (opts.dump_ft) out.ft_dumps.emplace_back(w, std::move(ft));
    }
    const Eigen::VectorXd s = net.estimates();
    const PowerCommand cmd = commands(sc.strategy, model, s, sek);
    if (!warned_negative) {
      for (int i = 0; i < n; ++i) {
        if (cmd.p[i] < 0.0) {
          char buf[128];
          std::snprintf(buf, sizeof buf,
                        "negative power command at t=%g: agent %d, %g kW", t,
                        i + 1, cmd.p[i]);
          out.warnings.push_back(buf);
          warned_negative = true;
          break;
        }
      }
    }
    delivered = deliver(cmd, sc.plant, delivered, sc.dt);
    double p_o = 0.0;
    for (int i = 0; i < n; ++i) p_o += delivered[i];

    TelemetryRecord rec;
    rec.t = t;
    rec.s = s;
    rec.p_cmd = cmd.p;
    rec.p_delivered = delivered;
    rec.p_o = p_o;
    rec.p_l = model.p_l;
    rec.e = p_o - model.p_l;
    rec.r.resize(n);
    for (int i = 0; i < n; ++i) rec.r[i] = model.p_l / s[i];
    rec.c_a = ca_record;
    out.records.push_back(std::move(rec));

    if (w < nsteps) {
      try {
        net.run_consensus_round();
      } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        if (msg.rfind("numerical divergence", 0) == 0)
          throw std::runtime_error(msg + " (step " + std::to_string(w + 1) +
                                   ")");
        throw;
      }
    }
  }
  if (opts.log_messages) out.messages = net.message_log();
  return out;
}

void write_ft_csv(const std::vector<std::pair<long, FiniteTimeRun>>& dumps,
                  std::ostream& os) {
  std::string header = "w,agent,series";
  const std::size_t len =
      dumps.empty() ? 0 : dumps.front().second.seqs.gbar.front().size();
  for (std::size_t m = 0; m < len; ++m) header += ",v" + std::to_string(m);
  header += '\n';
  os << header;
  char buf[40];
  std::string row;
  for (const auto& [w, ft] : dumps) {
    const int n = static_cast<int>(ft.seqs.gbar.size());
    for (int i = 0; i < n; ++i) {
      for (int series = 0; series < 2; ++series) {
        const std::vector<double>& seq =
            series == 0 ? ft.seqs.gbar[i] : ft.seqs.g[i];
        row = std::to_string(w) + ',' + std::to_string(i + 1) + ',' +
              (series == 0 ? "gbar" : "g");
        for (double v : seq) {
          std::snprintf(buf, sizeof buf, ",%.17e", v);
          row += buf;
        }
        row += '\n';
        os << row;
      }
    }
  }
}

}  // namespace mgrid
