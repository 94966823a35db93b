#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "mgrid/scenario.hpp"
#include "mgrid/telemetry.hpp"

using namespace mgrid;

namespace {

// Small two-node experiment used by most run() tests; cheap to simulate.
const char* kTwoNode = R"(agents 2
edge 1 2 1
capacity 1 600
capacity 2 400
load 0 500
event 1 1 200
h 10
dt 0.001
t_end 20
strategy strategy1
)";

std::string with_strategy(const char* name) {
  std::string s = kTwoNode;
  const std::string from = "strategy strategy1";
  s.replace(s.find(from), from.size(), std::string("strategy ") + name);
  return s;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("golden scenario file parses") {
  Scenario sc = load_scenario_file(std::string(MGRID_SCENARIO_DIR) +
                                   "/paper_6dg.scn");
  CHECK(sc.n == 6);
  CHECK(sc.edges.size() == 9);
  REQUIRE(sc.capacities.size() == 6);
  const double caps[6] = {600.0, 450.0, 300.0, 150.0, 750.0, 150.0};
  for (int i = 0; i < 6; ++i) CHECK(sc.capacities[i] == caps[i]);
  CHECK(sc.h == 10.0);
  CHECK(sc.dt == 1e-3);
  CHECK(sc.t_end == 18.0);
  CHECK(sc.eps_rel == 1e-4);
  CHECK(sc.strategy == StrategyKind::transient_match);
  CHECK(sc.plant.mode == PlantMode::ideal);
  CHECK(sc.plant.loss_fraction == 0.0);
  REQUIRE(sc.events.size() == 2);
  CHECK(sc.events[0].t == 3.0);
  CHECK(sc.events[0].k == 1);
  CHECK(sc.events[0].delta == 300.0);
  CHECK(sc.events[1].t == 9.0);
  CHECK(sc.events[1].delta == -600.0);
  REQUIRE(sc.load_profile.size() == 1);
  CHECK(sc.load_profile[0].p_l == 1600.0);
  CHECK(sc.graph().is_connected());

  CHECK_THROWS_WITH_AS(load_scenario_file("/nonexistent/path.scn"),
                       doctest::Contains("cannot open scenario file"),
                       std::runtime_error);
}

TEST_CASE("piecewise-constant load lookup") {
  Scenario sc = parse_scenario(
      "agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
      "load 0 500\nload 5 700\nt_end 10\n");
  CHECK(sc.load_at(0.0) == 500.0);
  CHECK(sc.load_at(4.999) == 500.0);
  CHECK(sc.load_at(5.0) == 700.0);
  CHECK(sc.load_at(9.5) == 700.0);
}

TEST_CASE("parse errors carry line numbers") {
  const auto check_fail = [](const std::string& text, const char* needle) {
    const std::string msg = message_of([&] { parse_scenario(text); });
    INFO("message: ", msg, " expecting: ", needle);
    CHECK(msg.find(needle) != std::string::npos);
  };

  check_fail("edge 1 2 1\n", "parse error (line 1)");
  check_fail("edge 1 2 1\n", "'agents N' must be the first directive");
  check_fail("agents 2\nagents 3\n", "parse error (line 2): duplicate");
  check_fail("agents 1\n", "at least two agents");
  check_fail("agents 2\nfrobnicate 3\n", "unknown directive");
  check_fail("agents 2\nh banana\n", "invalid gain");
  check_fail("agents 2\nedge 1 7 1\n", "bad index");
  check_fail("agents 2\nedge 1 1 1\n", "self-loop");
  check_fail("agents 2\nedge 1 2 1\nedge 2 1 2\n", "duplicate edge");
  check_fail("agents 2\nedge 1 2 0\n", "weight must be positive");
  check_fail("agents 2\nevent 1 3 50\n", "bad index");
  check_fail("agents 3\nedge 1 2 1\nedge 2 3 1\ncapacity 1 100\n"
             "capacity 2 100\ncapacity 3 100\nload 0 150\nt_end 1\n"
             "plant ideal 0.2\n",
             "loss fraction out of range");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\nload 0 100\nt_end 1\n",
             "missing capacity for agent 2");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 1 100\nt_end 2\n",
             "load profile must start at t=0");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 100\n",
             "t_end is required");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 100\nevent 1 1 50\nevent 0.5 2 10\nt_end 2\n",
             "strictly increasing");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 100\nevent 1.5 1 50\nt_end 1.5\n",
             "t_end must exceed the last event");
  check_fail("agents 3\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "capacity 3 100\nload 0 100\nt_end 1\n",
             "disconnected graph");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 1000\nt_end 1\n",
             "load exceeds capacity");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 100\nevent 1 1 -650\nt_end 2\n",
             "capacity must be positive after event");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 1 700\n"
             "capacity 2 400\nload 0 100\nt_end 1\n",
             "duplicate capacity");
  check_fail("agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
             "load 0 100\nstrategy droop\nt_end 1\n",
             "unknown strategy");
}

TEST_CASE("steady dispatch without events") {
  Scenario sc = parse_scenario(
      "agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
      "load 0 500\nt_end 0.5\n");
  RunResult res = run(sc);
  CHECK(res.records.size() == 501);
  CHECK(res.warnings.empty());
  for (const TelemetryRecord& rec : res.records) {
    CHECK(rec.p_cmd[0] == 300.0);
    CHECK(rec.p_cmd[1] == 200.0);
    CHECK(rec.s[0] == 1000.0);
    CHECK(rec.s[1] == 1000.0);
    CHECK(rec.e == 0.0);
    CHECK_FALSE(rec.c_a.has_value());
  }
  CHECK(res.records.back().t == 0.5);
}

TEST_CASE("two-node run with one event") {
  Scenario sc = parse_scenario(kTwoNode);
  RunResult res = run(sc);
  REQUIRE(res.records.size() == 20001);
  CHECK(res.warnings.empty());

  // Pre-event rows: exact proportional dispatch at s = 1000.
  CHECK(res.records[0].p_cmd[0] == 300.0);
  CHECK(res.records[0].p_cmd[1] == 200.0);
  CHECK(res.records[0].e == 0.0);
  CHECK(res.records[999].s[0] == 1000.0);

  // Event step: estimates still hold the old total, so the informed command
  // overshoots by P_L*delta/P_T = 100 kW.
  const TelemetryRecord& ev = res.records[1000];
  CHECK(ev.t == 1.0);
  CHECK(ev.s[0] == 1000.0);
  CHECK(ev.e == 100.0);

  // Estimates rise toward 1200 and the final dispatch re-balances.
  const TelemetryRecord& last = res.records.back();
  CHECK(last.s[0] == doctest::Approx(1200.0).epsilon(1e-6));
  CHECK(last.s[1] == doctest::Approx(1200.0).epsilon(1e-6));
  CHECK(last.p_cmd[0] == doctest::Approx(500.0 * 800.0 / 1200.0).epsilon(1e-6));
  CHECK(last.r[0] == doctest::Approx(500.0 / 1200.0).epsilon(1e-6));
}

TEST_CASE("mismatch at the event instant orders the strategies") {
  const double e1 = run(parse_scenario(with_strategy("strategy1")))
                        .records[1000].e;
  const double e2 = run(parse_scenario(with_strategy("strategy2")))
                        .records[1000].e;
  const double e3 = run(parse_scenario(with_strategy("strategy3")))
                        .records[1000].e;
  CHECK(e1 == 100.0);
  CHECK(e2 == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK(e3 == 0.0);
  CHECK(std::abs(e3) < std::abs(e2));
  CHECK(std::abs(e2) < std::abs(e1));
}

TEST_CASE("identical runs emit byte-identical telemetry") {
  Scenario sc = parse_scenario(kTwoNode);
  std::ostringstream a;
  std::ostringstream b;
  write_csv(run(sc).records, a);
  write_csv(run(sc).records, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("t,s_1,s_2,p_cmd_1,p_cmd_2,p_del_1,p_del_2,"
                      "p_o,p_l,e,r_1,r_2,c_a\n",
                      0) == 0);
  CHECK(a.str().find(",nan\n") != std::string::npos);
}

TEST_CASE("load changes never touch the estimate trajectory") {
  Scenario steady = parse_scenario(kTwoNode);
  std::string stepped_text = kTwoNode;
  stepped_text.insert(stepped_text.find("event"), "load 0.5 700\n");
  Scenario stepped = parse_scenario(stepped_text);
  RunResult rs = run(steady);
  RunResult rl = run(stepped);
  REQUIRE(rs.records.size() == rl.records.size());
  for (std::size_t w = 0; w < rs.records.size(); ++w) {
    CHECK(rs.records[w].s[0] == rl.records[w].s[0]);
    CHECK(rs.records[w].s[1] == rl.records[w].s[1]);
  }
  CHECK(rl.records[600].p_l == 700.0);
  CHECK(rl.records[600].p_cmd[0] ==
        doctest::Approx(rs.records[600].p_cmd[0] * 7.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("dt beyond the Euler stability limit is rejected up front") {
  std::string text = kTwoNode;
  const std::string from = "dt 0.001";
  text.replace(text.find(from), from.size(), "dt 0.2");
  Scenario sc = parse_scenario(text);
  const std::string msg = message_of([&] { run(sc); });
  CHECK(msg.rfind("dt exceeds stability limit", 0) == 0);
  CHECK(msg.find("limit=") != std::string::npos);
}

TEST_CASE("a second event during an unfinished transient is rejected") {
  Scenario sc = parse_scenario(
      "agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
      "load 0 500\nevent 0.5 1 100\nevent 0.6 2 50\n"
      "eps_rel 1e-12\nt_end 2\n");
  CHECK_THROWS_WITH_AS(run(sc), "consensus in progress", std::runtime_error);
}

TEST_CASE("out-of-band event magnitudes produce a warning") {
  Scenario sc = parse_scenario(
      "agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
      "load 0 500\nevent 0.2 1 400\nt_end 1\n");
  RunResult res = run(sc);
  REQUIRE(!res.warnings.empty());
  CHECK(res.warnings[0].find("outside the admissible band") !=
        std::string::npos);
}

TEST_CASE("negative commands warn but are not clamped") {
  // Gain near the discrete stability edge makes the informed estimate
  // overshoot below the new total, driving its third-rule command negative.
  Scenario sc = parse_scenario(
      "agents 3\nedge 1 2 1\nedge 2 3 1\n"
      "capacity 1 30\ncapacity 2 500\ncapacity 3 500\n"
      "load 0 100\nevent 0.01 1 -25\nh 1500\ndt 0.001\nt_end 0.1\n"
      "strategy strategy3\n");
  RunResult res = run(sc);
  bool warned = false;
  for (const std::string& w : res.warnings)
    if (w.find("negative power command") != std::string::npos) warned = true;
  CHECK(warned);
  double most_negative = 0.0;
  for (const TelemetryRecord& rec : res.records)
    for (int i = 0; i < 3; ++i)
      if (rec.p_cmd[i] < most_negative) most_negative = rec.p_cmd[i];
  CHECK(most_negative < 0.0);
}

TEST_CASE("transient-match runs expose the network average") {
  Scenario sc = parse_scenario(
      "agents 2\nedge 1 2 1\ncapacity 1 600\ncapacity 2 400\n"
      "load 0 500\nevent 0.02 1 100\nt_end 0.05\n"
      "strategy transient_match\n");
  RunOptions opts;
  opts.dump_ft = true;
  opts.log_messages = true;
  RunResult res = run(sc, opts);
  REQUIRE(res.records.size() == 51);
  REQUIRE(res.records[0].c_a.has_value());
  CHECK(*res.records[0].c_a == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(res.ft_dumps.size() == 51);

  std::ostringstream ft;
  write_ft_csv(res.ft_dumps, ft);
  CHECK(ft.str().rfind("w,agent,series,v0,v1,v2,v3,v4,v5\n", 0) == 0);
  CHECK(ft.str().find(",gbar,") != std::string::npos);
  CHECK(ft.str().find(",g,") != std::string::npos);

  CHECK(!res.messages.empty());
  for (const MessageLogEntry& m : res.messages) {
    CHECK(((m.sender == 1 && m.receiver == 2) ||
           (m.sender == 2 && m.receiver == 1)));
  }
}
