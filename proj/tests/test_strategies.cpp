#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mgrid/strategies.hpp"

using namespace mgrid;

namespace {

Eigen::VectorXd golden_caps() {
  Eigen::VectorXd c(6);
  c << 600.0, 450.0, 300.0, 150.0, 750.0, 150.0;
  return c;
}

MicrogridModel golden_model() { return make_model(golden_caps(), 1600.0); }

MicrogridModel golden_after_event1() {
  MicrogridModel m = golden_model();
  apply_event(m, 1, 300.0);
  return m;
}

}  // namespace

TEST_CASE("model construction and validation") {
  MicrogridModel m = golden_model();
  CHECK(m.p_t == 2400.0);
  CHECK(m.p_l == 1600.0);
  CHECK(m.k == 0);
  CHECK(perturbed_total(m) == 2400.0);
  CHECK_THROWS_WITH_AS(perturbed_capacity(m), doctest::Contains("bad index"),
                       std::invalid_argument);

  Eigen::VectorXd bad = golden_caps();
  bad[1] = 0.0;
  CHECK_THROWS_WITH_AS(make_model(bad, 1600.0),
                       doctest::Contains("capacity must be positive"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_model(golden_caps(), 0.0),
                       doctest::Contains("load must be positive"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(make_model(golden_caps(), 2400.0),
                       doctest::Contains("load exceeds capacity"),
                       std::invalid_argument);
}

TEST_CASE("event registration folds the previous event") {
  MicrogridModel m = golden_after_event1();
  CHECK(m.p_t == 2400.0);  // baseline until the next event folds it
  CHECK(m.k == 1);
  CHECK(m.delta == 300.0);
  CHECK(perturbed_capacity(m) == 900.0);
  CHECK(perturbed_total(m) == 2700.0);

  apply_event(m, 1, -600.0);
  CHECK(m.capacities[0] == 900.0);
  CHECK(m.p_t == 2700.0);
  CHECK(perturbed_capacity(m) == 300.0);
  CHECK(perturbed_total(m) == 2100.0);

  CHECK_THROWS_WITH_AS(apply_event(m, 7, 10.0), doctest::Contains("bad index"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_event(m, 0, 10.0), doctest::Contains("bad index"),
                       std::invalid_argument);
}

TEST_CASE("share ratio") {
  CHECK(share_ratio(1600.0, 2400.0) == 1600.0 / 2400.0);
  CHECK(share_ratio(1600.0, 2400.0) == doctest::Approx(2.0 / 3.0));
  CHECK(share_ratio(0.0, 2400.0) == 0.0);
  CHECK(share_ratio(1600.0, 2700.0) == doctest::Approx(0.5926).epsilon(1e-3));
  CHECK_THROWS_AS(share_ratio(1600.0, 0.0), std::invalid_argument);
}

TEST_CASE("uniform proportional dispatch before any event") {
  const MicrogridModel m = golden_model();
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2400.0);
  const double expect[6] = {400.0, 300.0, 200.0, 100.0, 500.0, 100.0};
  for (StrategyKind kind :
       {StrategyKind::strategy1, StrategyKind::strategy2,
        StrategyKind::strategy3, StrategyKind::transient_match}) {
    PowerCommand c = commands(kind, m, s);
    for (int i = 0; i < 6; ++i) CHECK(c.p[i] == expect[i]);
    CHECK(c.p_o == 1600.0);
    CHECK(c.e == 0.0);
  }
}

TEST_CASE("strategies coincide once consensus has settled") {
  const MicrogridModel m = golden_after_event1();
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2700.0);
  // Follower ratio sum the finite-time protocol would report at s = 2700:
  // (450+300+150+750+150)/2700.
  const double sek = 1800.0 / 2700.0;
  PowerCommand c1 = strategy1(m, s);
  PowerCommand c2 = strategy2(m, s);
  PowerCommand c3 = strategy3(m, s);
  PowerCommand ct = transient_match(m, s, sek).first;
  for (int i = 0; i < 6; ++i) {
    CHECK(c2.p[i] == doctest::Approx(c1.p[i]).epsilon(1e-12));
    CHECK(c3.p[i] == doctest::Approx(c1.p[i]).epsilon(1e-12));
    CHECK(ct.p[i] == doctest::Approx(c1.p[i]).epsilon(1e-12));
  }
  CHECK(std::abs(c1.e) <= 1e-9 * 1600.0);
  CHECK(std::abs(ct.e) <= 1e-9 * 1600.0);
}

TEST_CASE("mismatch at the event instant, +300 kW case") {
  const MicrogridModel m = golden_after_event1();
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2400.0);

  PowerCommand c1 = strategy1(m, s);
  CHECK(c1.e == 200.0);
  InitialError o1 = initial_error_oracle(StrategyKind::strategy1, m, 10.0);
  CHECK(o1.e0 == 200.0);
  CHECK_FALSE(o1.edot0.has_value());

  PowerCommand c2 = strategy2(m, s);
  CHECK(c2.e == 133.33333333333326);
  InitialError o2 = initial_error_oracle(StrategyKind::strategy2, m, 10.0);
  CHECK(o2.e0 == 133.33333333333334);
  CHECK(std::abs(c2.e - o2.e0) <= 1e-9 * o2.e0);
  CHECK_FALSE(o2.edot0.has_value());

  PowerCommand c3 = strategy3(m, s);
  CHECK(c3.e == 0.0);
  InitialError o3 = initial_error_oracle(StrategyKind::strategy3, m, 10.0);
  CHECK(o3.e0 == 0.0);
  CHECK(o3.edot0.has_value());
  CHECK(*o3.edot0 == 1500.0);

  auto [ct, st] = transient_match(m, s, 1800.0 / 2400.0);
  CHECK(st.p_k_max_prime == 600.0);
  CHECK(ct.p[0] == 400.0);
  CHECK(ct.e == 0.0);
  InitialError ot =
      initial_error_oracle(StrategyKind::transient_match, m, 10.0);
  CHECK(ot.e0 == 0.0);
  CHECK(*ot.edot0 == 0.0);
}

TEST_CASE("error oracle vanishes without an event") {
  const MicrogridModel fresh = golden_model();
  for (StrategyKind kind :
       {StrategyKind::strategy1, StrategyKind::strategy2,
        StrategyKind::strategy3, StrategyKind::transient_match}) {
    InitialError o = initial_error_oracle(kind, fresh, 10.0);
    CHECK(o.e0 == 0.0);
    if (o.edot0) CHECK(*o.edot0 == 0.0);
  }
  MicrogridModel zero_delta = golden_model();
  apply_event(zero_delta, 2, 0.0);
  CHECK(initial_error_oracle(StrategyKind::strategy1, zero_delta, 10.0).e0 ==
        0.0);
  CHECK_THROWS_AS(
      initial_error_oracle(StrategyKind::strategy3, golden_after_event1(), 0.0),
      std::invalid_argument);
}

TEST_CASE("estimates at or below the load abort evaluation") {
  const MicrogridModel m = golden_after_event1();
  CHECK_THROWS_WITH_AS(strategy1(m, Eigen::VectorXd::Constant(6, 1500.0)),
                       "estimate below load", std::runtime_error);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2400.0);
  s[3] = 1600.0;
  CHECK_THROWS_WITH_AS(strategy2(m, s), "estimate below load",
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(strategy3(m, Eigen::VectorXd::Zero(6)),
                       "estimate below load", std::runtime_error);
}

TEST_CASE("dispatch requires the ratio sum once an event is live") {
  const MicrogridModel m = golden_after_event1();
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2400.0);
  CHECK_THROWS_AS(commands(StrategyKind::transient_match, m, s),
                  std::invalid_argument);
  CHECK_NOTHROW(commands(StrategyKind::transient_match, m, s, 0.75));
  CHECK_NOTHROW(commands(StrategyKind::strategy1, m, s));
}

TEST_CASE("commands scale linearly with the load") {
  MicrogridModel m_hi = golden_after_event1();
  MicrogridModel m_lo = make_model(golden_caps(), 800.0);
  apply_event(m_lo, 1, 300.0);
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 2500.0);
  for (StrategyKind kind : {StrategyKind::strategy1, StrategyKind::strategy2,
                            StrategyKind::strategy3}) {
    PowerCommand hi = commands(kind, m_hi, s);
    PowerCommand lo = commands(kind, m_lo, s);
    for (int i = 0; i < 6; ++i)
      CHECK(hi.p[i] == doctest::Approx(2.0 * lo.p[i]).epsilon(1e-12));
  }
}
