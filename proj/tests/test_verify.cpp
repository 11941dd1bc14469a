#include <cmath>

#include "doctest.h"
#include "fairlot/json_io.hpp"
#include "fairlot/rsd.hpp"
#include "fairlot/verify.hpp"
#include "test_support.hpp"

using namespace fairlot;

namespace {

Lottery split_lottery(double a, double b) {
  Lottery lot;
  LotteryEntry e;
  e.probability = 1.0;
  e.outcome.x = {{a}, {b}};
  lot.support = {e};
  return lot;
}

}  // namespace

TEST_CASE("the utility matrix crosses every agent with every bundle") {
  Instance inst = parse_instance(testsup::fixture("half_full.json"));
  Lottery lot = split_lottery(0.5, 0.5);
  UtilityMatrix u = expected_utilities(inst, lot);
  CHECK(u.own[0] == doctest::Approx(1.0));    // min(2*0.5, 1)
  CHECK(u.own[1] == doctest::Approx(0.25));   // 0.5^2
  CHECK(u.cross[0][1] == doctest::Approx(1.0));
  CHECK(u.cross[1][0] == doctest::Approx(0.25));
  CHECK(u.cross[0][0] == u.own[0]);
}

TEST_CASE("ex-ante envy reports the worst pair with its margin") {
  Instance inst = parse_instance(testsup::fixture("linear_capped.json"));
  QueryLedger ledger;
  Lottery rsd = rsd_lottery(inst, RsdMode::Exact, 0, 0, ledger);
  ExAnteReport rep = check_ex_ante_ef(inst, rsd);
  CHECK_FALSE(rep.envy_free);
  CHECK(rep.worst_margin == doctest::Approx(-0.5).epsilon(1e-9));
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations[0].envious == 1);
  CHECK(rep.violations[0].envied == 0);
  CHECK(rep.violations[0].other == doctest::Approx(1.0).epsilon(1e-9));

  ExAnteReport fine = check_ex_ante_ef(inst, split_lottery(0.5, 0.5));
  CHECK(fine.envy_free);
  CHECK(fine.violations.empty());
}

TEST_CASE("ex-post feasibility rejects bad distributions and oversupply") {
  Instance inst = parse_instance(testsup::fixture("two_linear.json"));

  Lottery short_mass = split_lottery(0.5, 0.5);
  short_mass.support[0].probability = 0.7;
  ExPostReport rep = check_ex_post(inst, short_mass, ExPostCheck::Feasible);
  CHECK_FALSE(rep.pass);

  Lottery oversupply = split_lottery(0.8, 0.8);
  ExPostReport rep2 = check_ex_post(inst, oversupply, ExPostCheck::Feasible);
  CHECK_FALSE(rep2.pass);
  REQUIRE_FALSE(rep2.violations.empty());
  CHECK(rep2.violations[0].support_index == 0);

  ExPostReport ok = check_ex_post(inst, split_lottery(0.5, 0.5),
                                  ExPostCheck::Feasible);
  CHECK(ok.pass);
}

TEST_CASE("ex-post fairness holds outcome by outcome") {
  Instance inst = parse_instance(testsup::fixture("two_linear.json"));
  Lottery uneven;
  LotteryEntry a, b;
  a.probability = 0.5;
  a.outcome.x = {{1.0}, {0.0}};
  b.probability = 0.5;
  b.outcome.x = {{0.0}, {1.0}};
  uneven.support = {a, b};

  // Ex ante the coin flip is envy-free, ex post each draw is envied.
  CHECK(check_ex_ante_ef(inst, uneven).envy_free);
  CHECK_FALSE(check_ex_post(inst, uneven, ExPostCheck::EnvyFree).pass);
  CHECK_FALSE(check_ex_post(inst, uneven, ExPostCheck::Proportional).pass);
  CHECK(check_ex_post(inst, split_lottery(0.5, 0.5), ExPostCheck::EnvyFree)
            .pass);
}

TEST_CASE("a wasteful split is dominated on the grid") {
  Instance inst = parse_instance(testsup::fixture("half_full.json"));
  Lottery wasteful = split_lottery(0.25, 0.25);
  ParetoReport rep = check_eps_pareto(inst, wasteful, 0.0,
                                      ParetoClass::AllLotteriesOnGrid, 0.25);
  CHECK_FALSE(rep.eps_pareto);
  CHECK(rep.margin > 1e-8);
  REQUIRE_FALSE(rep.dominator.support.empty());
  // The witness really does clear the bar for both agents.
  UtilityMatrix u = expected_utilities(inst, rep.dominator);
  CHECK(u.own[0] >= rep.base_utilities[0] - 1e-9);
  CHECK(u.own[1] >= rep.base_utilities[1] - 1e-9);
}

TEST_CASE("a generous eps knob turns the same check into a pass") {
  Instance inst = parse_instance(testsup::fixture("half_full.json"));
  Lottery wasteful = split_lottery(0.25, 0.25);
  ParetoReport rep = check_eps_pareto(inst, wasteful, 4.0,
                                      ParetoClass::AllLotteriesOnGrid, 0.25);
  CHECK(rep.eps_pareto);
  CHECK_THROWS_AS(check_eps_pareto(inst, wasteful, -0.1,
                                   ParetoClass::AllLotteriesOnGrid, 0.25),
                  ConfigError);
}

TEST_CASE("the efficient split passes the lottery-class check") {
  Instance inst = parse_instance(testsup::fixture("half_full.json"));
  ParetoReport rep = check_eps_pareto(inst, split_lottery(0.5, 0.5), 0.0,
                                      ParetoClass::AllLotteriesOnGrid, 0.25);
  CHECK(rep.eps_pareto);
  ParetoReport ef_rep = check_eps_pareto(inst, split_lottery(0.5, 0.5), 0.0,
                                         ParetoClass::EfLotteriesOnGrid, 0.25);
  CHECK(ef_rep.eps_pareto);
}

TEST_CASE("outcome-class checks judge each support outcome separately") {
  Instance inst = parse_instance(testsup::fixture("linear_capped.json"));
  // Giving the capped agent everything wastes the upper half.
  Lottery waste = split_lottery(0.0, 1.0);
  ParetoReport rep = check_eps_pareto(inst, waste, 0.0,
                                      ParetoClass::AllOutcomes, 0.25);
  CHECK_FALSE(rep.eps_pareto);

  Lottery tight = split_lottery(0.5, 0.5);
  ParetoReport rep2 = check_eps_pareto(inst, tight, 0.0,
                                       ParetoClass::AllOutcomes, 0.25);
  CHECK(rep2.eps_pareto);
}

TEST_CASE("LP verdicts agree with brute force on random two-agent cases") {
  std::mt19937_64 gen(31337u);
  int dominated_seen = 0;
  for (int trial = 0; trial < 12; ++trial) {
    fairlot::Instance inst = testsup::random_instance(gen, 2, 1);
    if (inst.n != 2) continue;
    // A deliberately lazy base: half of the midpoint split.
    Lottery base = split_lottery(0.25, 0.25);
    ParetoReport lp_rep = check_eps_pareto(inst, base, 0.125,
                                           ParetoClass::AllLotteriesOnGrid,
                                           0.25);
    testsup::ExhaustiveVerdict brute = testsup::exhaustive_pareto(
        inst, base, 0.125, false, 4, 20, 3);
    if (brute.dominated) {
      CHECK_FALSE(lp_rep.eps_pareto);  // LP search space is a superset
      ++dominated_seen;
    }
  }
  CHECK(dominated_seen > 0);
}

TEST_CASE("frontier corners appear when fairness is off") {
  Instance inst = parse_instance(testsup::fixture("power_pair.json"));
  FrontierData data = frontier_sweep(inst, 0.25, 5, Fairness::None);
  REQUIRE(data.lottery_points.size() == 5);
  bool corner_first = false, corner_second = false;
  for (const FrontierPoint& pt : data.lottery_points) {
    if (std::abs(pt.utilities[0] - 1.0) < 1e-9 &&
        std::abs(pt.utilities[1]) < 1e-9)
      corner_first = true;
    if (std::abs(pt.utilities[1] - 1.0) < 1e-9 &&
        std::abs(pt.utilities[0]) < 1e-9)
      corner_second = true;
  }
  CHECK(corner_first);
  CHECK(corner_second);
}

TEST_CASE("envy-freeness collapses identical convex agents to the diagonal") {
  Instance inst = parse_instance(testsup::fixture("power_pair.json"));
  FrontierData data = frontier_sweep(inst, 0.25, 5, Fairness::EnvyFree);
  for (const FrontierPoint& pt : data.lottery_points) {
    CHECK(pt.utilities[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(pt.utilities[1] == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("deterministic frontier points sit on the closed-form curve") {
  Instance inst = parse_instance(testsup::fixture("power_pair.json"));
  FrontierData data = frontier_sweep(inst, 0.25, 3, Fairness::None);
  REQUIRE_FALSE(data.deterministic_points.empty());
  for (const FrontierPoint& pt : data.deterministic_points) {
    double u1 = pt.utilities[0];
    double u2 = pt.utilities[1];
    double want = (1.0 - std::sqrt(u1)) * (1.0 - std::sqrt(u1));
    CHECK(u2 == doctest::Approx(want).epsilon(1e-9));
    REQUIRE(pt.lottery.support.size() == 1);
    CHECK(pt.lottery.support[0].probability == 1.0);
  }
}

TEST_CASE("frontier sweep needs at least two directions") {
  Instance inst = parse_instance(testsup::fixture("two_linear.json"));
  CHECK_THROWS_AS(frontier_sweep(inst, 0.25, 1, Fairness::None), ConfigError);
}
