#include <cmath>

#include "doctest.h"
#include "fairlot/flow.hpp"
#include "fairlot/json_io.hpp"
#include "fairlot/lottery.hpp"
#include "test_support.hpp"

using namespace fairlot;

namespace {

Outcome outcome_2x1(double a, double b) {
  Outcome o;
  o.x = {{a}, {b}};
  return o;
}

}  // namespace

TEST_CASE("merge_support folds duplicate outcomes and drops dust") {
  Lottery raw;
  raw.support.push_back({0.3, outcome_2x1(1.0, 0.0)});
  raw.support.push_back({0.4, outcome_2x1(0.0, 1.0)});
  raw.support.push_back({0.3, outcome_2x1(1.0, 0.0)});
  raw.support.push_back({1e-15, outcome_2x1(0.5, 0.5)});
  Lottery merged = merge_support(raw);
  REQUIRE(merged.support.size() == 2);
  CHECK(merged.support[0].probability == doctest::Approx(0.6));
  CHECK(merged.support[0].outcome.x[0][0] == 1.0);  // first-seen order kept
  CHECK(merged.support[1].probability == doctest::Approx(0.4));
}

TEST_CASE("expected_allocation mixes outcomes by probability") {
  Lottery lot;
  lot.support.push_back({0.25, outcome_2x1(1.0, 0.0)});
  lot.support.push_back({0.75, outcome_2x1(0.0, 0.4)});
  auto ea = expected_allocation(lot);
  CHECK(ea[0][0] == doctest::Approx(0.25));
  CHECK(ea[1][0] == doctest::Approx(0.3));
}

TEST_CASE("piece_marginals buckets grid outcomes by piece count") {
  FlowGraph g = build_flow_graph(2, 1, 2);
  Lottery lot;
  lot.support.push_back({0.5, outcome_2x1(1.0, 0.0)});
  lot.support.push_back({0.5, outcome_2x1(0.5, 0.5)});
  auto pm = piece_marginals(g, lot);
  CHECK(pm[0][0][2] == doctest::Approx(0.5));
  CHECK(pm[0][0][1] == doctest::Approx(0.5));
  CHECK(pm[1][0][0] == doctest::Approx(0.5));
  CHECK(pm[1][0][1] == doctest::Approx(0.5));

  Lottery off_grid;
  off_grid.support.push_back({1.0, outcome_2x1(0.3, 0.0)});
  CHECK_THROWS_AS(piece_marginals(g, off_grid), std::invalid_argument);
}

TEST_CASE("decompose rejects non-conserving flows") {
  FlowGraph g = build_flow_graph(2, 1, 2);
  std::vector<double> junk(g.edges.size(), 0.0);
  CHECK_THROWS_AS(decompose(g, junk), std::invalid_argument);
}

TEST_CASE("decompositions carry the full mass on feasible outcomes") {
  std::mt19937_64 gen(4242u);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = testsup::random_instance(gen, 4, 3);
    QueryLedger ledger;
    SolverConfig config;
    config.epsilon = 0.125;
    SolveResult r = solve_ef_lottery(inst, config, ledger);
    REQUIRE(r.lp.status == LpSolution::Status::Optimal);

    Lottery lot = decompose(r.graph, r.flow);
    double mass = 0.0;
    for (const LotteryEntry& e : lot.support) {
      CHECK(e.probability > 0.0);
      mass += e.probability;
      for (int q = 0; q < inst.m; ++q) {
        double handed = 0.0;
        for (int i = 0; i < inst.n; ++i) {
          CHECK(e.outcome.x[i][q] >= -1e-12);
          handed += e.outcome.x[i][q];
        }
        CHECK(handed <= 1.0 + 1e-9);
      }
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("decomposition marginals reproduce the flow they came from") {
  std::mt19937_64 gen(777u);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = testsup::random_instance(gen, 3, 2);
    QueryLedger ledger;
    SolverConfig config;
    config.epsilon = 0.25;
    SolveResult r = solve_ef_lottery(inst, config, ledger);
    Lottery lot = decompose(r.graph, r.flow);

    // Flow mass per (agent, item, pieces) aggregated straight off the edges.
    int k = r.graph.k;
    std::vector<std::vector<std::vector<double>>> from_flow(
        inst.n, std::vector<std::vector<double>>(
                    inst.m, std::vector<double>(k + 1, 0.0)));
    for (std::size_t e = 0; e < r.graph.edges.size(); ++e) {
      const FlowEdge& edge = r.graph.edges[e];
      if (edge.column >= 1 && edge.column <= inst.n)
        from_flow[edge.column - 1][edge.item][edge.pieces] += r.flow[e];
    }
    auto from_lottery = piece_marginals(r.graph, lot);
    for (int i = 0; i < inst.n; ++i)
      for (int q = 0; q < inst.m; ++q)
        for (int y = 0; y <= k; ++y)
          CHECK(std::abs(from_lottery[i][q][y] - from_flow[i][q][y]) <= 1e-9);
  }
}

TEST_CASE("decomposed support stays on the solver grid") {
  Instance inst = parse_instance(testsup::fixture("concave_pair.json"));
  QueryLedger ledger;
  SolverConfig config;
  config.epsilon = 0.25;
  SolveResult r = solve_ef_lottery(inst, config, ledger);
  Lottery lot = decompose(r.graph, r.flow);
  for (const LotteryEntry& e : lot.support)
    for (int i = 0; i < inst.n; ++i)
      for (int q = 0; q < inst.m; ++q) {
        double scaled = e.outcome.x[i][q] * r.graph.k;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
      }
}
