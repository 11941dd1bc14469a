#pragma once

#include <string>
#include <vector>

#include "fairlot/lp.hpp"
#include "fairlot/valuation.hpp"

namespace fairlot {

// The lottery polytope is a single-commodity flow network.  Each item gets a
// gadget of n agent columns, each column holding k+1 grid vertices (row y
// stands for "y grid pieces of this item handed out so far").  An edge into
// column j at row y' from row y gives agent j exactly y'-y pieces; edges
// from the last column to the item sink discard whatever is left.  Item
// gadgets are chained: the sink of item q and the source of item q+1 are one
// junction vertex, so a unit of flow from the global source to the global
// sink chooses an allocation of every item, and a fractional flow is a
// lottery over such allocations.
struct FlowEdge {
  int item;       // which gadget, 0-based
  int column;     // receiving column: 1..n allocate to that agent, n+1 discards
  int entry_row;  // head row for allocation edges, tail row for discard edges
  int pieces;     // grid pieces handed to agent `column` (0 for discards)
  int tail = 0;
  int head = 0;
};

struct FlowGraph {
  int n = 0, m = 0, k = 0;
  int num_vertices = 0;
  std::vector<FlowEdge> edges;

  int source() const { return 0; }
  int sink() const { return num_vertices - 1; }
  // column is 1..n, row 0..k
  int grid_vertex(int item, int column, int row) const {
    return 1 + (item * n + column - 1) * (k + 1) + row;
  }
  int junction(int after_item) const { return 1 + m * n * (k + 1) + after_item; }
  int item_source(int item) const {
    return item == 0 ? source() : junction(item - 1);
  }
  int item_sink(int item) const {
    return item == m - 1 ? sink() : junction(item);
  }
};

// Edges are laid down item-major, then by receiving column, then by tail
// row, then by pieces ascending; that order is the LP variable order and the
// tie-break order everywhere downstream.
FlowGraph build_flow_graph(int n, int m, int k);

// Largest conservation violation of an edge-indexed flow vector, counting
// the unit source outflow as a constraint.
double validate_flow(const FlowGraph& graph, const std::vector<double>& flow);

enum class Objective { Welfare, Weights, Leximin };
enum class Fairness { EnvyFree, Proportional, None };

struct SolverConfig {
  double epsilon = 0.5;
  Objective objective = Objective::Welfare;
  std::vector<double> weights;  // per agent, only read when objective==Weights
  Fairness fairness = Fairness::EnvyFree;
};

// U[i][e]: expected utility agent i draws from edge e per unit of flow, so
// U[i] . flow is agent i's expected utility.  These are the leximin groups
// and the building blocks of every objective and fairness row.
std::vector<std::vector<double>> agent_utility_vectors(const FlowGraph& graph,
                                                       const GridValues& grid);

// One variable per edge in [0,1].  Rows, in order: "src" (unit outflow),
// conservation "v(q,j,y)" for every grid vertex (item-major, column-major,
// row-major) with "junc(q)" after each non-final item, then "ef(i,j)" for
// every ordered agent pair or "prop(i)" per agent, per the fairness setting.
LinearProgram assemble_lp(const FlowGraph& graph, const GridValues& grid,
                          const SolverConfig& config);

struct SolveResult {
  FlowGraph graph;
  GridValues grid;
  LpSolution lp;
  std::vector<double> flow;       // lp.x, edge-indexed
  std::vector<double> utilities;  // expected own utility per agent
};

// Discretize through the oracle, build the gadget chain, solve.  Throws
// std::runtime_error if the LP comes back anything but optimal; the polytope
// is never empty (the rotation lottery over all-or-nothing allocations is
// envy-free and proportional), so that means a solver defect, not a bad
// instance.
SolveResult solve_ef_lottery(QueryOracle& oracle, const SolverConfig& config);
SolveResult solve_ef_lottery(const Instance& instance,
                             const SolverConfig& config, QueryLedger& ledger);

// The "obvious" relaxation used as a negative control: one marginal
// distribution per (agent, item) with supply only bounded in expectation.
// Its optimum can be strictly better than any implementable lottery, which
// derandomize_naive exposes as an infeasible matching problem.
struct NaiveResult {
  GridValues grid;
  LpSolution lp;
  // marginals[i][q][y]: probability that agent i gets y pieces of item q
  std::vector<std::vector<std::vector<double>>> marginals;
  std::vector<double> utilities;
};

// Variables p(i,q,y) ordered agent-major, item-major, pieces ascending.
// Rows: "mrg(i,q)" (each marginal sums to one), "cap(q)" (expected amount
// of item q handed out is at most one), then fairness rows as above.
LinearProgram assemble_naive_lp(const GridValues& grid,
                                const SolverConfig& config);

NaiveResult solve_naive(QueryOracle& oracle, const SolverConfig& config);
NaiveResult solve_naive(const Instance& instance, const SolverConfig& config,
                        QueryLedger& ledger);

// Search for an edge flow whose per-(agent, item, pieces) mass matches the
// naive marginals exactly.  feasible=false is the interesting outcome: the
// naive optimum promises expected utilities no real lottery can deliver.
struct DerandomizeResult {
  bool feasible = false;
  FlowGraph graph;
  std::vector<double> flow;
};

DerandomizeResult derandomize_naive(const NaiveResult& naive);

}  // namespace fairlot
