#include "fairlot/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fairlot {

namespace {

std::string vname(int q, int j, int y) {
  return "v(" + std::to_string(q) + "," + std::to_string(j) + "," +
         std::to_string(y) + ")";
}

std::string pairname(const char* tag, int a, int b) {
  return std::string(tag) + "(" + std::to_string(a) + "," + std::to_string(b) +
         ")";
}

}  // namespace

FlowGraph build_flow_graph(int n, int m, int k) {
  if (n < 1 || m < 1 || k < 1)
    throw ConfigError("flow graph needs n, m, k all positive");
  FlowGraph g;
  g.n = n;
  g.m = m;
  g.k = k;
  g.num_vertices = 2 + m * n * (k + 1) + (m - 1);
  for (int q = 0; q < m; ++q) {
    for (int p = 0; p <= k; ++p)
      g.edges.push_back(
          {q, 1, p, p, g.item_source(q), g.grid_vertex(q, 1, p)});
    for (int j = 2; j <= n; ++j)
      for (int y = 0; y <= k; ++y)
        for (int p = 0; y + p <= k; ++p)
          g.edges.push_back({q, j, y + p, p, g.grid_vertex(q, j - 1, y),
                             g.grid_vertex(q, j, y + p)});
    for (int y = 0; y <= k; ++y)
      g.edges.push_back({q, n + 1, y, 0, g.grid_vertex(q, n, y), g.item_sink(q)});
  }
  return g;
}

double validate_flow(const FlowGraph& graph, const std::vector<double>& flow) {
  if (flow.size() != graph.edges.size())
    throw std::invalid_argument("validate_flow: flow size mismatch");
  std::vector<double> net(graph.num_vertices, 0.0);  // inflow - outflow
  for (std::size_t e = 0; e < flow.size(); ++e) {
    net[graph.edges[e].tail] -= flow[e];
    net[graph.edges[e].head] += flow[e];
  }
  double worst = std::abs(net[graph.source()] + 1.0);  // outflow must be 1
  for (int v = 1; v < graph.num_vertices - 1; ++v)
    worst = std::max(worst, std::abs(net[v]));
  return worst;
}

std::vector<std::vector<double>> agent_utility_vectors(const FlowGraph& graph,
                                                       const GridValues& grid) {
  std::vector<std::vector<double>> u(
      graph.n, std::vector<double>(graph.edges.size(), 0.0));
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const FlowEdge& edge = graph.edges[e];
    if (edge.column <= graph.n)
      u[edge.column - 1][e] = grid.V[edge.column - 1][edge.item][edge.pieces];
  }
  return u;
}

LinearProgram assemble_lp(const FlowGraph& graph, const GridValues& grid,
                          const SolverConfig& config) {
  const int n = graph.n, m = graph.m, k = graph.k;
  LinearProgram lp;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) lp.add_variable(0.0, 1.0);

  int src = lp.add_row(RowSense::EQ, 1.0, "src");
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    if (graph.edges[e].tail == graph.source())
      lp.add_coeff(src, static_cast<int>(e), 1.0);

  // Conservation at every interior vertex.  The global sink needs no row
  // (it is implied by the others), and the source is covered by "src".
  std::vector<int> row_of(graph.num_vertices, -1);
  for (int q = 0; q < m; ++q) {
    for (int j = 1; j <= n; ++j)
      for (int y = 0; y <= k; ++y)
        row_of[graph.grid_vertex(q, j, y)] =
            lp.add_row(RowSense::EQ, 0.0, vname(q, j, y));
    if (q < m - 1)
      row_of[graph.junction(q)] = lp.add_row(
          RowSense::EQ, 0.0, "junc(" + std::to_string(q) + ")");
  }
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const FlowEdge& edge = graph.edges[e];
    if (row_of[edge.head] >= 0)
      lp.add_coeff(row_of[edge.head], static_cast<int>(e), 1.0);
    if (row_of[edge.tail] >= 0)
      lp.add_coeff(row_of[edge.tail], static_cast<int>(e), -1.0);
  }

  // Every utility is linear in the flow: agent i draws V[i][q][p] from each
  // unit of flow on an edge giving p pieces of item q to agent j, with j=i
  // for the own side and j the envied agent on the cross side.
  if (config.fairness == Fairness::EnvyFree) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        int row = lp.add_row(RowSense::GE, 0.0, pairname("ef", i, j));
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
          const FlowEdge& edge = graph.edges[e];
          if (edge.column > n) continue;
          double v = grid.V[i][edge.item][edge.pieces];
          if (edge.column - 1 == i)
            lp.add_coeff(row, static_cast<int>(e), v);
          else if (edge.column - 1 == j)
            lp.add_coeff(row, static_cast<int>(e), -v);
        }
      }
  } else if (config.fairness == Fairness::Proportional) {
    for (int i = 0; i < n; ++i) {
      double full = 0.0;
      for (int q = 0; q < m; ++q) full += grid.V[i][q][k];
      int row = lp.add_row(RowSense::GE, full / n,
                           "prop(" + std::to_string(i) + ")");
      for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const FlowEdge& edge = graph.edges[e];
        if (edge.column - 1 == i)
          lp.add_coeff(row, static_cast<int>(e),
                       grid.V[i][edge.item][edge.pieces]);
      }
    }
  }

  if (config.objective == Objective::Weights &&
      static_cast<int>(config.weights.size()) != n)
    throw ConfigError("weights objective needs one weight per agent");
  if (config.objective != Objective::Leximin) {
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      const FlowEdge& edge = graph.edges[e];
      if (edge.column > n) continue;
      double v = grid.V[edge.column - 1][edge.item][edge.pieces];
      if (config.objective == Objective::Weights)
        v *= config.weights[edge.column - 1];
      lp.set_objective(static_cast<int>(e), v);
    }
  }
  return lp;
}

SolveResult solve_ef_lottery(QueryOracle& oracle, const SolverConfig& config) {
  SolveResult r;
  r.grid = discretize(oracle, config.epsilon);
  r.graph = build_flow_graph(oracle.agents(), oracle.items(), r.grid.pieces);
  LinearProgram lp = assemble_lp(r.graph, r.grid, config);
  std::vector<std::vector<double>> u = agent_utility_vectors(r.graph, r.grid);
  r.lp = config.objective == Objective::Leximin ? lexi_solve(lp, u)
                                                : solve_lp(lp);
  if (r.lp.status != LpSolution::Status::Optimal)
    throw std::runtime_error("flow LP did not solve to optimality");
  r.flow = r.lp.x;
  r.utilities.assign(r.graph.n, 0.0);
  for (int i = 0; i < r.graph.n; ++i)
    for (std::size_t e = 0; e < r.flow.size(); ++e)
      r.utilities[i] += u[i][e] * r.flow[e];
  return r;
}

SolveResult solve_ef_lottery(const Instance& instance,
                             const SolverConfig& config, QueryLedger& ledger) {
  InstanceOracle oracle(instance, ledger);
  return solve_ef_lottery(oracle, config);
}

LinearProgram assemble_naive_lp(const GridValues& grid,
                                const SolverConfig& config) {
  const int n = grid.agents(), m = grid.items(), k = grid.pieces;
  LinearProgram lp;
  auto var = [&](int i, int q, int y) { return (i * m + q) * (k + 1) + y; };
  for (int j = 0; j < n * m * (k + 1); ++j) lp.add_variable(0.0, 1.0);

  for (int i = 0; i < n; ++i)
    for (int q = 0; q < m; ++q) {
      int row = lp.add_row(RowSense::EQ, 1.0, pairname("mrg", i, q));
      for (int y = 0; y <= k; ++y) lp.add_coeff(row, var(i, q, y), 1.0);
    }
  for (int q = 0; q < m; ++q) {
    int row = lp.add_row(RowSense::LE, 1.0, "cap(" + std::to_string(q) + ")");
    for (int i = 0; i < n; ++i)
      for (int y = 1; y <= k; ++y)
        lp.add_coeff(row, var(i, q, y), grid_point(y, k));
  }

  if (config.fairness == Fairness::EnvyFree) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        int row = lp.add_row(RowSense::GE, 0.0, pairname("ef", i, j));
        for (int q = 0; q < m; ++q)
          for (int y = 1; y <= k; ++y) {
            lp.add_coeff(row, var(i, q, y), grid.V[i][q][y]);
            lp.add_coeff(row, var(j, q, y), -grid.V[i][q][y]);
          }
      }
  } else if (config.fairness == Fairness::Proportional) {
    for (int i = 0; i < n; ++i) {
      double full = 0.0;
      for (int q = 0; q < m; ++q) full += grid.V[i][q][k];
      int row = lp.add_row(RowSense::GE, full / n,
                           "prop(" + std::to_string(i) + ")");
      for (int q = 0; q < m; ++q)
        for (int y = 1; y <= k; ++y)
          lp.add_coeff(row, var(i, q, y), grid.V[i][q][y]);
    }
  }

  if (config.objective == Objective::Weights &&
      static_cast<int>(config.weights.size()) != n)
    throw ConfigError("weights objective needs one weight per agent");
  if (config.objective != Objective::Leximin)
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < m; ++q)
        for (int y = 1; y <= k; ++y) {
          double v = grid.V[i][q][y];
          if (config.objective == Objective::Weights) v *= config.weights[i];
          lp.set_objective(var(i, q, y), v);
        }
  return lp;
}

NaiveResult solve_naive(QueryOracle& oracle, const SolverConfig& config) {
  NaiveResult r;
  r.grid = discretize(oracle, config.epsilon);
  const int n = r.grid.agents(), m = r.grid.items(), k = r.grid.pieces;
  LinearProgram lp = assemble_naive_lp(r.grid, config);
  if (config.objective == Objective::Leximin) {
    std::vector<std::vector<double>> groups(
        n, std::vector<double>(lp.num_vars, 0.0));
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < m; ++q)
        for (int y = 1; y <= k; ++y)
          groups[i][(i * m + q) * (k + 1) + y] = r.grid.V[i][q][y];
    r.lp = lexi_solve(lp, groups);
  } else {
    r.lp = solve_lp(lp);
  }
  if (r.lp.status != LpSolution::Status::Optimal)
    throw std::runtime_error("naive LP did not solve to optimality");
  r.marginals.assign(
      n, std::vector<std::vector<double>>(m, std::vector<double>(k + 1, 0.0)));
  r.utilities.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < m; ++q)
      for (int y = 0; y <= k; ++y) {
        double p = r.lp.x[(i * m + q) * (k + 1) + y];
        r.marginals[i][q][y] = p;
        r.utilities[i] += p * r.grid.V[i][q][y];
      }
  return r;
}

NaiveResult solve_naive(const Instance& instance, const SolverConfig& config,
                        QueryLedger& ledger) {
  InstanceOracle oracle(instance, ledger);
  return solve_naive(oracle, config);
}

DerandomizeResult derandomize_naive(const NaiveResult& naive) {
  const int n = naive.grid.agents(), m = naive.grid.items(),
            k = naive.grid.pieces;
  DerandomizeResult r;
  r.graph = build_flow_graph(n, m, k);

  LinearProgram lp;
  for (std::size_t e = 0; e < r.graph.edges.size(); ++e)
    lp.add_variable(0.0, 1.0);
  int src = lp.add_row(RowSense::EQ, 1.0, "src");
  std::vector<int> row_of(r.graph.num_vertices, -1);
  for (int q = 0; q < m; ++q) {
    for (int j = 1; j <= n; ++j)
      for (int y = 0; y <= k; ++y)
        row_of[r.graph.grid_vertex(q, j, y)] =
            lp.add_row(RowSense::EQ, 0.0, vname(q, j, y));
    if (q < m - 1)
      row_of[r.graph.junction(q)] =
          lp.add_row(RowSense::EQ, 0.0, "junc(" + std::to_string(q) + ")");
  }
  // One matching row per (agent, item, pieces): the flow must place exactly
  // the naive marginal mass on edges with that signature.
  std::vector<std::vector<std::vector<int>>> match(
      n, std::vector<std::vector<int>>(m, std::vector<int>(k + 1, -1)));
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < m; ++q)
      for (int y = 0; y <= k; ++y)
        match[i][q][y] =
            lp.add_row(RowSense::EQ, naive.marginals[i][q][y],
                       "match(" + std::to_string(i) + "," + std::to_string(q) +
                           "," + std::to_string(y) + ")");

  for (std::size_t e = 0; e < r.graph.edges.size(); ++e) {
    const FlowEdge& edge = r.graph.edges[e];
    if (edge.tail == r.graph.source())
      lp.add_coeff(src, static_cast<int>(e), 1.0);
    if (row_of[edge.head] >= 0)
      lp.add_coeff(row_of[edge.head], static_cast<int>(e), 1.0);
    if (row_of[edge.tail] >= 0)
      lp.add_coeff(row_of[edge.tail], static_cast<int>(e), -1.0);
    if (edge.column <= n)
      lp.add_coeff(match[edge.column - 1][edge.item][edge.pieces],
                   static_cast<int>(e), 1.0);
  }

  LpSolution sol = solve_lp(lp);
  r.feasible = sol.status == LpSolution::Status::Optimal;
  if (r.feasible) r.flow = sol.x;
  return r;
}

}  // namespace fairlot
