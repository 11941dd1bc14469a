#include "fairlot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairlot {

namespace {

constexpr double kStrictMargin = 1e-8;

void require_shape(const Instance& instance, const Lottery& lottery) {
  for (const LotteryEntry& entry : lottery.support) {
    if (static_cast<int>(entry.outcome.x.size()) != instance.n)
      throw std::invalid_argument("lottery outcome has wrong agent count");
    for (const auto& row : entry.outcome.x)
      if (static_cast<int>(row.size()) != instance.m)
        throw std::invalid_argument("lottery outcome has wrong item count");
  }
}

double bundle_value(const Instance& instance, int viewer,
                    const std::vector<double>& bundle) {
  double total = 0.0;
  for (int q = 0; q < instance.m; ++q)
    total += eval(instance.val(viewer, q), bundle[q]);
  return total;
}

// All ways to split `total` grid pieces among `parts` slots, in
// lexicographic order of the piece vector.
std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(parts, 0);
  auto rec = [&](auto&& self, int slot, int left) -> void {
    if (slot == parts - 1) {
      cur[slot] = left;
      out.push_back(cur);
      return;
    }
    for (int take = 0; take <= left; ++take) {
      cur[slot] = take;
      self(self, slot + 1, left - take);
    }
  };
  rec(rec, 0, total);
  return out;
}

// Every complete allocation on the k-grid (items fully handed out), as
// per-item piece counts, odometer order over items.  Completing a partial
// allocation never lowers a utility, so dominators and frontier corners
// only need the complete ones.
std::vector<std::vector<std::vector<int>>> complete_grid_outcomes(int n, int m,
                                                                  int k) {
  std::vector<std::vector<int>> per_item = compositions(k, n);
  double count = 1.0;
  for (int q = 0; q < m; ++q) count *= static_cast<double>(per_item.size());
  if (count > 2e6)
    throw ConfigError("grid outcome enumeration too large; coarsen the grid");

  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::size_t> idx(m, 0);
  while (true) {
    std::vector<std::vector<int>> pieces(n, std::vector<int>(m, 0));
    for (int q = 0; q < m; ++q)
      for (int i = 0; i < n; ++i) pieces[i][q] = per_item[idx[q]][i];
    out.push_back(std::move(pieces));
    int q = m - 1;
    while (q >= 0 && ++idx[q] == per_item.size()) idx[q--] = 0;
    if (q < 0) break;
  }
  return out;
}

}  // namespace

UtilityMatrix expected_utilities(const Instance& instance,
                                 const Lottery& lottery) {
  require_shape(instance, lottery);
  UtilityMatrix u;
  u.cross.assign(instance.n, std::vector<double>(instance.n, 0.0));
  for (const LotteryEntry& entry : lottery.support)
    for (int i = 0; i < instance.n; ++i)
      for (int j = 0; j < instance.n; ++j)
        u.cross[i][j] +=
            entry.probability * bundle_value(instance, i, entry.outcome.x[j]);
  u.own.resize(instance.n);
  for (int i = 0; i < instance.n; ++i) u.own[i] = u.cross[i][i];
  return u;
}

ExAnteReport check_ex_ante_ef(const Instance& instance, const Lottery& lottery,
                              double tol) {
  UtilityMatrix u = expected_utilities(instance, lottery);
  ExAnteReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < instance.n; ++i)
    for (int j = 0; j < instance.n; ++j) {
      if (i == j) continue;
      double margin = u.cross[i][i] - u.cross[i][j];
      report.worst_margin = std::min(report.worst_margin, margin);
      if (margin < -tol)
        report.violations.push_back({i, j, u.cross[i][i], u.cross[i][j]});
    }
  if (!std::isfinite(report.worst_margin)) report.worst_margin = 0.0;
  report.envy_free = report.violations.empty();
  return report;
}

ExPostReport check_ex_post(const Instance& instance, const Lottery& lottery,
                           ExPostCheck what, double tol) {
  require_shape(instance, lottery);
  ExPostReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  auto note = [&](std::size_t s, const std::string& text, double margin) {
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -tol) report.violations.push_back({s, text, margin});
  };

  if (what == ExPostCheck::Feasible) {
    double mass = 0.0;
    for (std::size_t s = 0; s < lottery.support.size(); ++s) {
      const LotteryEntry& entry = lottery.support[s];
      mass += entry.probability;
      note(s, "probability >= 0", entry.probability);
      for (int q = 0; q < instance.m; ++q) {
        double given = 0.0;
        for (int i = 0; i < instance.n; ++i) {
          double x = entry.outcome.x[i][q];
          note(s, "share >= 0", x);
          note(s, "share <= 1", 1.0 - x);
          given += x;
        }
        note(s, "item supply", 1.0 - given);
      }
    }
    // The distribution itself: decompositions may leave ~1e-10 unassigned.
    double off = std::abs(mass - 1.0);
    report.worst_margin = std::min(report.worst_margin, 1e-6 - off);
    if (off > 1e-6)
      report.violations.push_back({0, "probabilities sum to 1", 1e-6 - off});
  } else {
    for (std::size_t s = 0; s < lottery.support.size(); ++s) {
      const LotteryEntry& entry = lottery.support[s];
      for (int i = 0; i < instance.n; ++i) {
        double own = bundle_value(instance, i, entry.outcome.x[i]);
        if (what == ExPostCheck::EnvyFree) {
          for (int j = 0; j < instance.n; ++j) {
            if (i == j) continue;
            note(s, "ef(" + std::to_string(i) + "," + std::to_string(j) + ")",
                 own - bundle_value(instance, i, entry.outcome.x[j]));
          }
        } else {
          note(s, "prop(" + std::to_string(i) + ")",
               own - instance.full_value(i) / instance.n);
        }
      }
    }
  }
  if (!std::isfinite(report.worst_margin)) report.worst_margin = 0.0;
  report.pass = report.violations.empty();
  return report;
}

ParetoReport check_eps_pareto(const Instance& instance, const Lottery& lottery,
                              double eps, ParetoClass cls,
                              double grid_epsilon) {
  if (eps < 0.0) throw ConfigError("pareto check needs eps >= 0");
  ParetoReport report;
  report.base_utilities = expected_utilities(instance, lottery).own;
  int k = grid_pieces(grid_epsilon);
  QueryLedger scratch;  // verification queries are not protocol queries
  GridValues grid = discretize(instance, grid_epsilon, scratch);

  if (cls == ParetoClass::AllOutcomes) {
    auto outcomes = complete_grid_outcomes(instance.n, instance.m, k);
    report.eps_pareto = true;
    report.margin = 0.0;
    for (std::size_t s = 0; s < lottery.support.size(); ++s) {
      const Outcome& base = lottery.support[s].outcome;
      std::vector<double> target(instance.n);
      for (int i = 0; i < instance.n; ++i)
        target[i] = (1.0 + eps) * bundle_value(instance, i, base.x[i]);
      for (const auto& pieces : outcomes) {
        double surplus = 0.0;
        bool dominates = true;
        for (int i = 0; i < instance.n && dominates; ++i) {
          double u = 0.0;
          for (int q = 0; q < instance.m; ++q) u += grid.V[i][q][pieces[i][q]];
          if (u < target[i]) dominates = false;
          surplus += u - target[i];
        }
        if (!dominates || surplus <= report.margin) continue;
        report.margin = surplus;
        if (surplus > kStrictMargin) {
          report.eps_pareto = false;
          report.note = "support outcome " + std::to_string(s) +
                        " dominated by a grid outcome";
          LotteryEntry witness;
          witness.probability = 1.0;
          witness.outcome.x.assign(instance.n,
                                   std::vector<double>(instance.m, 0.0));
          report.dominator_utilities.assign(instance.n, 0.0);
          for (int i = 0; i < instance.n; ++i)
            for (int q = 0; q < instance.m; ++q) {
              witness.outcome.x[i][q] = grid_point(pieces[i][q], k);
              report.dominator_utilities[i] += grid.V[i][q][pieces[i][q]];
            }
          report.dominator.support = {witness};
        }
      }
    }
    if (report.eps_pareto && report.note.empty())
      report.note = "no grid outcome strictly dominates any support outcome";
    return report;
  }

  // Lottery classes: one auxiliary LP over the flow polytope.
  FlowGraph graph = build_flow_graph(instance.n, instance.m, k);
  SolverConfig config;
  config.epsilon = grid_epsilon;
  config.objective = Objective::Welfare;
  config.fairness = cls == ParetoClass::EfLotteriesOnGrid ? Fairness::EnvyFree
                                                          : Fairness::None;
  LinearProgram lp = assemble_lp(graph, grid, config);
  std::vector<std::vector<double>> u = agent_utility_vectors(graph, grid);
  double target_sum = 0.0;
  for (int i = 0; i < instance.n; ++i) {
    double target = (1.0 + eps) * report.base_utilities[i];
    target_sum += target;
    int row = lp.add_row(RowSense::GE, target, "dom(" + std::to_string(i) + ")");
    for (std::size_t e = 0; e < u[i].size(); ++e)
      lp.add_coeff(row, static_cast<int>(e), u[i][e]);
  }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpSolution::Status::Optimal) {
    report.eps_pareto = true;
    report.margin = 0.0;
    report.note = "no lottery in the class reaches the scaled utilities";
    return report;
  }
  report.margin = sol.objective - target_sum;
  report.eps_pareto = report.margin <= kStrictMargin;
  report.dominator_utilities.assign(instance.n, 0.0);
  for (int i = 0; i < instance.n; ++i)
    for (std::size_t e = 0; e < u[i].size(); ++e)
      report.dominator_utilities[i] += u[i][e] * sol.x[e];
  if (report.eps_pareto) {
    report.note = "scaled utilities only reachable with equality";
  } else {
    report.dominator = decompose(graph, sol.x);
    report.note = "a grid lottery clears the scaled utilities";
  }
  return report;
}

FrontierData frontier_sweep(const Instance& instance, double epsilon,
                            int directions, Fairness fairness) {
  if (directions < 2) throw ConfigError("frontier sweep needs >= 2 directions");
  FrontierData data;

  std::vector<std::vector<int>> grid_weights =
      compositions(directions - 1, instance.n);
  for (const auto& w : grid_weights) {
    SolverConfig config;
    config.epsilon = epsilon;
    config.objective = Objective::Weights;
    config.fairness = fairness;
    config.weights.resize(instance.n);
    for (int i = 0; i < instance.n; ++i)
      config.weights[i] = static_cast<double>(w[i]) / (directions - 1);
    QueryLedger scratch;
    SolveResult r = solve_ef_lottery(instance, config, scratch);
    FrontierPoint pt;
    pt.weights = config.weights;
    pt.utilities = r.utilities;
    for (double v : r.utilities) pt.welfare += v;
    pt.lottery = merge_support(decompose(r.graph, r.flow));
    data.lottery_points.push_back(std::move(pt));
  }

  int k = grid_pieces(epsilon);
  QueryLedger scratch;
  GridValues grid = discretize(instance, epsilon, scratch);
  for (const auto& pieces : complete_grid_outcomes(instance.n, instance.m, k)) {
    FrontierPoint pt;
    pt.utilities.assign(instance.n, 0.0);
    LotteryEntry entry;
    entry.probability = 1.0;
    entry.outcome.x.assign(instance.n, std::vector<double>(instance.m, 0.0));
    for (int i = 0; i < instance.n; ++i)
      for (int q = 0; q < instance.m; ++q) {
        pt.utilities[i] += grid.V[i][q][pieces[i][q]];
        entry.outcome.x[i][q] = grid_point(pieces[i][q], k);
      }
    for (double v : pt.utilities) pt.welfare += v;
    pt.lottery.support = {entry};
    data.deterministic_points.push_back(std::move(pt));
  }
  return data;
}

}  // namespace fairlot
