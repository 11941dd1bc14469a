#include "fairlot/lottery.hpp"

#include <cmath>
#include <stdexcept>

namespace fairlot {

Lottery merge_support(const Lottery& lottery, double drop) {
  Lottery out;
  for (const LotteryEntry& entry : lottery.support) {
    bool merged = false;
    for (LotteryEntry& kept : out.support)
      if (kept.outcome.x == entry.outcome.x) {
        kept.probability += entry.probability;
        merged = true;
        break;
      }
    if (!merged) out.support.push_back(entry);
  }
  Lottery trimmed;
  for (LotteryEntry& entry : out.support)
    if (entry.probability > drop) trimmed.support.push_back(std::move(entry));
  return trimmed;
}

std::vector<std::vector<double>> expected_allocation(const Lottery& lottery) {
  if (lottery.support.empty()) return {};
  const Outcome& first = lottery.support.front().outcome;
  std::vector<std::vector<double>> mean(
      first.x.size(), std::vector<double>(first.x.front().size(), 0.0));
  for (const LotteryEntry& entry : lottery.support)
    for (std::size_t i = 0; i < mean.size(); ++i)
      for (std::size_t q = 0; q < mean[i].size(); ++q)
        mean[i][q] += entry.probability * entry.outcome.x[i][q];
  return mean;
}

std::vector<std::vector<std::vector<double>>> piece_marginals(
    const FlowGraph& graph, const Lottery& lottery) {
  std::vector<std::vector<std::vector<double>>> mass(
      graph.n, std::vector<std::vector<double>>(
                   graph.m, std::vector<double>(graph.k + 1, 0.0)));
  for (const LotteryEntry& entry : lottery.support)
    for (int i = 0; i < graph.n; ++i)
      for (int q = 0; q < graph.m; ++q) {
        double x = entry.outcome.x[i][q];
        int y = static_cast<int>(std::llround(x * graph.k));
        if (y < 0 || y > graph.k ||
            std::abs(x - grid_point(y, graph.k)) > 1e-9)
          throw std::invalid_argument("piece_marginals: outcome off the grid");
        mass[i][q][y] += entry.probability;
      }
  return mass;
}

Lottery decompose(const FlowGraph& graph, const std::vector<double>& flow) {
  if (validate_flow(graph, flow) > 1e-7)
    throw std::invalid_argument("decompose: flow does not conserve");
  std::vector<double> f = flow;
  std::vector<std::vector<int>> out(graph.num_vertices);
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    out[graph.edges[e].tail].push_back(static_cast<int>(e));

  auto source_out = [&] {
    double total = 0.0;
    for (int e : out[graph.source()]) total += f[e];
    return total;
  };

  // Remaining support keyed by integer pieces so grid outcomes that differ
  // only by floating dust cannot split.
  std::vector<std::vector<std::vector<int>>> keys;
  Lottery lot;

  std::size_t passes = 0;
  while (source_out() > 1e-10) {
    if (++passes > graph.edges.size() + 1)
      throw std::runtime_error("decompose: no progress stripping paths");
    std::vector<std::vector<int>> pieces(graph.n,
                                         std::vector<int>(graph.m, 0));
    std::vector<int> path;
    int cur = graph.source();
    while (cur != graph.sink()) {
      int chosen = -1;
      for (int e : out[cur])
        if (f[e] > 1e-12) {
          chosen = e;
          break;
        }
      if (chosen < 0)
        throw std::runtime_error("decompose: stranded flow at a vertex");
      const FlowEdge& edge = graph.edges[chosen];
      if (edge.column <= graph.n)
        pieces[edge.column - 1][edge.item] += edge.pieces;
      path.push_back(chosen);
      cur = edge.head;
    }
    double bottleneck = f[path.front()];
    for (int e : path) bottleneck = std::min(bottleneck, f[e]);
    for (int e : path) {
      f[e] -= bottleneck;
      if (f[e] <= 1e-12) f[e] = 0.0;
    }

    bool merged = false;
    for (std::size_t s = 0; s < keys.size(); ++s)
      if (keys[s] == pieces) {
        lot.support[s].probability += bottleneck;
        merged = true;
        break;
      }
    if (!merged) {
      LotteryEntry entry;
      entry.probability = bottleneck;
      entry.outcome.x.assign(graph.n, std::vector<double>(graph.m, 0.0));
      for (int i = 0; i < graph.n; ++i)
        for (int q = 0; q < graph.m; ++q)
          entry.outcome.x[i][q] = grid_point(pieces[i][q], graph.k);
      lot.support.push_back(std::move(entry));
      keys.push_back(std::move(pieces));
    }
  }
  return lot;
}

}  // namespace fairlot
