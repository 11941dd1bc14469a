#pragma once

#include <vector>

#include "fairlot/flow.hpp"

namespace fairlot {

// One complete assignment: x[i][q] is the fraction of item q handed to
// agent i.  Item columns may sum to less than one; the rest is discarded.
struct Outcome {
  std::vector<std::vector<double>> x;
};

struct LotteryEntry {
  double probability = 0.0;
  Outcome outcome;
};

struct Lottery {
  std::vector<LotteryEntry> support;
};

// Merge entries whose outcomes agree exactly, cell for cell, keeping
// first-seen order; entries at or below `drop` probability are removed.
Lottery merge_support(const Lottery& lottery, double drop = 1e-12);

// Expected fraction of each item each agent receives.
std::vector<std::vector<double>> expected_allocation(const Lottery& lottery);

// Probability mass per (agent, item, pieces) of a grid-aligned lottery.
// Every outcome must sit on the k-grid of `graph`; decompose output always
// does, and this is how decompositions are checked against the flow they
// came from.
std::vector<std::vector<std::vector<double>>> piece_marginals(
    const FlowGraph& graph, const Lottery& lottery);

// Peel a unit source-to-sink flow into at most |E| weighted paths.  Each
// pass walks from the source, always taking the first positive-flow edge in
// variable order, strips the bottleneck, and records the allocation the
// path encodes; identical outcomes merge as they appear.  Throws
// std::invalid_argument when the flow does not conserve.
Lottery decompose(const FlowGraph& graph, const std::vector<double>& flow);

}  // namespace fairlot
