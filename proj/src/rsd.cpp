#include "fairlot/rsd.hpp"

#include <algorithm>
#include <random>

namespace fairlot {

Outcome rsd_run(QueryOracle& oracle, const std::vector<int>& order) {
  const int n = oracle.agents(), m = oracle.items();
  if (static_cast<int>(order.size()) != n)
    throw ConfigError("rsd order must list every agent once");
  std::vector<bool> seen(n, false);
  for (int i : order) {
    if (i < 0 || i >= n || seen[i])
      throw ConfigError("rsd order must list every agent once");
    seen[i] = true;
  }

  Outcome out;
  out.x.assign(n, std::vector<double>(m, 0.0));
  std::vector<double> remaining(m, 1.0);
  for (int i : order)
    for (int q = 0; q < m; ++q) {
      double best = oracle.value(i, q, remaining[q]);
      double take = oracle.cut_query(i, q, best);
      take = std::clamp(take, 0.0, remaining[q]);
      out.x[i][q] = take;
      remaining[q] -= take;
    }
  return out;
}

Outcome rsd_run(const Instance& instance, const std::vector<int>& order,
                QueryLedger& ledger) {
  InstanceOracle oracle(instance, ledger);
  return rsd_run(oracle, order);
}

namespace {

void merge_in(Lottery& lot, std::vector<Outcome>& seen, const Outcome& out,
              double probability) {
  for (std::size_t s = 0; s < seen.size(); ++s)
    if (seen[s].x == out.x) {
      lot.support[s].probability += probability;
      return;
    }
  lot.support.push_back({probability, out});
  seen.push_back(out);
}

}  // namespace

Lottery rsd_lottery(QueryOracle& oracle, RsdMode mode, std::uint64_t seed,
                    int samples) {
  const int n = oracle.agents();
  Lottery lot;
  std::vector<Outcome> seen;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  if (mode == RsdMode::Exact) {
    if (n > 8) throw ConfigError("exact rsd is limited to 8 agents");
    long long runs = 1;
    for (int i = 2; i <= n; ++i) runs *= i;
    double p = 1.0 / static_cast<double>(runs);
    do {
      merge_in(lot, seen, rsd_run(oracle, order), p);
    } while (std::next_permutation(order.begin(), order.end()));
    return lot;
  }

  if (samples < 1) throw ConfigError("sampled rsd needs at least one sample");
  std::mt19937_64 gen(seed);
  double p = 1.0 / samples;
  for (int run = 0; run < samples; ++run) {
    // Hand-rolled Fisher-Yates: mt19937_64 is pinned by the standard, but
    // std::shuffle's use of it is not, and seeds must replay everywhere.
    for (int i = n - 1; i >= 1; --i) {
      int j = static_cast<int>(gen() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    merge_in(lot, seen, rsd_run(oracle, order), p);
  }
  return lot;
}

Lottery rsd_lottery(const Instance& instance, RsdMode mode,
                    std::uint64_t seed, int samples, QueryLedger& ledger) {
  InstanceOracle oracle(instance, ledger);
  return rsd_lottery(oracle, mode, seed, samples);
}

}  // namespace fairlot
