#pragma once

#include <cstdint>
#include <vector>

#include "fairlot/lottery.hpp"

namespace fairlot {

// One serial-dictatorship pass: agents in `order` each take, item by item,
// the smallest amount that achieves the best value the remainder offers.
// That is two queries per agent-item pair: Value at the remainder, then Cut
// at the answer.  Satiated curves leave mass behind for later agents;
// strictly increasing ones take everything that is left.
Outcome rsd_run(QueryOracle& oracle, const std::vector<int>& order);
Outcome rsd_run(const Instance& instance, const std::vector<int>& order,
                QueryLedger& ledger);

enum class RsdMode { Exact, Sampled };

// Exact mode averages all n! orders (n <= 8) at probability 1/n! each;
// sampled mode draws `samples` uniform orders from a seeded Fisher-Yates
// shuffle over a fixed 64-bit generator, so runs reproduce across
// platforms.  Identical outcomes merge in first-seen order either way.
Lottery rsd_lottery(QueryOracle& oracle, RsdMode mode, std::uint64_t seed,
                    int samples);
Lottery rsd_lottery(const Instance& instance, RsdMode mode,
                    std::uint64_t seed, int samples, QueryLedger& ledger);

}  // namespace fairlot
