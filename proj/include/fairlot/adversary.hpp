#pragma once

#include <set>
#include <string>
#include <vector>

#include "fairlot/lottery.hpp"
#include "fairlot/verify.hpp"

namespace fairlot {

// The lower-bound machinery works on two agents and two items.  Item 0 is
// the "currency" item; the forged bend always hides on item 1, inside an
// interval no query ever touched.

struct AdversaryQuery {
  int agent = 0;
  int item = 0;
  QueryLedger::Kind kind = QueryLedger::Kind::Value;
  double arg = 0.0;
  double response = 0.0;
};

struct AdversaryState {
  double epsilon = 0.0;  // target hidden-interval length
  std::vector<AdversaryQuery> transcript;
  // probed[agent][item]: value-query arguments and cut-query response
  // points, the coordinates at which the curve is pinned to the identity
  std::vector<std::vector<std::set<double>>> probed;

  explicit AdversaryState(double eps)
      : epsilon(eps),
        probed(2, std::vector<std::set<double>>(2)) {}
};

// Answers every query as if all four curves were the identity, recording
// what each answer pins down.
class AdversaryOracle final : public QueryOracle {
 public:
  explicit AdversaryOracle(AdversaryState& state) : state_(state) {}
  int agents() const override { return 2; }
  int items() const override { return 2; }
  double value(int agent, int item, double z) override;
  double cut_query(int agent, int item, double v) override;

 private:
  AdversaryState& state_;
};

struct ForgedInstances {
  double x1 = 0.0;
  double epsilon = 0.0;  // the hidden interval is [x1, x1+epsilon]
  Instance i1;  // identity everywhere
  Instance i2;  // agent 1's item-1 curve bent: slope 2 then flat
  Instance i3;  // same bend on agent 0 instead
};

// Pick a hidden interval on item 1 above 1/2 that no recorded query can
// see, largest gap first and leftmost on ties, then build the three
// instances and replay the full transcript against each; a candidate whose
// replay is not bitwise identical is discarded and the next gap tried.
// Throws AdversaryExhausted when no interval survives (the protocol asked
// too many questions).
ForgedInstances forge_instances(const AdversaryState& state, double epsilon);

// True when every recorded response matches what `instance` would answer.
bool replays(const Instance& instance, const AdversaryState& state);

struct AuditCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string note;
};

struct AuditReport {
  double x1 = 0.0;
  double epsilon = 0.0;
  bool defeated = false;
  std::string defeating_instance;  // "I1", "I2" or "I3" when defeated
  Lottery dominator;               // the witness that defeats the lottery
  std::vector<AuditCheck> checks;
};

// Walk the lower-bound argument at desk scale against a concrete lottery:
//   expected-totals  every agent's expected total resource is 1 (else the
//                    lottery already fails in the identity instance)
//   reference-lottery the skewed envy-free lottery reaches (1+eps/8,
//                    1+3eps/8) in the bent instance
//   utility-cap      no bundle of total at most 1 beats 1+eps/2 there
//   pareto-I1/I2/I3  the audited lottery is envy-free and eps/16-Pareto
//                    optimal among envy-free grid lotteries in each
//                    consistent instance; failing one defeats it
//   randomization-cap mixing the two bent-optimal outcomes never pushes
//                    both bent-instance utilities above 1+eps/4
AuditReport audit_lottery(const ForgedInstances& instances,
                          const Lottery& lottery, double epsilon);

}  // namespace fairlot
