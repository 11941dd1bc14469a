#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fairlot {

// Shared error types.  ConfigError covers bad run parameters (non-integral
// 1/epsilon, malformed weights, ...), UnattainableValue a cut query above
// f(1), AdversaryExhausted a probe set too dense to hide a forged bend.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnattainableValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AdversaryExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A valuation curve for one (agent, item) pair: non-decreasing on [0,1],
// f(0) = 0, Lipschitz with constant `lipschitz`.  Four kinds are supported;
// all of them invert exactly, so cut queries never need numeric root finding.
struct Valuation {
  enum class Kind { PiecewiseLinear, Power, CappedLinear, InvertedPower };

  Kind kind = Kind::PiecewiseLinear;
  double lipschitz = 1.0;

  // PiecewiseLinear: breakpoints (z, f(z)), z strictly increasing from 0 to 1.
  std::vector<std::pair<double, double>> points;
  // Power: scale * z^exponent.  InvertedPower: scale * (1 - (1-z)^exponent).
  double exponent = 1.0;
  double scale = 1.0;
  // CappedLinear: min(slope * z, cap).
  double slope = 1.0;
  double cap = 1.0;

  static Valuation linear();
  static Valuation piecewise(std::vector<std::pair<double, double>> pts);
  static Valuation power(double exponent, double scale = 1.0);
  static Valuation capped_linear(double slope, double cap);
  static Valuation inverted_power(double exponent, double scale = 1.0);
};

// f(z).  Throws std::domain_error outside [0,1].
double eval(const Valuation& f, double z);

// min { z : f(z) = v }.  Throws std::domain_error for v < 0 and
// UnattainableValue for v > f(1).
double cut(const Valuation& f, double v);

// Checks monotonicity, f(0) = 0 and the declared Lipschitz constant on a
// dense sample grid; throws std::invalid_argument with a description.
void validate_valuation(const Valuation& f);

struct Instance {
  int n = 0;  // agents
  int m = 0;  // items
  std::vector<std::vector<Valuation>> valuations;  // [agent][item]

  const Valuation& val(int agent, int item) const {
    return valuations[agent][item];
  }
  // sum_k f_ik(1): the agent's value for receiving everything.
  double full_value(int agent) const;
  void validate() const;
};

// Per-(agent,item) query log with aggregate counters.  The counters are kept
// in sync with the logs; check_counters() asserts that.
struct QueryLedger {
  enum class Kind { Value, Cut };
  struct Entry {
    Kind kind;
    double arg;
    double response;
  };

  void resize(int n, int m);
  void record(int agent, int item, Kind kind, double arg, double response);
  const std::vector<Entry>& log(int agent, int item) const;
  std::int64_t total() const { return value_count + cut_count; }
  void check_counters() const;

  std::int64_t value_count = 0;
  std::int64_t cut_count = 0;
  std::vector<std::vector<std::vector<Entry>>> logs;  // [agent][item]
};

// Protocols reach valuations only through this interface, so the same code
// runs against a real instance (queries recorded in a ledger) or against an
// adversarial responder.
class QueryOracle {
 public:
  virtual ~QueryOracle() = default;
  virtual int agents() const = 0;
  virtual int items() const = 0;
  virtual double value(int agent, int item, double z) = 0;
  virtual double cut_query(int agent, int item, double v) = 0;
};

class InstanceOracle final : public QueryOracle {
 public:
  InstanceOracle(const Instance& inst, QueryLedger& ledger);
  int agents() const override { return inst_.n; }
  int items() const override { return inst_.m; }
  double value(int agent, int item, double z) override;
  double cut_query(int agent, int item, double v) override;

 private:
  const Instance& inst_;
  QueryLedger& ledger_;
};

// V[i][k][y] = f_ik(y * epsilon) for y in 0..pieces; V[i][k][0] is 0 and
// costs no query.
struct GridValues {
  double epsilon = 0.0;
  int pieces = 0;
  std::vector<std::vector<std::vector<double>>> V;

  int agents() const { return static_cast<int>(V.size()); }
  int items() const { return V.empty() ? 0 : static_cast<int>(V[0].size()); }
};

// Rounds 1/epsilon to the nearest integer and requires it to match within
// 1e-9; throws ConfigError otherwise.
int grid_pieces(double epsilon);

// Exact grid coordinate y/k, used everywhere a grid point becomes a real
// allocation so the bits agree across modules.
inline double grid_point(int y, int k) {
  return static_cast<double>(y) / static_cast<double>(k);
}

// Issues exactly agents*items*(1/epsilon) value queries through the oracle.
GridValues discretize(QueryOracle& oracle, double epsilon);
GridValues discretize(const Instance& inst, double epsilon, QueryLedger& ledger);

}  // namespace fairlot
