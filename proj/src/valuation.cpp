#include "fairlot/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairlot {

namespace {

constexpr double kPointTol = 1e-12;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

}  // namespace

//===========================================================================
// Constructors
//===========================================================================

Valuation Valuation::linear() {
  Valuation f;
  f.kind = Kind::PiecewiseLinear;
  f.points = {{0.0, 0.0}, {1.0, 1.0}};
  f.lipschitz = 1.0;
  return f;
}

Valuation Valuation::piecewise(std::vector<std::pair<double, double>> pts) {
  Valuation f;
  f.kind = Kind::PiecewiseLinear;
  f.points = std::move(pts);
  double steepest = 0.0;
  for (std::size_t i = 1; i < f.points.size(); ++i) {
    double dz = f.points[i].first - f.points[i - 1].first;
    double dv = f.points[i].second - f.points[i - 1].second;
    if (dz > 0.0) steepest = std::max(steepest, dv / dz);
  }
  f.lipschitz = steepest;
  return f;
}

Valuation Valuation::power(double exponent, double scale) {
  Valuation f;
  f.kind = Kind::Power;
  f.exponent = exponent;
  f.scale = scale;
  f.lipschitz = scale * exponent;  // slope peaks at z = 1
  return f;
}

Valuation Valuation::capped_linear(double slope, double cap) {
  Valuation f;
  f.kind = Kind::CappedLinear;
  f.slope = slope;
  f.cap = cap;
  f.lipschitz = slope;
  return f;
}

Valuation Valuation::inverted_power(double exponent, double scale) {
  Valuation f;
  f.kind = Kind::InvertedPower;
  f.exponent = exponent;
  f.scale = scale;
  f.lipschitz = scale * exponent;  // slope peaks at z = 0
  return f;
}

//===========================================================================
// eval / cut
//===========================================================================

double eval(const Valuation& f, double z) {
  if (z < -kPointTol || z > 1.0 + kPointTol)
    throw std::domain_error("eval: argument outside [0,1]");
  z = std::clamp(z, 0.0, 1.0);

  switch (f.kind) {
    case Valuation::Kind::Power:
      return f.scale * std::pow(z, f.exponent);
    case Valuation::Kind::CappedLinear:
      return std::min(f.slope * z, f.cap);
    case Valuation::Kind::InvertedPower:
      return f.scale * (1.0 - std::pow(1.0 - z, f.exponent));
    case Valuation::Kind::PiecewiseLinear:
      break;
  }

  const auto& pts = f.points;
  if (z <= pts.front().first) return pts.front().second;
  if (z >= pts.back().first) return pts.back().second;
  // First breakpoint strictly right of z.
  auto it = std::upper_bound(
      pts.begin(), pts.end(), z,
      [](double lhs, const std::pair<double, double>& p) { return lhs < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (z == lo.first) return lo.second;
  // Identity segments reproduce their argument bit for bit; adversarial
  // replay checks rely on that.
  if (lo.first == lo.second && hi.first == hi.second) return z;
  double t = (z - lo.first) / (hi.first - lo.first);
  return lo.second + t * (hi.second - lo.second);
}

double cut(const Valuation& f, double v) {
  if (v < -kPointTol) throw std::domain_error("cut: negative value");
  double top = eval(f, 1.0);
  if (v > top + 1e-9)
    throw UnattainableValue("cut: value exceeds f(1)");
  v = std::clamp(v, 0.0, top);
  if (v <= 0.0) return 0.0;

  switch (f.kind) {
    case Valuation::Kind::Power:
      return std::clamp(std::pow(v / f.scale, 1.0 / f.exponent), 0.0, 1.0);
    case Valuation::Kind::CappedLinear:
      return std::clamp(v / f.slope, 0.0, 1.0);
    case Valuation::Kind::InvertedPower:
      return std::clamp(1.0 - std::pow(1.0 - v / f.scale, 1.0 / f.exponent), 0.0, 1.0);
    case Valuation::Kind::PiecewiseLinear:
      break;
  }

  // Minimal z with f(z) >= v; continuity turns >= into =.  Scanning for the
  // first breakpoint at or above v lands on the left edge of any flat run.
  const auto& pts = f.points;
  auto it = std::lower_bound(
      pts.begin(), pts.end(), v,
      [](const std::pair<double, double>& p, double rhs) { return p.second < rhs; });
  if (it == pts.begin()) return pts.front().first;
  const auto& hi = *it;
  const auto& lo = *(it - 1);  // lo.second < v <= hi.second
  if (lo.first == lo.second && hi.first == hi.second) return v;  // identity segment
  double t = (v - lo.second) / (hi.second - lo.second);
  return std::clamp(lo.first + t * (hi.first - lo.first), lo.first, hi.first);
}

//===========================================================================
// Validation
//===========================================================================

void validate_valuation(const Valuation& f) {
  if (f.lipschitz < 0.0) fail("valuation: negative Lipschitz constant");
  switch (f.kind) {
    case Valuation::Kind::Power:
    case Valuation::Kind::InvertedPower:
      if (f.exponent < 1.0) fail("valuation: exponent must be >= 1");
      if (f.scale < 0.0) fail("valuation: negative scale");
      break;
    case Valuation::Kind::CappedLinear:
      if (f.slope < 0.0 || f.cap < 0.0) fail("valuation: negative slope or cap");
      break;
    case Valuation::Kind::PiecewiseLinear: {
      const auto& pts = f.points;
      if (pts.size() < 2) fail("piecewise valuation: needs at least two points");
      if (std::abs(pts.front().first) > kPointTol ||
          std::abs(pts.front().second) > kPointTol)
        fail("piecewise valuation: must start at (0,0)");
      if (std::abs(pts.back().first - 1.0) > kPointTol)
        fail("piecewise valuation: last breakpoint must sit at z = 1");
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].first <= pts[i - 1].first)
          fail("piecewise valuation: breakpoints must be strictly increasing in z");
        if (pts[i].second < pts[i - 1].second - kPointTol)
          fail("piecewise valuation: values must be non-decreasing");
      }
      break;
    }
  }

  // Dense sample: monotone, f(0) = 0, |f(x)-f(y)| <= C|x-y|.
  const int samples = 1000;
  double prev = eval(f, 0.0);
  if (std::abs(prev) > kPointTol) fail("valuation: f(0) != 0");
  for (int s = 1; s <= samples; ++s) {
    double z = static_cast<double>(s) / samples;
    double cur = eval(f, z);
    if (cur < prev - 1e-12) fail("valuation: decreasing segment detected");
    if (cur - prev > f.lipschitz / samples + 1e-9) {
      std::ostringstream msg;
      msg << "valuation: slope near z = " << z
          << " exceeds declared Lipschitz constant " << f.lipschitz;
      fail(msg.str());
    }
    prev = cur;
  }
}

double Instance::full_value(int agent) const {
  double total = 0.0;
  for (int k = 0; k < m; ++k) total += eval(valuations[agent][k], 1.0);
  return total;
}

void Instance::validate() const {
  if (n < 1 || m < 1) fail("instance: needs at least one agent and one item");
  if (static_cast<int>(valuations.size()) != n)
    fail("instance: valuation rows do not match agent count");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(valuations[i].size()) != m)
      fail("instance: valuation row length does not match item count");
    for (int k = 0; k < m; ++k) {
      try {
        validate_valuation(valuations[i][k]);
      } catch (const std::invalid_argument& e) {
        std::ostringstream msg;
        msg << "agent " << i << ", item " << k << ": " << e.what();
        fail(msg.str());
      }
    }
  }
}

//===========================================================================
// Ledger, oracles, discretization
//===========================================================================

void QueryLedger::resize(int n, int m) {
  logs.assign(n, std::vector<std::vector<Entry>>(m));
  value_count = 0;
  cut_count = 0;
}

void QueryLedger::record(int agent, int item, Kind kind, double arg,
                         double response) {
  if (agent >= static_cast<int>(logs.size()) ||
      (agent >= 0 && !logs.empty() &&
       item >= static_cast<int>(logs[agent].size()))) {
    // Grow lazily so ad-hoc ledgers work without an explicit resize.
    int need_n = std::max<int>(agent + 1, static_cast<int>(logs.size()));
    int need_m = item + 1;
    for (auto& row : logs)
      if (static_cast<int>(row.size()) < need_m) row.resize(need_m);
    while (static_cast<int>(logs.size()) < need_n)
      logs.emplace_back(std::vector<std::vector<Entry>>(need_m));
  }
  logs[agent][item].push_back(Entry{kind, arg, response});
  if (kind == Kind::Value)
    ++value_count;
  else
    ++cut_count;
}

const std::vector<QueryLedger::Entry>& QueryLedger::log(int agent,
                                                        int item) const {
  return logs[agent][item];
}

void QueryLedger::check_counters() const {
  std::int64_t values = 0, cuts = 0;
  for (const auto& row : logs)
    for (const auto& cell : row)
      for (const auto& e : cell)
        (e.kind == Kind::Value ? values : cuts) += 1;
  if (values != value_count || cuts != cut_count)
    throw std::logic_error("query ledger counters out of sync with logs");
}

InstanceOracle::InstanceOracle(const Instance& inst, QueryLedger& ledger)
    : inst_(inst), ledger_(ledger) {
  if (ledger_.logs.empty()) ledger_.resize(inst.n, inst.m);
}

double InstanceOracle::value(int agent, int item, double z) {
  double resp = eval(inst_.val(agent, item), z);
  ledger_.record(agent, item, QueryLedger::Kind::Value, z, resp);
  return resp;
}

double InstanceOracle::cut_query(int agent, int item, double v) {
  double resp = cut(inst_.val(agent, item), v);
  ledger_.record(agent, item, QueryLedger::Kind::Cut, v, resp);
  return resp;
}

int grid_pieces(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw ConfigError("epsilon must lie in (0,1]");
  double inv = 1.0 / epsilon;
  long long k = std::llround(inv);
  if (k < 1 || std::abs(static_cast<double>(k) * epsilon - 1.0) > 1e-9)
    throw ConfigError("1/epsilon must be an integer");
  return static_cast<int>(k);
}

GridValues discretize(QueryOracle& oracle, double epsilon) {
  int k = grid_pieces(epsilon);
  int n = oracle.agents();
  int m = oracle.items();
  GridValues grid;
  grid.epsilon = epsilon;
  grid.pieces = k;
  grid.V.assign(n, std::vector<std::vector<double>>(
                       m, std::vector<double>(k + 1, 0.0)));
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < m; ++q)
      for (int y = 1; y <= k; ++y)
        grid.V[i][q][y] = oracle.value(i, q, grid_point(y, k));
  return grid;
}

GridValues discretize(const Instance& inst, double epsilon,
                      QueryLedger& ledger) {
  InstanceOracle oracle(inst, ledger);
  return discretize(oracle, epsilon);
}

}  // namespace fairlot
