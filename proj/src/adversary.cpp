#include "fairlot/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairlot {

namespace {

void check_pair(int agent, int item) {
  if (agent < 0 || agent > 1 || item < 0 || item > 1)
    throw std::out_of_range("adversary oracle serves two agents and two items");
}

}  // namespace

double AdversaryOracle::value(int agent, int item, double z) {
  check_pair(agent, item);
  if (z < -1e-12 || z > 1.0 + 1e-12)
    throw std::domain_error("value query outside [0, 1]");
  z = std::clamp(z, 0.0, 1.0);
  state_.probed[agent][item].insert(z);
  state_.transcript.push_back({agent, item, QueryLedger::Kind::Value, z, z});
  return z;
}

double AdversaryOracle::cut_query(int agent, int item, double v) {
  check_pair(agent, item);
  if (v < -1e-12) throw std::domain_error("cut query below zero");
  if (v > 1.0 + 1e-9)
    throw UnattainableValue("cut query above the full-bundle value");
  v = std::clamp(v, 0.0, 1.0);
  // The response point is what the answer pins down: the curve passes
  // through (v, v) whichever instance turns out to be real.
  state_.probed[agent][item].insert(v);
  state_.transcript.push_back({agent, item, QueryLedger::Kind::Cut, v, v});
  return v;
}

bool replays(const Instance& instance, const AdversaryState& state) {
  for (const AdversaryQuery& query : state.transcript) {
    const Valuation& f = instance.val(query.agent, query.item);
    double got = query.kind == QueryLedger::Kind::Value
                     ? eval(f, query.arg)
                     : cut(f, query.arg);
    if (got != query.response) return false;
  }
  return true;
}

namespace {

Valuation bent_curve(double x1, double eps) {
  std::vector<std::pair<double, double>> pts = {
      {0.0, 0.0}, {x1, x1}, {x1 + eps / 2.0, x1 + eps}};
  if (x1 + eps < 1.0) pts.push_back({x1 + eps, x1 + eps});
  if (pts.back().first < 1.0) pts.push_back({1.0, 1.0});
  return Valuation::piecewise(pts);
}

Instance identity_instance() {
  Instance inst;
  inst.n = 2;
  inst.m = 2;
  inst.valuations = {{Valuation::linear(), Valuation::linear()},
                     {Valuation::linear(), Valuation::linear()}};
  return inst;
}

}  // namespace

ForgedInstances forge_instances(const AdversaryState& state, double epsilon) {
  if (epsilon <= 0.0 || epsilon >= 0.5)
    throw ConfigError("forging needs epsilon in (0, 1/2): the hidden interval "
                      "must fit above 1/2");

  // Known coordinates on item 1, either agent: the bend must dodge both,
  // since one forged instance bends each agent's curve.
  std::vector<double> walls = {0.5, 1.0};
  for (int agent = 0; agent < 2; ++agent)
    for (double p : state.probed[agent][1])
      if (p > 0.5 && p < 1.0) walls.push_back(p);
  std::sort(walls.begin(), walls.end());
  walls.erase(std::unique(walls.begin(), walls.end()), walls.end());

  struct Gap {
    double left, right;
  };
  std::vector<Gap> gaps;
  for (std::size_t w = 0; w + 1 < walls.size(); ++w)
    gaps.push_back({walls[w], walls[w + 1]});
  std::stable_sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
    return a.right - a.left > b.right - b.left;
  });

  for (const Gap& gap : gaps) {
    double x1;
    if (gap.left > 0.5) {
      // The left wall itself is a known point; the curve keeps its value
      // there, so the interval may start right on it.
      if (gap.left + epsilon > gap.right) continue;
      x1 = gap.left;
    } else {
      // x1 must sit strictly above 1/2; centering costs half an epsilon.
      if (gap.left + 1.5 * epsilon > gap.right) continue;
      x1 = gap.left + epsilon / 2.0;
    }

    ForgedInstances forged;
    forged.x1 = x1;
    forged.epsilon = epsilon;
    forged.i1 = identity_instance();
    forged.i2 = identity_instance();
    forged.i2.valuations[1][1] = bent_curve(x1, epsilon);
    forged.i3 = identity_instance();
    forged.i3.valuations[0][1] = bent_curve(x1, epsilon);
    forged.i1.validate();
    forged.i2.validate();
    forged.i3.validate();

    // A cut query answered exactly at the interval's right end would come
    // back differently from a bent curve (the flat run moves the cut), so
    // candidates are accepted only after a bitwise replay of everything.
    if (replays(forged.i1, state) && replays(forged.i2, state) &&
        replays(forged.i3, state))
      return forged;
  }
  throw AdversaryExhausted(
      "no hidden interval of the requested size survives the transcript");
}

namespace {

// The envy-free lottery the proof holds against the audited one in the
// instance whose agent `bent` has the bend: the bent agent takes x1+eps/2
// of item 1 (the whole steep run) and 1-x1-5eps/8 of item 0, the linear
// agent the rest.
Lottery reference_lottery(double x1, double eps, int bent) {
  LotteryEntry entry;
  entry.probability = 1.0;
  entry.outcome.x.assign(2, std::vector<double>(2, 0.0));
  entry.outcome.x[bent][1] = x1 + eps / 2.0;
  entry.outcome.x[bent][0] = 1.0 - x1 - 5.0 * eps / 8.0;
  entry.outcome.x[1 - bent][1] = 1.0 - x1 - eps / 2.0;
  entry.outcome.x[1 - bent][0] = x1 + 5.0 * eps / 8.0;
  Lottery l;
  l.support = {entry};
  return l;
}

struct InstanceVerdict {
  bool survives = true;
  double margin = 0.0;
  std::string note;
  Lottery witness;
};

InstanceVerdict judge(const Instance& inst, const Lottery& lottery,
                      double eps16, double grid_eps,
                      const Lottery* candidate) {
  InstanceVerdict v;
  ExAnteReport ea = check_ex_ante_ef(inst, lottery);
  if (!ea.envy_free) {
    v.survives = false;
    v.margin = ea.worst_margin;
    v.note = "not envy-free (worst pair margin " +
             std::to_string(ea.worst_margin) + ")";
    return v;
  }
  ParetoReport pr = check_eps_pareto(inst, lottery, eps16,
                                     ParetoClass::EfLotteriesOnGrid, grid_eps);
  v.margin = pr.margin;
  if (!pr.eps_pareto) {
    v.survives = false;
    v.note = pr.note;
    v.witness = pr.dominator;
    return v;
  }
  if (candidate != nullptr &&
      check_ex_ante_ef(inst, *candidate).envy_free) {
    std::vector<double> base = expected_utilities(inst, lottery).own;
    std::vector<double> cand = expected_utilities(inst, *candidate).own;
    double surplus = 0.0;
    bool covers = true;
    for (int i = 0; i < 2; ++i) {
      double gain = cand[i] - (1.0 + eps16) * base[i];
      if (gain < 0.0) covers = false;
      surplus += gain;
    }
    if (covers && surplus > 1e-8) {
      v.survives = false;
      v.margin = surplus;
      v.note = "the reference lottery dominates off the grid";
      v.witness = *candidate;
      return v;
    }
  }
  v.note = "envy-free and undominated (margin " + std::to_string(v.margin) +
           ")";
  return v;
}

}  // namespace

AuditReport audit_lottery(const ForgedInstances& instances,
                          const Lottery& lottery, double epsilon) {
  if (std::abs(epsilon - instances.epsilon) > 1e-12)
    throw ConfigError("audit epsilon must match the forged instances");
  const double eps = instances.epsilon;
  const double x1 = instances.x1;
  for (const LotteryEntry& entry : lottery.support)
    if (entry.outcome.x.size() != 2 || entry.outcome.x[0].size() != 2 ||
        entry.outcome.x[1].size() != 2)
      throw ConfigError("audited lottery must cover two agents, two items");

  AuditReport report;
  report.x1 = x1;
  report.epsilon = eps;

  {  // (a) expected totals: forced to 1 by envy-freeness in the identity
     // instance, which the protocol cannot rule out
    std::vector<std::vector<double>> mean = expected_allocation(lottery);
    double worst = 0.0;
    if (mean.empty()) worst = 1.0;  // empty lottery allocates nothing
    for (const auto& row : mean)
      worst = std::max(worst, std::abs(row[0] + row[1] - 1.0));
    report.checks.push_back({"expected-totals", worst <= 1e-6, worst,
                             "max deviation of an agent's expected total "
                             "resource from 1"});
  }

  {  // (b) the reference lottery reaches (1+eps/8, 1+3eps/8) in the bent
     // instance and is itself envy-free there
    Lottery lprime = reference_lottery(x1, eps, 1);
    UtilityMatrix u = expected_utilities(instances.i2, lprime);
    double dev = std::max(std::abs(u.own[0] - (1.0 + eps / 8.0)),
                          std::abs(u.own[1] - (1.0 + 3.0 * eps / 8.0)));
    bool ef = check_ex_ante_ef(instances.i2, lprime).envy_free;
    report.checks.push_back(
        {"reference-lottery", dev <= 1e-9 && ef, dev,
         ef ? "utilities on target and envy-free"
            : "utilities on target but envious"});
  }

  {  // (c) cap: a bundle with total at most 1 cannot beat 1+eps/2 for the
     // bent agent; swept at step 1e-4 with the leftover on item 0
    double cap = 0.0;
    for (int t = 0; t <= 10000; ++t) {
      double z = t * 1e-4;
      cap = std::max(cap, eval(instances.i2.val(1, 1), z) + (1.0 - z));
      cap = std::max(cap, eval(instances.i3.val(0, 1), z) + (1.0 - z));
    }
    bool pass = cap <= 1.0 + eps / 2.0 + 1e-9 && cap >= 1.0 + eps / 2.0 - 2e-4;
    report.checks.push_back(
        {"utility-cap", pass, cap, "max bent-agent utility from total <= 1"});
  }

  const double eps16 = eps / 16.0;
  const double grid_eps = 1.0 / std::ceil(4.0 / eps);
  Lottery lp2 = reference_lottery(x1, eps, 1);
  Lottery lp3 = reference_lottery(x1, eps, 0);
  const Instance* insts[3] = {&instances.i1, &instances.i2, &instances.i3};
  const Lottery* cands[3] = {nullptr, &lp2, &lp3};
  const char* names[3] = {"pareto-I1", "pareto-I2", "pareto-I3"};
  for (int t = 0; t < 3; ++t) {
    InstanceVerdict v = judge(*insts[t], lottery, eps16, grid_eps, cands[t]);
    report.checks.push_back({names[t], v.survives, v.margin, v.note});
    if (!v.survives && !report.defeated) {
      report.defeated = true;
      report.defeating_instance = "I" + std::to_string(t + 1);
      report.dominator = v.witness;
    }
  }

  {  // (e) mixing the two bent-optimal outcomes: min of the two bent-side
     // utilities never exceeds 1+eps/4, however the mix is weighted
    Outcome oa, ob;
    oa.x = {{1.0 - x1 - eps / 2.0, x1 + eps / 2.0},
            {x1 + eps / 2.0, 1.0 - x1 - eps / 2.0}};
    ob.x = {{x1 + eps / 2.0, 1.0 - x1 - eps / 2.0},
            {1.0 - x1 - eps / 2.0, x1 + eps / 2.0}};
    Lottery la, lb;
    la.support = {{1.0, oa}};
    lb.support = {{1.0, ob}};
    double a1 = expected_utilities(instances.i3, la).own[0];
    double b1 = expected_utilities(instances.i3, lb).own[0];
    double a2 = expected_utilities(instances.i2, la).own[1];
    double b2 = expected_utilities(instances.i2, lb).own[1];
    double best = 0.0;
    for (int t = 0; t <= 1000; ++t) {
      double theta = t * 1e-3;
      double u1 = theta * a1 + (1.0 - theta) * b1;
      double u2 = theta * a2 + (1.0 - theta) * b2;
      best = std::max(best, std::min(u1, u2));
    }
    report.checks.push_back({"randomization-cap",
                             best <= 1.0 + eps / 4.0 + 1e-9, best,
                             "max over mixes of the smaller bent-side "
                             "utility"});
  }

  return report;
}

}  // namespace fairlot
