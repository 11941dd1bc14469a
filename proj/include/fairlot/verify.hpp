#pragma once

#include <string>
#include <vector>

#include "fairlot/lottery.hpp"

namespace fairlot {

// cross[i][j]: expected value agent i assigns to agent j's bundle under the
// lottery.  The diagonal is each agent's own expected utility.
struct UtilityMatrix {
  std::vector<std::vector<double>> cross;
  std::vector<double> own;
};

UtilityMatrix expected_utilities(const Instance& instance,
                                 const Lottery& lottery);

struct EnvyWitness {
  int envious = 0;
  int envied = 0;
  double own = 0.0;
  double other = 0.0;
};

struct ExAnteReport {
  bool envy_free = false;
  double worst_margin = 0.0;  // min over pairs of own - other
  std::vector<EnvyWitness> violations;
};

ExAnteReport check_ex_ante_ef(const Instance& instance, const Lottery& lottery,
                              double tol = 1e-9);

enum class ExPostCheck { Feasible, EnvyFree, Proportional };

struct ExPostViolation {
  std::size_t support_index = 0;
  std::string what;
  double margin = 0.0;
};

struct ExPostReport {
  bool pass = false;
  double worst_margin = 0.0;
  std::vector<ExPostViolation> violations;
};

// Feasible: probabilities are a distribution and every outcome stays inside
// the item supplies.  EnvyFree / Proportional hold outcome by outcome.
ExPostReport check_ex_post(const Instance& instance, const Lottery& lottery,
                           ExPostCheck what, double tol = 1e-9);

// Which alternatives may dominate: envy-free lotteries on the grid, all
// lotteries on the grid, or every deterministic grid outcome against each
// support outcome separately.
enum class ParetoClass { EfLotteriesOnGrid, AllLotteriesOnGrid, AllOutcomes };

struct ParetoReport {
  bool eps_pareto = false;
  // Largest total utility surplus a dominator achieves beyond the scaled
  // target; domination needs it above 1e-8, so <= that passes.
  double margin = 0.0;
  std::vector<double> base_utilities;
  std::vector<double> dominator_utilities;
  Lottery dominator;  // witness, empty when the check passes
  std::string note;
};

// Does any alternative in the class give every agent at least (1+eps) times
// their utility, at least one strictly more?  Lottery classes ask it of the
// expected utilities via an auxiliary flow LP on the grid_epsilon grid;
// AllOutcomes asks it of each support outcome by enumeration.
ParetoReport check_eps_pareto(const Instance& instance, const Lottery& lottery,
                              double eps, ParetoClass cls,
                              double grid_epsilon);

struct FrontierPoint {
  std::vector<double> weights;
  std::vector<double> utilities;
  double welfare = 0.0;
  Lottery lottery;  // the optimum behind the point (single outcome for
                    // deterministic points)
};

struct FrontierData {
  std::vector<FrontierPoint> lottery_points;
  std::vector<FrontierPoint> deterministic_points;
};

// Sweep weighted-welfare objectives across evenly spaced weight vectors and
// record the utility profile of each optimum, next to the profiles of every
// complete deterministic grid outcome to compare against.
FrontierData frontier_sweep(const Instance& instance, double epsilon,
                            int directions, Fairness fairness);

}  // namespace fairlot
