#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fairlot {

enum class RowSense { LE, GE, EQ };

// Sparse LP, maximization.  Variables default to bounds [0,1]; rows hold
// sparse coefficient lists.  Construction order fixes row/column identity
// everywhere (solver, dump, tests).
struct LinearProgram {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    RowSense sense = RowSense::EQ;
    double rhs = 0.0;
    std::string name;
  };

  int num_vars = 0;
  std::vector<double> lower, upper, objective;
  std::vector<Row> rows;

  int add_variable(double lo = 0.0, double hi = 1.0);
  int add_row(RowSense sense, double rhs, std::string name = "");
  void add_coeff(int row, int var, double coef);
  void set_objective(int var, double coef);
  void validate() const;
};

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Two-phase revised simplex on bounded variables.  Deterministic: Dantzig
// pricing with lowest-index tie break, switching to Bland's rule after
// 5*(rows+cols) pivots; pivot tolerance 1e-10.
LpSolution solve_lp(const LinearProgram& lp);

// Iterated maximin over the group objectives: maximize the smallest group
// value, freeze groups that cannot improve (attained value minus 1e-8 slack
// as a permanent row), recurse on the rest.  Single group degenerates to
// solve_lp on that objective.
LpSolution lexi_solve(const LinearProgram& lp,
                      const std::vector<std::vector<double>>& groups);

// Free-format MPS with %.12g fields; rows and columns appear in
// construction order, so the text is bit-stable for a given program.
std::string dump_lp(const LinearProgram& lp, const std::string& name = "FAIRLOT");

// Largest violation of any row or bound at x (for feasibility assertions).
double max_constraint_residual(const LinearProgram& lp,
                               const std::vector<double>& x);

}  // namespace fairlot
