#include <limits>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "fairlot/lp.hpp"

using namespace fairlot;

namespace {

LinearProgram two_var_budget() {
  // max x + 2y  s.t.  x + y = 1,  x,y in [0,1]
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  lp.set_objective(x, 1.0);
  lp.set_objective(y, 2.0);
  int row = lp.add_row(RowSense::EQ, 1.0, "budget");
  lp.add_coeff(row, x, 1.0);
  lp.add_coeff(row, y, 1.0);
  return lp;
}

}  // namespace

TEST_CASE("box-only programs solve at the obvious corner") {
  // max 3x - 2y over the unit box
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  lp.set_objective(x, 3.0);
  lp.set_objective(y, -2.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(0.0));
}

TEST_CASE("equality row pins the budget") {
  LpSolution sol = solve_lp(two_var_budget());
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(sol.x[0] == doctest::Approx(0.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("GE rows hold as hard floors") {
  // max -x + y  s.t.  x >= 0.75, x + y <= 1
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  lp.set_objective(x, -1.0);
  lp.set_objective(y, 1.0);
  int floor_row = lp.add_row(RowSense::GE, 0.75, "floor");
  lp.add_coeff(floor_row, x, 1.0);
  int cap_row = lp.add_row(RowSense::LE, 1.0, "cap");
  lp.add_coeff(cap_row, x, 1.0);
  lp.add_coeff(cap_row, y, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.75));
  CHECK(sol.x[1] == doctest::Approx(0.25));
  CHECK(sol.objective == doctest::Approx(-0.5));
}

TEST_CASE("infeasible rows are reported as such") {
  // x + y >= 3 cannot hold inside the unit box
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  int row = lp.add_row(RowSense::GE, 3.0, "impossible");
  lp.add_coeff(row, x, 1.0);
  lp.add_coeff(row, y, 1.0);
  LpSolution sol = solve_lp(lp);
  CHECK(sol.status == LpSolution::Status::Infeasible);
}

TEST_CASE("redundant rows do not stall the solver") {
  LinearProgram lp = two_var_budget();
  // Stack the same budget row three more times plus a slack LE duplicate.
  for (int copy = 0; copy < 3; ++copy) {
    int row = lp.add_row(RowSense::EQ, 1.0, "dup");
    lp.add_coeff(row, 0, 1.0);
    lp.add_coeff(row, 1, 1.0);
  }
  int le = lp.add_row(RowSense::LE, 1.0, "dup_le");
  lp.add_coeff(le, 0, 1.0);
  lp.add_coeff(le, 1, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(max_constraint_residual(lp, sol.x) <= 1e-8);
}

TEST_CASE("solutions are deterministic bit for bit") {
  LpSolution a = solve_lp(two_var_budget());
  LpSolution b = solve_lp(two_var_budget());
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t j = 0; j < a.x.size(); ++j) CHECK(a.x[j] == b.x[j]);
  CHECK(a.objective == b.objective);
}

TEST_CASE("optimal points satisfy every row within 1e-8") {
  LinearProgram lp;
  for (int j = 0; j < 6; ++j) lp.add_variable(0.0, 2.0);
  for (int j = 0; j < 6; ++j) lp.set_objective(j, 1.0 + 0.1 * j);
  int sum_row = lp.add_row(RowSense::LE, 4.0, "sum");
  for (int j = 0; j < 6; ++j) lp.add_coeff(sum_row, j, 1.0);
  int pair_row = lp.add_row(RowSense::EQ, 1.0, "pair");
  lp.add_coeff(pair_row, 0, 1.0);
  lp.add_coeff(pair_row, 5, 1.0);
  int floor_row = lp.add_row(RowSense::GE, 0.5, "floor");
  lp.add_coeff(floor_row, 2, 1.0);
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(max_constraint_residual(lp, sol.x) <= 1e-8);
}

TEST_CASE("lexi_solve lifts the minimum before the rest") {
  // x + y <= 1; groups {x}, {y}.  Maximin splits evenly.
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  int row = lp.add_row(RowSense::LE, 1.0, "budget");
  lp.add_coeff(row, x, 1.0);
  lp.add_coeff(row, y, 1.0);
  std::vector<std::vector<double>> groups = {{1.0, 0.0}, {0.0, 1.0}};
  LpSolution sol = lexi_solve(lp, groups);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("lexi_solve balances unequal rates at the fair point") {
  // x + y <= 1; groups value x and 2y.  Equalizing gives x = 2/3, y = 1/3.
  LinearProgram lp;
  int x = lp.add_variable();
  int y = lp.add_variable();
  int row = lp.add_row(RowSense::LE, 1.0, "budget");
  lp.add_coeff(row, x, 1.0);
  lp.add_coeff(row, y, 1.0);
  std::vector<std::vector<double>> groups = {{1.0, 0.0}, {0.0, 2.0}};
  LpSolution sol = lexi_solve(lp, groups);
  REQUIRE(sol.status == LpSolution::Status::Optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(sol.x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("lexi_solve with one group matches plain solve") {
  LinearProgram lp = two_var_budget();
  std::vector<std::vector<double>> one = {{1.0, 2.0}};
  LpSolution a = lexi_solve(lp, one);
  LpSolution b = solve_lp(lp);
  REQUIRE(a.status == LpSolution::Status::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective));
}

TEST_CASE("dump_lp emits every MPS section in order") {
  std::string text = dump_lp(two_var_budget(), "BUDGET");
  std::size_t name_pos = text.find("NAME");
  std::size_t rows_pos = text.find("ROWS");
  std::size_t cols_pos = text.find("COLUMNS");
  std::size_t rhs_pos = text.find("RHS");
  std::size_t bounds_pos = text.find("BOUNDS");
  std::size_t end_pos = text.find("ENDATA");
  REQUIRE(name_pos != std::string::npos);
  REQUIRE(rows_pos != std::string::npos);
  REQUIRE(cols_pos != std::string::npos);
  REQUIRE(rhs_pos != std::string::npos);
  REQUIRE(bounds_pos != std::string::npos);
  REQUIRE(end_pos != std::string::npos);
  CHECK(name_pos < rows_pos);
  CHECK(rows_pos < cols_pos);
  CHECK(cols_pos < rhs_pos);
  CHECK(rhs_pos < bounds_pos);
  CHECK(bounds_pos < end_pos);
  CHECK(text.find("BUDGET") != std::string::npos);
  CHECK(text.find("budget") != std::string::npos);
  CHECK(dump_lp(two_var_budget(), "BUDGET") == text);  // bit-stable
}

TEST_CASE("validate rejects broken programs") {
  LinearProgram lp;
  int x = lp.add_variable(0.5, 0.2);  // inverted bounds
  (void)x;
  CHECK_THROWS_AS(lp.validate(), std::invalid_argument);

  LinearProgram lp2;
  lp2.add_variable();
  int row = lp2.add_row(RowSense::EQ, 0.0, "bad");
  lp2.add_coeff(row, 3, 1.0);  // references a variable that does not exist
  CHECK_THROWS_AS(lp2.validate(), std::invalid_argument);

  LinearProgram lp3;
  lp3.add_variable(0.0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(lp3.validate(), std::invalid_argument);
}
