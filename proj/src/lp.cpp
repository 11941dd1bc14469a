#include "fairlot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace fairlot {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kReducedCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

int LinearProgram::add_variable(double lo, double hi) {
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(0.0);
  return num_vars++;
}

int LinearProgram::add_row(RowSense sense, double rhs, std::string name) {
  Row r;
  r.sense = sense;
  r.rhs = rhs;
  r.name = std::move(name);
  rows.push_back(std::move(r));
  return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::add_coeff(int row, int var, double coef) {
  if (coef == 0.0) return;
  rows[row].coeffs.emplace_back(var, coef);
}

void LinearProgram::set_objective(int var, double coef) {
  objective[var] = coef;
}

void LinearProgram::validate() const {
  for (int j = 0; j < num_vars; ++j) {
    if (!(lower[j] <= upper[j]))
      throw std::invalid_argument("lp: lower bound above upper bound");
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw std::invalid_argument("lp: variable bounds must be finite");
  }
  for (const auto& row : rows)
    for (const auto& [var, coef] : row.coeffs) {
      if (var < 0 || var >= num_vars)
        throw std::invalid_argument("lp: coefficient references unknown variable");
      if (!std::isfinite(coef))
        throw std::invalid_argument("lp: non-finite coefficient");
    }
}

double max_constraint_residual(const LinearProgram& lp,
                               const std::vector<double>& x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& row : lp.rows) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.coeffs) lhs += coef * x[var];
    switch (row.sense) {
      case RowSense::LE: worst = std::max(worst, lhs - row.rhs); break;
      case RowSense::GE: worst = std::max(worst, row.rhs - lhs); break;
      case RowSense::EQ: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

//===========================================================================
// Revised simplex with bounded variables
//===========================================================================

namespace {

enum class VarState : char { AtLower, AtUpper, Basic };

class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LpSolution run() {
    LpSolution sol;
    if (m_ == 0) return solve_unconstrained();

    // Phase 1: drive the artificials to zero.
    if (has_artificials_) {
      set_phase1_costs();
      Step outcome = iterate();
      if (outcome == Step::IterationLimit)
        throw std::runtime_error("lp: iteration limit in phase 1");
      double infeas = artificial_mass();
      if (infeas > kPhase1Tol) {
        sol.status = LpSolution::Status::Infeasible;
        return sol;
      }
      // Artificials may stay basic at zero on redundant rows; pin them.
      for (int j = first_artificial_; j < total_; ++j) {
        lo_[j] = 0.0;
        hi_[j] = 0.0;
      }
      factorize();
    }

    set_phase2_costs();
    Step outcome = iterate();
    if (outcome == Step::IterationLimit)
      throw std::runtime_error("lp: iteration limit in phase 2");
    if (outcome == Step::Unbounded) {
      sol.status = LpSolution::Status::Unbounded;
      return sol;
    }

    factorize();  // fresh inverse before extraction keeps residuals tiny
    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(lp_.num_vars, 0.0);
    for (int j = 0; j < lp_.num_vars; ++j) sol.x[j] = current_value(j);
    for (int j = 0; j < lp_.num_vars; ++j)
      sol.x[j] = std::clamp(sol.x[j], lp_.lower[j], lp_.upper[j]);
    sol.objective = 0.0;
    for (int j = 0; j < lp_.num_vars; ++j)
      sol.objective += lp_.objective[j] * sol.x[j];
    return sol;
  }

 private:
  enum class Step { Optimal, Unbounded, IterationLimit };

  void build() {
    m_ = static_cast<int>(lp_.rows.size());
    nv_ = lp_.num_vars;
    first_logical_ = nv_;
    first_artificial_ = nv_ + m_;
    total_ = first_artificial_;  // artificials appended below as needed

    cols_.resize(nv_ + m_);
    lo_.assign(nv_ + m_, 0.0);
    hi_.assign(nv_ + m_, 0.0);
    for (int j = 0; j < nv_; ++j) {
      lo_[j] = lp_.lower[j];
      hi_[j] = lp_.upper[j];
    }
    for (int r = 0; r < m_; ++r)
      for (const auto& [var, coef] : lp_.rows[r].coeffs)
        cols_[var].emplace_back(r, coef);

    b_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      b_[r] = lp_.rows[r].rhs;
      int s = first_logical_ + r;
      cols_[s] = {{r, 1.0}};
      switch (lp_.rows[r].sense) {
        case RowSense::LE: lo_[s] = 0.0; hi_[s] = kInf; break;
        case RowSense::GE: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case RowSense::EQ: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
    }

    state_.assign(nv_ + m_, VarState::AtLower);
    basis_.assign(m_, -1);

    // Start structurals at their lower bound and compute row residuals.
    std::vector<double> resid = b_;
    for (int j = 0; j < nv_; ++j)
      if (lo_[j] != 0.0)
        for (const auto& [r, a] : cols_[j]) resid[r] -= a * lo_[j];

    has_artificials_ = false;
    for (int r = 0; r < m_; ++r) {
      int s = first_logical_ + r;
      bool slack_ok = false;
      switch (lp_.rows[r].sense) {
        case RowSense::LE: slack_ok = resid[r] >= 0.0; break;
        case RowSense::GE: slack_ok = resid[r] <= 0.0; break;
        case RowSense::EQ: slack_ok = false; break;
      }
      if (slack_ok) {
        basis_[r] = s;
        state_[s] = VarState::Basic;
      } else {
        // Slack rests at zero (its bound nearest feasibility); an artificial
        // column +/- e_r carries the residual.
        state_[s] = lp_.rows[r].sense == RowSense::GE ? VarState::AtUpper
                                                      : VarState::AtLower;
        double d = resid[r] >= 0.0 ? 1.0 : -1.0;
        cols_.push_back({{r, d}});
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        state_.push_back(VarState::Basic);
        int a = static_cast<int>(cols_.size()) - 1;
        basis_[r] = a;
        has_artificials_ = true;
      }
    }
    total_ = static_cast<int>(cols_.size());
    cost_.assign(total_, 0.0);
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    xb_.assign(m_, 0.0);
    factorize();
  }

  void set_phase1_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = first_artificial_; j < total_; ++j) cost_[j] = -1.0;
  }

  void set_phase2_costs() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int j = 0; j < nv_; ++j) cost_[j] = lp_.objective[j];
  }

  double artificial_mass() {
    double total = 0.0;
    for (int r = 0; r < m_; ++r)
      if (basis_[r] >= first_artificial_) total += std::abs(xb_[r]);
    return total;
  }

  double bound_value(int j) const {
    return state_[j] == VarState::AtUpper ? hi_[j] : lo_[j];
  }

  double current_value(int j) const {
    if (state_[j] != VarState::Basic) return bound_value(j);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] == j) return xb_[r];
    return 0.0;
  }

  // Dense Gauss-Jordan inverse of the basis matrix, then recompute basic
  // values from scratch.
  void factorize() {
    std::vector<double> work(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
    auto at = [&](int r, int c) -> double& { return work[r * 2 * m_ + c]; };
    for (int r = 0; r < m_; ++r) at(r, m_ + r) = 1.0;
    for (int c = 0; c < m_; ++c)
      for (const auto& [r, a] : cols_[basis_[c]]) at(r, c) = a;

    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 0.0;
      for (int r = c; r < m_; ++r)
        if (std::abs(at(r, c)) > best) {
          best = std::abs(at(r, c));
          piv = r;
        }
      if (piv < 0 || best < 1e-13)
        throw std::runtime_error("lp: singular basis matrix");
      if (piv != c)
        for (int k = 0; k < 2 * m_; ++k) std::swap(at(piv, k), at(c, k));
      double inv = 1.0 / at(c, c);
      for (int k = 0; k < 2 * m_; ++k) at(c, k) *= inv;
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        double f = at(r, c);
        if (f == 0.0) continue;
        for (int k = 0; k < 2 * m_; ++k) at(r, k) -= f * at(c, k);
      }
    }
    for (int r = 0; r < m_; ++r)
      for (int c = 0; c < m_; ++c) binv_[r * m_ + c] = at(r, m_ + c);

    std::vector<double> rhs = b_;
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      double v = bound_value(j);
      if (v == 0.0) continue;
      for (const auto& [r, a] : cols_[j]) rhs[r] -= a * v;
    }
    for (int r = 0; r < m_; ++r) {
      double acc = 0.0;
      for (int c = 0; c < m_; ++c) acc += binv_[r * m_ + c] * rhs[c];
      xb_[r] = acc;
    }
    pivots_since_refactor_ = 0;
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> w(m_, 0.0);
    for (const auto& [i, a] : cols_[j])
      for (int r = 0; r < m_; ++r) w[r] += binv_[r * m_ + i] * a;
    return w;
  }

  Step iterate() {
    const long long bland_after =
        5LL * (static_cast<long long>(m_) + total_);
    const long long hard_cap = 200000 + 200LL * (m_ + total_);
    long long pivots = 0;

    std::vector<double> y(m_);
    while (true) {
      if (pivots > hard_cap) return Step::IterationLimit;
      bool bland = pivots >= bland_after;

      // y = c_B * Binv
      for (int c = 0; c < m_; ++c) {
        double acc = 0.0;
        for (int r = 0; r < m_; ++r) acc += cost_[basis_[r]] * binv_[r * m_ + c];
        y[c] = acc;
      }

      int enter = -1;
      double best = kReducedCostTol;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) continue;
        double d = cost_[j];
        for (const auto& [r, a] : cols_[j]) d -= y[r] * a;
        bool eligible = (state_[j] == VarState::AtLower && d > kReducedCostTol) ||
                        (state_[j] == VarState::AtUpper && d < -kReducedCostTol);
        if (!eligible) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
        }
      }
      if (enter < 0) return Step::Optimal;

      double t = state_[enter] == VarState::AtLower ? 1.0 : -1.0;
      std::vector<double> w = ftran(enter);

      double limit = hi_[enter] - lo_[enter];  // bound-to-bound flip distance
      int leave_row = -1;
      bool leave_at_upper = false;
      double best_pivot = 0.0;
      for (int r = 0; r < m_; ++r) {
        double g = t * w[r];
        double ratio;
        bool to_upper;
        int bj = basis_[r];
        if (g > kPivotTol) {
          if (lo_[bj] == -kInf) continue;
          ratio = (xb_[r] - lo_[bj]) / g;
          to_upper = false;
        } else if (g < -kPivotTol) {
          if (hi_[bj] == kInf) continue;
          ratio = (xb_[r] - hi_[bj]) / g;
          to_upper = true;
        } else {
          continue;
        }
        if (ratio < 0.0) ratio = 0.0;  // roundoff dust past a bound
        bool better = false;
        if (ratio < limit - 1e-12) {
          better = true;
        } else if (ratio < limit + 1e-12 && leave_row >= 0) {
          // Tie: prefer the larger pivot element for stability, then the
          // lowest variable index (Bland mode: index only).
          if (bland)
            better = basis_[r] < basis_[leave_row];
          else if (std::abs(w[r]) > best_pivot + 1e-15)
            better = true;
          else if (std::abs(w[r]) > best_pivot - 1e-15 &&
                   basis_[r] < basis_[leave_row])
            better = true;
        } else if (ratio < limit + 1e-12 && leave_row < 0 && ratio <= limit) {
          better = true;
        }
        if (better) {
          limit = std::min(limit, ratio);
          leave_row = r;
          leave_at_upper = to_upper;
          best_pivot = std::abs(w[r]);
        }
      }

      if (!std::isfinite(limit)) return Step::Unbounded;

      ++pivots;
      ++pivots_since_refactor_;
      if (leave_row < 0) {
        // Bound-to-bound move: the entering variable flips sides.
        for (int r = 0; r < m_; ++r) xb_[r] -= limit * t * w[r];
        state_[enter] = state_[enter] == VarState::AtLower ? VarState::AtUpper
                                                           : VarState::AtLower;
        continue;
      }

      double enter_val = bound_value(enter) + t * limit;
      for (int r = 0; r < m_; ++r) xb_[r] -= limit * t * w[r];
      int leave_var = basis_[leave_row];
      state_[leave_var] = leave_at_upper ? VarState::AtUpper : VarState::AtLower;
      basis_[leave_row] = enter;
      state_[enter] = VarState::Basic;
      xb_[leave_row] = enter_val;

      // Rank-one update of the inverse: row ops that map the entering
      // column to e_{leave_row}.
      double piv = w[leave_row];
      if (std::abs(piv) < 1e-13)
        throw std::runtime_error("lp: vanishing pivot element");
      double* prow = &binv_[leave_row * m_];
      for (int c = 0; c < m_; ++c) prow[c] /= piv;
      for (int r = 0; r < m_; ++r) {
        if (r == leave_row) continue;
        double f = w[r];
        if (f == 0.0) continue;
        double* row = &binv_[r * m_];
        for (int c = 0; c < m_; ++c) row[c] -= f * prow[c];
      }

      if (pivots_since_refactor_ >= 64) factorize();
    }
  }

  LpSolution solve_unconstrained() {
    LpSolution sol;
    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(nv_, 0.0);
    for (int j = 0; j < nv_; ++j)
      sol.x[j] = lp_.objective[j] > 0.0 ? lp_.upper[j] : lp_.lower[j];
    sol.objective = 0.0;
    for (int j = 0; j < nv_; ++j) sol.objective += lp_.objective[j] * sol.x[j];
    return sol;
  }

  const LinearProgram& lp_;
  int m_ = 0, nv_ = 0, total_ = 0;
  int first_logical_ = 0, first_artificial_ = 0;
  bool has_artificials_ = false;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo_, hi_, b_, cost_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<double> binv_, xb_;
  int pivots_since_refactor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  lp.validate();
  Simplex solver(lp);
  return solver.run();
}

//===========================================================================
// Leximin
//===========================================================================

namespace {

double group_value(const std::vector<double>& group,
                   const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < group.size(); ++j) acc += group[j] * x[j];
  return acc;
}

}  // namespace

LpSolution lexi_solve(const LinearProgram& lp,
                      const std::vector<std::vector<double>>& groups) {
  if (groups.empty()) return solve_lp(lp);
  for (const auto& g : groups)
    if (static_cast<int>(g.size()) != lp.num_vars)
      throw std::invalid_argument("lexi_solve: group size mismatch");

  constexpr double kFreezeSlack = 1e-8;

  // Upper bound for the min-value variable: largest attainable group sum.
  double ub = 1.0;
  for (const auto& g : groups) {
    double reach = 0.0;
    for (int j = 0; j < lp.num_vars; ++j)
      reach += g[j] > 0.0 ? g[j] * lp.upper[j] : g[j] * lp.lower[j];
    ub = std::max(ub, reach + 1.0);
  }

  LinearProgram base = lp;  // frozen rows accumulate here
  for (int j = 0; j < base.num_vars; ++j) base.objective[j] = 0.0;
  std::vector<bool> frozen(groups.size(), false);

  auto active_indices = [&] {
    std::vector<int> act;
    for (std::size_t g = 0; g < groups.size(); ++g)
      if (!frozen[g]) act.push_back(static_cast<int>(g));
    return act;
  };

  while (true) {
    std::vector<int> active = active_indices();
    if (active.empty()) break;

    // max t subject to g.x >= t for every active group.
    LinearProgram round = base;
    int tvar = round.add_variable(0.0, ub);
    round.set_objective(tvar, 1.0);
    for (int g : active) {
      int row = round.add_row(RowSense::GE, 0.0);
      for (int j = 0; j < lp.num_vars; ++j)
        round.add_coeff(row, j, groups[g][j]);
      round.add_coeff(row, tvar, -1.0);
    }
    LpSolution level = solve_lp(round);
    if (level.status != LpSolution::Status::Optimal) return level;
    double tstar = level.objective;

    // Probe every active group: can it exceed tstar while the others hold
    // the level?  Groups that cannot are fixed at tstar.
    std::vector<int> to_freeze;
    double weakest = kInf;
    int weakest_group = active.front();
    for (int g : active) {
      LinearProgram probe = base;
      for (int h : active) {
        int row = probe.add_row(RowSense::GE, tstar - kFreezeSlack);
        for (int j = 0; j < lp.num_vars; ++j)
          probe.add_coeff(row, j, groups[h][j]);
      }
      for (int j = 0; j < lp.num_vars; ++j)
        probe.objective[j] = groups[g][j];
      LpSolution best = solve_lp(probe);
      if (best.status != LpSolution::Status::Optimal) return best;
      if (best.objective <= tstar + kFreezeSlack) to_freeze.push_back(g);
      if (best.objective < weakest) {
        weakest = best.objective;
        weakest_group = g;
      }
    }
    if (to_freeze.empty()) to_freeze.push_back(weakest_group);  // progress

    for (int g : to_freeze) {
      frozen[g] = true;
      int row = base.add_row(RowSense::GE, tstar - kFreezeSlack);
      for (int j = 0; j < lp.num_vars; ++j)
        base.add_coeff(row, j, groups[g][j]);
    }
  }

  // Canonical final vertex: maximize the sum of group objectives subject to
  // every frozen level.
  for (int j = 0; j < base.num_vars; ++j) {
    double c = 0.0;
    for (const auto& g : groups) c += g[j];
    base.objective[j] = c;
  }
  LpSolution final = solve_lp(base);
  if (final.status == LpSolution::Status::Optimal) {
    // Report the leximin objective as the smallest group value.
    double least = kInf;
    for (const auto& g : groups) least = std::min(least, group_value(g, final.x));
    final.objective = least;
  }
  return final;
}

//===========================================================================
// Dump
//===========================================================================

std::string dump_lp(const LinearProgram& lp, const std::string& name) {
  std::string out;
  auto row_name = [&](int r) {
    return lp.rows[r].name.empty() ? "R" + std::to_string(r) : lp.rows[r].name;
  };
  out += "NAME          " + name + "\n";
  out += "ROWS\n N  OBJ\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    char s = lp.rows[r].sense == RowSense::LE   ? 'L'
             : lp.rows[r].sense == RowSense::GE ? 'G'
                                                : 'E';
    out += std::string(" ") + s + "  " + row_name(static_cast<int>(r)) + "\n";
  }
  out += "COLUMNS\n";
  // Column-major entries in row order; objective entry first.
  std::vector<std::vector<std::pair<int, double>>> bycol(lp.num_vars);
  for (std::size_t r = 0; r < lp.rows.size(); ++r)
    for (const auto& [var, coef] : lp.rows[r].coeffs)
      bycol[var].emplace_back(static_cast<int>(r), coef);
  for (int j = 0; j < lp.num_vars; ++j) {
    std::string cn = "C" + std::to_string(j);
    if (lp.objective[j] != 0.0)
      out += "    " + cn + "  OBJ  " + fmt12(lp.objective[j]) + "\n";
    for (const auto& [r, coef] : bycol[j])
      out += "    " + cn + "  " + row_name(r) + "  " + fmt12(coef) + "\n";
  }
  out += "RHS\n";
  for (std::size_t r = 0; r < lp.rows.size(); ++r)
    if (lp.rows[r].rhs != 0.0)
      out += "    RHS  " + row_name(static_cast<int>(r)) + "  " +
             fmt12(lp.rows[r].rhs) + "\n";
  out += "BOUNDS\n";
  for (int j = 0; j < lp.num_vars; ++j) {
    std::string cn = "C" + std::to_string(j);
    if (lp.lower[j] == lp.upper[j]) {
      out += " FX BND  " + cn + "  " + fmt12(lp.lower[j]) + "\n";
    } else {
      out += " LO BND  " + cn + "  " + fmt12(lp.lower[j]) + "\n";
      out += " UP BND  " + cn + "  " + fmt12(lp.upper[j]) + "\n";
    }
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace fairlot
