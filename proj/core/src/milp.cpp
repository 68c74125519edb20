#include "microgrid/milp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <cstdlib>
#include <cstdio>

#include "microgrid/errors.hpp"

namespace microgrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string render(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

int MilpModel::add_variable(std::string name, VarKind kind, double lower,
                            double upper) {
  vars_.push_back(MilpVariable{std::move(name), kind, lower, upper});
  return static_cast<int>(vars_.size()) - 1;
}

void MilpModel::add_constraint(std::string name, std::vector<MilpTerm> terms,
                               ConstraintSense sense, double rhs) {
  cons_.push_back(MilpConstraint{std::move(name), std::move(terms), sense, rhs});
}

void MilpModel::set_objective(ObjectiveSense sense, std::vector<double> coeffs) {
  obj_sense_ = sense;
  obj_ = std::move(coeffs);
}

std::vector<double> MilpModel::objective() const {
  std::vector<double> c(obj_);
  c.resize(vars_.size(), 0.0);
  return c;
}

void MilpModel::validate() const {
  const int n = num_variables();
  for (int j = 0; j < n; ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw ConfigError("variable " + v.name + ": bounds must satisfy lower <= upper");
    if (v.kind == VarKind::Integer &&
        (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
      throw ConfigError("variable " + v.name + ": integer variables need finite bounds");
  }
  if (static_cast<int>(obj_.size()) > n)
    throw ConfigError("objective references more coefficients than variables");
  for (const auto& con : cons_) {
    for (const auto& t : con.terms) {
      if (t.var < 0 || t.var >= n)
        throw ConfigError("constraint " + con.name + ": term references unknown variable");
    }
  }
}

double MilpModel::objective_value(std::span<const double> x) const {
  double v = 0.0;
  const std::size_t k = std::min(obj_.size(), x.size());
  for (std::size_t j = 0; j < k; ++j) v += obj_[j] * x[j];
  return v;
}

bool MilpModel::satisfies(std::span<const double> x, double feas_tol) const {
  const int n = num_variables();
  if (static_cast<int>(x.size()) != n) return false;
  for (int j = 0; j < n; ++j) {
    if (x[j] < vars_[j].lower - feas_tol || x[j] > vars_[j].upper + feas_tol)
      return false;
  }
  for (const auto& con : cons_) {
    double lhs = 0.0;
    for (const auto& t : con.terms) lhs += t.coeff * x[t.var];
    switch (con.sense) {
      case ConstraintSense::LessEqual:
        if (lhs > con.rhs + feas_tol) return false;
        break;
      case ConstraintSense::Equal:
        if (std::abs(lhs - con.rhs) > feas_tol) return false;
        break;
      case ConstraintSense::GreaterEqual:
        if (lhs < con.rhs - feas_tol) return false;
        break;
    }
  }
  return true;
}

void MilpModel::dump(std::ostream& os) const {
  os << (obj_sense_ == ObjectiveSense::Minimize ? "minimize" : "maximize") << "\n";
  const auto c = objective();
  for (int j = 0; j < num_variables(); ++j) {
    const auto& v = vars_[j];
    os << "var " << v.name << " " << (v.kind == VarKind::Integer ? "int" : "cont")
       << " [" << render(v.lower) << ", " << render(v.upper) << "] obj "
       << render(c[j]) << "\n";
  }
  for (const auto& con : cons_) {
    os << "con " << con.name << ":";
    for (const auto& t : con.terms)
      os << " " << render(t.coeff) << "*" << vars_[t.var].name;
    switch (con.sense) {
      case ConstraintSense::LessEqual: os << " <= "; break;
      case ConstraintSense::Equal: os << " == "; break;
      case ConstraintSense::GreaterEqual: os << " >= "; break;
    }
    os << render(con.rhs) << "\n";
  }
}

namespace {

// Dense minimize-orientation snapshot of a model; structural bounds are kept
// separate so branch-and-bound nodes can re-solve with tightened bounds.
struct StandardForm {
  int n = 0;  // structural columns
  int m = 0;  // rows
  std::vector<double> a;  // m x n row-major
  std::vector<ConstraintSense> sense;
  std::vector<double> rhs;
  std::vector<double> cost;  // minimize orientation
  bool maximize = false;
};

StandardForm make_standard_form(const MilpModel& model) {
  StandardForm sf;
  sf.n = model.num_variables();
  sf.m = static_cast<int>(model.constraints().size());
  sf.a.assign(static_cast<std::size_t>(sf.m) * sf.n, 0.0);
  sf.sense.resize(sf.m);
  sf.rhs.resize(sf.m);
  for (int i = 0; i < sf.m; ++i) {
    const auto& con = model.constraints()[i];
    for (const auto& t : con.terms)
      sf.a[static_cast<std::size_t>(i) * sf.n + t.var] += t.coeff;
    sf.sense[i] = con.sense;
    sf.rhs[i] = con.rhs;
  }
  sf.cost = model.objective();
  sf.maximize = model.objective_sense() == ObjectiveSense::Maximize;
  if (sf.maximize)
    for (auto& c : sf.cost) c = -c;
  return sf;
}

enum class ColState : unsigned char { Basic, AtLower, AtUpper, Free };

struct LpOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;  // structural values when Optimal
  double objective = 0.0; // minimize orientation
};

// Two-phase primal simplex over bounded variables, dense tableau.
// Column layout: [0,n) structural, [n,n+m) row slacks, [n+m,n+2m) phase-1
// artificials, plus one rhs column carried through every pivot.
class BoundedSimplex {
 public:
  BoundedSimplex(const StandardForm& sf, const SolverOptions& opts)
      : sf_(sf), opts_(opts) {}

  LpOutcome solve(std::span<const double> lb_struct,
                  std::span<const double> ub_struct) {
    const int n = sf_.n;
    const int m = sf_.m;
    ncols_ = n + 2 * m;
    width_ = ncols_ + 1;  // +1 rhs column
    rhs_col_ = ncols_;

    for (int j = 0; j < n; ++j)
      if (lb_struct[j] > ub_struct[j]) return {SolveStatus::Infeasible, {}, 0.0};

    tab_.assign(static_cast<std::size_t>(m) * width_, 0.0);
    lb_.assign(ncols_, 0.0);
    ub_.assign(ncols_, 0.0);
    val_.assign(ncols_, 0.0);
    state_.assign(ncols_, ColState::AtLower);
    d1_.assign(ncols_, 0.0);
    d2_.assign(ncols_, 0.0);
    basis_.assign(m, -1);
    row_of_.assign(ncols_, -1);
    basic_val_.assign(m, 0.0);

    for (int j = 0; j < n; ++j) {
      lb_[j] = lb_struct[j];
      ub_[j] = ub_struct[j];
    }
    double bscale = 1.0;
    for (int i = 0; i < m; ++i) {
      double* row = row_ptr(i);
      const double* arow = &sf_.a[static_cast<std::size_t>(i) * n];
      std::copy(arow, arow + n, row);
      row[n + i] = 1.0;  // slack
      row[rhs_col_] = sf_.rhs[i];
      bscale = std::max(bscale, std::abs(sf_.rhs[i]));
      const int s = n + i;
      switch (sf_.sense[i]) {
        case ConstraintSense::LessEqual:
          lb_[s] = 0.0;
          ub_[s] = kInf;
          break;
        case ConstraintSense::Equal:
          lb_[s] = 0.0;
          ub_[s] = 0.0;
          break;
        case ConstraintSense::GreaterEqual:
          lb_[s] = -kInf;
          ub_[s] = 0.0;
          break;
      }
    }
    for (int j = n + m; j < ncols_; ++j) {
      lb_[j] = 0.0;
      ub_[j] = kInf;
    }

    // Nonbasic starting point: every real column at its nearest finite bound.
    for (int j = 0; j < n + m; ++j) {
      if (std::isfinite(lb_[j])) {
        state_[j] = ColState::AtLower;
        val_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        state_[j] = ColState::AtUpper;
        val_[j] = ub_[j];
      } else {
        state_[j] = ColState::Free;
        val_[j] = 0.0;
      }
    }

    // Residuals decide artificial signs; artificials start basic.
    for (int i = 0; i < m; ++i) {
      double* row = row_ptr(i);
      double r = row[rhs_col_];
      for (int j = 0; j < n + m; ++j)
        if (val_[j] != 0.0) r -= row[j] * val_[j];
      if (r < 0.0) {
        for (int j = 0; j <= rhs_col_; ++j) row[j] = -row[j];
        r = -r;
      }
      row[n + m + i] = 1.0;
      basis_[i] = n + m + i;
      row_of_[n + m + i] = i;
      state_[n + m + i] = ColState::Basic;
      basic_val_[i] = r;
    }

    // Reduced costs: phase 1 cost is 1 on artificials, phase 2 the real cost.
    for (int j = 0; j < ncols_; ++j) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += tab_[static_cast<std::size_t>(i) * width_ + j];
      d1_[j] = (j >= n + m ? 1.0 : 0.0) - s;
    }
    for (int j = 0; j < n; ++j) d2_[j] = j < static_cast<int>(sf_.cost.size()) ? sf_.cost[j] : 0.0;

    feas_tol_ = opts_.feasibility_tol * (1.0 + bscale);
    bland_ = false;
    degen_run_ = 0;
    const std::int64_t iter_limit =
        50'000 + 200LL * (static_cast<std::int64_t>(n) + m);

    phase_one_ = true;
    for (std::int64_t iter = 0;; ++iter) {
      if (iter > iter_limit)
        throw NumericalError("simplex iteration limit exceeded");
      const int q = price();
      if (q < 0) {
        if (phase_one_) {
          double infeas = 0.0;
          for (int i = 0; i < m; ++i)
            if (basis_[i] >= n + m) infeas += std::abs(basic_val_[i]);
          if (infeas > feas_tol_) return {SolveStatus::Infeasible, {}, 0.0};
          finish_phase_one();
          phase_one_ = false;
          continue;
        }
        return extract();
      }
      if (!step(q)) {
        // Unbounded ray. Cannot happen in phase 1: its objective is bounded
        // below by zero along any ray.
        return {SolveStatus::Unbounded, {}, 0.0};
      }
    }
  }

 private:
  double* row_ptr(int i) { return &tab_[static_cast<std::size_t>(i) * width_]; }

  bool fixed(int j) const { return lb_[j] == ub_[j] && std::isfinite(lb_[j]); }

  // Entering column, or -1 at optimality for the current phase.
  int price() const {
    const std::vector<double>& d = phase_one_ ? d1_ : d2_;
    const double tol = 1e-9;
    int best = -1;
    double best_mag = tol;
    for (int j = 0; j < ncols_; ++j) {
      if (state_[j] == ColState::Basic || fixed(j)) continue;
      if (!phase_one_ && j >= sf_.n + sf_.m) continue;  // retired artificials
      double mag = 0.0;
      if ((state_[j] == ColState::AtLower || state_[j] == ColState::Free) &&
          d[j] < -tol)
        mag = -d[j];
      else if ((state_[j] == ColState::AtUpper || state_[j] == ColState::Free) &&
               d[j] > tol)
        mag = d[j];
      else
        continue;
      if (bland_) return j;  // lowest eligible index
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    return best;
  }

  // One ratio-test step for entering column q. Returns false on an unbounded
  // ray, true otherwise (pivot or bound flip applied).
  bool step(int q) {
    const int m = sf_.m;
    const std::vector<double>& d = phase_one_ ? d1_ : d2_;
    const double dir = d[q] < 0.0 ? 1.0 : -1.0;
    const double pivot_tol = 1e-9;

    double theta = kInf;  // entering variable's own range
    if (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) theta = ub_[q] - lb_[q];

    // Pass 1: tightest blocking ratio over basic rows.
    double theta_rows = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = tab_[static_cast<std::size_t>(i) * width_ + q];
      if (std::abs(a) <= pivot_tol) continue;
      const double rate = -dir * a;  // d(basic_i)/d(theta)
      const int bj = basis_[i];
      double t;
      if (rate > 0.0) {
        if (!std::isfinite(ub_[bj])) continue;
        t = (ub_[bj] - basic_val_[i]) / rate;
      } else {
        if (!std::isfinite(lb_[bj])) continue;
        t = (lb_[bj] - basic_val_[i]) / rate;
      }
      if (t < 0.0) t = 0.0;  // degenerate overshoot from roundoff
      if (t < theta_rows) theta_rows = t;
    }

    const double theta_min = std::min(theta, theta_rows);
    if (!std::isfinite(theta_min)) return false;  // unbounded

    if (theta < theta_rows - 1e-12 ||
        (theta <= theta_rows && theta_rows == kInf)) {
      // Bound flip: q moves across its whole range, basis unchanged.
      apply_motion(q, dir, theta);
      val_[q] = dir > 0.0 ? ub_[q] : lb_[q];
      state_[q] = dir > 0.0 ? ColState::AtUpper : ColState::AtLower;
      note_progress(theta);
      return true;
    }

    // Pass 2: among rows within tolerance of the minimum ratio pick the
    // stablest pivot (largest magnitude), ties by lowest row; under Bland's
    // rule pick the lowest basis variable id instead.
    const double tie = theta_min + 1e-9;
    int leave = -1;
    double best_mag = 0.0;
    int best_id = std::numeric_limits<int>::max();
    for (int i = 0; i < m; ++i) {
      const double a = tab_[static_cast<std::size_t>(i) * width_ + q];
      if (std::abs(a) <= pivot_tol) continue;
      const double rate = -dir * a;
      const int bj = basis_[i];
      double t;
      if (rate > 0.0) {
        if (!std::isfinite(ub_[bj])) continue;
        t = (ub_[bj] - basic_val_[i]) / rate;
      } else {
        if (!std::isfinite(lb_[bj])) continue;
        t = (lb_[bj] - basic_val_[i]) / rate;
      }
      if (t < 0.0) t = 0.0;
      if (t > tie) continue;
      if (bland_) {
        if (bj < best_id) {
          best_id = bj;
          leave = i;
        }
      } else if (std::abs(a) > best_mag) {
        best_mag = std::abs(a);
        leave = i;
      }
    }
    if (leave < 0) {
      // Numerical corner: all candidate pivots under tolerance. Treat the
      // motion as a bound flip if possible, otherwise fail loudly.
      if (std::isfinite(theta)) {
        apply_motion(q, dir, theta);
        val_[q] = dir > 0.0 ? ub_[q] : lb_[q];
        state_[q] = dir > 0.0 ? ColState::AtUpper : ColState::AtLower;
        return true;
      }
      throw NumericalError("simplex ratio test found no usable pivot");
    }

    const double a_leave = tab_[static_cast<std::size_t>(leave) * width_ + q];
    const double rate_leave = -dir * a_leave;
    const double theta_used = theta_min;

    apply_motion(q, dir, theta_used);
    const double enter_val =
        (state_[q] == ColState::Free ? 0.0 : val_[q]) + dir * theta_used;

    const int lj = basis_[leave];
    if (rate_leave > 0.0) {
      state_[lj] = ColState::AtUpper;
      val_[lj] = ub_[lj];
    } else {
      state_[lj] = ColState::AtLower;
      val_[lj] = lb_[lj];
    }
    row_of_[lj] = -1;

    pivot(leave, q);
    basis_[leave] = q;
    row_of_[q] = leave;
    state_[q] = ColState::Basic;
    basic_val_[leave] = enter_val;
    note_progress(theta_used);
    return true;
  }

  void apply_motion(int q, double dir, double theta) {
    if (theta == 0.0) return;
    for (int i = 0; i < sf_.m; ++i) {
      const double a = tab_[static_cast<std::size_t>(i) * width_ + q];
      if (a != 0.0) basic_val_[i] -= dir * theta * a;
    }
  }

  void note_progress(double theta) {
    if (theta > 1e-10) {
      degen_run_ = 0;
    } else if (++degen_run_ > 100) {
      bland_ = true;  // stays on for the rest of this solve
    }
  }

  void pivot(int r, int q) {
    double* prow = row_ptr(r);
    const double piv = prow[q];
    for (int j = 0; j <= rhs_col_; ++j) prow[j] /= piv;
    prow[q] = 1.0;
    for (int i = 0; i < sf_.m; ++i) {
      if (i == r) continue;
      double* row = row_ptr(i);
      const double f = row[q];
      if (f == 0.0) continue;
      for (int j = 0; j <= rhs_col_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    eliminate_cost_row(d1_, prow, q);
    eliminate_cost_row(d2_, prow, q);
  }

  void eliminate_cost_row(std::vector<double>& d, const double* prow, int q) {
    const double f = d[q];
    if (f == 0.0) return;
    for (int j = 0; j < ncols_; ++j) d[j] -= f * prow[j];
    d[q] = 0.0;
  }

  void finish_phase_one() {
    const int n = sf_.n;
    const int m = sf_.m;
    // Pivot artificials out of the basis where a real pivot exists; redundant
    // rows keep their artificial, pinned to zero.
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < n + m) continue;
      double* row = row_ptr(i);
      int q = -1;
      for (int j = 0; j < n + m; ++j) {
        if (state_[j] == ColState::Basic || fixed(j)) continue;
        if (std::abs(row[j]) > 1e-7) {
          q = j;
          break;
        }
      }
      if (q < 0) continue;
      const int lj = basis_[i];
      state_[lj] = ColState::AtLower;
      val_[lj] = 0.0;
      row_of_[lj] = -1;
      const double enter_val = state_[q] == ColState::Free ? 0.0 : val_[q];
      pivot(i, q);
      basis_[i] = q;
      row_of_[q] = i;
      state_[q] = ColState::Basic;
      basic_val_[i] = enter_val;
    }
    for (int j = n + m; j < ncols_; ++j) {
      lb_[j] = 0.0;
      ub_[j] = 0.0;
      if (state_[j] != ColState::Basic) val_[j] = 0.0;
    }
    refresh_basic_values();
  }

  void refresh_basic_values() {
    for (int i = 0; i < sf_.m; ++i) {
      const double* row = row_ptr(i);
      double v = row[rhs_col_];
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == ColState::Basic || val_[j] == 0.0) continue;
        v -= row[j] * val_[j];
      }
      basic_val_[i] = v;
    }
  }

  LpOutcome extract() {
    refresh_basic_values();
    LpOutcome out;
    out.status = SolveStatus::Optimal;
    out.x.resize(sf_.n);
    for (int j = 0; j < sf_.n; ++j) {
      double v = state_[j] == ColState::Basic ? basic_val_[row_of_[j]] : val_[j];
      if (std::isfinite(lb_[j])) v = std::max(v, lb_[j]);
      if (std::isfinite(ub_[j])) v = std::min(v, ub_[j]);
      out.x[j] = v;
    }
    double obj = 0.0;
    for (int j = 0; j < sf_.n && j < static_cast<int>(sf_.cost.size()); ++j)
      obj += sf_.cost[j] * out.x[j];
    out.objective = obj;
    return out;
  }

  const StandardForm& sf_;
  const SolverOptions& opts_;
  int ncols_ = 0, width_ = 0, rhs_col_ = 0;
  bool phase_one_ = true;
  bool bland_ = false;
  int degen_run_ = 0;
  double feas_tol_ = 1e-7;
  std::vector<double> tab_, lb_, ub_, val_, d1_, d2_, basic_val_;
  std::vector<int> basis_, row_of_;
  std::vector<ColState> state_;
};

struct BnbNode {
  double bound = -kInf;  // parent relaxation objective (minimize orientation)
  std::int64_t id = 0;
  std::vector<double> lb, ub;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

MilpSolution finalize(const StandardForm& sf, MilpSolution sol) {
  if (sf.maximize) {
    sol.objective = -sol.objective;
    sol.best_bound = -sol.best_bound;
  }
  return sol;
}

}  // namespace

MilpSolution solve_lp(const MilpModel& model, const SolverOptions& opts) {
  model.validate();
  const StandardForm sf = make_standard_form(model);
  std::vector<double> lb(sf.n), ub(sf.n);
  for (int j = 0; j < sf.n; ++j) {
    lb[j] = model.variables()[j].lower;
    ub[j] = model.variables()[j].upper;
  }
  BoundedSimplex splx(sf, opts);
  const LpOutcome lp = splx.solve(lb, ub);
  MilpSolution sol;
  sol.status = lp.status;
  if (lp.status == SolveStatus::Optimal) {
    sol.has_incumbent = true;
    sol.values = lp.x;
    sol.objective = lp.objective;
    sol.best_bound = lp.objective;
  }
  return finalize(sf, sol);
}

MilpSolution solve_milp(const MilpModel& model, const SolverOptions& opts) {
  model.validate();
  const StandardForm sf = make_standard_form(model);
  const auto& vars = model.variables();

  std::vector<int> int_vars;
  for (int j = 0; j < sf.n; ++j)
    if (vars[j].kind == VarKind::Integer) int_vars.push_back(j);

  BnbNode root;
  root.lb.resize(sf.n);
  root.ub.resize(sf.n);
  for (int j = 0; j < sf.n; ++j) {
    root.lb[j] = vars[j].lower;
    root.ub[j] = vars[j].upper;
  }
  for (int j : int_vars) {
    root.lb[j] = std::ceil(root.lb[j] - opts.integrality_tol);
    root.ub[j] = std::floor(root.ub[j] + opts.integrality_tol);
    if (root.lb[j] > root.ub[j])
      return finalize(sf, MilpSolution{SolveStatus::Infeasible});
  }

  BoundedSimplex splx(sf, opts);

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  open.push(std::move(root));
  std::int64_t next_id = 1;

  MilpSolution sol;
  sol.nodes = 0;
  bool has_inc = false;
  std::vector<double> inc_x;
  double inc_obj = kInf;
  double cut_bound = kInf;  // prune threshold, updated with the incumbent

  auto gap_slack = [&](double obj) {
    return 0.5 * opts.relative_gap * std::max(1.0, std::abs(obj));
  };
  auto accept_incumbent = [&](std::vector<double> x) {
    for (int j : int_vars) x[j] = std::round(x[j]);
    double obj = 0.0;
    for (int j = 0; j < sf.n && j < static_cast<int>(sf.cost.size()); ++j)
      obj += sf.cost[j] * x[j];
    if (!has_inc || obj < inc_obj) {
      has_inc = true;
      inc_obj = obj;
      inc_x = std::move(x);
      cut_bound = inc_obj - gap_slack(inc_obj);
    }
  };
  // Fix integers to a rounding of the relaxation point, re-solve the
  // continuous rest; any optimal outcome is a feasible incumbent candidate.
  // Nearest rounding suits near-integral points, ceiling suits covering
  // structures where rounding down loses feasibility.
  auto rounding_heuristic = [&](const std::vector<double>& x,
                                const BnbNode& node) {
    std::vector<double> lo(node.lb), hi(node.ub);
    for (int round_up = 0; round_up < 2; ++round_up) {
      for (int j : int_vars) {
        const double r = round_up ? std::ceil(x[j] - opts.integrality_tol)
                                  : std::round(x[j]);
        const double v = std::clamp(r, node.lb[j], node.ub[j]);
        lo[j] = v;
        hi[j] = v;
      }
      const LpOutcome fixed = splx.solve(lo, hi);
      if (fixed.status == SolveStatus::Optimal) accept_incumbent(fixed.x);
      for (int j : int_vars) {
        lo[j] = node.lb[j];
        hi[j] = node.ub[j];
      }
    }
  };
  // Dive along the relaxation: repeatedly tighten the most-nearly-integral
  // fractional variable toward its rounding and re-solve. On models with
  // large equal-cost optimal faces this walks to an integral vertex the
  // plain roundings miss. Dead ends back off in the opposite direction a
  // few times before giving up.
  auto dive_heuristic = [&](std::vector<double> x, const BnbNode& node) {
    std::vector<double> lo(node.lb), hi(node.ub);
    const int max_iter = 2 * static_cast<int>(int_vars.size()) + 16;
    int backoffs = 4;
    for (int it = 0; it < max_iter; ++it) {
      int pick = -1;
      double pick_dist = 1.0;
      for (int j : int_vars) {
        const double f = x[j] - std::floor(x[j]);
        const double dist = std::min(f, 1.0 - f);
        if (dist > opts.integrality_tol && dist < pick_dist) {
          pick_dist = dist;
          pick = j;
        }
      }
      if (pick < 0) {
        if (std::getenv("MICROGRID_MILP_TRACE")) {
          double o = 0.0;
          for (int j = 0; j < sf.n && j < (int)sf.cost.size(); ++j) o += sf.cost[j] * x[j];
          std::fprintf(stderr, "[dive] integral after %d iters, obj=%.9f\n", it, o);
        }
        accept_incumbent(std::move(x));
        return;
      }
      const double frac = x[pick] - std::floor(x[pick]);
      const bool down = frac < 0.5;
      const double save_lo = lo[pick];
      const double save_hi = hi[pick];
      if (down)
        hi[pick] = std::floor(x[pick]);
      else
        lo[pick] = std::ceil(x[pick]);
      LpOutcome lp = splx.solve(lo, hi);
      if (lp.status != SolveStatus::Optimal) {
        if (--backoffs < 0) return;
        lo[pick] = save_lo;
        hi[pick] = save_hi;
        if (down)
          lo[pick] = std::ceil(x[pick]);
        else
          hi[pick] = std::floor(x[pick]);
        lp = splx.solve(lo, hi);
        if (lp.status != SolveStatus::Optimal) return;
      }
      x = lp.x;
    }
  };

  bool hit_node_limit = false;
  double open_bound_floor = kInf;  // best bound left unexplored at the limit

  const bool trace = std::getenv("MICROGRID_MILP_TRACE") != nullptr;
  while (!open.empty()) {
    if (trace && sol.nodes % 200 == 0)
      std::fprintf(stderr, "[bnb] nodes=%lld open=%zu inc=%d obj=%.9f top_bound=%.9f\n",
                   (long long)sol.nodes, open.size(), (int)has_inc, inc_obj,
                   open.top().bound);
    BnbNode node = open.top();
    open.pop();
    if (has_inc && node.bound >= cut_bound) continue;
    if (sol.nodes >= opts.node_limit) {
      hit_node_limit = true;
      open_bound_floor = node.bound;
      break;
    }

    const LpOutcome lp = splx.solve(node.lb, node.ub);
    ++sol.nodes;
    if (lp.status == SolveStatus::Infeasible) continue;
    if (lp.status == SolveStatus::Unbounded)
      return finalize(sf, MilpSolution{SolveStatus::Unbounded, false, {}, 0.0,
                                       -kInf, sol.nodes});
    if (has_inc && lp.objective >= cut_bound) continue;

    int frac_var = -1;
    double frac_score = opts.integrality_tol;
    for (int j : int_vars) {
      const double f = lp.x[j] - std::floor(lp.x[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > frac_score) {
        frac_score = dist;
        frac_var = j;
      }
    }
    if (frac_var < 0) {
      accept_incumbent(lp.x);
      continue;
    }

    if (opts.heuristic_period > 0 &&
        (sol.nodes == 1 || sol.nodes % opts.heuristic_period == 0)) {
      rounding_heuristic(lp.x, node);
      if (sol.nodes == 1 ||
          sol.nodes % (16LL * opts.heuristic_period) == 0)
        dive_heuristic(lp.x, node);
    }

    const double xv = lp.x[frac_var];
    BnbNode down;
    down.bound = lp.objective;
    down.id = next_id++;
    down.lb = node.lb;
    down.ub = node.ub;
    down.ub[frac_var] = std::floor(xv);
    BnbNode up;
    up.bound = lp.objective;
    up.id = next_id++;
    up.lb = std::move(node.lb);
    up.ub = std::move(node.ub);
    up.lb[frac_var] = std::ceil(xv);
    if (down.lb[frac_var] <= down.ub[frac_var]) open.push(std::move(down));
    if (up.lb[frac_var] <= up.ub[frac_var]) open.push(std::move(up));
  }

  if (hit_node_limit) {
    sol.status = SolveStatus::NodeLimit;
    double bound = open_bound_floor;
    if (!open.empty()) bound = std::min(bound, open.top().bound);
    sol.best_bound = has_inc ? std::min(bound, inc_obj) : bound;
  } else if (has_inc) {
    sol.status = SolveStatus::Optimal;
    sol.best_bound = inc_obj;
  } else {
    sol.status = SolveStatus::Infeasible;
    return finalize(sf, sol);
  }
  if (has_inc) {
    sol.has_incumbent = true;
    sol.values = std::move(inc_x);
    sol.objective = inc_obj;
  }
  return finalize(sf, sol);
}

}  // namespace microgrid
