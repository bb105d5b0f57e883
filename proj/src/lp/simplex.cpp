#include "wdro/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "basis_factor.hpp"
#include "wdro/errors.hpp"

namespace wdro::lp {

const char* to_string(Status status) noexcept {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

enum class VarState : unsigned char { kBasic, kLower, kUpper, kFree };

// Internal form: [A | -I] (x, r) = 0 with box bounds on x and on the row
// activities r. Logical variable n + i is the activity of row i.
class Simplex {
 public:
  Simplex(const LpModel& model, const SolverOptions& options)
      : model_(model),
        opt_(options),
        m_(model.num_rows()),
        n_(model.num_cols()),
        total_(m_ + n_),
        factor_(model) {
    lo_.resize(total_);
    up_.resize(total_);
    cost_.assign(total_, 0.0);
    x_.assign(total_, 0.0);
    state_.resize(total_);
    pos_.assign(total_, kNone);
    head_.resize(m_);

    const double sign = model.sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
    double cmax = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = model.lower()[j];
      up_[j] = model.upper()[j];
      cost_[j] = sign * model.cost()[j];
      cmax = std::max(cmax, std::abs(cost_[j]));
      if (std::isfinite(lo_[j])) {
        x_[j] = lo_[j];
        state_[j] = VarState::kLower;
      } else if (std::isfinite(up_[j])) {
        x_[j] = up_[j];
        state_[j] = VarState::kUpper;
      } else {
        state_[j] = VarState::kFree;
      }
    }
    dual_tol_ = opt_.opt_tol * (cmax > 0.0 ? cmax : 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t k = n_ + i;
      const double b = model.rhs()[i];
      switch (model.row_sense()[i]) {
        case RowSense::kLessEqual:
          lo_[k] = -kInf;
          up_[k] = b;
          break;
        case RowSense::kGreaterEqual:
          lo_[k] = b;
          up_[k] = kInf;
          break;
        case RowSense::kEqual:
          lo_[k] = b;
          up_[k] = b;
          break;
      }
      state_[k] = VarState::kBasic;
      head_[i] = k;
      pos_[k] = i;
    }
  }

  // Installs a previous basis; returns false (leaving the slack basis) when
  // it does not fit the model.
  bool warm_start(const std::vector<BasisStatus>& start);

  LpSolution run();

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  enum class Step { kOptimal, kUnbounded, kContinue };

  double col_dot(std::size_t j, const std::vector<double>& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (std::size_t k = model_.col_start(j); k < model_.col_start(j + 1); ++k) {
      s += model_.values()[k] * y[model_.row_index()[k]];
    }
    return s;
  }

  void load_column(std::size_t j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j >= n_) {
      out[j - n_] = -1.0;
      return;
    }
    for (std::size_t k = model_.col_start(j); k < model_.col_start(j + 1); ++k) {
      out[model_.row_index()[k]] = model_.values()[k];
    }
  }

  void slack_basis() {
    for (std::size_t j = 0; j < n_; ++j) set_nonbasic(j, BasisStatus::kAtLower);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t k = n_ + i;
      state_[k] = VarState::kBasic;
      head_[i] = k;
      pos_[k] = i;
    }
  }

  void set_nonbasic(std::size_t j, BasisStatus want) {
    pos_[j] = kNone;
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (want == BasisStatus::kAtUpper && has_up) {
      state_[j] = VarState::kUpper;
      x_[j] = up_[j];
    } else if (has_lo) {
      state_[j] = VarState::kLower;
      x_[j] = lo_[j];
    } else if (has_up) {
      state_[j] = VarState::kUpper;
      x_[j] = up_[j];
    } else {
      state_[j] = VarState::kFree;
      x_[j] = 0.0;
    }
  }

  std::vector<BasisStatus> export_basis() const {
    std::vector<BasisStatus> out(total_);
    for (std::size_t j = 0; j < total_; ++j) {
      switch (state_[j]) {
        case VarState::kBasic:
          out[j] = BasisStatus::kBasic;
          break;
        case VarState::kLower:
          out[j] = BasisStatus::kAtLower;
          break;
        case VarState::kUpper:
          out[j] = BasisStatus::kAtUpper;
          break;
        case VarState::kFree:
          out[j] = BasisStatus::kFree;
          break;
      }
    }
    return out;
  }

  void refactor() {
    if (!factor_.factorize(head_)) {
      if (++repairs_ > 50) throw NumericalFailure("simplex basis became singular");
      for (std::size_t j : factor_.repair(head_)) set_nonbasic(j, BasisStatus::kAtLower);
      for (std::size_t p = 0; p < m_; ++p) {
        state_[head_[p]] = VarState::kBasic;
        pos_[head_[p]] = p;
      }
      if (!factor_.factorize(head_)) throw NumericalFailure("simplex basis became singular");
      repaired_ = true;
    }
    recompute_basic();
  }

  void recompute_basic() {
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] += x_[j];
        continue;
      }
      for (std::size_t k = model_.col_start(j); k < model_.col_start(j + 1);
           ++k) {
        rhs[model_.row_index()[k]] -= model_.values()[k] * x_[j];
      }
    }
    factor_.ftran(rhs);
    for (std::size_t p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
  }

  double violation(std::size_t k) const {
    if (x_[k] < lo_[k]) return lo_[k] - x_[k];
    if (x_[k] > up_[k]) return x_[k] - up_[k];
    return 0.0;
  }

  bool primal_feasible() const {
    for (std::size_t p = 0; p < m_; ++p) {
      if (violation(head_[p]) > opt_.feas_tol) return false;
    }
    return true;
  }

  Step iterate(bool phase1);

  const LpModel& model_;
  const SolverOptions& opt_;
  std::size_t m_, n_, total_;
  detail::BasisFactor factor_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> pos_, head_;
  double dual_tol_ = 0.0;

  std::vector<double> y_;
  std::vector<double> alpha_;
  std::size_t iterations_ = 0;
  int repairs_ = 0;
  bool repaired_ = false;
  int phase1_resets_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
  std::size_t ray_entering_ = kNone;
  double ray_dir_ = 0.0;
};

bool Simplex::warm_start(const std::vector<BasisStatus>& start) {
  if (start.size() < n_ || start.size() > total_) return false;
  std::size_t basics = 0;
  for (std::size_t j = 0; j < total_; ++j) {
    if (j >= start.size() || start[j] == BasisStatus::kBasic) ++basics;
  }
  if (basics != m_) return false;
  std::size_t p = 0;
  for (std::size_t j = 0; j < total_; ++j) {
    if (j >= start.size() || start[j] == BasisStatus::kBasic) {
      state_[j] = VarState::kBasic;
      head_[p] = j;
      pos_[j] = p++;
    } else {
      set_nonbasic(j, start[j]);
    }
  }
  if (!factor_.factorize(head_)) {
    slack_basis();
    return false;
  }
  return true;
}

Simplex::Step Simplex::iterate(bool phase1) {
  const double tol = opt_.feas_tol;
  // A repaired basis may have lost feasibility; leave phase 2 so the caller
  // returns to phase 1.
  if (repaired_) {
    repaired_ = false;
    if (!phase1 && !primal_feasible()) return Step::kOptimal;
  }
  y_.assign(m_, 0.0);
  bool any_cost = !phase1;
  for (std::size_t p = 0; p < m_; ++p) {
    const std::size_t k = head_[p];
    if (phase1) {
      if (x_[k] < lo_[k] - tol) {
        y_[p] = -1.0;
        any_cost = true;
      } else if (x_[k] > up_[k] + tol) {
        y_[p] = 1.0;
        any_cost = true;
      }
    } else {
      y_[p] = cost_[k];
    }
  }
  if (!any_cost) return Step::kOptimal;
  factor_.btran(y_);

  const double dtol = phase1 ? opt_.opt_tol : dual_tol_;
  std::size_t q = kNone;
  double best = 0.0;
  double dir = 0.0;
  for (std::size_t j = 0; j < total_; ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || lo_[j] == up_[j]) continue;
    const double d = (phase1 ? 0.0 : cost_[j]) - col_dot(j, y_);
    double this_dir = 0.0;
    if (s == VarState::kLower) {
      if (d < -dtol) this_dir = 1.0;
    } else if (s == VarState::kUpper) {
      if (d > dtol) this_dir = -1.0;
    } else if (std::abs(d) > dtol) {
      this_dir = d < 0.0 ? 1.0 : -1.0;
    }
    if (this_dir == 0.0) continue;
    if (bland_) {
      q = j;
      dir = this_dir;
      break;
    }
    if (std::abs(d) > best) {
      best = std::abs(d);
      q = j;
      dir = this_dir;
    }
  }
  if (q == kNone) return Step::kOptimal;

  alpha_.resize(m_);
  load_column(q, alpha_);
  factor_.ftran(alpha_);

  auto effective_bounds = [&](std::size_t k, double& lo, double& up) {
    lo = lo_[k];
    up = up_[k];
    if (!phase1) return;
    if (x_[k] < lo_[k] - tol) {
      lo = -kInf;
      up = lo_[k];
    } else if (x_[k] > up_[k] + tol) {
      lo = up_[k];
      up = kInf;
    }
  };

  double alpha_max = 0.0;
  for (double a : alpha_) alpha_max = std::max(alpha_max, std::abs(a));
  const double piv_tol = std::max(opt_.pivot_tol, 1e-7 * alpha_max);

  // Harris pass 1: largest step that keeps every basic within tolerance.
  double theta_max = kInf;
  for (std::size_t p = 0; p < m_; ++p) {
    if (std::abs(alpha_[p]) <= piv_tol) continue;
    const std::size_t k = head_[p];
    const double delta = -dir * alpha_[p];
    double lo, up;
    effective_bounds(k, lo, up);
    if (delta < 0.0 && std::isfinite(lo)) {
      theta_max = std::min(theta_max, (x_[k] - lo + tol) / -delta);
    } else if (delta > 0.0 && std::isfinite(up)) {
      theta_max = std::min(theta_max, (up - x_[k] + tol) / delta);
    }
  }

  // Pass 2: among steps within theta_max prefer the largest pivot.
  std::size_t leave = kNone;
  double step = kInf;
  double leave_value = 0.0;
  double best_pivot = 0.0;
  for (std::size_t p = 0; p < m_; ++p) {
    if (std::abs(alpha_[p]) <= piv_tol) continue;
    const std::size_t k = head_[p];
    const double delta = -dir * alpha_[p];
    double lo, up;
    effective_bounds(k, lo, up);
    double ratio;
    double bound;
    if (delta < 0.0 && std::isfinite(lo)) {
      ratio = std::max(0.0, (x_[k] - lo) / -delta);
      bound = lo;
    } else if (delta > 0.0 && std::isfinite(up)) {
      ratio = std::max(0.0, (up - x_[k]) / delta);
      bound = up;
    } else {
      continue;
    }
    bool take;
    if (bland_) {
      take = leave == kNone || ratio < step ||
             (ratio == step && k < head_[leave]);
    } else {
      take = ratio <= theta_max && std::abs(alpha_[p]) > best_pivot;
    }
    if (take) {
      leave = p;
      step = ratio;
      leave_value = bound;
      best_pivot = std::abs(alpha_[p]);
    }
  }

  const double range = up_[q] - lo_[q];
  const bool flip = std::isfinite(range) && (leave == kNone || range <= step);
  if (leave == kNone && !flip) {
    if (phase1) {
      // Stale or near-singular factors can produce a spurious phase-1
      // direction; refactor (repairing if needed) and price again.
      if (++phase1_resets_ > 3) throw NumericalFailure("unbounded phase-1 direction");
      refactor();
      return Step::kContinue;
    }
    ray_entering_ = q;
    ray_dir_ = dir;
    return Step::kUnbounded;
  }
  if (flip) step = range;
  phase1_resets_ = 0;

  if (step <= 1e-12) {
    if (++degenerate_run_ > opt_.stall_limit) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }

  x_[q] += dir * step;
  for (std::size_t p = 0; p < m_; ++p) {
    if (alpha_[p] != 0.0) x_[head_[p]] -= dir * alpha_[p] * step;
  }

  if (flip) {
    if (dir > 0.0) {
      x_[q] = up_[q];
      state_[q] = VarState::kUpper;
    } else {
      x_[q] = lo_[q];
      state_[q] = VarState::kLower;
    }
  } else {
    const std::size_t k = head_[leave];
    x_[k] = leave_value;
    state_[k] = leave_value == lo_[k] ? VarState::kLower : VarState::kUpper;
    pos_[k] = kNone;
    head_[leave] = q;
    pos_[q] = leave;
    state_[q] = VarState::kBasic;
    factor_.push_eta(leave, alpha_);
    if (factor_.num_etas() >= static_cast<std::size_t>(opt_.refactor_interval)) {
      refactor();
    }
  }
  ++iterations_;
  if (iterations_ > opt_.max_iterations) {
    throw NumericalFailure("simplex iteration budget exhausted");
  }
  return Step::kContinue;
}

LpSolution Simplex::run() {
  LpSolution sol;
  refactor();

  for (int attempt = 0;; ++attempt) {
    if (attempt > 20) throw NumericalFailure("simplex failed to settle");
    bland_ = false;
    degenerate_run_ = 0;
    Step step;
    while ((step = iterate(true)) == Step::kContinue) {
    }
    refactor();
    if (!primal_feasible()) {
      // Re-run pricing on the fresh factorization before declaring failure.
      if (iterate(true) != Step::kOptimal) continue;
      sol.status = Status::kInfeasible;
      sol.dual_ray = y_;
      if (farkas_margin(model_, sol.dual_ray) >= 0.0) {
        for (double& v : sol.dual_ray) v = -v;
        if (farkas_margin(model_, sol.dual_ray) >= 0.0) {
          for (double& v : sol.dual_ray) v = -v;
        }
      }
      sol.iterations = iterations_;
      sol.basis = export_basis();
      return sol;
    }

    bland_ = false;
    degenerate_run_ = 0;
    while ((step = iterate(false)) == Step::kContinue) {
    }
    if (step == Step::kUnbounded) {
      if (!primal_feasible()) continue;
      sol.status = Status::kUnbounded;
      sol.primal_ray.assign(n_, 0.0);
      if (ray_entering_ < n_) sol.primal_ray[ray_entering_] = ray_dir_;
      for (std::size_t p = 0; p < m_; ++p) {
        if (head_[p] < n_) sol.primal_ray[head_[p]] = -ray_dir_ * alpha_[p];
      }
      sol.primal.assign(x_.begin(), x_.begin() + static_cast<long>(n_));
      sol.iterations = iterations_;
      sol.basis = export_basis();
      return sol;
    }
    refactor();
    if (!primal_feasible()) continue;
    if (iterate(false) != Step::kOptimal) continue;
    break;
  }

  sol.status = Status::kOptimal;
  sol.primal.assign(x_.begin(), x_.begin() + static_cast<long>(n_));
  // Snap nonbasic structurals exactly to their bounds and basics into the box.
  for (std::size_t j = 0; j < n_; ++j) {
    sol.primal[j] = std::clamp(sol.primal[j], lo_[j], up_[j]);
  }
  sol.objective = model_.objective_value(sol.primal);

  // y_ holds B^{-T} c_B from the final optimality check.
  const double sign = model_.sense() == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  sol.dual.resize(m_);
  for (std::size_t i = 0; i < m_; ++i) sol.dual[i] = sign * y_[i];
  sol.reduced_cost.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    sol.reduced_cost[j] = model_.cost()[j] - col_dot(j, sol.dual);
  }
  sol.iterations = iterations_;
  sol.basis = export_basis();
  return sol;
}

}  // namespace

LpSolution solve_lp(const LpModel& model, const SolverOptions& options) {
  if (model.num_rows() > options.max_rows ||
      model.num_cols() > options.max_cols) {
    throw SizeExceeded("LP with " + std::to_string(model.num_rows()) +
                       " rows and " + std::to_string(model.num_cols()) +
                       " columns exceeds the solver envelope");
  }
  Simplex simplex(model, options);
  return simplex.run();
}

LpSolution solve_lp(const LpModel& model, const SolverOptions& options,
                    const std::vector<BasisStatus>& start) {
  if (model.num_rows() > options.max_rows ||
      model.num_cols() > options.max_cols) {
    throw SizeExceeded("LP with " + std::to_string(model.num_rows()) +
                       " rows and " + std::to_string(model.num_cols()) +
                       " columns exceeds the solver envelope");
  }
  Simplex simplex(model, options);
  simplex.warm_start(start);
  return simplex.run();
}

double farkas_margin(const LpModel& model, const std::vector<double>& y) {
  double margin = 0.0;
  for (std::size_t j = 0; j < model.num_cols(); ++j) {
    double v = 0.0;
    for (std::size_t k = model.col_start(j); k < model.col_start(j + 1); ++k) {
      v += model.values()[k] * y[model.row_index()[k]];
    }
    if (v > 0.0) {
      margin += v * model.upper()[j];
    } else if (v < 0.0) {
      margin += v * model.lower()[j];
    }
  }
  for (std::size_t i = 0; i < model.num_rows(); ++i) {
    // maximize -y_i r_i over the activity box of row i.
    const double b = model.rhs()[i];
    const double v = -y[i];
    switch (model.row_sense()[i]) {
      case RowSense::kLessEqual:
        margin += v < 0.0 ? kInf : v * b;
        break;
      case RowSense::kGreaterEqual:
        margin += v > 0.0 ? kInf : v * b;
        break;
      case RowSense::kEqual:
        margin += v * b;
        break;
    }
  }
  return margin;
}

}  // namespace wdro::lp
