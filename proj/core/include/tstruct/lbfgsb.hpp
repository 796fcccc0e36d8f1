#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tstruct {

// Per-parameter box constraints. -inf / +inf mean unbounded; lower == upper
// pins a parameter to a constant.
struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static BoxBounds unbounded(Eigen::Index n);
  static BoxBounds uniform(Eigen::Index n, double lo, double hi);

  Eigen::Index size() const { return lower.size(); }
  // Throws InvalidInput if sizes differ or lower > upper anywhere.
  void validate() const;
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
};

struct LbfgsbSettings {
  int max_iterations = 1000;
  int history = 10;
  // Stop when the infinity norm of the projected gradient drops below this.
  double pgtol = 1e-5;
  // Stop when (f_prev - f) / max(|f_prev|, |f|, 1) <= ftol.
  double ftol = 2.220446049250313e-09;
  int max_line_search_steps = 40;
};

enum class LbfgsbStop { kGradient, kRelativeReduction, kMaxIterations, kLineSearch };

std::string to_string(LbfgsbStop stop);

struct LbfgsbResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsbStop stop = LbfgsbStop::kMaxIterations;
  // Objective value after each accepted iterate, starting with f(x0).
  std::vector<double> trace;
};

// Returns f(x) and writes its gradient into `grad` (already sized).
using DifferentiableObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Limited-memory BFGS with gradient projection onto the box and a projected
// backtracking (Armijo) line search. x0 is projected onto the box first.
// Iterates never leave the box and the objective never increases.
//
// Throws OptimizationDiverged if the objective is non-finite at the start
// point, or if every trial step of a line search is non-finite.
LbfgsbResult lbfgsb_minimize(const DifferentiableObjective& objective, const Eigen::VectorXd& x0,
                             const BoxBounds& bounds, const LbfgsbSettings& settings = {});

}  // namespace tstruct
