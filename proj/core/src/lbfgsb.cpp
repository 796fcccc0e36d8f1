#include "tstruct/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "tstruct/errors.hpp"

namespace tstruct {

BoxBounds BoxBounds::unbounded(Eigen::Index n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

BoxBounds BoxBounds::uniform(Eigen::Index n, double lo, double hi) {
  return {Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi)};
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size()) throw InvalidInput("bounds: lower/upper size mismatch");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw InvalidInput("bounds: lower > upper at index " + std::to_string(i));
    }
  }
}

bool BoxBounds::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Eigen::VectorXd BoxBounds::project(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

std::string to_string(LbfgsbStop stop) {
  switch (stop) {
    case LbfgsbStop::kGradient:
      return "projected-gradient";
    case LbfgsbStop::kRelativeReduction:
      return "relative-reduction";
    case LbfgsbStop::kMaxIterations:
      return "max-iterations";
    case LbfgsbStop::kLineSearch:
      return "line-search";
  }
  return "unknown";
}

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;  // 1 / (y . s)
};

// Two-loop recursion: returns H * q for the limited-memory inverse Hessian.
Eigen::VectorXd apply_inverse_hessian(const std::deque<CurvaturePair>& memory, Eigen::VectorXd q) {
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  if (!memory.empty()) {
    const CurvaturePair& last = memory.back();
    q *= 1.0 / (last.rho * last.y.squaredNorm());
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alpha[i] - beta) * memory[i].s;
  }
  return q;
}

}  // namespace

LbfgsbResult lbfgsb_minimize(const DifferentiableObjective& objective, const Eigen::VectorXd& x0,
                             const BoxBounds& bounds, const LbfgsbSettings& settings) {
  bounds.validate();
  if (bounds.size() != x0.size()) throw InvalidInput("bounds size does not match the start point");
  if (settings.history < 1 || settings.max_iterations < 0 || settings.max_line_search_steps < 1) {
    throw InvalidInput("invalid L-BFGS-B settings");
  }
  constexpr double kArmijo = 1e-4;
  const Eigen::Index n = x0.size();

  LbfgsbResult r;
  r.x = bounds.project(x0);
  Eigen::VectorXd g(n);
  r.f = objective(r.x, g);
  r.evaluations = 1;
  if (!std::isfinite(r.f) || !g.allFinite()) {
    throw OptimizationDiverged("objective is not finite at the start point", r.x);
  }
  r.trace.push_back(r.f);

  std::deque<CurvaturePair> memory;
  Eigen::VectorXd gt(n);
  for (r.iterations = 0; r.iterations < settings.max_iterations; ++r.iterations) {
    const Eigen::VectorXd pg = bounds.project(r.x - g) - r.x;
    if (pg.lpNorm<Eigen::Infinity>() <= settings.pgtol) {
      r.stop = LbfgsbStop::kGradient;
      return r;
    }

    // Variables at a bound with the gradient pushing outward stay fixed.
    Eigen::Array<bool, Eigen::Dynamic, 1> fixed(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      fixed[i] = bounds.lower[i] == bounds.upper[i] || (r.x[i] <= bounds.lower[i] && g[i] > 0.0) ||
                 (r.x[i] >= bounds.upper[i] && g[i] < 0.0);
    }
    const Eigen::VectorXd g_free = fixed.select(0.0, g);

    Eigen::VectorXd dir = fixed.select(0.0, -apply_inverse_hessian(memory, g_free));
    if (!(g.dot(dir) < 0.0)) {
      memory.clear();
      dir = -g_free;
    }

    double step = 1.0;
    if (memory.empty()) step = std::min(1.0, 1.0 / dir.norm());

    bool accepted = false;
    bool any_finite = false;
    Eigen::VectorXd xt;
    double ft = 0.0;
    for (int ls = 0; ls < settings.max_line_search_steps; ++ls, step *= 0.5) {
      xt = bounds.project(r.x + step * dir);
      ft = objective(xt, gt);
      ++r.evaluations;
      if (!std::isfinite(ft) || !gt.allFinite()) continue;
      any_finite = true;
      const double decrease = g.dot(xt - r.x);
      if (ft <= r.f + kArmijo * std::min(decrease, 0.0) && ft <= r.f) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!any_finite) throw OptimizationDiverged("objective is not finite along the search direction", r.x);
      r.stop = LbfgsbStop::kLineSearch;
      return r;
    }

    Eigen::VectorXd s = xt - r.x;
    Eigen::VectorXd y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * y.squaredNorm()) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > settings.history) memory.pop_front();
    }

    const double reduction = (r.f - ft) / std::max({std::abs(r.f), std::abs(ft), 1.0});
    r.x = xt;
    r.f = ft;
    g = gt;
    r.trace.push_back(r.f);
    if (reduction <= settings.ftol) {
      ++r.iterations;
      r.stop = LbfgsbStop::kRelativeReduction;
      return r;
    }
  }
  r.stop = LbfgsbStop::kMaxIterations;
  return r;
}

}  // namespace tstruct
