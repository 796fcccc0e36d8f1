#include "tstruct/lbfgsb.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "tstruct/errors.hpp"
#include "tstruct/rng.hpp"

namespace tstruct {
namespace {

using Eigen::VectorXd;

double rosenbrock(const VectorXd& x, VectorXd& g) {
  const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
  g(0) = -2.0 * a - 400.0 * x(0) * b;
  g(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

TEST(Lbfgsb, ConvexQuadratic) {
  const auto f = [](const VectorXd& x, VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const LbfgsbResult r = lbfgsb_minimize(f, VectorXd::Ones(2), BoxBounds::unbounded(2));
  EXPECT_LT(r.x.norm(), 1e-6);
  EXPECT_EQ(r.stop, LbfgsbStop::kGradient);
}

TEST(Lbfgsb, ActiveUpperBound) {
  const auto f = [](const VectorXd& x, VectorXd& g) {
    g(0) = 2.0 * (x(0) - 2.0);
    return (x(0) - 2.0) * (x(0) - 2.0);
  };
  const LbfgsbResult r = lbfgsb_minimize(f, VectorXd::Zero(1), BoxBounds::uniform(1, 0.0, 1.0));
  EXPECT_EQ(r.x(0), 1.0);
  EXPECT_EQ(r.f, 1.0);
}

TEST(Lbfgsb, RosenbrockAgreesWithGradientDescentOracle) {
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const LbfgsbResult r = lbfgsb_minimize(rosenbrock, x0, BoxBounds::unbounded(2));
  EXPECT_NEAR(r.x(0), 1.0, 1e-4);
  EXPECT_NEAR(r.x(1), 1.0, 1e-4);

  // Plain gradient descent with a small fixed step, run long.
  VectorXd x = x0, g(2);
  for (int i = 0; i < 400000; ++i) {
    rosenbrock(x, g);
    x -= 1e-3 * g;
  }
  EXPECT_NEAR(r.x(0), x(0), 1e-3);
  EXPECT_NEAR(r.x(1), x(1), 1e-3);
}

TEST(Lbfgsb, ProjectsStartAndStaysFeasibleWithMonotoneTrace) {
  Rng rng(3);
  const int n = 8;
  VectorXd center(n), lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    center(i) = uniform(rng, -3, 3);
    lo(i) = uniform(rng, -1, 0);
    hi(i) = lo(i) + uniform(rng, 0, 2);
  }
  lo(0) = hi(0) = 0.25;  // pinned
  const BoxBounds bounds{lo, hi};
  // Coupled quadratic plus a quartic.
  const auto f = [&](const VectorXd& x, VectorXd& g) {
    double v = 0.0;
    g.setZero();
    for (int i = 0; i < n; ++i) {
      const double d = x(i) - center(i);
      v += d * d + 0.1 * d * d * d * d;
      g(i) += 2.0 * d + 0.4 * d * d * d;
      if (i + 1 < n) {
        v += 0.5 * x(i) * x(i + 1);
        g(i) += 0.5 * x(i + 1);
        g(i + 1) += 0.5 * x(i);
      }
    }
    return v;
  };
  VectorXd x0 = VectorXd::Constant(n, 5.0);
  const LbfgsbResult r = lbfgsb_minimize(f, x0, bounds);
  EXPECT_TRUE(bounds.contains(r.x));
  EXPECT_EQ(r.x(0), 0.25);
  ASSERT_GE(r.trace.size(), 2u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
  VectorXd g(n);
  EXPECT_LE(r.f, f(bounds.project(x0), g) + 1e-12);
  // Projected gradient is small at the solution.
  f(r.x, g);
  for (int i = 1; i < n; ++i) {
    const double pg = std::clamp(r.x(i) - g(i), lo(i), hi(i)) - r.x(i);
    EXPECT_LT(std::abs(pg), 1e-4);
  }
}

TEST(Lbfgsb, IterationCapIsHonored) {
  LbfgsbSettings s;
  s.max_iterations = 3;
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const LbfgsbResult r = lbfgsb_minimize(rosenbrock, x0, BoxBounds::unbounded(2), s);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(r.stop, LbfgsbStop::kMaxIterations);
}

TEST(Lbfgsb, NonFiniteStartDiverges) {
  const auto f = [](const VectorXd&, VectorXd& g) {
    g.setZero();
    return std::nan("");
  };
  try {
    lbfgsb_minimize(f, VectorXd::Ones(3), BoxBounds::unbounded(3));
    FAIL() << "expected OptimizationDiverged";
  } catch (const OptimizationDiverged& e) {
    EXPECT_EQ(e.last_iterate(), VectorXd::Ones(3));
  }
}

TEST(Lbfgsb, NonFiniteEverywhereAlongDirectionDiverges) {
  // Finite only at the start point.
  const auto f = [](const VectorXd& x, VectorXd& g) {
    g = VectorXd::Ones(x.size());
    return x.sum() == 1.0 ? 1.0 : std::nan("");
  };
  VectorXd x0 = VectorXd::Zero(2);
  x0(0) = 1.0;
  EXPECT_THROW(lbfgsb_minimize(f, x0, BoxBounds::unbounded(2)), OptimizationDiverged);
}

TEST(BoxBounds, ValidateAndProject) {
  EXPECT_THROW((BoxBounds{VectorXd::Ones(2), VectorXd::Zero(2)}.validate()), InvalidInput);
  EXPECT_THROW((BoxBounds{VectorXd::Zero(2), VectorXd::Zero(3)}.validate()), InvalidInput);
  const BoxBounds b = BoxBounds::uniform(3, -1, 1);
  VectorXd x(3);
  x << -5, 0.5, 7;
  VectorXd expected(3);
  expected << -1, 0.5, 1;
  EXPECT_EQ(b.project(x), expected);
  EXPECT_FALSE(b.contains(x));
  EXPECT_TRUE(b.contains(expected));
}

}  // namespace
}  // namespace tstruct
