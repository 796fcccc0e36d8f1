#include "tstruct/dual_ascent.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/subsample.hpp"
#include "tstruct/synthdata.hpp"

namespace tstruct {
namespace {

// X2 = 2 X1 + noise, both unit-variance sources.
Matrix two_variable_data(int n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = standard_normal(rng);
    x(i, 1) = 2.0 * x(i, 0) + standard_normal(rng);
  }
  return x;
}

DStructModel linear_model(int K, int d, double alpha) {
  ModelSpec spec;
  spec.K = K;
  spec.d = d;
  spec.variant = DsfVariant::kLinear;
  spec.alpha = alpha;
  return make_model(spec, 42);
}

TEST(DualAscent, ZeroEpochsLeavesModelUntouched) {
  DStructModel model = linear_model(2, 2, 1.0);
  const DStructModel before = model;
  const Matrix x = two_variable_data(20, 1);
  const std::vector<Matrix> subsets{x, x};
  DualAscentConfig config;
  config.max_epochs = 0;
  const TrainResult r = dual_ascent_train(model, subsets, config);
  EXPECT_TRUE(r.log.empty());
  EXPECT_EQ(r.epochs, 0);
  EXPECT_EQ(r.stop_reason, "no_epochs");
  for (int k = 0; k < 2; ++k) EXPECT_EQ(model.learners[k].params.values(), before.learners[k].params.values());
}

TEST(DualAscent, TwoVariableLinearRecoversOrientation) {
  const Matrix x = two_variable_data(400, 2);
  const std::vector<Matrix> subsets = materialize(x, random_split(400, 2, 3));
  DStructModel model = linear_model(2, 2, 1.0);
  const TrainResult r = dual_ascent_train(model, subsets, DualAscentConfig{});
  EXPECT_EQ(r.stop_reason, "h_tol");
  for (const LearnerState& l : model.learners) {
    const WeightedAdjacency a = dsf_adjacency(l.params);
    EXPECT_LE(acyclicity_h(a), 1e-8);
    EXPECT_GT(std::abs(a(0, 1)), std::abs(a(1, 0)));
    EXPECT_GT(std::abs(a(0, 1)), 1.0);
  }
}

TEST(DualAscent, LogInvariants) {
  const Matrix x = two_variable_data(200, 4);
  const std::vector<Matrix> subsets = materialize(x, random_split(200, 2, 5));
  DStructModel model = linear_model(2, 2, 0.5);
  const TrainResult r = dual_ascent_train(model, subsets, DualAscentConfig{});
  ASSERT_FALSE(r.log.empty());
  std::vector<double> last_rho(2, 0.0);
  for (const StepRecord& s : r.log) {
    // Each subproblem solve never increases its own objective.
    EXPECT_LE(s.objective, s.objective_before + 1e-12);
    EXPECT_GE(s.rho_k, last_rho[s.k]);
    last_rho[s.k] = s.rho_k;
    EXPECT_GE(s.solves, 1);
    EXPECT_GE(s.h, 0.0);
  }
  EXPECT_EQ(r.log.size(), static_cast<std::size_t>(2 * r.epochs));
}

TEST(DualAscent, FeasibleParametersAndComplementarity) {
  Rng rng(6);
  const BinaryDag dag = sample_er_dag(4, 4, rng);
  const SemSystem sem = sample_index_model(dag, rng);
  const Matrix x = simulate(sem, 300, rng);
  DStructModel model = linear_model(2, 4, 1.0);
  dual_ascent_train(model, std::vector<Matrix>{x.topRows(150), x.bottomRows(150)}, DualAscentConfig{});
  for (const LearnerState& l : model.learners) {
    const BoxBounds b = l.params.bounds();
    EXPECT_TRUE(b.contains(l.params.values()));
    const std::size_t n = l.params.layout().split_size;
    int small = 0;
    for (std::size_t i = 0; i < n; ++i) {
      small += std::min(l.params.values()(i), l.params.values()(n + i)) < 1e-3 ? 1 : 0;
    }
    EXPECT_GE(small, static_cast<int>(std::ceil(0.95 * n)));
  }
}

// Reference single-learner loop written directly against dsf_objective.
std::vector<double> reference_notears_trace(DsfParams params, const Matrix& x, const DsfHyper& hyper,
                                            const DualAscentConfig& c, DsfParams* out) {
  double rho = 1.0, lambda2 = 0.0, h_prev = INFINITY;
  std::vector<double> trace;
  const BoxBounds bounds = params.bounds();
  for (int epoch = 0; epoch < c.max_epochs; ++epoch) {
    double h = 0.0;
    double f = 0.0;
    while (rho < c.rho_max) {
      DsfParams cand = params;
      const auto obj = [&](const Vector& v, Vector& g) {
        cand.values() = v;
        return dsf_objective(cand, x, rho, lambda2, hyper, &g);
      };
      const LbfgsbResult r = lbfgsb_minimize(obj, params.values(), bounds, c.inner);
      params.values() = r.x;
      f = r.f;
      // A o A directly; going through the square root of the MLP norms would
      // change the last bits.
      h = trace_exp_penalty(squared_adjacency(params));
      if (h > c.h_decrease_factor * h_prev) {
        rho *= c.rho_growth;
      } else {
        break;
      }
    }
    lambda2 += rho * h;
    h_prev = h;
    trace.push_back(f);
    if (h <= c.h_tol || rho >= c.rho_max) break;
  }
  *out = params;
  return trace;
}

TEST(DualAscent, SingleLearnerWithoutRegularizerIsPlainNotears) {
  Rng rng(7);
  const BinaryDag dag = sample_er_dag(4, 4, rng);
  const SemSystem sem = sample_index_model(dag, rng);
  const Matrix x = simulate(sem, 200, rng);
  for (const DsfVariant variant : {DsfVariant::kLinear, DsfVariant::kMlp}) {
    ModelSpec spec;
    spec.K = 1;
    spec.d = 4;
    spec.variant = variant;
    spec.alpha = 0.0;
    spec.hyper.hidden = {5};
    DStructModel model = make_model(spec, 11);
    DualAscentConfig config;
    config.max_epochs = 6;
    DsfParams ref_params = model.learners[0].params;
    const std::vector<double> ref = reference_notears_trace(ref_params, x, spec.hyper, config, &ref_params);
    const TrainResult r = dual_ascent_train(model, std::vector<Matrix>{x}, config);
    ASSERT_EQ(r.log.size(), ref.size()) << to_string(variant);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(r.log[i].objective, ref[i]);
    EXPECT_EQ(model.learners[0].params.values(), ref_params.values());
  }
}

TEST(DualAscent, MiniBatchesAreLoggedPerBatch) {
  const Matrix x = two_variable_data(120, 8);
  DStructModel model = linear_model(1, 2, 0.0);
  DualAscentConfig config;
  config.batch_size = 50;
  config.max_epochs = 2;
  const TrainResult r = dual_ascent_train(model, std::vector<Matrix>{x}, config);
  ASSERT_GE(r.log.size(), 3u);
  EXPECT_EQ(r.log[0].batch, 0);
  EXPECT_EQ(r.log[1].batch, 1);
  EXPECT_EQ(r.log[2].batch, 2);
}

TEST(DualAscent, GlobalMinGuardRuns) {
  const Matrix x = two_variable_data(200, 9);
  DStructModel model = linear_model(2, 2, 1.0);
  DualAscentConfig config;
  config.guard = RhoGuard::kGlobalMin;
  const TrainResult r = dual_ascent_train(model, std::vector<Matrix>{x.topRows(100), x.bottomRows(100)}, config);
  EXPECT_LE(r.max_h, config.h_tol);
}

TEST(DualAscent, RhoMaxStopsTraining) {
  const Matrix x = two_variable_data(100, 10);
  DStructModel model = linear_model(1, 2, 0.0);
  // Start from a two-cycle so h > h_tol.
  model.learners[0].params.values()(1) = 1.0;
  model.learners[0].params.values()(2) = 1.0;
  DualAscentConfig config;
  config.rho_max = 1.0;
  const TrainResult r = dual_ascent_train(model, std::vector<Matrix>{x}, config);
  EXPECT_EQ(r.stop_reason, "rho_max");
  EXPECT_EQ(r.epochs, 1);
  // The inner loop never ran, so nothing moved.
  EXPECT_EQ(r.log.front().solves, 0);
}

TEST(DualAscent, InputValidation) {
  DStructModel model = linear_model(2, 2, 1.0);
  const Matrix x = two_variable_data(10, 1);
  EXPECT_THROW(dual_ascent_train(model, std::vector<Matrix>{x}, DualAscentConfig{}), InvalidInput);
  EXPECT_THROW(dual_ascent_train(model, std::vector<Matrix>{x, Matrix(0, 2)}, DualAscentConfig{}), InvalidInput);
  EXPECT_THROW(dual_ascent_train(model, std::vector<Matrix>{x, Matrix::Zero(5, 3)}, DualAscentConfig{}),
               InvalidInput);
  DualAscentConfig bad;
  bad.h_decrease_factor = 1.5;
  EXPECT_THROW(dual_ascent_train(model, std::vector<Matrix>{x, x}, bad), InvalidInput);
}

TEST(DualAscent, OverflowSurfacesAsDivergenceWithLog) {
  Matrix x = two_variable_data(10, 1);
  x *= 1e200;
  DStructModel model = linear_model(1, 2, 0.0);
  try {
    dual_ascent_train(model, std::vector<Matrix>{x}, DualAscentConfig{});
    FAIL() << "expected TrainingDiverged";
  } catch (const TrainingDiverged& e) {
    EXPECT_TRUE(e.partial_log().empty());
  }
}

TEST(DualAscent, DefaultSettingErDataConverges) {
  Rng rng(12);
  const BinaryDag dag = sample_er_dag(5, 10, rng);
  const SemSystem sem = sample_index_model(dag, rng);
  const Matrix x = simulate(sem, 1000, rng);
  ModelSpec spec;
  spec.K = 3;
  DStructModel model = make_model(spec, 13);
  const TrainResult r = dual_ascent_train(model, materialize(x, beta_subsample(x, 3, 14)), DualAscentConfig{});
  EXPECT_EQ(r.stop_reason, "h_tol");
  EXPECT_LE(r.max_h, 1e-8);
  EXPECT_LT(r.min_rho, 1e16);
}

}  // namespace
}  // namespace tstruct
