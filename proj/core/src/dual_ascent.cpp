#include "tstruct/dual_ascent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tstruct {
namespace {

double current_h(const LearnerState& l) { return trace_exp_penalty(squared_adjacency(l.params)); }

double guard_rho(const DStructModel& model, int k, RhoGuard guard) {
  if (guard == RhoGuard::kLearner) return model.learners[static_cast<std::size_t>(k)].rho;
  double r = std::numeric_limits<double>::infinity();
  for (const LearnerState& l : model.learners) r = std::min(r, l.rho);
  return r;
}

}  // namespace

void DualAscentConfig::validate() const {
  if (!(h_tol > 0.0)) throw InvalidInput("h_tol must be positive");
  if (!(rho_max >= 1.0)) throw InvalidInput("rho_max must be >= 1");
  if (!(rho_growth > 1.0)) throw InvalidInput("rho_growth must be > 1");
  if (!(h_decrease_factor > 0.0 && h_decrease_factor < 1.0)) {
    throw InvalidInput("h_decrease_factor must lie in (0, 1)");
  }
  if (max_epochs < 0) throw InvalidInput("max_epochs must be >= 0");
  if (batch_size < 0) throw InvalidInput("batch_size must be >= 0");
}

StepRecord training_step(DStructModel& model, int k, const Matrix& batch, const DualAscentConfig& config) {
  if (k < 0 || k >= model.K()) throw InvalidInput("learner index out of range");
  LearnerState& learner = model.learners[static_cast<std::size_t>(k)];
  const BoxBounds bounds = learner.params.bounds(model.forbidden);

  StepRecord rec;
  rec.k = k;
  double h_new = current_h(learner);
  while (guard_rho(model, k, config.guard) < config.rho_max) {
    const WeightedAdjacency a_bar = mean_adjacency(model);
    DsfParams candidate = learner.params;
    const DifferentiableObjective objective = [&](const Vector& x, Vector& grad) {
      candidate.values() = x;
      return combined_loss(model, k, candidate, batch, a_bar, &grad);
    };
    const LbfgsbResult r = lbfgsb_minimize(objective, learner.params.values(), bounds, config.inner);
    learner.params.values() = r.x;
    ++rec.solves;
    rec.inner_iterations += r.iterations;
    rec.objective_before = r.trace.front();
    rec.objective = r.f;

    h_new = current_h(learner);
    if (h_new > config.h_decrease_factor * learner.h_prev) {
      learner.rho *= config.rho_growth;
    } else {
      break;
    }
  }
  if (config.lambda2_update) learner.lambda2 += learner.rho * h_new;
  learner.h_prev = h_new;

  CombinedTerms terms;
  combined_loss(model, k, batch, nullptr, &terms);
  rec.h = h_new;
  rec.rho_k = learner.rho;
  rec.lambda2_k = learner.lambda2;
  rec.l_mse = terms.l_mse;
  return rec;
}

TrainResult dual_ascent_train(DStructModel& model, std::span<const Matrix> subsets, const DualAscentConfig& config) {
  config.validate();
  model.validate();
  if (static_cast<int>(subsets.size()) != model.K()) {
    throw InvalidInput("expected " + std::to_string(model.K()) + " subsets, got " + std::to_string(subsets.size()));
  }
  for (const Matrix& s : subsets) {
    if (s.rows() == 0) throw InvalidInput("empty data subset");
    if (s.cols() != model.dim()) throw InvalidInput("subset column count does not match the model");
  }

  TrainResult result;
  result.stop_reason = "no_epochs";
  auto summarize = [&] {
    result.max_h = 0.0;
    result.min_rho = std::numeric_limits<double>::infinity();
    for (const LearnerState& l : model.learners) {
      result.max_h = std::max(result.max_h, current_h(l));
      result.min_rho = std::min(result.min_rho, l.rho);
    }
  };
  summarize();

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    for (int k = 0; k < model.K(); ++k) {
      const Matrix& data = subsets[static_cast<std::size_t>(k)];
      const Eigen::Index rows = data.rows();
      const Eigen::Index step = config.batch_size > 0 ? std::min<Eigen::Index>(config.batch_size, rows) : rows;
      int b = 0;
      for (Eigen::Index start = 0; start < rows; start += step, ++b) {
        const Eigen::Index len = std::min(step, rows - start);
        StepRecord rec;
        try {
          rec = training_step(model, k, data.middleRows(start, len), config);
        } catch (const OptimizationDiverged& e) {
          throw TrainingDiverged(e, result.log);
        }
        rec.epoch = epoch;
        rec.batch = b;
        result.log.push_back(rec);
      }
    }
    result.epochs = epoch + 1;
    summarize();
    if (result.max_h <= config.h_tol) {
      result.stop_reason = "h_tol";
      return result;
    }
    if (result.min_rho >= config.rho_max) {
      result.stop_reason = "rho_max";
      return result;
    }
    result.stop_reason = "max_epochs";
  }
  return result;
}

}  // namespace tstruct
