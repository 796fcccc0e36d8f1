#pragma once

#include <span>
#include <string>
#include <vector>

#include "tstruct/ensemble.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/lbfgsb.hpp"

namespace tstruct {

// Which rho the inner escalation loop compares against rho_max: the
// learner's own rho_k, or the ensemble-wide min_k rho_k.
enum class RhoGuard { kLearner, kGlobalMin };

struct DualAscentConfig {
  double h_tol = 1e-8;
  double rho_max = 1e16;
  double rho_growth = 10.0;
  double h_decrease_factor = 0.25;
  int max_epochs = 100;
  // lambda2_k <- lambda2_k + rho_k * h after each step. Off reproduces a
  // pure penalty method.
  bool lambda2_update = true;
  RhoGuard guard = RhoGuard::kLearner;
  // Rows per batch; 0 means the whole subset is one batch.
  int batch_size = 0;
  LbfgsbSettings inner;

  void validate() const;
};

struct StepRecord {
  int epoch = 0;
  int k = 0;
  int batch = 0;
  double h = 0.0;
  double rho_k = 0.0;
  double lambda2_k = 0.0;
  // Subproblem objective (combined loss) before and after the last inner
  // solve, both at that solve's rho_k, lambda2_k and frozen mean adjacency.
  double objective_before = 0.0;
  double objective = 0.0;
  double l_mse = 0.0;
  int solves = 0;
  int inner_iterations = 0;
};

struct TrainResult {
  std::vector<StepRecord> log;
  int epochs = 0;
  double max_h = 0.0;
  double min_rho = 0.0;
  // "h_tol", "rho_max", "max_epochs" or "no_epochs".
  std::string stop_reason;
};

// Divergence during training; carries the records written so far.
class TrainingDiverged : public OptimizationDiverged {
 public:
  TrainingDiverged(const OptimizationDiverged& cause, std::vector<StepRecord> partial_log)
      : OptimizationDiverged(cause.what(), cause.last_iterate()), log_(std::move(partial_log)) {}

  const std::vector<StepRecord>& partial_log() const { return log_; }

 private:
  std::vector<StepRecord> log_;
};

// One augmented-Lagrangian step for learner k: repeatedly solves the
// bound-constrained subproblem on the combined loss (mean adjacency frozen per
// solve), escalating rho_k until h drops below h_decrease_factor * h_prev or
// the guard reaches rho_max. Then updates lambda2_k and h_prev.
StepRecord training_step(DStructModel& model, int k, const Matrix& batch, const DualAscentConfig& config);

// Round-robin over learners and their batches each epoch. Stops after the
// epoch in which max_k h <= h_tol or min_k rho_k >= rho_max, or after
// max_epochs. `subsets[k]` is learner k's data.
TrainResult dual_ascent_train(DStructModel& model, std::span<const Matrix> subsets, const DualAscentConfig& config);

}  // namespace tstruct
