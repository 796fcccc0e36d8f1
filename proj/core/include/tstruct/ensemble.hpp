#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tstruct/adjacency.hpp"
#include "tstruct/dsf.hpp"

namespace tstruct {

// One of the K parallel score functions plus its augmented-Lagrangian state.
struct LearnerState {
  DsfParams params;
  double rho = 1.0;
  double lambda2 = 0.0;
  // h(A(theta_k)) after the learner's previous training step.
  double h_prev = std::numeric_limits<double>::infinity();
  std::uint64_t init_seed = 0;
};

struct ModelSpec {
  int K = 3;
  DsfVariant variant = DsfVariant::kMlp;
  int d = 5;
  DsfHyper hyper;
  double alpha = 1.0;
  double omega = 0.3;
  // Prior knowledge: edges known to be absent are pinned to zero weight.
  std::vector<Edge> forbidden;

  void validate() const;
};

// K learners sharing architecture and hyperparameters, tied together by the
// ensemble regularizer alpha * ||A_k - mean(A)||^2.
struct DStructModel {
  DsfHyper hyper;
  double alpha = 1.0;
  double omega = 0.3;
  std::vector<Edge> forbidden;
  std::vector<LearnerState> learners;

  int K() const { return static_cast<int>(learners.size()); }
  int dim() const { return learners.front().params.dim(); }
  // Throws InvalidInput if empty, if learners disagree in shape, or alpha < 0.
  void validate() const;
};

// Learner k is initialized from derive_seed(init_seed, "init", k).
DStructModel make_model(const ModelSpec& spec, std::uint64_t init_seed);

// Total number of trainable parameters (K times a single learner's).
Eigen::Index parameter_count(const DStructModel& model);

WeightedAdjacency mean_adjacency(std::span<const WeightedAdjacency> adjacencies);
WeightedAdjacency mean_adjacency(const DStructModel& model);

// ||A_k - A_bar||_F^2. If `d_dak` is given it receives 2 (A_k - A_bar); A_bar
// is a constant. Throws InvalidInput on shape mismatch.
double mse_regularizer(const WeightedAdjacency& a_k, const WeightedAdjacency& a_bar, Matrix* d_dak = nullptr);

struct CombinedTerms {
  DsfTerms dsf;
  double l_mse = 0.0;
  double total = 0.0;
};

// dsf_objective(theta_k) + alpha * mse_regularizer(A(theta_k), a_bar) with
// a_bar held fixed. Uses learner k's current rho_k and lambda2_k and the
// model's shared hyperparameters; `theta_k` is the candidate parameter value.
double combined_loss(const DStructModel& model, int k, const DsfParams& theta_k, const Matrix& batch,
                     const WeightedAdjacency& a_bar, Vector* grad = nullptr, CombinedTerms* terms = nullptr);

// Same, at learner k's current parameters and the current mean adjacency.
double combined_loss(const DStructModel& model, int k, const Matrix& batch, Vector* grad = nullptr,
                     CombinedTerms* terms = nullptr);

struct CombineResult {
  BinaryDag dag = BinaryDag::empty(1);
  // Whether threshold(mean, omega) was already acyclic.
  bool acyclic_before_repair = true;
  // Edges removed to break cycles, in removal order.
  std::vector<Edge> dropped;
};

// Thresholds `mean` at omega; while the result has a cycle, removes the
// smallest-magnitude edge lying on a cycle (ties go to the row-major first).
CombineResult combine_adjacency(const WeightedAdjacency& mean, double omega);

// combine_adjacency(mean_adjacency(model), model.omega).
CombineResult combine_graphs(const DStructModel& model);

struct TransportReport {
  bool transportable = true;
  double omega = 0.0;
  Eigen::MatrixXi pairwise_shd;

  // Mean over the K(K-1)/2 distinct pairs; 0 for K = 1.
  double mean_pairwise_shd() const;
};

// Thresholds every learner at omega; transportable iff all graphs coincide.
TransportReport transportability_check(const DStructModel& model, double omega);

}  // namespace tstruct
