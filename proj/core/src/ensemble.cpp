#include "tstruct/ensemble.hpp"

#include <cmath>

#include "tstruct/errors.hpp"
#include "tstruct/metrics.hpp"
#include "tstruct/rng.hpp"

namespace tstruct {

void ModelSpec::validate() const {
  if (K < 1) throw InvalidInput("K must be >= 1");
  if (d < 1) throw InvalidInput("d must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");
  if (!(omega >= 0.0)) throw InvalidInput("omega must be >= 0");
  for (const Edge& e : forbidden) {
    if (e.from < 0 || e.to < 0 || e.from >= d || e.to >= d || e.from == e.to) {
      throw InvalidInput("forbidden edge out of range or a self-loop");
    }
  }
  hyper.validate();
}

void DStructModel::validate() const {
  if (learners.empty()) throw InvalidInput("model has no learners");
  if (!(alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");
  if (!(omega >= 0.0)) throw InvalidInput("omega must be >= 0");
  const DsfLayout& first = learners.front().params.layout();
  for (const LearnerState& l : learners) {
    const DsfLayout& L = l.params.layout();
    if (L.variant != first.variant || L.d != first.d || L.hidden != first.hidden) {
      throw InvalidInput("all learners must share dimension and architecture");
    }
  }
}

DStructModel make_model(const ModelSpec& spec, std::uint64_t init_seed) {
  spec.validate();
  DStructModel model;
  model.hyper = spec.hyper;
  model.alpha = spec.alpha;
  model.omega = spec.omega;
  model.forbidden = spec.forbidden;
  for (int k = 0; k < spec.K; ++k) {
    const std::uint64_t seed = derive_seed(init_seed, "init", static_cast<std::uint64_t>(k));
    model.learners.push_back({DsfParams::initialize(spec.variant, spec.d, spec.hyper, seed), 1.0, 0.0,
                              std::numeric_limits<double>::infinity(), seed});
  }
  return model;
}

Eigen::Index parameter_count(const DStructModel& model) {
  Eigen::Index total = 0;
  for (const LearnerState& l : model.learners) total += l.params.size();
  return total;
}

WeightedAdjacency mean_adjacency(std::span<const WeightedAdjacency> adjacencies) {
  if (adjacencies.empty()) throw InvalidInput("mean of zero adjacency matrices");
  Matrix sum = adjacencies.front().matrix();
  for (std::size_t k = 1; k < adjacencies.size(); ++k) {
    if (adjacencies[k].dim() != sum.rows()) throw InvalidInput("adjacency dimensions differ");
    sum += adjacencies[k].matrix();
  }
  return WeightedAdjacency(sum / static_cast<double>(adjacencies.size()));
}

WeightedAdjacency mean_adjacency(const DStructModel& model) {
  std::vector<WeightedAdjacency> as;
  as.reserve(model.learners.size());
  for (const LearnerState& l : model.learners) as.push_back(dsf_adjacency(l.params));
  return mean_adjacency(as);
}

double mse_regularizer(const WeightedAdjacency& a_k, const WeightedAdjacency& a_bar, Matrix* d_dak) {
  if (a_k.dim() != a_bar.dim()) throw InvalidInput("mse_regularizer: shape mismatch");
  const Matrix diff = a_k.matrix() - a_bar.matrix();
  if (d_dak != nullptr) *d_dak = 2.0 * diff;
  return diff.squaredNorm();
}

double combined_loss(const DStructModel& model, int k, const DsfParams& theta_k, const Matrix& batch,
                     const WeightedAdjacency& a_bar, Vector* grad, CombinedTerms* terms) {
  if (k < 0 || k >= model.K()) throw InvalidInput("learner index out of range");
  const LearnerState& learner = model.learners[static_cast<std::size_t>(k)];
  CombinedTerms t;
  const double dsf = dsf_objective(theta_k, batch, learner.rho, learner.lambda2, model.hyper, grad, &t.dsf);
  Matrix d_da;
  t.l_mse = mse_regularizer(dsf_adjacency(theta_k), a_bar, grad != nullptr ? &d_da : nullptr);
  if (grad != nullptr && model.alpha != 0.0) pullback_adjacency(theta_k, model.alpha * d_da, *grad);
  t.total = dsf + model.alpha * t.l_mse;
  if (terms != nullptr) *terms = t;
  return t.total;
}

double combined_loss(const DStructModel& model, int k, const Matrix& batch, Vector* grad, CombinedTerms* terms) {
  if (k < 0 || k >= model.K()) throw InvalidInput("learner index out of range");
  return combined_loss(model, k, model.learners[static_cast<std::size_t>(k)].params, batch, mean_adjacency(model),
                       grad, terms);
}

CombineResult combine_adjacency(const WeightedAdjacency& mean, double omega) {
  BinaryGraph g = threshold(mean, omega);
  CombineResult out{BinaryDag::empty(mean.dim()), true, {}};
  for (std::vector<Edge> cyc = cycle_edges(g); !cyc.empty(); cyc = cycle_edges(g)) {
    out.acyclic_before_repair = false;
    Edge weakest = cyc.front();
    for (const Edge& e : cyc) {
      if (std::abs(mean(e.from, e.to)) < std::abs(mean(weakest.from, weakest.to))) weakest = e;
    }
    g.remove_edge(weakest.from, weakest.to);
    out.dropped.push_back(weakest);
  }
  out.dag = *BinaryDag::certify(std::move(g));
  return out;
}

CombineResult combine_graphs(const DStructModel& model) {
  model.validate();
  return combine_adjacency(mean_adjacency(model), model.omega);
}

double TransportReport::mean_pairwise_shd() const {
  const auto K = pairwise_shd.rows();
  if (K < 2) return 0.0;
  double sum = 0.0;
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = a + 1; b < K; ++b) sum += pairwise_shd(a, b);
  }
  return sum / static_cast<double>(K * (K - 1) / 2);
}

TransportReport transportability_check(const DStructModel& model, double omega) {
  model.validate();
  std::vector<BinaryGraph> graphs;
  for (const LearnerState& l : model.learners) graphs.push_back(threshold(dsf_adjacency(l.params), omega));
  const int K = model.K();
  TransportReport r;
  r.omega = omega;
  r.pairwise_shd = Eigen::MatrixXi::Zero(K, K);
  for (int a = 0; a < K; ++a) {
    for (int b = a + 1; b < K; ++b) {
      const int s = shd(graphs[static_cast<std::size_t>(a)], graphs[static_cast<std::size_t>(b)]);
      r.pairwise_shd(a, b) = s;
      r.pairwise_shd(b, a) = s;
      if (s != 0) r.transportable = false;
    }
  }
  return r;
}

}  // namespace tstruct
