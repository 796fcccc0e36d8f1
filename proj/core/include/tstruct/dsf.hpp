#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tstruct/adjacency.hpp"
#include "tstruct/lbfgsb.hpp"

namespace tstruct {

// Differentiable score functions: linear NOTEARS and the per-variable MLP
// extension. Both expose their parameters as one flat vector so the
// bound-constrained optimizer can work on them directly.

enum class DsfVariant { kLinear, kMlp };

std::string to_string(DsfVariant v);
// Accepts "linear" or "mlp"; throws InvalidInput otherwise.
DsfVariant parse_dsf_variant(const std::string& s);

struct DsfHyper {
  double lambda1 = 0.01;
  // Ridge weight 0.5 * l2 * sum(w^2) over non-bias MLP weights. Unused by the
  // linear variant.
  double l2 = 0.01;
  // Hidden layer widths (MLP only). Activations are sigmoids.
  std::vector<int> hidden = {10};
  // MLP initialization: every weight and bias uniform in [-init_scale,
  // init_scale] (first-layer weights split into their two parts). The linear
  // variant always starts at 0.
  double init_scale = 0.1;

  void validate() const;
};

// Offsets into the flat parameter vector.
//
// Linear: [W+ (d*d), W- (d*d)], W(i, j) at i*d + j.
// MLP:    [W1+ (d*m*d), W1- (d*m*d), b1 (d*m), then per later layer
//          weights (d*in*out) and biases (d*out)]. The first-layer weight from
//          input i to hidden unit h of the network predicting j sits at
//          (j*m + h)*d + i; later weights at (j*in + a)*out + b.
struct DsfLayout {
  DsfVariant variant = DsfVariant::kLinear;
  int d = 0;
  std::vector<int> hidden;

  struct Dense {
    int in = 0;
    int out = 0;
    std::size_t weights = 0;
    std::size_t bias = 0;
  };

  std::size_t split_size = 0;  // entries in each of W+ and W-
  std::size_t bias1 = 0;
  std::vector<Dense> later;    // MLP layers after the first; last has out = 1
  std::size_t total = 0;

  static DsfLayout make(DsfVariant variant, int d, std::vector<int> hidden);

  int first_width() const { return variant == DsfVariant::kLinear ? 1 : hidden.front(); }
  std::size_t first_index(int target, int unit, int input) const;
};

class DsfParams {
 public:
  static DsfParams zeros(DsfVariant variant, int d, const std::vector<int>& hidden = {});
  // Linear: all zeros. MLP: see DsfHyper::init_scale; draws from `seed`.
  static DsfParams initialize(DsfVariant variant, int d, const DsfHyper& hyper, std::uint64_t seed);
  // Throws InvalidInput if values has the wrong length.
  static DsfParams from_values(DsfVariant variant, int d, const std::vector<int>& hidden, Vector values);

  DsfVariant variant() const { return layout_.variant; }
  int dim() const { return layout_.d; }
  const std::vector<int>& hidden() const { return layout_.hidden; }
  const DsfLayout& layout() const { return layout_; }

  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  // Effective first-layer weight W+ - W-.
  double first_weight(int target, int unit, int input) const;

  // Non-negative split parts; diagonal (self-loop) weights pinned to 0, as
  // are all weights of `forbidden` edges.
  BoxBounds bounds(std::span<const Edge> forbidden = {}) const;

 private:
  DsfParams(DsfLayout layout, Vector values) : layout_(std::move(layout)), values_(std::move(values)) {}

  DsfLayout layout_;
  Vector values_;
};

// Linear: A = W+ - W-. MLP: A_ij = Euclidean norm of the first-layer weights
// from input i into the network for variable j. Diagonal is 0.
WeightedAdjacency dsf_adjacency(const DsfParams& params);

// A o A computed without the square root (smooth in the parameters).
Matrix squared_adjacency(const DsfParams& params);

// Chain rule helpers: add (dL/dA) . dA/dtheta, resp. (dL/dS) . dS/dtheta with
// S = A o A, into `grad`. For the MLP, dA_ij/dw is taken as 0 where A_ij = 0.
void pullback_adjacency(const DsfParams& params, const Matrix& d_da, Vector& grad);
void pullback_squared_adjacency(const DsfParams& params, const Matrix& d_ds, Vector& grad);

// (1 / 2n) sum_j ||X_j - f_j(X)||^2. Throws InvalidInput on shape mismatch,
// empty or non-finite data.
double fit_loss(const DsfParams& params, const Matrix& x);

struct DsfTerms {
  double fit = 0.0;
  double l1 = 0.0;       // lambda1 * sum(W+ + W-)
  double l2 = 0.0;       // ridge (MLP only)
  double h = 0.0;        // acyclicity value
  double penalty = 0.0;  // rho/2 h^2 + lambda2 h
  double total = 0.0;
};

// F + lambda1 ||A||_1 + l2-ridge + (rho / 2) h(A)^2 + lambda2 h(A). If `grad`
// is non-null it is resized and filled with the gradient over all parameters.
double dsf_objective(const DsfParams& params, const Matrix& x, double rho, double lambda2, const DsfHyper& hyper,
                     Vector* grad = nullptr, DsfTerms* terms = nullptr);

}  // namespace tstruct
