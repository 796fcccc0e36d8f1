#include "tstruct/dsf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tstruct/errors.hpp"
#include "tstruct/rng.hpp"

namespace tstruct {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstBlock = Eigen::Map<const RowMajor>;
using Block = Eigen::Map<RowMajor>;

void check_data(const DsfParams& params, const Matrix& x) {
  if (x.rows() < 1) throw InvalidInput("data batch is empty");
  if (x.cols() != params.dim()) {
    throw InvalidInput("data has " + std::to_string(x.cols()) + " columns, model expects " +
                       std::to_string(params.dim()));
  }
  if (!x.allFinite()) throw InvalidInput("data contains non-finite values");
}

Matrix sigmoid(const Matrix& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

// Effective first-layer weights of network j as an (m x d) matrix.
RowMajor first_layer(const DsfParams& p, int j) {
  const DsfLayout& L = p.layout();
  const int m = L.first_width();
  const std::size_t block = static_cast<std::size_t>(m) * static_cast<std::size_t>(L.d);
  const double* base = p.values().data();
  ConstBlock pos(base + j * block, m, L.d);
  ConstBlock neg(base + L.split_size + j * block, m, L.d);
  return pos - neg;
}

// Adds g (same shape as first_layer(p, j)) to dW+ and -g to dW-.
void add_first_layer_grad(const DsfParams& p, int j, const RowMajor& g, Vector& grad) {
  const DsfLayout& L = p.layout();
  const std::size_t block = static_cast<std::size_t>(L.first_width()) * static_cast<std::size_t>(L.d);
  Block pos(grad.data() + j * block, g.rows(), g.cols());
  Block neg(grad.data() + L.split_size + j * block, g.rows(), g.cols());
  pos += g;
  neg -= g;
}

// Linear weights W = W+ - W- as a d x d matrix, W(i, j) weighting i -> j.
RowMajor linear_weights(const DsfParams& p) {
  const int d = p.dim();
  const double* base = p.values().data();
  return ConstBlock(base, d, d) - ConstBlock(base + p.layout().split_size, d, d);
}

void add_linear_grad(const DsfParams& p, const Matrix& g, Vector& grad) {
  const int d = p.dim();
  Block pos(grad.data(), d, d);
  Block neg(grad.data() + p.layout().split_size, d, d);
  pos += g;
  neg -= g;
}

// Fit loss of the linear model; adds its gradient when grad != nullptr.
double linear_fit(const DsfParams& p, const Matrix& x, Vector* grad) {
  const Matrix w = linear_weights(p);
  const Matrix residual = x * w - x;
  const double n = static_cast<double>(x.rows());
  const double loss = 0.5 / n * residual.squaredNorm();
  if (grad != nullptr) {
    add_linear_grad(p, (x.transpose() * residual) / n, *grad);
  }
  return loss;
}

// Fit loss plus ridge of the MLP model; adds the gradient when grad != nullptr.
double mlp_fit(const DsfParams& p, const Matrix& x, double l2, Vector* grad, double* ridge_out) {
  const DsfLayout& L = p.layout();
  const int d = L.d;
  const int m = L.first_width();
  const double n = static_cast<double>(x.rows());
  const double* values = p.values().data();
  double loss = 0.0;
  double ridge = 0.0;

  std::vector<Matrix> act;  // act[0] = first hidden layer output, ...
  act.reserve(L.later.size());

  for (int j = 0; j < d; ++j) {
    const RowMajor w1 = first_layer(p, j);
    const Eigen::Map<const Eigen::RowVectorXd> b1(values + L.bias1 + static_cast<std::size_t>(j * m), m);
    act.clear();
    act.push_back(sigmoid((x * w1.transpose()).rowwise() + b1));
    ridge += w1.squaredNorm();

    Matrix out;
    for (std::size_t l = 0; l < L.later.size(); ++l) {
      const auto& layer = L.later[l];
      const std::size_t wsz = static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
      ConstBlock w(values + layer.weights + j * wsz, layer.in, layer.out);
      const Eigen::Map<const Eigen::RowVectorXd> b(values + layer.bias + static_cast<std::size_t>(j * layer.out),
                                                   layer.out);
      ridge += w.squaredNorm();
      Matrix z = (act.back() * w).rowwise() + b;
      if (l + 1 < L.later.size()) {
        act.push_back(sigmoid(z));
      } else {
        out = std::move(z);
      }
    }
    const Vector resid = out.col(0) - x.col(j);
    loss += 0.5 / n * resid.squaredNorm();

    if (grad == nullptr) continue;

    // Backward pass through the network for variable j.
    Matrix delta = resid / n;  // dF/d(out), n x 1
    for (std::size_t l = L.later.size(); l-- > 0;) {
      const auto& layer = L.later[l];
      const std::size_t wsz = static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
      ConstBlock w(values + layer.weights + j * wsz, layer.in, layer.out);
      Block gw(grad->data() + layer.weights + j * wsz, layer.in, layer.out);
      Eigen::Map<Eigen::RowVectorXd> gb(grad->data() + layer.bias + static_cast<std::size_t>(j * layer.out),
                                        layer.out);
      const Matrix& input = act[l];
      gw += input.transpose() * delta + l2 * w;
      gb += delta.colwise().sum();
      const Matrix d_input = delta * w.transpose();
      delta = d_input.cwiseProduct(input.cwiseProduct((1.0 - input.array()).matrix()));
    }
    const RowMajor gw1 = delta.transpose() * x + l2 * w1;
    add_first_layer_grad(p, j, gw1, *grad);
    Eigen::Map<Eigen::RowVectorXd> gb1(grad->data() + L.bias1 + static_cast<std::size_t>(j * m), m);
    gb1 += delta.colwise().sum();
  }
  *ridge_out = 0.5 * l2 * ridge;
  return loss;
}

}  // namespace

std::string to_string(DsfVariant v) { return v == DsfVariant::kLinear ? "linear" : "mlp"; }

DsfVariant parse_dsf_variant(const std::string& s) {
  if (s == "linear") return DsfVariant::kLinear;
  if (s == "mlp") return DsfVariant::kMlp;
  throw InvalidInput("unknown DSF variant '" + s + "' (expected linear or mlp)");
}

void DsfHyper::validate() const {
  if (!(lambda1 >= 0.0)) throw InvalidInput("lambda1 must be >= 0");
  if (!(l2 >= 0.0)) throw InvalidInput("l2 must be >= 0");
  if (!(init_scale >= 0.0)) throw InvalidInput("init_scale must be >= 0");
  for (const int w : hidden) {
    if (w < 1) throw InvalidInput("hidden widths must be positive");
  }
}

DsfLayout DsfLayout::make(DsfVariant variant, int d, std::vector<int> hidden) {
  if (d < 1) throw InvalidInput("DSF dimension must be positive");
  DsfLayout L;
  L.variant = variant;
  L.d = d;
  const auto ud = static_cast<std::size_t>(d);
  if (variant == DsfVariant::kLinear) {
    L.split_size = ud * ud;
    L.bias1 = 2 * L.split_size;
    L.total = 2 * L.split_size;
    return L;
  }
  if (hidden.empty()) throw InvalidInput("MLP needs at least one hidden layer");
  for (const int w : hidden) {
    if (w < 1) throw InvalidInput("hidden widths must be positive");
  }
  L.hidden = std::move(hidden);
  const auto m = static_cast<std::size_t>(L.hidden.front());
  L.split_size = ud * m * ud;
  L.bias1 = 2 * L.split_size;
  std::size_t offset = L.bias1 + ud * m;
  for (std::size_t l = 0; l < L.hidden.size(); ++l) {
    Dense layer;
    layer.in = L.hidden[l];
    layer.out = l + 1 < L.hidden.size() ? L.hidden[l + 1] : 1;
    layer.weights = offset;
    offset += ud * static_cast<std::size_t>(layer.in) * static_cast<std::size_t>(layer.out);
    layer.bias = offset;
    offset += ud * static_cast<std::size_t>(layer.out);
    L.later.push_back(layer);
  }
  L.total = offset;
  return L;
}

std::size_t DsfLayout::first_index(int target, int unit, int input) const {
  const auto ud = static_cast<std::size_t>(d);
  if (variant == DsfVariant::kLinear) return static_cast<std::size_t>(input) * ud + static_cast<std::size_t>(target);
  const auto m = static_cast<std::size_t>(first_width());
  return (static_cast<std::size_t>(target) * m + static_cast<std::size_t>(unit)) * ud + static_cast<std::size_t>(input);
}

DsfParams DsfParams::zeros(DsfVariant variant, int d, const std::vector<int>& hidden) {
  DsfLayout L = DsfLayout::make(variant, d, hidden);
  Vector values = Vector::Zero(static_cast<Eigen::Index>(L.total));
  return DsfParams(std::move(L), std::move(values));
}

DsfParams DsfParams::initialize(DsfVariant variant, int d, const DsfHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  DsfParams p = zeros(variant, d, hyper.hidden);
  if (variant == DsfVariant::kMlp) {
    Rng rng(seed);
    const DsfLayout& L = p.layout_;
    const int m = L.first_width();
    // First layer: effective weight w ~ U[-s, s] stored as (max(w, 0), max(-w, 0)).
    for (int j = 0; j < d; ++j) {
      for (int h = 0; h < m; ++h) {
        for (int i = 0; i < d; ++i) {
          const double w = uniform(rng, -hyper.init_scale, hyper.init_scale);
          if (i == j) continue;
          const auto idx = static_cast<Eigen::Index>(L.first_index(j, h, i));
          p.values_[idx] = std::max(w, 0.0);
          p.values_[idx + static_cast<Eigen::Index>(L.split_size)] = std::max(-w, 0.0);
        }
      }
    }
    for (auto i = static_cast<Eigen::Index>(L.bias1); i < p.values_.size(); ++i) {
      p.values_[i] = uniform(rng, -hyper.init_scale, hyper.init_scale);
    }
  }
  return p;
}

DsfParams DsfParams::from_values(DsfVariant variant, int d, const std::vector<int>& hidden, Vector values) {
  DsfLayout L = DsfLayout::make(variant, d, hidden);
  if (static_cast<std::size_t>(values.size()) != L.total) {
    throw InvalidInput("expected " + std::to_string(L.total) + " DSF parameters, got " +
                       std::to_string(values.size()));
  }
  return DsfParams(std::move(L), std::move(values));
}

double DsfParams::first_weight(int target, int unit, int input) const {
  const std::size_t i = layout_.first_index(target, unit, input);
  return values_[static_cast<Eigen::Index>(i)] - values_[static_cast<Eigen::Index>(i + layout_.split_size)];
}

BoxBounds DsfParams::bounds(std::span<const Edge> forbidden) const {
  BoxBounds b = BoxBounds::unbounded(values_.size());
  const auto split = static_cast<Eigen::Index>(layout_.split_size);
  b.lower.head(2 * split).setZero();
  auto pin = [&](int from, int to) {
    for (int h = 0; h < layout_.first_width(); ++h) {
      const auto i = static_cast<Eigen::Index>(layout_.first_index(to, h, from));
      b.upper[i] = 0.0;
      b.upper[i + split] = 0.0;
    }
  };
  for (int j = 0; j < layout_.d; ++j) pin(j, j);
  for (const Edge& e : forbidden) {
    if (e.from < 0 || e.to < 0 || e.from >= layout_.d || e.to >= layout_.d) {
      throw InvalidInput("forbidden edge out of range");
    }
    pin(e.from, e.to);
  }
  return b;
}

Matrix squared_adjacency(const DsfParams& params) {
  if (params.variant() == DsfVariant::kLinear) {
    const Matrix a = dsf_adjacency(params).matrix();
    return a.cwiseProduct(a);
  }
  const int d = params.dim();
  Matrix s = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const RowMajor w = first_layer(params, j);  // m x d, column i = input i
    for (int i = 0; i < d; ++i) {
      if (i != j) s(i, j) = w.col(i).squaredNorm();
    }
  }
  return s;
}

WeightedAdjacency dsf_adjacency(const DsfParams& params) {
  if (params.variant() == DsfVariant::kLinear) {
    Matrix a = linear_weights(params);
    a.diagonal().setZero();
    return WeightedAdjacency(std::move(a));
  }
  return WeightedAdjacency(squared_adjacency(params).cwiseSqrt());
}

void pullback_squared_adjacency(const DsfParams& params, const Matrix& d_ds, Vector& grad) {
  const int d = params.dim();
  if (params.variant() == DsfVariant::kLinear) {
    const Matrix a = dsf_adjacency(params).matrix();
    add_linear_grad(params, 2.0 * a.cwiseProduct(d_ds), grad);
    return;
  }
  for (int j = 0; j < d; ++j) {
    RowMajor g = 2.0 * first_layer(params, j);
    for (int i = 0; i < d; ++i) g.col(i) *= (i == j) ? 0.0 : d_ds(i, j);
    add_first_layer_grad(params, j, g, grad);
  }
}

void pullback_adjacency(const DsfParams& params, const Matrix& d_da, Vector& grad) {
  const int d = params.dim();
  if (params.variant() == DsfVariant::kLinear) {
    Matrix g = d_da;
    g.diagonal().setZero();
    add_linear_grad(params, g, grad);
    return;
  }
  for (int j = 0; j < d; ++j) {
    RowMajor g = first_layer(params, j);
    for (int i = 0; i < d; ++i) {
      const double norm = g.col(i).norm();
      g.col(i) *= (i == j || norm == 0.0) ? 0.0 : d_da(i, j) / norm;
    }
    add_first_layer_grad(params, j, g, grad);
  }
}

double fit_loss(const DsfParams& params, const Matrix& x) {
  check_data(params, x);
  if (params.variant() == DsfVariant::kLinear) return linear_fit(params, x, nullptr);
  double ridge = 0.0;
  return mlp_fit(params, x, 0.0, nullptr, &ridge);
}

double dsf_objective(const DsfParams& params, const Matrix& x, double rho, double lambda2, const DsfHyper& hyper,
                     Vector* grad, DsfTerms* terms) {
  check_data(params, x);
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  if (grad != nullptr) grad->setZero(params.size());

  DsfTerms t;
  if (params.variant() == DsfVariant::kLinear) {
    t.fit = linear_fit(params, x, grad);
  } else {
    t.fit = mlp_fit(params, x, hyper.l2, grad, &t.l2);
  }

  const auto split = static_cast<Eigen::Index>(params.layout().split_size);
  t.l1 = hyper.lambda1 * params.values().head(2 * split).sum();
  if (grad != nullptr) grad->head(2 * split).array() += hyper.lambda1;

  Matrix e_t;
  t.h = trace_exp_penalty(squared_adjacency(params), grad != nullptr ? &e_t : nullptr);
  t.penalty = 0.5 * rho * t.h * t.h + lambda2 * t.h;
  if (grad != nullptr) pullback_squared_adjacency(params, (rho * t.h + lambda2) * e_t, *grad);

  t.total = t.fit + t.l1 + t.l2 + t.penalty;
  if (terms != nullptr) *terms = t;
  return t.total;
}

}  // namespace tstruct
