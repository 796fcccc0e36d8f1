#include "tstruct/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "tstruct/errors.hpp"

namespace tstruct {

WeightedAdjacency::WeightedAdjacency(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) {
    throw InvalidInput("adjacency must be a non-empty square matrix");
  }
  if (!m_.allFinite()) throw InvalidInput("adjacency has non-finite entries");
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (m_(i, i) != 0.0) throw InvalidInput("adjacency diagonal must be zero");
  }
}

WeightedAdjacency WeightedAdjacency::zeros(int d) { return WeightedAdjacency(Matrix::Zero(d, d)); }

BinaryGraph::BinaryGraph(int d) : d_(d) {
  if (d < 1) throw InvalidInput("graph dimension must be positive");
  adj_.assign(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0);
}

BinaryGraph BinaryGraph::from_edges(int d, const std::vector<Edge>& edges) {
  BinaryGraph g(d);
  for (const Edge& e : edges) g.add_edge(e.from, e.to);
  return g;
}

void BinaryGraph::check_pair(int from, int to) const {
  if (from < 0 || to < 0 || from >= d_ || to >= d_) {
    throw InvalidInput("edge (" + std::to_string(from) + ", " + std::to_string(to) +
                       ") out of range for d=" + std::to_string(d_));
  }
  if (from == to) throw InvalidInput("self-loop on node " + std::to_string(from));
}

void BinaryGraph::add_edge(int from, int to) {
  check_pair(from, to);
  adj_[index(from, to)] = 1;
}

void BinaryGraph::remove_edge(int from, int to) {
  check_pair(from, to);
  adj_[index(from, to)] = 0;
}

std::vector<Edge> BinaryGraph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < d_; ++j) {
      if (has_edge(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

std::size_t BinaryGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

namespace {

// Kahn's algorithm; returns fewer than d nodes when g has a cycle.
std::vector<int> kahn_order(const BinaryGraph& g) {
  const int d = g.dim();
  std::vector<int> indegree(d, 0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (g.has_edge(i, j)) ++indegree[j];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < d; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(d);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w = 0; w < d; ++w) {
      if (g.has_edge(v, w) && --indegree[w] == 0) ready.push(w);
    }
  }
  return order;
}

}  // namespace

std::optional<BinaryDag> BinaryDag::certify(BinaryGraph g) {
  if (!is_acyclic(g)) return std::nullopt;
  return BinaryDag(std::move(g));
}

BinaryDag BinaryDag::from_edges(int d, const std::vector<Edge>& edges) {
  auto dag = certify(BinaryGraph::from_edges(d, edges));
  if (!dag) throw InvalidInput("edge set contains a directed cycle");
  return *std::move(dag);
}

std::vector<int> BinaryDag::parents(int node) const {
  std::vector<int> out;
  for (int k = 0; k < dim(); ++k) {
    if (has_edge(k, node)) out.push_back(k);
  }
  return out;
}

std::vector<int> BinaryDag::topological_order() const { return kahn_order(g_); }

bool is_acyclic(const BinaryGraph& g) { return static_cast<int>(kahn_order(g).size()) == g.dim(); }

std::vector<Edge> cycle_edges(const BinaryGraph& g) {
  const int d = g.dim();
  // Transitive closure; d is small so Floyd-Warshall style is fine.
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(d * d), 0);
  auto at = [d](int i, int j) { return static_cast<std::size_t>(i * d + j); };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) reach[at(i, j)] = g.has_edge(i, j) ? 1 : 0;
  }
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      if (!reach[at(i, k)]) continue;
      for (int j = 0; j < d; ++j) {
        if (reach[at(k, j)]) reach[at(i, j)] = 1;
      }
    }
  }
  std::vector<Edge> out;
  for (const Edge& e : g.edges()) {
    if (reach[at(e.to, e.from)]) out.push_back(e);
  }
  return out;
}

Matrix matrix_exp(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix_exp needs a square matrix");
  if (!m.allFinite()) throw InvalidInput("matrix_exp input has non-finite entries");
  const Eigen::Index d = m.rows();
  if (d == 0) return m;

  // Scale so that the infinity norm is at most 1/2.
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(d, d);
  Matrix term = Matrix::Identity(d, d);
  constexpr int kMaxTerms = 40;
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-16 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

double trace_exp_penalty(const Matrix& s, Matrix* d_ds) {
  const Matrix e = matrix_exp(s);
  if (d_ds != nullptr) *d_ds = e.transpose();
  return e.trace() - static_cast<double>(s.rows());
}

double acyclicity_h(const WeightedAdjacency& a) {
  const Matrix& m = a.matrix();
  return trace_exp_penalty(m.cwiseProduct(m));
}

Matrix acyclicity_h_grad(const WeightedAdjacency& a) {
  const Matrix& m = a.matrix();
  Matrix e_t;
  trace_exp_penalty(m.cwiseProduct(m), &e_t);
  return e_t.cwiseProduct(2.0 * m);
}

BinaryGraph threshold(const WeightedAdjacency& a, double omega) {
  if (!(omega >= 0.0)) throw InvalidInput("threshold must be non-negative");
  const int d = a.dim();
  BinaryGraph g(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i != j && std::abs(a(i, j)) > omega) g.add_edge(i, j);
    }
  }
  return g;
}

}  // namespace tstruct
