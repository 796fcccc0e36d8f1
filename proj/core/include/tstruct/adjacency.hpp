#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace tstruct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Directed edge from variable `from` to variable `to` (0-based).
struct Edge {
  int from = 0;
  int to = 0;

  auto operator<=>(const Edge&) const = default;
};

// Real d x d matrix of edge strengths; entry (i, j) is the weight of i -> j.
// Always square, finite, with an exactly-zero diagonal.
class WeightedAdjacency {
 public:
  // Throws InvalidInput if `m` is not square, has non-finite entries or a
  // non-zero diagonal.
  explicit WeightedAdjacency(Matrix m);

  static WeightedAdjacency zeros(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

// Directed graph without self-loops; may contain cycles.
class BinaryGraph {
 public:
  explicit BinaryGraph(int d);
  static BinaryGraph from_edges(int d, const std::vector<Edge>& edges);

  int dim() const { return d_; }
  bool has_edge(int from, int to) const { return adj_[index(from, to)] != 0; }
  void add_edge(int from, int to);
  void remove_edge(int from, int to);

  // Row-major order: sorted by (from, to).
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  bool operator==(const BinaryGraph&) const = default;

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(d_) + static_cast<std::size_t>(to);
  }
  void check_pair(int from, int to) const;

  int d_;
  std::vector<std::uint8_t> adj_;
};

// A BinaryGraph certified to be acyclic. Only obtainable through certify()
// or from_edges(), so holding one is proof of acyclicity.
class BinaryDag {
 public:
  static std::optional<BinaryDag> certify(BinaryGraph g);
  // Throws InvalidInput when the edges form a cycle.
  static BinaryDag from_edges(int d, const std::vector<Edge>& edges);
  static BinaryDag empty(int d) { return BinaryDag(BinaryGraph(d)); }

  const BinaryGraph& graph() const { return g_; }
  int dim() const { return g_.dim(); }
  bool has_edge(int from, int to) const { return g_.has_edge(from, to); }
  std::vector<Edge> edges() const { return g_.edges(); }
  std::size_t edge_count() const { return g_.edge_count(); }

  // Parents of `node` in increasing index order.
  std::vector<int> parents(int node) const;
  // Kahn's algorithm with the smallest available index first.
  std::vector<int> topological_order() const;

  bool operator==(const BinaryDag&) const = default;

 private:
  explicit BinaryDag(BinaryGraph g) : g_(std::move(g)) {}
  BinaryGraph g_;
};

// Matrix exponential by scaling and squaring with a truncated Taylor series.
// Relative accuracy is ~1e-12 for ||m|| <= 50. Throws InvalidInput on
// non-square or non-finite input.
Matrix matrix_exp(const Matrix& m);

// tr(exp(s)) - d for an elementwise non-negative s (typically A o A). If
// `d_ds` is given it receives d/ds of the value, which is exp(s)^T.
double trace_exp_penalty(const Matrix& s, Matrix* d_ds = nullptr);

// h(A) = tr(exp(A o A)) - d. Zero exactly when A is the weight matrix of a DAG.
double acyclicity_h(const WeightedAdjacency& a);

// Gradient of acyclicity_h: exp(A o A)^T o 2A.
Matrix acyclicity_h_grad(const WeightedAdjacency& a);

// h values at or below this are treated as "is a DAG".
inline constexpr double kDagTolerance = 1e-8;

// Edge (i, j) present iff |A_ij| > omega. Throws InvalidInput if omega < 0.
BinaryGraph threshold(const WeightedAdjacency& a, double omega);

bool is_acyclic(const BinaryGraph& g);

// Edges that lie on at least one directed cycle, i.e. whose endpoints share
// a strongly connected component. Row-major order.
std::vector<Edge> cycle_edges(const BinaryGraph& g);

}  // namespace tstruct
