#include "tstruct/synthdata.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "tstruct/errors.hpp"

namespace tstruct {

std::string to_string(GraphKind k) { return k == GraphKind::kErdosRenyi ? "er" : "sf"; }

GraphKind parse_graph_kind(const std::string& s) {
  if (s == "er") return GraphKind::kErdosRenyi;
  if (s == "sf") return GraphKind::kScaleFree;
  throw InvalidInput("unknown graph kind '" + s + "' (expected er or sf)");
}

namespace {

std::vector<int> random_permutation(int d, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(std::span<int>(perm), rng);
  return perm;
}

}  // namespace

BinaryDag sample_er_dag(int d, double expected_edges, Rng& rng) {
  if (d < 1) throw InvalidInput("d must be >= 1");
  if (!(expected_edges >= 0.0)) throw InvalidInput("expected edge count must be >= 0");
  const double pairs = 0.5 * d * (d - 1);
  const double p = pairs > 0 ? expected_edges / pairs : 0.0;
  if (p > 1.0) {
    throw InvalidInput("expected edge count " + std::to_string(expected_edges) + " exceeds d(d-1)/2 = " +
                       std::to_string(pairs));
  }
  const std::vector<int> order = random_permutation(d, rng);
  BinaryGraph g(d);
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (bernoulli(rng, p)) g.add_edge(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
    }
  }
  return *BinaryDag::certify(std::move(g));
}

BinaryDag sample_sf_dag(int d, Rng& rng) {
  if (d < 2) throw InvalidInput("scale-free graphs need d >= 2");
  // Growth in arrival labels, relabeled at the end.
  std::vector<Edge> edges{{1, 0}};
  std::vector<int> degree(static_cast<std::size_t>(d), 0);
  degree[0] = degree[1] = 1;
  for (int node = 2; node < d; ++node) {
    const int total = std::accumulate(degree.begin(), degree.begin() + node, 0);
    auto target = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(total)));
    int chosen = 0;
    while (target >= degree[static_cast<std::size_t>(chosen)]) target -= degree[static_cast<std::size_t>(chosen++)];
    edges.push_back({node, chosen});
    ++degree[static_cast<std::size_t>(node)];
    ++degree[static_cast<std::size_t>(chosen)];
  }
  const std::vector<int> label = random_permutation(d, rng);
  BinaryGraph g(d);
  for (const Edge& e : edges) g.add_edge(label[static_cast<std::size_t>(e.from)], label[static_cast<std::size_t>(e.to)]);
  return *BinaryDag::certify(std::move(g));
}

BinaryDag sample_graph(const GraphSpec& spec) {
  Rng rng(spec.seed);
  return spec.kind == GraphKind::kErdosRenyi ? sample_er_dag(spec.d, spec.expected_edges, rng)
                                             : sample_sf_dag(spec.d, rng);
}

SemSystem sample_index_model(const BinaryDag& dag, Rng& rng, double noise_scale) {
  if (!(noise_scale >= 0.0)) throw InvalidInput("noise scale must be >= 0");
  const int d = dag.dim();
  SemSystem sem;
  sem.dag = dag;
  sem.noise_scale = noise_scale;
  for (Matrix& t : sem.theta) t = Matrix::Zero(d, d);
  for (const Edge& e : dag.edges()) {
    for (Matrix& t : sem.theta) {
      const double sign = bernoulli(rng, 0.5) ? 1.0 : -1.0;
      t(e.from, e.to) = sign * uniform(rng, 0.5, 2.0);
    }
  }
  return sem;
}

Matrix simulate(const SemSystem& sem, int n, Rng& rng) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  const int d = sem.dag.dim();
  // Noise is drawn row-major so the stream does not depend on the order.
  Matrix noise(n, d);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) noise(r, c) = sem.noise_scale * standard_normal(rng);
  }
  Matrix x = Matrix::Zero(n, d);
  for (const int j : sem.dag.topological_order()) {
    const std::vector<int> parents = sem.dag.parents(j);
    if (parents.empty()) {
      x.col(j) = noise.col(j);
      continue;
    }
    for (int r = 0; r < n; ++r) {
      double value = noise(r, j);
      for (int m = 0; m < 3; ++m) {
        double z = 0.0;
        for (const int k : parents) z += sem.theta[static_cast<std::size_t>(m)](k, j) * x(r, k);
        value += m == 0 ? std::tanh(z) : (m == 1 ? std::cos(z) : std::sin(z));
      }
      x(r, j) = value;
    }
  }
  return x;
}

Matrix standardize(const Matrix& x) {
  Matrix out = x.rowwise() - x.colwise().mean();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double sd = std::sqrt(out.col(c).squaredNorm() / static_cast<double>(out.rows()));
    if (sd > 0.0) out.col(c) /= sd;
  }
  return out;
}

}  // namespace tstruct
