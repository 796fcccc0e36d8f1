#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "tstruct/adjacency.hpp"
#include "tstruct/rng.hpp"

namespace tstruct {

enum class GraphKind { kErdosRenyi, kScaleFree };

std::string to_string(GraphKind k);
// "er" or "sf".
GraphKind parse_graph_kind(const std::string& s);

struct GraphSpec {
  GraphKind kind = GraphKind::kErdosRenyi;
  int d = 5;
  // Expected edge count (ER only).
  double expected_edges = 10.0;
  std::uint64_t seed = 0;
};

// Random topological order, then each of the d(d-1)/2 order-respecting pairs
// independently with p = expected_edges / (d(d-1)/2). Throws InvalidInput if
// p > 1 or d < 1.
BinaryDag sample_er_dag(int d, double expected_edges, Rng& rng);

// Barabasi-Albert growth with linear preferential attachment, one edge per
// arriving node oriented new -> old, then a random relabeling. d - 1 edges.
BinaryDag sample_sf_dag(int d, Rng& rng);

BinaryDag sample_graph(const GraphSpec& spec);

// Index-model structural equations
//   X_j = sum_m h_m(sum_{k in pa(j)} theta[m](k, j) X_k) + eps_j,
// with h = (tanh, cos, sin); root nodes are pure noise.
struct SemSystem {
  BinaryDag dag = BinaryDag::empty(1);
  // theta[m](k, j) is nonzero exactly for edges k -> j, |value| in [0.5, 2].
  std::array<Matrix, 3> theta;
  double noise_scale = 1.0;
};

// theta magnitudes uniform on [0.5, 2] with a fair random sign.
SemSystem sample_index_model(const BinaryDag& dag, Rng& rng, double noise_scale = 1.0);

// Ancestral sampling of n rows with Gaussian noise of std noise_scale.
Matrix simulate(const SemSystem& sem, int n, Rng& rng);

// Column-wise zero mean, unit variance (columns with zero variance are only
// centered).
Matrix standardize(const Matrix& x);

}  // namespace tstruct
