#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstruct/adjacency.hpp"

namespace tstruct {

// Builds K differently distributed subsets from one dataset: rows are sorted
// so the row index tracks the covariate values, K beta densities over the
// normalized index assign per-row inclusion probabilities, and independent
// Bernoulli draws pick each subset.

struct BetaSpec {
  double alpha = 1.0;
  double beta = 1.0;

  bool operator==(const BetaSpec&) const = default;
};

struct SubsetPartition {
  int K = 0;
  // permutation[new_index] = original row index.
  std::vector<int> permutation;
  // Row indices into the reindexed dataset, ascending.
  std::vector<std::vector<int>> index_sets;
  std::uint64_t seed = 0;
};

struct SortedData {
  Matrix data;
  std::vector<int> permutation;
};

// How rows are ordered before indices are sampled. Lexicographic sorts on
// column 0 first (ties broken by column 1, ...); row-sum sorts on the sum of
// each row's values.
enum class SortKey { kLexicographic, kRowSum };

std::string to_string(SortKey k);
// "lexicographic" or "row-sum"; throws InvalidInput otherwise.
SortKey parse_sort_key(const std::string& s);

// Stable row sort by `key`.
SortedData reindex_sort(const Matrix& x, SortKey key = SortKey::kLexicographic);

// ⌊K/2⌋ left-mass specs (i, K), the centered (K, K) when K is odd, and ⌊K/2⌋
// right-mass specs (K, j). The i's are evenly spaced over [1, K-1] (a single
// point is 1) and the j's mirror them. Throws InvalidInput for K < 2.
std::vector<BetaSpec> beta_family(int K);

double beta_pdf(double x, const BetaSpec& spec);

// p_i = pdf(i / N) / max_j pdf(j / N) for i = 1..N (returned 0-based).
std::vector<double> subset_probabilities(const BetaSpec& spec, int N);

// Independent Bernoulli(p_k[i]) draw per (index, subset). Indices no subset
// picked go to argmax_k p_k[i] (lowest k on ties); an empty subset receives
// its highest-probability index. Permutation is left empty.
SubsetPartition draw_subsets(const std::vector<std::vector<double>>& probabilities, std::uint64_t seed);

// Uniform random partition into K disjoint parts whose sizes differ by at most
// one. Permutation is the identity. Throws InvalidInput if K < 1 or K > N.
SubsetPartition random_split(int N, int K, std::uint64_t seed);

// reindex_sort + beta_family + subset_probabilities + draw_subsets.
SubsetPartition beta_subsample(const Matrix& x, int K, std::uint64_t seed, SortKey key = SortKey::kLexicographic);

// Rows of `x` (original order) for each subset of `partition`.
std::vector<Matrix> materialize(const Matrix& x, const SubsetPartition& partition);

}  // namespace tstruct
