#include "tstruct/subsample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tstruct/errors.hpp"
#include "tstruct/rng.hpp"

namespace tstruct {

std::string to_string(SortKey k) { return k == SortKey::kRowSum ? "row-sum" : "lexicographic"; }

SortKey parse_sort_key(const std::string& s) {
  if (s == "lexicographic") return SortKey::kLexicographic;
  if (s == "row-sum") return SortKey::kRowSum;
  throw InvalidInput("unknown sort key '" + s + "' (expected lexicographic or row-sum)");
}

SortedData reindex_sort(const Matrix& x, SortKey key) {
  if (x.rows() < 1) throw InvalidInput("cannot sort an empty dataset");
  std::vector<int> perm(static_cast<std::size_t>(x.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  if (key == SortKey::kRowSum) {
    const Vector sums = x.rowwise().sum();
    std::stable_sort(perm.begin(), perm.end(), [&sums](int a, int b) { return sums(a) < sums(b); });
  } else {
    std::stable_sort(perm.begin(), perm.end(), [&x](int a, int b) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (x(a, c) < x(b, c)) return true;
        if (x(b, c) < x(a, c)) return false;
      }
      return false;
    });
  }
  SortedData out;
  out.data.resize(x.rows(), x.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) out.data.row(static_cast<Eigen::Index>(i)) = x.row(perm[i]);
  out.permutation = std::move(perm);
  return out;
}

namespace {

// m evenly spaced points from a to b; a single point is a.
std::vector<double> interp(double a, double b, int m) {
  std::vector<double> out;
  for (int t = 0; t < m; ++t) out.push_back(m == 1 ? a : a + (b - a) * t / (m - 1));
  return out;
}

}  // namespace

std::vector<BetaSpec> beta_family(int K) {
  if (K < 2) throw InvalidInput("beta_family needs K >= 2");
  const int half = K / 2;
  const double k = static_cast<double>(K);
  std::vector<BetaSpec> out;
  const std::vector<double> left = interp(1.0, k - 1.0, half);
  for (const double i : left) out.push_back({i, k});
  if (K % 2 == 1) out.push_back({k, k});
  for (auto j = left.rbegin(); j != left.rend(); ++j) out.push_back({k, *j});
  return out;
}

double beta_pdf(double x, const BetaSpec& spec) {
  if (x < 0.0 || x > 1.0) return 0.0;
  const double log_norm = std::lgamma(spec.alpha + spec.beta) - std::lgamma(spec.alpha) - std::lgamma(spec.beta);
  return std::exp(log_norm) * std::pow(x, spec.alpha - 1.0) * std::pow(1.0 - x, spec.beta - 1.0);
}

std::vector<double> subset_probabilities(const BetaSpec& spec, int N) {
  if (N < 1) throw InvalidInput("subset_probabilities needs N >= 1");
  if (!(spec.alpha > 0.0 && spec.beta > 0.0)) throw InvalidInput("beta shape parameters must be positive");
  std::vector<double> p(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i) {
    p[static_cast<std::size_t>(i - 1)] = beta_pdf(static_cast<double>(i) / N, spec);
  }
  const double peak = *std::max_element(p.begin(), p.end());
  if (!(peak > 0.0) || !std::isfinite(peak)) throw InvalidInput("beta density has no finite positive peak");
  for (double& v : p) v /= peak;
  return p;
}

SubsetPartition draw_subsets(const std::vector<std::vector<double>>& probabilities, std::uint64_t seed) {
  const int K = static_cast<int>(probabilities.size());
  if (K < 1) throw InvalidInput("draw_subsets needs at least one probability vector");
  const std::size_t N = probabilities.front().size();
  if (N == 0) throw InvalidInput("draw_subsets needs non-empty probability vectors");
  for (const auto& p : probabilities) {
    if (p.size() != N) throw InvalidInput("probability vectors differ in length");
  }

  SubsetPartition out;
  out.K = K;
  out.seed = seed;
  out.index_sets.resize(static_cast<std::size_t>(K));
  std::vector<std::vector<std::uint8_t>> member(static_cast<std::size_t>(K), std::vector<std::uint8_t>(N, 0));

  Rng rng(seed);
  for (std::size_t i = 0; i < N; ++i) {
    bool picked = false;
    for (std::size_t k = 0; k < member.size(); ++k) {
      if (bernoulli(rng, probabilities[k][i])) {
        member[k][i] = 1;
        picked = true;
      }
    }
    if (!picked) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < member.size(); ++k) {
        if (probabilities[k][i] > probabilities[best][i]) best = k;
      }
      member[best][i] = 1;
    }
  }
  for (std::size_t k = 0; k < member.size(); ++k) {
    if (std::find(member[k].begin(), member[k].end(), 1) == member[k].end()) {
      const auto& p = probabilities[k];
      member[k][static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())] = 1;
    }
    for (std::size_t i = 0; i < N; ++i) {
      if (member[k][i]) out.index_sets[k].push_back(static_cast<int>(i));
    }
  }
  return out;
}

SubsetPartition random_split(int N, int K, std::uint64_t seed) {
  if (K < 1) throw InvalidInput("random_split needs K >= 1");
  if (K > N) throw InvalidInput("random_split needs K <= N");
  std::vector<int> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  shuffle(std::span<int>(idx), rng);

  SubsetPartition out;
  out.K = K;
  out.seed = seed;
  out.permutation.resize(static_cast<std::size_t>(N));
  std::iota(out.permutation.begin(), out.permutation.end(), 0);
  out.index_sets.resize(static_cast<std::size_t>(K));
  for (std::size_t i = 0; i < idx.size(); ++i) out.index_sets[i % static_cast<std::size_t>(K)].push_back(idx[i]);
  for (auto& s : out.index_sets) std::sort(s.begin(), s.end());
  return out;
}

SubsetPartition beta_subsample(const Matrix& x, int K, std::uint64_t seed, SortKey key) {
  SortedData sorted = reindex_sort(x, key);
  std::vector<std::vector<double>> probs;
  for (const BetaSpec& spec : beta_family(K)) {
    probs.push_back(subset_probabilities(spec, static_cast<int>(x.rows())));
  }
  SubsetPartition out = draw_subsets(probs, seed);
  out.permutation = std::move(sorted.permutation);
  return out;
}

std::vector<Matrix> materialize(const Matrix& x, const SubsetPartition& partition) {
  std::vector<Matrix> out;
  for (const auto& set : partition.index_sets) {
    Matrix m(static_cast<Eigen::Index>(set.size()), x.cols());
    for (std::size_t r = 0; r < set.size(); ++r) {
      const int reindexed = set[r];
      const int original = partition.permutation.empty()
                               ? reindexed
                               : partition.permutation[static_cast<std::size_t>(reindexed)];
      if (original < 0 || original >= x.rows()) throw InvalidInput("partition index out of range for dataset");
      m.row(static_cast<Eigen::Index>(r)) = x.row(original);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace tstruct
