#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace tstruct {

// The engine is fully specified by the standard, so streams are identical
// across platforms. The std:: distributions are not, which is why the helpers
// below derive their variates directly from engine output.
using Rng = std::mt19937_64;

// Derives an independent 64-bit seed from a master seed and a label such as
// "data", "subsample" or "init". `index` distinguishes repeats / learners.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

// Uniform in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

double uniform(Rng& rng, double lo, double hi);

// Uniform integer in [0, n). n must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

bool bernoulli(Rng& rng, double p);

// Box-Muller; consumes exactly two engine outputs per call.
double standard_normal(Rng& rng);

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace tstruct
