#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ssp {

/// Single seeded 64-bit generator behind every sampling decision.
/// Both index draws of one iteration come from the same stream in a fixed
/// order (objective index first, then constraint index), so a run is fully
/// determined by its seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

  /// Uniform double in [0,1) built from the top 53 bits of one draw.
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Marsaglia polar; state advances deterministically.
  double normal() {
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }

  std::uint64_t raw() { return rng_(); }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n) {
    // rejection sampling keeps the distribution exact
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = rng_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

 private:
  std::mt19937_64 rng_;
};

/// Finite categorical distribution sampled by inverse CDF, so the index
/// sequence for a given stream does not depend on the standard library's
/// discrete_distribution implementation.
class Categorical {
 public:
  Categorical() = default;

  explicit Categorical(std::vector<double> weights) {
    if (weights.empty())
      throw std::invalid_argument("Categorical: empty index set");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Categorical: negative weight");
      total += w;
    }
    if (total <= 0.0)
      throw std::invalid_argument("Categorical: all weights are zero");
    cdf_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] / total;
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;  // guard against rounding in the tail
  }

  static Categorical uniform(std::size_t n) {
    return Categorical(std::vector<double>(n, 1.0));
  }

  std::size_t size() const { return cdf_.size(); }

  double probability(std::size_t i) const {
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }

  std::size_t sample(RandomStream& stream) const {
    const double u = stream.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace ssp
