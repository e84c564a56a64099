#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace gwg {

// Deterministic random stream. Identical (seed, stream) pairs produce
// identical draw sequences on every platform because all distributions are
// implemented here on top of the raw 64-bit generator output instead of the
// standard library distribution objects (whose algorithms are
// implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix(seed, stream)) {}

  // Raw 64 uniform bits.
  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., n-1} by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return static_cast<std::int64_t>(draw % un);
  }

  // Standard normal via Box-Muller. No caching of the second value so the
  // draw count per call is fixed, which keeps replay alignment simple.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  // Sample an index from unnormalized log weights via inverse CDF on the
  // stabilized softmax.
  Eigen::Index categorical_from_logits(const Eigen::VectorXd& logits) {
    if (logits.size() == 0)
      throw std::invalid_argument("categorical_from_logits: empty logits");
    const double m = logits.maxCoeff();
    Eigen::VectorXd w = (logits.array() - m).exp();
    const double total = w.sum();
    const double u = uniform01() * total;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return w.size() - 1;  // guard against round-off at the right edge
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  // splitmix64 finalizer; decorrelates (seed, stream) pairs before seeding
  // the engine.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace gwg
