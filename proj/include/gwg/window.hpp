#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gwg/state.hpp"

namespace gwg {

// Number of states at Hamming distance exactly 1..radius from a point of
// the given dimension and arity: sum_j C(dim, j) * (arity-1)^j. Saturates
// at `cap` to avoid overflow on large spaces.
inline std::uint64_t window_count(int dim, std::int32_t arity, int radius,
                                  std::uint64_t cap = (1ull << 40)) {
  if (radius < 1) throw std::invalid_argument("window_count: radius < 1");
  if (radius > dim) radius = dim;
  std::uint64_t total = 0;
  // C(dim, j) built incrementally; (arity-1)^j likewise.
  long double binom = 1.0L;
  long double pow_a = 1.0L;
  for (int j = 1; j <= radius; ++j) {
    binom = binom * static_cast<long double>(dim - j + 1) / j;
    pow_a *= static_cast<long double>(arity - 1);
    const long double term = binom * pow_a;
    if (term > static_cast<long double>(cap) ||
        static_cast<long double>(total) + term > static_cast<long double>(cap))
      return cap;
    total += static_cast<std::uint64_t>(term + 0.5L);
  }
  return total;
}

namespace detail {

inline void window_recurse(const DiscreteState& x, int start, int remaining,
                           DiscreteState& scratch,
                           std::vector<DiscreteState>& out,
                           std::uint64_t max_size) {
  if (out.size() > max_size)
    throw std::length_error("hamming_window: window exceeds max_size");
  for (int i = start; i < x.dim(); ++i) {
    const std::int32_t original = scratch.values[static_cast<std::size_t>(i)];
    for (std::int32_t v = 0; v < x.arity; ++v) {
      if (v == original) continue;
      scratch.values[static_cast<std::size_t>(i)] = v;
      out.push_back(scratch);
      if (out.size() > max_size)
        throw std::length_error("hamming_window: window exceeds max_size");
      if (remaining > 1)
        window_recurse(x, i + 1, remaining - 1, scratch, out, max_size);
    }
    scratch.values[static_cast<std::size_t>(i)] = original;
  }
}

}  // namespace detail

// All states within Hamming distance `radius` of x, excluding x itself,
// in a deterministic order (coordinates ascending, replacement values
// ascending, nested for multi-coordinate changes).
inline std::vector<DiscreteState> hamming_window(const DiscreteState& x,
                                                 int radius,
                                                 std::uint64_t max_size =
                                                     (1ull << 20)) {
  if (radius < 1) throw std::invalid_argument("hamming_window: radius < 1");
  std::vector<DiscreteState> out;
  const std::uint64_t predicted = window_count(x.dim(), x.arity, radius);
  if (predicted > max_size)
    throw std::length_error("hamming_window: window exceeds max_size");
  out.reserve(static_cast<std::size_t>(predicted));
  DiscreteState scratch = x;
  detail::window_recurse(x, 0, radius, scratch, out, max_size);
  return out;
}

}  // namespace gwg
