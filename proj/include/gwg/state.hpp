#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gwg/rng.hpp"

namespace gwg {

// A point in {0, ..., arity-1}^dim. arity == 2 is the binary case.
struct DiscreteState {
  std::vector<std::int32_t> values;
  std::int32_t arity = 2;

  DiscreteState() = default;
  DiscreteState(int dim, std::int32_t arity_in)
      : values(checked_dim(dim), 0), arity(arity_in) {
    if (arity_in < 2) throw std::invalid_argument("DiscreteState: arity < 2");
  }

  int dim() const { return static_cast<int>(values.size()); }

  bool operator==(const DiscreteState& o) const {
    return arity == o.arity && values == o.values;
  }
  bool operator!=(const DiscreteState& o) const { return !(*this == o); }

 private:
  // Validated before the values vector is sized, so a negative dim cannot
  // reach the vector constructor as a huge unsigned count.
  static std::size_t checked_dim(int dim) {
    if (dim < 0) throw std::invalid_argument("DiscreteState: negative dim");
    return static_cast<std::size_t>(dim);
  }
};

// Real embedding used by the energy models: the raw 0/1 vector for binary
// states and a flattened one-hot matrix (dimension-major, D*K entries) for
// categorical ones.
inline Eigen::VectorXd embed(const DiscreteState& x) {
  const int d = x.dim();
  if (x.arity == 2) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = static_cast<double>(x.values[i]);
    return v;
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d) * x.arity);
  for (int i = 0; i < d; ++i) {
    v[static_cast<Eigen::Index>(i) * x.arity + x.values[i]] = 1.0;
  }
  return v;
}

// Number of coordinates that differ.
inline int hamming_distance(const DiscreteState& a, const DiscreteState& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("hamming_distance: dimension mismatch");
  int d = 0;
  for (int i = 0; i < a.dim(); ++i) d += (a.values[i] != b.values[i]) ? 1 : 0;
  return d;
}

inline DiscreteState with_value(const DiscreteState& x, int i, std::int32_t v) {
  DiscreteState y = x;
  y.values[static_cast<std::size_t>(i)] = v;
  return y;
}

inline DiscreteState flipped(const DiscreteState& x, int i) {
  if (x.arity != 2) throw std::invalid_argument("flipped: binary states only");
  return with_value(x, i, 1 - x.values[static_cast<std::size_t>(i)]);
}

inline DiscreteState uniform_random_state(int dim, std::int32_t arity,
                                          RngStream& rng) {
  DiscreteState x(dim, arity);
  for (int i = 0; i < dim; ++i)
    x.values[static_cast<std::size_t>(i)] =
        static_cast<std::int32_t>(rng.uniform_int(arity));
  return x;
}

// Lexicographic rank of a state viewed as a base-`arity` number with the
// first coordinate most significant. Used to index enumerated distributions.
inline std::uint64_t state_index(const DiscreteState& x) {
  std::uint64_t idx = 0;
  for (int i = 0; i < x.dim(); ++i) {
    idx = idx * static_cast<std::uint64_t>(x.arity) +
          static_cast<std::uint64_t>(x.values[static_cast<std::size_t>(i)]);
  }
  return idx;
}

inline DiscreteState state_from_index(std::uint64_t idx, int dim,
                                      std::int32_t arity) {
  DiscreteState x(dim, arity);
  for (int i = dim - 1; i >= 0; --i) {
    x.values[static_cast<std::size_t>(i)] =
        static_cast<std::int32_t>(idx % static_cast<std::uint64_t>(arity));
    idx /= static_cast<std::uint64_t>(arity);
  }
  return x;
}

inline std::uint64_t state_space_size(int dim, std::int32_t arity) {
  std::uint64_t n = 1;
  for (int i = 0; i < dim; ++i) {
    if (n > UINT64_MAX / static_cast<std::uint64_t>(arity))
      throw std::overflow_error("state_space_size: overflow");
    n *= static_cast<std::uint64_t>(arity);
  }
  return n;
}

}  // namespace gwg
