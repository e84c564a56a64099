#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>

namespace gwg {

inline double logsumexp(const Eigen::VectorXd& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf, or a stray +inf/NaN dominates
  return m + std::log((v.array() - m).exp().sum());
}

// Stabilized softmax; safe when some entries are -inf (they get weight 0).
inline Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd w = (logits.array() - m).exp();
  const double total = w.sum();
  if (!(total > 0.0))
    throw std::runtime_error("softmax: no finite weight");
  return w / total;
}

inline double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
inline double softplus(double t) {
  if (t > 30.0) return t + std::exp(-t);
  if (t < -30.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

}  // namespace gwg
