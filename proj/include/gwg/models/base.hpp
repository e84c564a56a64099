#pragma once

#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// Fully factorized distribution over {0..K-1}^D with per-dimension category
// probabilities. Normalized (log Z = 0); the log-probability is linear in
// the one-hot embedding, which makes annealed interpolations cheap.
class FactorizedBase : public EnergyModel {
 public:
  // logp is D x K with rows normalizing to 1 in probability space.
  explicit FactorizedBase(Eigen::MatrixXd logp);

  // Per-dimension empirical frequencies with add-one (Laplace) smoothing:
  // p_i(k) = (count_i(k) + 1) / (N + K).
  static FactorizedBase fit(const std::vector<DiscreteState>& data);
  static FactorizedBase uniform(int dim, std::int32_t arity);

  int dim() const override { return static_cast<int>(logp_.rows()); }
  std::int32_t arity() const override {
    return static_cast<std::int32_t>(logp_.cols());
  }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  std::string name() const override { return "factorized-base"; }

  double log_prob(const DiscreteState& x) const;
  DiscreteState sample(RngStream& rng) const;
  double log_z() const { return 0.0; }

  const Eigen::MatrixXd& log_probs() const { return logp_; }

 private:
  Eigen::MatrixXd logp_;
};

}  // namespace gwg
