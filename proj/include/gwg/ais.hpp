#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/models/base.hpp"
#include "gwg/rng.hpp"
#include "gwg/samplers.hpp"

namespace gwg {

// Inverse-temperature path beta_0 = 0 < ... < beta_T = 1 with T transitions.
struct AnnealSchedule {
  Eigen::VectorXd betas;

  int steps() const { return static_cast<int>(betas.size()) - 1; }
  void validate() const;

  // beta_t = t / T; endpoints land on 0 and 1 exactly.
  static AnnealSchedule linear(int T);
  // Logistic ramp rescaled so the endpoints are exact; non-default option.
  static AnnealSchedule sigmoid_schedule(int T, double scale = 4.0);
};

// Interpolated target f_beta(v) = beta * f(v) + (1 - beta) * log p_n(v).
// The base log-probability is linear in the embedding, so the gradient is
// the same convex combination.
class AnnealedModel : public EnergyModel {
 public:
  AnnealedModel(const EnergyModel& model, const FactorizedBase& base,
                double beta);

  int dim() const override { return model_->dim(); }
  std::int32_t arity() const override { return model_->arity(); }
  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "annealed"; }

  double beta() const { return beta_; }
  void set_beta(double beta);

 private:
  const EnergyModel* model_;
  const FactorizedBase* base_;
  double beta_;
};

// f_beta at a state; errors if beta is outside [0, 1].
double annealed_energy(const EnergyModel& model, const FactorizedBase& base,
                       double beta, const DiscreteState& x);

struct AisResult {
  double log_z = 0.0;
  Eigen::VectorXd log_weights;  // one per chain
};

// One chain's accumulated log-weight: x ~ base, then for t = 1..T the
// weight gains f_t(x) - f_{t-1}(x) before the chain takes
// transitions_per_temp steps of `sampler` targeting f_t.
double ais_chain_log_weight(const EnergyModel& model,
                            const FactorizedBase& base,
                            const AnnealSchedule& schedule,
                            const DiscreteSampler& sampler, RngStream& rng,
                            int transitions_per_temp = 1);

// log Z estimate = logsumexp(weights) - log n_chains + log Z_base. Chains
// use independent derived streams, so their order never matters.
AisResult ais_log_z(const EnergyModel& model, const FactorizedBase& base,
                    const AnnealSchedule& schedule,
                    const DiscreteSampler& sampler, int n_chains,
                    RngStream& rng, int transitions_per_temp = 1);

struct LoglikReport {
  double nats = 0.0;          // mean_x f(x) - log Z
  double bits_per_dim = 0.0;  // -nats / (D ln 2)
};

LoglikReport ais_loglik(const EnergyModel& model,
                        const std::vector<DiscreteState>& data, double log_z);

}  // namespace gwg
