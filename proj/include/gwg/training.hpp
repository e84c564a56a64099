#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gwg/models/ising.hpp"
#include "gwg/models/potts.hpp"
#include "gwg/samplers.hpp"

namespace gwg {

struct TrainConfig {
  double learning_rate = 0.001;
  int batch_size = 256;
  int buffer_size = 256;
  int mcmc_steps = 25;
  double l1 = 0.01;
  int iterations = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int checkpoint_every = 50;
  // Linear learning-rate warm-up over this many iterations (0 = off).
  // Keeps the early gradient spikes, while the replay buffer burns in,
  // from exciting the collective coupling mode.
  int warmup = 0;
};

// Persistent negative-phase chains: initialized once from uniform random
// states and never reinitialized; minibatches are drawn uniformly without
// replacement and written back after the MCMC steps.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int dim, std::int32_t arity, RngStream& rng);
  int size() const { return static_cast<int>(states_.size()); }
  // Distinct indices of a uniform minibatch.
  std::vector<int> sample_indices(int count, RngStream& rng) const;
  DiscreteState& at(int i) { return states_[static_cast<std::size_t>(i)]; }
  const DiscreteState& at(int i) const {
    return states_[static_cast<std::size_t>(i)];
  }

 private:
  std::vector<DiscreteState> states_;
};

// A family of models indexed by a flat parameter vector, exposing the
// per-example parameter gradient of f (the sufficient statistics for the
// exponential families used here).
class ParamFamily {
 public:
  virtual ~ParamFamily() = default;
  virtual Eigen::Index n_params() const = 0;
  virtual Eigen::VectorXd params() const = 0;
  virtual void set_params(const Eigen::VectorXd& p) = 0;
  // View of the current model; invalidated by set_params.
  virtual const EnergyModel& model() const = 0;
  virtual Eigen::VectorXd suff_stats(const DiscreteState& x) const = 0;
  // Regularizer (value, subgradient) at the current parameters.
  virtual std::pair<double, Eigen::VectorXd> penalty() const = 0;
};

// Ising with J parameterized by its strict upper triangle (symmetry and
// zero diagonal enforced structurally); theta fixed at 1, bias fixed.
class IsingFamily : public ParamFamily {
 public:
  explicit IsingFamily(int dim);
  Eigen::Index n_params() const override;
  Eigen::VectorXd params() const override;
  void set_params(const Eigen::VectorXd& p) override;
  const EnergyModel& model() const override { return model_; }
  Eigen::VectorXd suff_stats(const DiscreteState& x) const override;
  std::pair<double, Eigen::VectorXd> penalty() const override;

  const Eigen::MatrixXd& coupling() const { return model_.coupling(); }

 private:
  IsingModel model_;
};

// Potts with the strict-upper-triangle blocks plus all fields as the
// parameter vector; block-l1 penalty on the coupling blocks only.
class PottsFamily : public ParamFamily {
 public:
  PottsFamily(int positions, int categories);
  Eigen::Index n_params() const override;
  Eigen::VectorXd params() const override;
  void set_params(const Eigen::VectorXd& p) override;
  const EnergyModel& model() const override { return model_; }
  Eigen::VectorXd suff_stats(const DiscreteState& x) const override;
  std::pair<double, Eigen::VectorXd> penalty() const override;

  const PottsModel& potts() const { return model_; }
  Eigen::Index coupling_params() const;  // leading block parameters

 private:
  PottsModel model_;
};

// Eq.-style maximum-likelihood gradient: mean suff stats over data minus
// mean over samples.
Eigen::VectorXd ml_gradient(const ParamFamily& family,
                            const std::vector<DiscreteState>& data_batch,
                            const std::vector<DiscreteState>& sample_batch);

// Elementwise l1 over a symmetric coupling matrix; subgradient 0 at zeros.
std::pair<double, Eigen::MatrixXd> l1_penalty(const Eigen::MatrixXd& J);
// Frobenius norm per (i,j) block of a Potts coupling matrix; subgradient
// block/norm (0 where the block is exactly zero).
std::pair<double, Eigen::MatrixXd> block_l1_penalty(const Eigen::MatrixXd& M,
                                                    int categories);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;
};

// One ascent step on the objective whose gradient is `grad`.
void adam_ascend(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                 AdamState& state, const TrainConfig& cfg);

struct TrainHistory {
  std::vector<int> iteration;
  std::vector<double> loss_proxy;  // mean f(data) - mean f(samples)
  std::vector<double> grad_norm;
  std::vector<double> rmse;  // vs ground truth when supplied, else NaN
  Eigen::VectorXd final_params;
};

// Persistent contrastive divergence with the given inner sampler. The
// optional J_true enables RMSE tracking for Ising recovery experiments.
TrainHistory pcd_train(ParamFamily& family,
                       const std::vector<DiscreteState>& data,
                       const DiscreteSampler& sampler, const TrainConfig& cfg,
                       RngStream& rng,
                       const Eigen::MatrixXd* J_true = nullptr);

// l1-regularized pseudo-likelihood maximization for Potts (full-batch
// adaptive-moment ascent on sum_i log p(x_i | x_-i)).
TrainHistory plm_train(PottsFamily& family,
                       const std::vector<DiscreteState>& data,
                       const TrainConfig& cfg);

// Value and gradient of the (unpenalized) mean pseudo-log-likelihood.
std::pair<double, Eigen::VectorXd> plm_objective(
    const PottsFamily& family, const std::vector<DiscreteState>& data);

// Frobenius norm of each coupling block.
Eigen::MatrixXd coupling_strength(const PottsModel& model);

// Pairs (i<j, |i-j| > exclusion) sorted by strength descending with
// lexicographic tie-break; recall at each rank against the contact map.
std::vector<std::pair<int, double>> recall_curve(
    const Eigen::MatrixXd& strengths,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& contacts,
    int exclusion_window = 0);

// Elementwise RMSE over the strict upper triangle.
double rmse(const Eigen::MatrixXd& j_hat, const Eigen::MatrixXd& j_true);

}  // namespace gwg
