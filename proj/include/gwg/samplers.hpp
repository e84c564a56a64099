#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"
#include "gwg/state.hpp"

namespace gwg {

// Outcome of one MH step. Eval counts are exact: every energy/gradient call
// made on behalf of the step is tallied (via CountedModel inside the step).
struct StepRecord {
  bool accepted = false;
  double acceptance_prob = 0.0;
  // Energy of the returned state when the kernel computed it; NaN for
  // kernels that never evaluate f (RBM block-Gibbs).
  double energy_after = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t model_evals = 0;
  std::uint64_t gradient_evals = 0;
};

struct ProposalOutcome {
  DiscreteState proposed;
  double log_q_fwd = 0.0;
  double log_q_rev = 0.0;
  std::vector<int> changed_indices;
};

// d_i ~= f(flip(x,i)) - f(x) from one gradient: -(2x-1) .* grad f(x).
Eigen::VectorXd diff_binary(const EnergyModel& model, const DiscreteState& x);
Eigen::VectorXd diff_binary_from_grad(const DiscreteState& x,
                                      const Eigen::VectorXd& grad);

// d_{ij} ~= f(x with dim i set to j) - f(x): grad_{ij} - grad_{i, x_i}.
// The current-value column is exactly zero.
Eigen::MatrixXd diff_categorical(const EnergyModel& model,
                                 const DiscreteState& x);
Eigen::MatrixXd diff_categorical_from_grad(const DiscreteState& x,
                                           const Eigen::VectorXd& grad);

// One gradient-informed MH step: index (and value, for K>2) drawn from
// Softmax(d/2) with the current value masked out, accepted with
// min{1, exp(f(x')-f(x)) q(i|x')/q(i|x)}. Exactly 2 energy + 2 gradient
// evaluations. Mutates x on acceptance.
StepRecord gwg_step(const EnergyModel& model, DiscreteState& x,
                    RngStream& rng);

// N iid index draws from q(i|x) toggled sequentially (binary only).
StepRecord gwg_multisample_step(const EnergyModel& model, DiscreteState& x,
                                int n_samples, RngStream& rng);

// Exact locally-balanced proposal over the Hamming window of the given
// radius: q_tau(x'|x) proportional to exp((f(x')-f(x))/tau). tau may be
// +infinity (uniform window random walk). Costs |H(x)|+|H(x')|+2 energy
// evaluations.
StepRecord locally_balanced_step(const EnergyModel& model, DiscreteState& x,
                                 double tau, int radius, RngStream& rng,
                                 std::uint64_t window_cap = (1ull << 20));

// Exact single-site conditional resample at index i (K energy evaluations).
StepRecord gibbs_step(const EnergyModel& model, DiscreteState& x, int index,
                      RngStream& rng);
// Full systematic sweep in ascending dimension order (D*K evaluations).
StepRecord gibbs_sweep(const EnergyModel& model, DiscreteState& x,
                       RngStream& rng);

// Enumerates all K^block_size configurations of a uniformly chosen block
// and resamples it from the exact joint conditional.
StepRecord block_gibbs_step(const EnergyModel& model, DiscreteState& x,
                            int block_size, RngStream& rng,
                            std::uint64_t cap = (1ull << 20));

// Auxiliary-variable Hamming ball step: u uniform in the radius-Y ball
// around the current block (center included), then the block is resampled
// from p restricted to the ball around u. block_dims selects the block.
StepRecord hamming_ball_step(const EnergyModel& model, DiscreteState& x,
                             const std::vector<int>& block_dims,
                             int ball_radius, RngStream& rng,
                             std::uint64_t cap = (1ull << 20));

// h ~ p(h|x), x' ~ p(x|h) for an RbmModel. No energy evaluations.
StepRecord rbm_block_gibbs_step(const EnergyModel& model, DiscreteState& x,
                                RngStream& rng);

// ---------------------------------------------------------------------
// Uniform stepping interface used by the chain runner and experiment
// configs. step() is a pure function of (model, state, rng, t); t is the
// step counter, which systematic-scan samplers use to pick the site.
class DiscreteSampler {
 public:
  virtual ~DiscreteSampler() = default;
  virtual StepRecord step(const EnergyModel& model, DiscreteState& x,
                          RngStream& rng, std::uint64_t t) const = 0;
  virtual std::string label() const = 0;
};

class GwgSampler : public DiscreteSampler {
 public:
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t) const override {
    return gwg_step(model, x, rng);
  }
  std::string label() const override { return "gwg"; }
};

class GwgMultiSampler : public DiscreteSampler {
 public:
  explicit GwgMultiSampler(int n_samples) : n_(n_samples) {}
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t) const override {
    return gwg_multisample_step(model, x, n_, rng);
  }
  std::string label() const override {
    return "gwg-" + std::to_string(n_);
  }

 private:
  int n_;
};

class LocallyBalancedSampler : public DiscreteSampler {
 public:
  LocallyBalancedSampler(double tau, int radius) : tau_(tau), radius_(radius) {}
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t) const override {
    return locally_balanced_step(model, x, tau_, radius_, rng);
  }
  std::string label() const override;

 private:
  double tau_;
  int radius_;
};

enum class GibbsScan { kSystematic, kRandom };

class GibbsSampler : public DiscreteSampler {
 public:
  explicit GibbsSampler(GibbsScan scan = GibbsScan::kSystematic)
      : scan_(scan) {}
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t t) const override {
    const int i = scan_ == GibbsScan::kSystematic
                      ? static_cast<int>(t % static_cast<std::uint64_t>(x.dim()))
                      : static_cast<int>(rng.uniform_int(x.dim()));
    return gibbs_step(model, x, i, rng);
  }
  std::string label() const override { return "gibbs-1"; }

 private:
  GibbsScan scan_;
};

class BlockGibbsSampler : public DiscreteSampler {
 public:
  explicit BlockGibbsSampler(int block_size) : block_size_(block_size) {}
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t) const override {
    return block_gibbs_step(model, x, block_size_, rng);
  }
  std::string label() const override {
    return "block-gibbs-" + std::to_string(block_size_);
  }

 private:
  int block_size_;
};

enum class HbBlockMode { kRandomDims, kTimeBlock };

class HammingBallSampler : public DiscreteSampler {
 public:
  HammingBallSampler(int block_size, int ball_radius,
                     HbBlockMode mode = HbBlockMode::kRandomDims)
      : block_size_(block_size), radius_(ball_radius), mode_(mode) {}
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t t) const override;
  std::string label() const override {
    return "hb-" + std::to_string(block_size_) + "-" + std::to_string(radius_);
  }

 private:
  int block_size_;
  int radius_;
  HbBlockMode mode_;
};

class RbmBlockGibbsSampler : public DiscreteSampler {
 public:
  StepRecord step(const EnergyModel& model, DiscreteState& x, RngStream& rng,
                  std::uint64_t) const override {
    return rbm_block_gibbs_step(model, x, rng);
  }
  std::string label() const override { return "rbm-block-gibbs"; }
};

// Uniformly random distinct dimensions (partial Fisher-Yates).
std::vector<int> sample_distinct_dims(int dim, int count, RngStream& rng);

}  // namespace gwg
