#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"
#include "gwg/samplers.hpp"
#include "gwg/state.hpp"

namespace gwg {

// Continuous relaxation of a binary target: z lives in R^D with density
// p_c(z) = N(z; 0, I) p(Gamma(z)), where Gamma thresholds at zero. The
// smoothed surrogate p_c^lambda replaces Gamma by a tempered sigmoid and is
// used for gradients only; MH corrections always target the piecewise p_c.
struct RelaxConfig {
  double lambda = 1.0;
  double epsilon = 0.1;
  int leapfrog_steps = 5;
};

// Gamma(z): z_i > 0 -> 1, else 0 (ties at exactly zero map to 0).
DiscreteState gamma_round(const Eigen::VectorXd& z);

// Tempered sigmoid 1/(1+exp(-z/lambda)).
Eigen::VectorXd gamma_lambda(const Eigen::VectorXd& z, double lambda);

// log p_c(z) up to the Gaussian normalizing constant:
// -||z||^2/2 + f(Gamma(z)).
double log_pc(const EnergyModel& model, const Eigen::VectorXd& z);

// Gradient of the smoothed log-density:
// -z + Gamma_lambda'(z) .* grad f(Gamma_lambda(z)),
// Gamma_lambda' = Gamma_lambda (1 - Gamma_lambda) / lambda.
Eigen::VectorXd grad_log_pc_lambda(const EnergyModel& model,
                                   const Eigen::VectorXd& z, double lambda);

// Langevin proposal N(z'; z + (eps/2) grad log p_c^lambda(z), eps I),
// MH-corrected against the piecewise p_c. Mutates z on acceptance.
StepRecord rmala_step(const EnergyModel& model, Eigen::VectorXd& z,
                      const RelaxConfig& cfg, RngStream& rng);

// Hamiltonian step: v ~ N(0,I), k leapfrog steps of size eps on the
// smoothed Hamiltonian, accepted with min{1, exp(H - H')} where H uses the
// piecewise -log p_c.
StepRecord rhmc_step(const EnergyModel& model, Eigen::VectorXd& z,
                     const RelaxConfig& cfg, RngStream& rng);

class RelaxedSampler {
 public:
  virtual ~RelaxedSampler() = default;
  virtual StepRecord step(const EnergyModel& model, Eigen::VectorXd& z,
                          RngStream& rng) const = 0;
  virtual std::string label() const = 0;
};

class RmalaSampler : public RelaxedSampler {
 public:
  explicit RmalaSampler(RelaxConfig cfg) : cfg_(cfg) {}
  StepRecord step(const EnergyModel& model, Eigen::VectorXd& z,
                  RngStream& rng) const override {
    return rmala_step(model, z, cfg_, rng);
  }
  std::string label() const override;

 private:
  RelaxConfig cfg_;
};

class RhmcSampler : public RelaxedSampler {
 public:
  explicit RhmcSampler(RelaxConfig cfg) : cfg_(cfg) {}
  StepRecord step(const EnergyModel& model, Eigen::VectorXd& z,
                  RngStream& rng) const override {
    return rhmc_step(model, z, cfg_, rng);
  }
  std::string label() const override;

 private:
  RelaxConfig cfg_;
};

}  // namespace gwg
