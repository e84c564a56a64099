#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// Posterior of a factorial HMM with K binary factors over L time steps and
// scalar Gaussian emissions:
//   log p(x, y) = sum_t log N(y_t; w.x_t + bias, sigma2)
//              + sum_k [x_{1k} log alpha_k + (1 - x_{1k}) log(1 - alpha_k)]
//              + sum_{t,k} log p(x_{t+1,k} | x_{tk})
// where each factor keeps its value with probability beta_k. The transition
// term is extended off the corners as the multilinear form
// a*u*v + b*(u + v) + d fit exactly to the four corner log-probabilities, so
// the continuous extension is smooth with a constant Hessian.
// States are flattened time-major: coordinate t*K + k.
class FhmmPosterior : public EnergyModel {
 public:
  FhmmPosterior(Eigen::VectorXd w, double bias, double sigma2,
                Eigen::VectorXd alpha, Eigen::VectorXd beta,
                Eigen::VectorXd y);

  int dim() const override { return L_ * K_; }
  std::int32_t arity() const override { return 2; }
  int horizon() const { return L_; }
  int factors() const { return K_; }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "fhmm"; }

  // Largest |eigenvalue| of the constant Hessian (emission blocks -ww'/s2
  // within a time step, transition couplings a_k across adjacent steps).
  double lipschitz_bound() const;

  const Eigen::VectorXd& emission_weights() const { return w_; }
  double emission_bias() const { return bias_; }
  double noise_variance() const { return sigma2_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& observations() const { return y_; }
  // Multilinear transition coefficients for factor k.
  double trans_quad(int k) const { return a_[k]; }
  double trans_lin(int k) const { return bc_[k]; }
  double trans_const(int k) const { return d_[k]; }

 private:
  int L_;
  int K_;
  Eigen::VectorXd w_;
  double bias_;
  double sigma2_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd y_;
  Eigen::VectorXd a_, bc_, d_;  // per-factor transition coefficients
  mutable double hess_norm_ = -1.0;
};

// Draws w, bias ~ N(0,1), samples a latent trajectory from the chain prior
// and emits y_t = w.x_t + bias + sigma*eps. Default constants: sigma2 = .5,
// alpha_k = .1, beta_k = .95.
FhmmPosterior random_fhmm(int horizon, int factors, RngStream& rng,
                          double sigma2 = 0.5, double alpha = 0.1,
                          double beta = 0.95);

}  // namespace gwg
