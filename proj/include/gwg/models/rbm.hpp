#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// Restricted Boltzmann machine with hidden units summed out:
//   f(x) = sum_i softplus(Wx + c)_i + b'x,  x in {0,1}^D.
// W is H x D, c the hidden bias (H), b the visible bias (D).
class RbmModel : public EnergyModel {
 public:
  RbmModel(Eigen::MatrixXd W, Eigen::VectorXd b, Eigen::VectorXd c);

  int dim() const override { return static_cast<int>(W_.cols()); }
  int hidden_dim() const { return static_cast<int>(W_.rows()); }
  std::int32_t arity() const override { return 2; }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "rbm"; }

  // p(h_j = 1 | x) = sigmoid(Wx + c)_j
  Eigen::VectorXd hidden_probs(const Eigen::VectorXd& x) const;
  // p(x_i = 1 | h) = sigmoid(W'h + b)_i
  Eigen::VectorXd visible_probs(const Eigen::VectorXd& h) const;

  // Hessian of f is W' diag(s(1-s)) W with s = sigmoid(Wx+c), so
  // L <= sigma_max(W)^2 / 4.
  double lipschitz_bound() const;

  const Eigen::MatrixXd& weights() const { return W_; }
  const Eigen::VectorXd& visible_bias() const { return b_; }
  const Eigen::VectorXd& hidden_bias() const { return c_; }

 private:
  Eigen::MatrixXd W_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;
  mutable double sigma_max_ = -1.0;
};

// W ~ N(0, .05 I) (std sqrt(.05)), b, c ~ N(0, I).
RbmModel random_rbm(int visible, int hidden, RngStream& rng);

}  // namespace gwg
