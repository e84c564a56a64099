#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// f(x) = theta * x'Jx + b'x on {0,1}^D with J symmetric, zero diagonal.
// Gradient of the continuous extension: 2*theta*Jx + b.
class IsingModel : public EnergyModel {
 public:
  IsingModel(Eigen::MatrixXd J, double theta, Eigen::VectorXd b);

  int dim() const override { return static_cast<int>(J_.rows()); }
  std::int32_t arity() const override { return 2; }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "ising"; }

  // L <= 2*theta*sigma_max(J); gradient is affine so this is exact.
  double lipschitz_bound() const;

  const Eigen::MatrixXd& coupling() const { return J_; }
  double theta() const { return theta_; }
  const Eigen::VectorXd& bias() const { return b_; }

 private:
  Eigen::MatrixXd J_;
  double theta_;
  Eigen::VectorXd b_;
  mutable double sigma_max_ = -1.0;  // cached largest singular value of J
};

// Cyclic 2D lattice, row-major node order, wrap-around in both axes; every
// node has degree 4 (requires rows, cols >= 3 so wrap edges are distinct).
IsingModel lattice_ising(int rows, int cols, double theta);
IsingModel lattice_ising(int rows, int cols, double theta, Eigen::VectorXd b);

// Erdos-Renyi graph with edge probability mean_degree/(D-1), unit weights.
IsingModel er_ising(int dim, double mean_degree, double theta, RngStream& rng);

}  // namespace gwg
