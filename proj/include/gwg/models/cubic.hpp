#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// Deliberately non-multilinear binary energy:
//   f(v) = 1/2 v'Av + b'v + (gamma/3)(w'v)^3
// with symmetric A whose diagonal may be nonzero. First-order Taylor
// estimates of flip differences are inexact here, so approximation bounds
// are exercised non-trivially.
class CubicModel : public EnergyModel {
 public:
  CubicModel(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd w,
             double gamma);

  int dim() const override { return static_cast<int>(A_.rows()); }
  std::int32_t arity() const override { return 2; }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "cubic"; }

  // Hessian(v) = A + 2*gamma*(w'v) ww'. Over the solid hypercube |w'v| is
  // at most max(sum of positive w_i, -sum of negative w_i), giving
  // L <= sigma_max(A) + 2|gamma| * max_corner * ||w||^2.
  double lipschitz_bound() const;

  const Eigen::MatrixXd& quad() const { return A_; }
  const Eigen::VectorXd& linear() const { return b_; }
  const Eigen::VectorXd& cubic_direction() const { return w_; }
  double gamma() const { return gamma_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd w_;
  double gamma_;
  mutable double sigma_max_a_ = -1.0;
};

// Random instance with moderate curvature so Theorem-style constants stay
// in a numerically interesting range.
CubicModel random_cubic(int dim, RngStream& rng, double quad_scale = 0.3,
                        double gamma = 0.3);

}  // namespace gwg
