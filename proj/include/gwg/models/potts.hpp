#pragma once

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/rng.hpp"

namespace gwg {

// Potts model over x in {one-hot}^{D x K}:
//   f(x) = sum_i h_i . x_i + sum_{i,j} x_i' J_{ij} x_j
// with the ordered double sum over pairs, J_{ii} = 0 and J_{ij} = J_{ji}'.
// The couplings are stored as one (D*K) x (D*K) symmetric block matrix M
// whose (i,j) block is J_{ij}; on the flattened one-hot embedding v the
// energy is h.v + v'Mv and the gradient h + 2Mv.
class PottsModel : public EnergyModel {
 public:
  PottsModel(int positions, int categories);
  PottsModel(Eigen::MatrixXd M, Eigen::VectorXd h, int positions,
             int categories);

  int dim() const override { return D_; }
  std::int32_t arity() const override { return K_; }

  double energy(const Eigen::VectorXd& v) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override;
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override;
  std::string name() const override { return "potts"; }

  // Constant Hessian 2M, so L = 2 * sigma_max(M) exactly.
  double lipschitz_bound() const;

  Eigen::Block<const Eigen::MatrixXd> block(int i, int j) const {
    return M_.block(static_cast<Eigen::Index>(i) * K_,
                    static_cast<Eigen::Index>(j) * K_, K_, K_);
  }
  // Sets J_{ij} = B and J_{ji} = B' (i != j).
  void set_block(int i, int j, const Eigen::MatrixXd& B);
  Eigen::VectorXd field(int i) const {
    return h_.segment(static_cast<Eigen::Index>(i) * K_, K_);
  }
  void set_field(int i, const Eigen::VectorXd& h);

  const Eigen::MatrixXd& coupling_matrix() const { return M_; }
  const Eigen::VectorXd& fields() const { return h_; }

 private:
  void validate() const;

  int D_;
  int K_;
  Eigen::MatrixXd M_;
  Eigen::VectorXd h_;
  mutable double sigma_max_ = -1.0;
};

// Random instance: every pair gets a N(0, coupling_scale^2) block (mirrored
// for symmetry), fields N(0, 1).
PottsModel random_potts(int positions, int categories, double coupling_scale,
                        RngStream& rng);

// Embeds an Ising model as a K=2 Potts model with identical energies:
// J^potts_{ij}[1][1] = theta * J_ij and h_i = (0, b_i).
PottsModel potts_from_ising(const class IsingModel& ising);

}  // namespace gwg
