#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "gwg/state.hpp"

namespace gwg {

// Unnormalized log-probability f with a gradient defined on the real
// embedding of the state space. Samplers only touch models through this
// interface; per-call counters live in CountedModel so evaluation budgets
// can be audited exactly.
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  // Number of discrete coordinates and number of values per coordinate.
  virtual int dim() const = 0;
  virtual std::int32_t arity() const = 0;

  // f evaluated at a real point v (the embedding of a state, or a relaxed
  // point inside the hypercube/simplex product).
  virtual double energy(const Eigen::VectorXd& v) const = 0;

  // Gradient of f at v, same length as the embedding.
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& v) const = 0;

  // Fused evaluation. Counts as one energy and one gradient evaluation;
  // models whose energy and gradient share intermediate work override this.
  virtual double energy_and_gradient(const Eigen::VectorXd& v,
                                     Eigen::VectorXd& grad_out) const {
    grad_out = gradient(v);
    return energy(v);
  }

  double energy_state(const DiscreteState& x) const { return energy(embed(x)); }

  virtual std::string name() const = 0;

  // Length of the real embedding this model's energy expects.
  Eigen::Index embedding_dim() const {
    return arity() == 2 ? dim() : static_cast<Eigen::Index>(dim()) * arity();
  }
};

// Wraps a model and counts evaluations. The fused call increments both
// counters once, matching its cost contract.
class CountedModel : public EnergyModel {
 public:
  explicit CountedModel(const EnergyModel& inner) : inner_(&inner) {}

  int dim() const override { return inner_->dim(); }
  std::int32_t arity() const override { return inner_->arity(); }

  double energy(const Eigen::VectorXd& v) const override {
    ++energy_evals_;
    return inner_->energy(v);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const override {
    ++grad_evals_;
    return inner_->gradient(v);
  }
  double energy_and_gradient(const Eigen::VectorXd& v,
                             Eigen::VectorXd& grad_out) const override {
    ++energy_evals_;
    ++grad_evals_;
    return inner_->energy_and_gradient(v, grad_out);
  }
  std::string name() const override { return inner_->name(); }

  std::uint64_t energy_evals() const { return energy_evals_; }
  std::uint64_t grad_evals() const { return grad_evals_; }
  void reset_counts() {
    energy_evals_ = 0;
    grad_evals_ = 0;
  }

 private:
  const EnergyModel* inner_;
  mutable std::uint64_t energy_evals_ = 0;
  mutable std::uint64_t grad_evals_ = 0;
};

}  // namespace gwg
