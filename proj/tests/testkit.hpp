// Brute-force oracles and generators shared by the test suites. Each oracle
// is an independent implementation (no code shared with the operation it
// checks) and favors obviousness over speed.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/models/fhmm.hpp"
#include "gwg/rng.hpp"
#include "gwg/state.hpp"

namespace testkit {

// Literal evaluation of f(x') - f(x) over every state within `radius`
// Hamming distance of x (excluding x itself), by recursive enumeration.
std::vector<std::pair<gwg::DiscreteState, double>> exact_local_differences(
    const gwg::EnergyModel& model, const gwg::DiscreteState& x, int radius);

// Second, hand-coded Ising evaluation: sum over the edge list (i<j) of
// 2*theta*J_ij*x_i*x_j plus the field term.
double edge_list_ising_energy(const Eigen::MatrixXd& J, double theta,
                              const Eigen::VectorXd& b,
                              const gwg::DiscreteState& x);

// Central finite differences of an arbitrary scalar function.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& v, double h = 1e-5);
Eigen::VectorXd fd_gradient(const gwg::EnergyModel& model,
                            const Eigen::VectorXd& v, double h = 1e-5);

// Exhaustive enumeration with its own odometer loop: states in index order
// (first coordinate most significant), normalized probabilities, log Z.
struct Enumeration {
  std::vector<gwg::DiscreteState> states;
  Eigen::VectorXd probs;
  double log_z = 0.0;
};
Enumeration enumerate_naive(const gwg::EnergyModel& model);

// Forward algorithm over the 2^K joint chain: log p(y) for the generative
// process behind an FHMM posterior energy.
double fhmm_forward_log_evidence(const gwg::FhmmPosterior& model);

// Largest singular value via power iteration on M'M.
double power_iteration_sigma_max(const Eigen::MatrixXd& M, int iters = 5000);

// Second-largest (algebraic) eigenvalue of a stochastic matrix through the
// general non-symmetric eigensolver.
double dense_second_eigenvalue(const Eigen::MatrixXd& P);

// Batch-means estimate of the asymptotic variance of a stationary series.
double batch_means_asymptotic_variance(const std::vector<double>& series,
                                       int n_batches);

// Reproducible random instance. Families: ising-er, ising-lattice, rbm,
// potts, cubic, fhmm. `dim` is the total coordinate count.
std::unique_ptr<gwg::EnergyModel> random_model(const std::string& family,
                                               int dim, std::uint64_t seed);

// Max per-state z-score of observed counts against multinomial expectations.
double max_multinomial_sigma(const std::vector<std::int64_t>& counts,
                             const Eigen::VectorXd& probs);

// Naive loop/sort oracles.
int naive_hamming(const gwg::DiscreteState& a, const gwg::DiscreteState& b);
double naive_rmse_upper_triangle(const Eigen::MatrixXd& a,
                                 const Eigen::MatrixXd& b);
std::vector<std::pair<int, double>> naive_recall(
    const Eigen::MatrixXd& strengths,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& contacts,
    int exclusion_window);

}  // namespace testkit
