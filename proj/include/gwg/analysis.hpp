#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/samplers.hpp"
#include "gwg/state.hpp"

namespace gwg {

// Exact row-stochastic kernel over the enumerated state space together with
// the enumerated stationary target.
struct TransitionMatrix {
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;
  int dim = 0;
  std::int32_t arity = 2;

  std::uint64_t states() const { return static_cast<std::uint64_t>(P.rows()); }
};

inline constexpr std::uint64_t kEnumerationCap = 1ull << 20;

// Normalized p(x) over all K^D states via log-sum-exp, indexed by
// state_index().
std::pair<std::vector<DiscreteState>, Eigen::VectorXd> enumerate_distribution(
    const EnergyModel& model, std::uint64_t cap = kEnumerationCap);

// Exact kernels with closed-form per-step proposal probabilities.
TransitionMatrix gwg_transition_matrix(const EnergyModel& model);
TransitionMatrix locally_balanced_transition_matrix(const EnergyModel& model,
                                                    double tau, int radius);
// Random-scan Gibbs: average of the D per-site conditional kernels.
TransitionMatrix gibbs_transition_matrix(const EnergyModel& model);
// Single-site conditional kernel at a fixed index (each is p-stationary).
TransitionMatrix gibbs_site_transition_matrix(const EnergyModel& model,
                                              int index);
TransitionMatrix block_gibbs_transition_matrix(const EnergyModel& model,
                                               int block_size);
// Auxiliary variable marginalized out exactly.
TransitionMatrix hamming_ball_transition_matrix(const EnergyModel& model,
                                                int block_size, int ball_radius,
                                                HbBlockMode mode =
                                                    HbBlockMode::kRandomDims);
// Hidden layer summed out exactly (small H only).
TransitionMatrix rbm_block_gibbs_transition_matrix(const class RbmModel& rbm);
// iid kernel: every row equals pi (reference for gap/variance identities).
TransitionMatrix iid_transition_matrix(const EnergyModel& model);

// Checks rows sum to 1, pi P = pi, and detailed balance; returns the worst
// violations.
struct StationarityCheck {
  double max_row_sum_error = 0.0;
  double max_stationarity_error = 0.0;
  double max_detailed_balance_error = 0.0;
};
StationarityCheck check_transition_matrix(const TransitionMatrix& tm);

// 1 - lambda_2 of the pi-symmetrized kernel; requires reversibility.
double spectral_gap(const TransitionMatrix& tm, double reversibility_tol = 1e-8);

// Asymptotic variance of the ergodic average of h under the chain, via the
// fundamental-matrix linear solve (I - P + 1 pi')g = h_centered,
// var = 2<h_centered, g>_pi - var_pi(h).
double asymptotic_variance(const TransitionMatrix& tm,
                           const Eigen::VectorXd& h);

// c = exp(-L * D_H^2 / 2).
double theorem1_factor(double lipschitz, double window_diameter);

// Max Euclidean displacement of a radius-r window move: sqrt(r) for binary
// states, sqrt(2r) in the one-hot embedding.
double window_diameter(std::int32_t arity, int radius);

struct Theorem1Report {
  double lipschitz = 0.0;
  double c = 0.0;
  double gap_gwg = 0.0;
  double gap_balanced = 0.0;
  double var_gwg = 0.0;
  double var_balanced = 0.0;
  double var_p = 0.0;
  bool gap_bound_holds = false;
  bool variance_bound_holds = false;
  std::string to_text() const;
};

// Builds both exact kernels (GWG and locally-balanced tau=2 at the given
// radius... radius also feeds D_H and c) and checks
// Gap(Q_gwg) >= c Gap(Q_2) and var(h,Q_gwg) <= var(h,Q_2)/c + (1-c)/c var(h)
// with h the Hamming distance to the all-zeros state.
Theorem1Report verify_theorem1(const EnergyModel& model, double lipschitz,
                               int radius = 1);

struct NormalizerBoundsReport {
  double lipschitz = 0.0;
  double bound_factor = 0.0;  // exp(L D_H^2 / 4)
  double worst_lower_slack = 0.0;
  double worst_upper_slack = 0.0;
  bool holds = false;
  std::string to_text() const;
};

// For every state x: exp(-L D_H^2/4) Z(x) <= Z~(x) <= exp(L D_H^2/4) Z(x),
// where Z(x) sums exp(exact diff / 2) over the window and Z~ uses the
// Taylor estimates.
NormalizerBoundsReport verify_normalizer_bounds(const EnergyModel& model,
                                                double lipschitz,
                                                int radius = 1);

struct BalancingReport {
  double tau = 2.0;
  double max_identity_error = 0.0;    // tau = 2 exactness
  double max_residual_error = 0.0;    // tau != 2 residual-factor check
  bool holds = false;
  std::string to_text() const;
};

// tau=2: MH ratio == Z(x)/Z(x') for all window pairs; otherwise verifies
// ratio == exp((1 - 2/tau)(f(x') - f(x))) Z(x)/Z(x').
BalancingReport verify_balancing(const EnergyModel& model, double tau,
                                 int radius = 1);

}  // namespace gwg
