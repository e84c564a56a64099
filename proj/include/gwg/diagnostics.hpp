#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/model.hpp"
#include "gwg/samplers.hpp"
#include "gwg/state.hpp"

namespace gwg {

// Per-step record of one chain. All series share the same length; the
// cumulative eval counts are non-decreasing.
struct ChainTrace {
  std::vector<double> stat;
  std::vector<double> energy;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint64_t> cum_model_evals;
  std::vector<std::uint64_t> cum_gradient_evals;
  std::vector<double> seconds;  // cumulative wall-clock, monotonic
  std::vector<DiscreteState> checkpoints;
  std::vector<std::uint64_t> checkpoint_steps;
  DiscreteState final_state;

  std::size_t size() const { return stat.size(); }
};

using SampleSet = std::vector<DiscreteState>;

enum class ChainStat { kHammingToRef, kEnergy };

struct ChainOptions {
  std::uint64_t steps = 0;
  ChainStat stat = ChainStat::kHammingToRef;
  DiscreteState reference;      // for kHammingToRef; defaults to all-zeros
  bool record_energy = true;    // fill the energy series (uncounted evals
                                // only for kernels that don't report f)
  std::uint64_t checkpoint_every = 0;  // 0 = no checkpoints
};

// Runs one chain of `steps` sampler steps from x0 and records the trace.
ChainTrace run_chain(const EnergyModel& model, const DiscreteSampler& sampler,
                     DiscreteState x0, RngStream& rng,
                     const ChainOptions& opts);

// Same, for a continuous-relaxation sampler: the latent z evolves, the
// recorded statistic/checkpoints use the rounded (pushforward) state, and
// the energy column reports f at that state.
ChainTrace run_relaxed_chain(const EnergyModel& model,
                             const class RelaxedSampler& sampler,
                             Eigen::VectorXd z0, RngStream& rng,
                             const ChainOptions& opts);

// Number of coordinates where the two states differ.
int hamming_statistic(const DiscreteState& x, const DiscreteState& x_ref);

// Effective sample size T / (1 + 2 sum rho_k) with Geyer's initial positive
// sequence truncation (sum consecutive autocorrelation pairs while the pair
// sums stay positive). Errors on constant series; may exceed T for
// antithetic chains.
double ess(const std::vector<double>& series);

// exp(-d_H(x, x') / D): positive semidefinite similarity kernel.
double exp_hamming_kernel(const DiscreteState& x, const DiscreteState& y);

// Biased (V-statistic) squared MMD under the exponential Hamming kernel;
// always >= 0 and exactly 0 for identical multisets.
double mmd(const SampleSet& a, const SampleSet& b);

struct CostReport {
  double acceptance_rate = 0.0;
  double model_evals_per_step = 0.0;
  double gradient_evals_per_step = 0.0;
  double seconds_per_step = 0.0;
  double ess_value = 0.0;
  double ess_per_second = 0.0;
};

CostReport cost_report(const ChainTrace& trace);

// CSV export: header line with the config hash, then one row per step
// (step, stat, energy, accepted, cum_model_evals, cum_gradient_evals,
// seconds).
void write_trace_csv(const ChainTrace& trace, const std::string& path,
                     const std::string& config_hash);

}  // namespace gwg
