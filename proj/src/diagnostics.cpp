#include "gwg/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gwg/relax.hpp"

namespace gwg {

int hamming_statistic(const DiscreteState& x, const DiscreteState& x_ref) {
  return hamming_distance(x, x_ref);
}

ChainTrace run_chain(const EnergyModel& model, const DiscreteSampler& sampler,
                     DiscreteState x0, RngStream& rng,
                     const ChainOptions& opts) {
  ChainTrace trace;
  trace.stat.reserve(opts.steps);
  trace.energy.reserve(opts.steps);
  trace.accepted.reserve(opts.steps);
  trace.cum_model_evals.reserve(opts.steps);
  trace.cum_gradient_evals.reserve(opts.steps);
  trace.seconds.reserve(opts.steps);

  DiscreteState ref = opts.reference;
  if (opts.stat == ChainStat::kHammingToRef && ref.dim() == 0)
    ref = DiscreteState(x0.dim(), x0.arity);

  DiscreteState x = std::move(x0);
  std::uint64_t cum_me = 0, cum_ge = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t t = 0; t < opts.steps; ++t) {
    const StepRecord rec = sampler.step(model, x, rng, t);
    cum_me += rec.model_evals;
    cum_ge += rec.gradient_evals;

    // Kernels that never touch f (energy_after NaN) get an uncounted
    // diagnostic evaluation so the trace stays informative.
    const bool need_energy =
        opts.record_energy || opts.stat == ChainStat::kEnergy;
    const double energy_value =
        (std::isnan(rec.energy_after) && need_energy)
            ? model.energy_state(x)
            : rec.energy_after;

    double stat = 0.0;
    switch (opts.stat) {
      case ChainStat::kHammingToRef:
        stat = static_cast<double>(hamming_statistic(x, ref));
        break;
      case ChainStat::kEnergy:
        stat = energy_value;
        break;
    }
    trace.stat.push_back(stat);
    trace.energy.push_back(energy_value);
    trace.accepted.push_back(rec.accepted ? 1 : 0);
    trace.cum_model_evals.push_back(cum_me);
    trace.cum_gradient_evals.push_back(cum_ge);
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());

    if (opts.checkpoint_every > 0 && (t + 1) % opts.checkpoint_every == 0) {
      trace.checkpoints.push_back(x);
      trace.checkpoint_steps.push_back(t + 1);
    }
  }
  trace.final_state = std::move(x);
  return trace;
}

ChainTrace run_relaxed_chain(const EnergyModel& model,
                             const RelaxedSampler& sampler, Eigen::VectorXd z0,
                             RngStream& rng, const ChainOptions& opts) {
  ChainTrace trace;
  trace.stat.reserve(opts.steps);
  trace.energy.reserve(opts.steps);
  trace.accepted.reserve(opts.steps);
  trace.cum_model_evals.reserve(opts.steps);
  trace.cum_gradient_evals.reserve(opts.steps);
  trace.seconds.reserve(opts.steps);

  DiscreteState ref = opts.reference;
  if (opts.stat == ChainStat::kHammingToRef && ref.dim() == 0)
    ref = DiscreteState(model.dim(), model.arity());

  Eigen::VectorXd z = std::move(z0);
  std::uint64_t cum_me = 0, cum_ge = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::uint64_t t = 0; t < opts.steps; ++t) {
    const StepRecord rec = sampler.step(model, z, rng);
    cum_me += rec.model_evals;
    cum_ge += rec.gradient_evals;

    const DiscreteState x = gamma_round(z);
    const bool need_energy =
        opts.record_energy || opts.stat == ChainStat::kEnergy;
    // Relaxed kernels report f at the rounded kept state, so an extra
    // evaluation is only needed if a kernel ever declines to.
    const double energy_value =
        (std::isnan(rec.energy_after) && need_energy)
            ? model.energy_state(x)
            : rec.energy_after;

    double stat = 0.0;
    switch (opts.stat) {
      case ChainStat::kHammingToRef:
        stat = static_cast<double>(hamming_statistic(x, ref));
        break;
      case ChainStat::kEnergy:
        stat = energy_value;
        break;
    }
    trace.stat.push_back(stat);
    trace.energy.push_back(energy_value);
    trace.accepted.push_back(rec.accepted ? 1 : 0);
    trace.cum_model_evals.push_back(cum_me);
    trace.cum_gradient_evals.push_back(cum_ge);
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count());

    if (opts.checkpoint_every > 0 && (t + 1) % opts.checkpoint_every == 0) {
      trace.checkpoints.push_back(x);
      trace.checkpoint_steps.push_back(t + 1);
    }
  }
  trace.final_state = gamma_round(z);
  return trace;
}

double ess(const std::vector<double>& series) {
  const std::size_t t_len = series.size();
  if (t_len < 10) throw std::invalid_argument("ess: series too short");
  double mean = 0.0;
  for (const double v : series) mean += v;
  mean /= static_cast<double>(t_len);
  double var0 = 0.0;
  for (const double v : series) var0 += (v - mean) * (v - mean);
  var0 /= static_cast<double>(t_len);  // biased autocovariance at lag 0
  if (var0 <= 0.0)
    throw std::invalid_argument("ess: constant series has no ESS");

  // Biased autocorrelations rho_k computed on demand; Geyer's rule sums
  // pairs (rho_{2m}, rho_{2m+1}) while the pair sum stays positive.
  auto rho = [&](std::size_t k) {
    if (k >= t_len) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + k < t_len; ++i)
      acc += (series[i] - mean) * (series[i + k] - mean);
    return acc / (static_cast<double>(t_len) * var0);
  };

  double iat = 0.0;  // accumulates 2 * sum of positive pair sums, minus 1
  for (std::size_t m = 0;; ++m) {
    const double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0 || 2 * m >= t_len) break;
    iat += 2.0 * pair;
  }
  iat -= 1.0;
  // A heavily antithetic chain can drive the truncated sum arbitrarily
  // close to zero; guard the division but impose no upper clamp on ESS.
  if (iat < 1e-12) iat = 1e-12;
  return static_cast<double>(t_len) / iat;
}

double exp_hamming_kernel(const DiscreteState& x, const DiscreteState& y) {
  const int d = x.dim();
  if (d != y.dim() || x.arity != y.arity)
    throw std::invalid_argument("exp_hamming_kernel: shape mismatch");
  return std::exp(-static_cast<double>(hamming_distance(x, y)) / d);
}

double mmd(const SampleSet& a, const SampleSet& b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("mmd: need at least 2 samples per set");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double kaa = 0.0, kbb = 0.0, kab = 0.0;
  for (const auto& x : a)
    for (const auto& y : a) kaa += exp_hamming_kernel(x, y);
  for (const auto& x : b)
    for (const auto& y : b) kbb += exp_hamming_kernel(x, y);
  for (const auto& x : a)
    for (const auto& y : b) kab += exp_hamming_kernel(x, y);
  const double v = kaa / (na * na) + kbb / (nb * nb) - 2.0 * kab / (na * nb);
  return v < 0.0 ? 0.0 : v;  // clip round-off only; the V-statistic is >= 0
}

CostReport cost_report(const ChainTrace& trace) {
  if (trace.size() == 0) throw std::invalid_argument("cost_report: empty trace");
  CostReport rep;
  const double t_len = static_cast<double>(trace.size());
  double accepted = 0.0;
  for (const auto a : trace.accepted) accepted += a;
  rep.acceptance_rate = accepted / t_len;
  rep.model_evals_per_step =
      static_cast<double>(trace.cum_model_evals.back()) / t_len;
  rep.gradient_evals_per_step =
      static_cast<double>(trace.cum_gradient_evals.back()) / t_len;
  rep.seconds_per_step = trace.seconds.back() / t_len;
  rep.ess_value = ess(trace.stat);
  rep.ess_per_second =
      trace.seconds.back() > 0.0 ? rep.ess_value / trace.seconds.back() : 0.0;
  return rep;
}

void write_trace_csv(const ChainTrace& trace, const std::string& path,
                     const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "# config_hash=" << config_hash << '\n';
  out << "step,stat,energy,accepted,cum_model_evals,cum_gradient_evals,"
         "seconds\n";
  char buf[160];
  for (std::size_t t = 0; t < trace.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%u,%llu,%llu,%.6g\n", t,
                  trace.stat[t], trace.energy[t],
                  static_cast<unsigned>(trace.accepted[t]),
                  static_cast<unsigned long long>(trace.cum_model_evals[t]),
                  static_cast<unsigned long long>(trace.cum_gradient_evals[t]),
                  trace.seconds[t]);
    out << buf;
  }
}

}  // namespace gwg
