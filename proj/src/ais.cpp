#include "gwg/ais.hpp"

#include <cmath>
#include <stdexcept>

#include "gwg/numerics.hpp"

namespace gwg {

void AnnealSchedule::validate() const {
  if (betas.size() < 2)
    throw std::invalid_argument("AnnealSchedule: need at least two betas");
  if (betas[0] != 0.0 || betas[betas.size() - 1] != 1.0)
    throw std::invalid_argument("AnnealSchedule: endpoints must be 0 and 1");
  for (Eigen::Index t = 1; t < betas.size(); ++t) {
    if (!(betas[t] > betas[t - 1]))
      throw std::invalid_argument("AnnealSchedule: betas must increase");
  }
}

AnnealSchedule AnnealSchedule::linear(int T) {
  if (T < 1) throw std::invalid_argument("AnnealSchedule: T must be >= 1");
  AnnealSchedule s;
  s.betas.resize(T + 1);
  for (int t = 0; t <= T; ++t)
    s.betas[t] = static_cast<double>(t) / static_cast<double>(T);
  s.validate();
  return s;
}

AnnealSchedule AnnealSchedule::sigmoid_schedule(int T, double scale) {
  if (T < 1) throw std::invalid_argument("AnnealSchedule: T must be >= 1");
  AnnealSchedule s;
  s.betas.resize(T + 1);
  const double lo = sigmoid(-scale);
  const double hi = sigmoid(scale);
  for (int t = 0; t <= T; ++t) {
    const double u = 2.0 * static_cast<double>(t) / static_cast<double>(T) - 1.0;
    s.betas[t] = (sigmoid(scale * u) - lo) / (hi - lo);
  }
  s.betas[0] = 0.0;
  s.betas[T] = 1.0;
  s.validate();
  return s;
}

AnnealedModel::AnnealedModel(const EnergyModel& model,
                             const FactorizedBase& base, double beta)
    : model_(&model), base_(&base) {
  if (model.dim() != base.dim() || model.arity() != base.arity())
    throw std::invalid_argument("AnnealedModel: model/base shape mismatch");
  set_beta(beta);
}

void AnnealedModel::set_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("AnnealedModel: beta outside [0, 1]");
  beta_ = beta;
}

double AnnealedModel::energy(const Eigen::VectorXd& v) const {
  return beta_ * model_->energy(v) + (1.0 - beta_) * base_->energy(v);
}

Eigen::VectorXd AnnealedModel::gradient(const Eigen::VectorXd& v) const {
  return beta_ * model_->gradient(v) + (1.0 - beta_) * base_->gradient(v);
}

double AnnealedModel::energy_and_gradient(const Eigen::VectorXd& v,
                                          Eigen::VectorXd& grad_out) const {
  Eigen::VectorXd inner_grad;
  const double f = model_->energy_and_gradient(v, inner_grad);
  grad_out = beta_ * inner_grad + (1.0 - beta_) * base_->gradient(v);
  return beta_ * f + (1.0 - beta_) * base_->energy(v);
}

double annealed_energy(const EnergyModel& model, const FactorizedBase& base,
                       double beta, const DiscreteState& x) {
  const AnnealedModel annealed(model, base, beta);
  return annealed.energy_state(x);
}

double ais_chain_log_weight(const EnergyModel& model,
                            const FactorizedBase& base,
                            const AnnealSchedule& schedule,
                            const DiscreteSampler& sampler, RngStream& rng,
                            int transitions_per_temp) {
  schedule.validate();
  if (transitions_per_temp < 0)
    throw std::invalid_argument("ais: negative transitions_per_temp");

  DiscreteState x = base.sample(rng);
  AnnealedModel annealed(model, base, 0.0);
  double log_w = 0.0;
  const int T = schedule.steps();
  for (int t = 1; t <= T; ++t) {
    // f_t(x) - f_{t-1}(x) = (beta_t - beta_{t-1}) (f(x) - log p_n(x)).
    const double delta = schedule.betas[t] - schedule.betas[t - 1];
    log_w += delta * (model.energy_state(x) - base.log_prob(x));
    annealed.set_beta(schedule.betas[t]);
    for (int s = 0; s < transitions_per_temp; ++s)
      sampler.step(annealed, x, rng, static_cast<std::uint64_t>(t));
  }
  if (!std::isfinite(log_w))
    throw std::runtime_error("ais: non-finite chain log-weight");
  return log_w;
}

AisResult ais_log_z(const EnergyModel& model, const FactorizedBase& base,
                    const AnnealSchedule& schedule,
                    const DiscreteSampler& sampler, int n_chains,
                    RngStream& rng, int transitions_per_temp) {
  if (n_chains < 1) throw std::invalid_argument("ais: need at least 1 chain");
  schedule.validate();

  const std::uint64_t root = rng.next_u64();
  AisResult result;
  result.log_weights.resize(n_chains);
  for (int c = 0; c < n_chains; ++c) {
    RngStream chain_rng(root, static_cast<std::uint64_t>(c));
    result.log_weights[c] = ais_chain_log_weight(
        model, base, schedule, sampler, chain_rng, transitions_per_temp);
  }
  result.log_z = logsumexp(result.log_weights) -
                 std::log(static_cast<double>(n_chains)) + base.log_z();
  if (!std::isfinite(result.log_z))
    throw std::runtime_error("ais: non-finite log Z estimate");
  return result;
}

LoglikReport ais_loglik(const EnergyModel& model,
                        const std::vector<DiscreteState>& data,
                        double log_z) {
  if (data.empty()) throw std::invalid_argument("ais_loglik: empty data");
  double mean_f = 0.0;
  for (const auto& x : data) mean_f += model.energy_state(x);
  mean_f /= static_cast<double>(data.size());
  LoglikReport report;
  report.nats = mean_f - log_z;
  report.bits_per_dim =
      -report.nats / (static_cast<double>(model.dim()) * std::log(2.0));
  return report;
}

}  // namespace gwg
