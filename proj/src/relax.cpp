#include "gwg/relax.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gwg {

namespace {

void check_config(const RelaxConfig& cfg) {
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("relaxation: lambda must be positive");
  if (!(cfg.epsilon > 0.0))
    throw std::invalid_argument("relaxation: epsilon must be positive");
  if (cfg.leapfrog_steps < 1)
    throw std::invalid_argument("relaxation: leapfrog_steps < 1");
}

std::string format_cfg(const char* prefix, const RelaxConfig& cfg) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s-eps%g-lam%g", prefix, cfg.epsilon,
                cfg.lambda);
  return buf;
}

}  // namespace

DiscreteState gamma_round(const Eigen::VectorXd& z) {
  DiscreteState x(static_cast<int>(z.size()), 2);
  for (Eigen::Index i = 0; i < z.size(); ++i)
    x.values[static_cast<std::size_t>(i)] = z[i] > 0.0 ? 1 : 0;
  return x;
}

Eigen::VectorXd gamma_lambda(const Eigen::VectorXd& z, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("gamma_lambda: lambda must be positive");
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double t = z[i] / lambda;
    out[i] = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t))
                      : std::exp(t) / (1.0 + std::exp(t));
  }
  return out;
}

double log_pc(const EnergyModel& model, const Eigen::VectorXd& z) {
  const double f = model.energy(embed(gamma_round(z)));
  if (!std::isfinite(f)) throw std::runtime_error("log_pc: non-finite energy");
  return -0.5 * z.squaredNorm() + f;
}

Eigen::VectorXd grad_log_pc_lambda(const EnergyModel& model,
                                   const Eigen::VectorXd& z, double lambda) {
  const Eigen::VectorXd soft = gamma_lambda(z, lambda);
  const Eigen::VectorXd grad_f = model.gradient(soft);
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double deriv = soft[i] * (1.0 - soft[i]) / lambda;
    out[i] = -z[i] + deriv * grad_f[i];
  }
  return out;
}

StepRecord rmala_step(const EnergyModel& model, Eigen::VectorXd& z,
                      const RelaxConfig& cfg, RngStream& rng) {
  check_config(cfg);
  CountedModel counted(model);
  StepRecord rec;
  const double eps = cfg.epsilon;

  // Discretized Langevin proposal: drift (eps/2) g pairs with noise
  // variance eps, so the correction terms cancel to first order and the
  // acceptance tends to one as eps shrinks.
  const Eigen::VectorXd mean_fwd =
      z + 0.5 * eps * grad_log_pc_lambda(counted, z, cfg.lambda);
  Eigen::VectorXd zp = mean_fwd + std::sqrt(eps) * rng.normal_vector(z.size());

  const Eigen::VectorXd mean_rev =
      zp + 0.5 * eps * grad_log_pc_lambda(counted, zp, cfg.lambda);
  const double log_q_fwd = -(zp - mean_fwd).squaredNorm() / (2.0 * eps);
  const double log_q_rev = -(z - mean_rev).squaredNorm() / (2.0 * eps);

  const double lp_cur = log_pc(counted, z);
  const double lp_prop = log_pc(counted, zp);
  const double log_ratio = lp_prop - lp_cur + log_q_rev - log_q_fwd;

  const double log_alpha = std::min(0.0, log_ratio);
  rec.acceptance_prob = std::exp(log_alpha);
  rec.accepted = std::log(rng.uniform01()) < log_alpha;
  rec.energy_after = (rec.accepted ? lp_prop : lp_cur) +
                     0.5 * (rec.accepted ? zp : z).squaredNorm();
  if (rec.accepted) z = std::move(zp);
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord rhmc_step(const EnergyModel& model, Eigen::VectorXd& z,
                     const RelaxConfig& cfg, RngStream& rng) {
  check_config(cfg);
  CountedModel counted(model);
  StepRecord rec;
  const double eps = cfg.epsilon;

  const Eigen::VectorXd v0 = rng.normal_vector(z.size());
  const double lp_cur = log_pc(counted, z);
  const double h_cur = -lp_cur + 0.5 * v0.squaredNorm();

  Eigen::VectorXd zp = z;
  Eigen::VectorXd v = v0 + 0.5 * eps * grad_log_pc_lambda(counted, zp, cfg.lambda);
  for (int step = 0; step < cfg.leapfrog_steps; ++step) {
    zp += eps * v;
    const double scale = step + 1 == cfg.leapfrog_steps ? 0.5 : 1.0;
    v += scale * eps * grad_log_pc_lambda(counted, zp, cfg.lambda);
  }

  const double lp_prop = log_pc(counted, zp);
  const double h_prop = -lp_prop + 0.5 * v.squaredNorm();
  const double log_alpha = std::min(0.0, h_cur - h_prop);
  rec.acceptance_prob = std::exp(log_alpha);
  rec.accepted = std::log(rng.uniform01()) < log_alpha;
  // f(Gamma(z_kept)) = log_pc + ||z||^2/2, no extra evaluation needed.
  rec.energy_after = rec.accepted ? lp_prop + 0.5 * zp.squaredNorm()
                                  : lp_cur + 0.5 * z.squaredNorm();
  if (rec.accepted) z = zp;
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

std::string RmalaSampler::label() const { return format_cfg("rmala", cfg_); }
std::string RhmcSampler::label() const { return format_cfg("rhmc", cfg_); }

}  // namespace gwg
