#include "gwg/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gwg/models/rbm.hpp"
#include "gwg/numerics.hpp"
#include "gwg/window.hpp"

namespace gwg {

namespace {

void require_finite(double e, const char* what) {
  if (!std::isfinite(e))
    throw std::runtime_error(std::string(what) + ": non-finite energy");
}

// min(0, log_ratio), then a single uniform draw decides.
bool mh_accept(double log_ratio, RngStream& rng, double& accept_prob) {
  const double log_alpha = std::min(0.0, log_ratio);
  accept_prob = std::exp(log_alpha);
  return std::log(rng.uniform01()) < log_alpha;
}

}  // namespace

Eigen::VectorXd diff_binary_from_grad(const DiscreteState& x,
                                      const Eigen::VectorXd& grad) {
  const int d = x.dim();
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    const double sign = x.values[static_cast<std::size_t>(i)] == 1 ? -1.0 : 1.0;
    out[i] = sign * grad[i];
  }
  return out;
}

Eigen::VectorXd diff_binary(const EnergyModel& model, const DiscreteState& x) {
  if (model.arity() != 2 || x.arity != 2)
    throw std::invalid_argument("diff_binary: binary models only");
  return diff_binary_from_grad(x, model.gradient(embed(x)));
}

Eigen::MatrixXd diff_categorical_from_grad(const DiscreteState& x,
                                           const Eigen::VectorXd& grad) {
  const int d = x.dim();
  const int k = x.arity;
  Eigen::MatrixXd out(d, k);
  for (int i = 0; i < d; ++i) {
    const double cur =
        grad[static_cast<Eigen::Index>(i) * k +
             x.values[static_cast<std::size_t>(i)]];
    for (int j = 0; j < k; ++j)
      out(i, j) = grad[static_cast<Eigen::Index>(i) * k + j] - cur;
  }
  return out;
}

Eigen::MatrixXd diff_categorical(const EnergyModel& model,
                                 const DiscreteState& x) {
  if (model.arity() != x.arity)
    throw std::invalid_argument("diff_categorical: arity mismatch");
  if (x.arity == 2) {
    // Binary models consume the raw 0/1 embedding, so the gradient has D
    // entries, not the D*K layout the categorical formula indexes. Compute
    // the flip vector there and spread it into the two-column layout.
    const Eigen::VectorXd d = diff_binary(model, x);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.dim(), 2);
    for (int i = 0; i < x.dim(); ++i)
      out(i, 1 - x.values[static_cast<std::size_t>(i)]) = d[i];
    return out;
  }
  return diff_categorical_from_grad(x, model.gradient(embed(x)));
}

namespace {

// Proposal logits (d/2) flattened; for K>2 the current-value entries are
// masked to -inf so they carry zero probability in the D(K-1)-way softmax.
Eigen::VectorXd gwg_logits(const DiscreteState& x, const Eigen::VectorXd& grad) {
  if (x.arity == 2) return 0.5 * diff_binary_from_grad(x, grad);
  const int d = x.dim();
  const int k = x.arity;
  Eigen::MatrixXd diff = diff_categorical_from_grad(x, grad);
  Eigen::VectorXd logits(static_cast<Eigen::Index>(d) * k);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) {
      logits[static_cast<Eigen::Index>(i) * k + j] =
          j == x.values[static_cast<std::size_t>(i)] ? neg_inf
                                                     : 0.5 * diff(i, j);
    }
  }
  return logits;
}

double log_softmax_at(const Eigen::VectorXd& logits, Eigen::Index idx) {
  return logits[idx] - logsumexp(logits);
}

}  // namespace

StepRecord gwg_step(const EnergyModel& model, DiscreteState& x,
                    RngStream& rng) {
  CountedModel counted(model);
  StepRecord rec;
  Eigen::VectorXd grad;
  const double fx = counted.energy_and_gradient(embed(x), grad);
  require_finite(fx, "gwg_step");
  const Eigen::VectorXd logits = gwg_logits(x, grad);

  const Eigen::Index pick = rng.categorical_from_logits(logits);
  DiscreteState proposal = x;
  if (x.arity == 2) {
    proposal = flipped(x, static_cast<int>(pick));
  } else {
    proposal = with_value(x, static_cast<int>(pick / x.arity),
                          static_cast<std::int32_t>(pick % x.arity));
  }

  Eigen::VectorXd grad_prop;
  const double fprop = counted.energy_and_gradient(embed(proposal), grad_prop);
  require_finite(fprop, "gwg_step");
  const Eigen::VectorXd logits_rev = gwg_logits(proposal, grad_prop);
  // The reverse move touches the same flat index in the binary case; for
  // K>2 the reverse entry is (same dim, the value we came from).
  Eigen::Index rev_idx = pick;
  if (x.arity != 2) {
    const int dim_changed = static_cast<int>(pick / x.arity);
    rev_idx = static_cast<Eigen::Index>(dim_changed) * x.arity +
              x.values[static_cast<std::size_t>(dim_changed)];
  }

  const double log_q_fwd = log_softmax_at(logits, pick);
  const double log_q_rev = log_softmax_at(logits_rev, rev_idx);
  const double log_ratio = (fprop - fx) + log_q_rev - log_q_fwd;

  rec.accepted = mh_accept(log_ratio, rng, rec.acceptance_prob);
  rec.energy_after = rec.accepted ? fprop : fx;
  if (rec.accepted) x = std::move(proposal);
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord gwg_multisample_step(const EnergyModel& model, DiscreteState& x,
                                int n_samples, RngStream& rng) {
  if (model.arity() != 2 || x.arity != 2)
    throw std::invalid_argument("gwg_multisample_step: binary models only");
  if (n_samples < 1)
    throw std::invalid_argument("gwg_multisample_step: n_samples < 1");
  CountedModel counted(model);
  StepRecord rec;
  Eigen::VectorXd grad;
  const double fx = counted.energy_and_gradient(embed(x), grad);
  require_finite(fx, "gwg_multisample_step");
  const Eigen::VectorXd logits = gwg_logits(x, grad);

  std::vector<Eigen::Index> picks(static_cast<std::size_t>(n_samples));
  DiscreteState proposal = x;
  for (int n = 0; n < n_samples; ++n) {
    const Eigen::Index i = rng.categorical_from_logits(logits);
    picks[static_cast<std::size_t>(n)] = i;
    proposal.values[static_cast<std::size_t>(i)] ^= 1;  // repeated toggles
  }

  Eigen::VectorXd grad_prop;
  const double fprop = counted.energy_and_gradient(embed(proposal), grad_prop);
  require_finite(fprop, "gwg_multisample_step");
  const Eigen::VectorXd logits_rev = gwg_logits(proposal, grad_prop);

  const double lse_fwd = logsumexp(logits);
  const double lse_rev = logsumexp(logits_rev);
  double log_q_fwd = 0.0, log_q_rev = 0.0;
  for (const Eigen::Index i : picks) {
    log_q_fwd += logits[i] - lse_fwd;
    log_q_rev += logits_rev[i] - lse_rev;
  }

  const double log_ratio = (fprop - fx) + log_q_rev - log_q_fwd;
  rec.accepted = mh_accept(log_ratio, rng, rec.acceptance_prob);
  rec.energy_after = rec.accepted ? fprop : fx;
  if (rec.accepted) x = std::move(proposal);
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord locally_balanced_step(const EnergyModel& model, DiscreteState& x,
                                 double tau, int radius, RngStream& rng,
                                 std::uint64_t window_cap) {
  if (!(tau > 0.0))
    throw std::invalid_argument("locally_balanced_step: tau must be positive");
  CountedModel counted(model);
  StepRecord rec;
  const bool uniform = std::isinf(tau);

  const double fx = counted.energy(embed(x));
  require_finite(fx, "locally_balanced_step");
  const std::vector<DiscreteState> window = hamming_window(x, radius, window_cap);
  Eigen::VectorXd logits(static_cast<Eigen::Index>(window.size()));
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double fy = counted.energy(embed(window[i]));
    logits[static_cast<Eigen::Index>(i)] = uniform ? 0.0 : (fy - fx) / tau;
  }
  const Eigen::Index pick = rng.categorical_from_logits(logits);
  const DiscreteState& proposal = window[static_cast<std::size_t>(pick)];

  const double fprop = counted.energy(embed(proposal));
  require_finite(fprop, "locally_balanced_step");
  const std::vector<DiscreteState> window_rev =
      hamming_window(proposal, radius, window_cap);
  Eigen::VectorXd logits_rev(static_cast<Eigen::Index>(window_rev.size()));
  Eigen::Index rev_idx = -1;
  for (std::size_t i = 0; i < window_rev.size(); ++i) {
    const double fy = counted.energy(embed(window_rev[i]));
    logits_rev[static_cast<Eigen::Index>(i)] = uniform ? 0.0 : (fy - fprop) / tau;
    if (window_rev[i] == x) rev_idx = static_cast<Eigen::Index>(i);
  }
  if (rev_idx < 0)
    throw std::logic_error("locally_balanced_step: x not in reverse window");

  const double log_q_fwd = logits[pick] - logsumexp(logits);
  const double log_q_rev = logits_rev[rev_idx] - logsumexp(logits_rev);
  const double log_ratio = (fprop - fx) + log_q_rev - log_q_fwd;

  rec.accepted = mh_accept(log_ratio, rng, rec.acceptance_prob);
  rec.energy_after = rec.accepted ? fprop : fx;
  if (rec.accepted) x = proposal;
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord gibbs_step(const EnergyModel& model, DiscreteState& x, int index,
                      RngStream& rng) {
  if (index < 0 || index >= x.dim())
    throw std::invalid_argument("gibbs_step: index out of range");
  CountedModel counted(model);
  StepRecord rec;
  const int k = x.arity;
  Eigen::VectorXd logits(k);
  DiscreteState probe = x;
  for (int v = 0; v < k; ++v) {
    probe.values[static_cast<std::size_t>(index)] = v;
    logits[v] = counted.energy(embed(probe));
    require_finite(logits[v], "gibbs_step");
  }
  const std::int32_t old = x.values[static_cast<std::size_t>(index)];
  const std::int32_t picked =
      static_cast<std::int32_t>(rng.categorical_from_logits(logits));
  x.values[static_cast<std::size_t>(index)] = picked;
  rec.accepted = picked != old;
  rec.acceptance_prob = 1.0;  // exact conditional resample, never rejected
  rec.energy_after = logits[picked];
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord gibbs_sweep(const EnergyModel& model, DiscreteState& x,
                       RngStream& rng) {
  StepRecord total;
  total.acceptance_prob = 1.0;
  for (int i = 0; i < x.dim(); ++i) {
    const StepRecord r = gibbs_step(model, x, i, rng);
    total.accepted = total.accepted || r.accepted;
    total.energy_after = r.energy_after;
    total.model_evals += r.model_evals;
    total.gradient_evals += r.gradient_evals;
  }
  return total;
}

std::vector<int> sample_distinct_dims(int dim, int count, RngStream& rng) {
  if (count < 1 || count > dim)
    throw std::invalid_argument("sample_distinct_dims: bad count");
  std::vector<int> pool(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(dim - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

namespace {

// Enumerates all arity^|dims| assignments of the given dimensions in
// ascending mixed-radix order (last dim fastest).
std::uint64_t block_config_count(int arity, std::size_t ndims,
                                 std::uint64_t cap) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    n *= static_cast<std::uint64_t>(arity);
    if (n > cap)
      throw std::length_error("block enumeration exceeds cap");
  }
  return n;
}

void set_block_config(DiscreteState& x, const std::vector<int>& dims,
                      std::uint64_t config) {
  for (std::size_t pos = dims.size(); pos-- > 0;) {
    x.values[static_cast<std::size_t>(dims[pos])] =
        static_cast<std::int32_t>(config % static_cast<std::uint64_t>(x.arity));
    config /= static_cast<std::uint64_t>(x.arity);
  }
}

std::uint64_t get_block_config(const DiscreteState& x,
                               const std::vector<int>& dims) {
  std::uint64_t config = 0;
  for (const int d : dims) {
    config = config * static_cast<std::uint64_t>(x.arity) +
             static_cast<std::uint64_t>(x.values[static_cast<std::size_t>(d)]);
  }
  return config;
}

int config_hamming(std::uint64_t a, std::uint64_t b, int arity,
                   std::size_t ndims) {
  int mismatches = 0;
  for (std::size_t i = 0; i < ndims; ++i) {
    if (a % static_cast<std::uint64_t>(arity) !=
        b % static_cast<std::uint64_t>(arity))
      ++mismatches;
    a /= static_cast<std::uint64_t>(arity);
    b /= static_cast<std::uint64_t>(arity);
  }
  return mismatches;
}

}  // namespace

StepRecord block_gibbs_step(const EnergyModel& model, DiscreteState& x,
                            int block_size, RngStream& rng,
                            std::uint64_t cap) {
  CountedModel counted(model);
  StepRecord rec;
  const std::vector<int> dims = sample_distinct_dims(x.dim(), block_size, rng);
  const std::uint64_t n = block_config_count(x.arity, dims.size(), cap);
  const std::uint64_t old_config = get_block_config(x, dims);

  Eigen::VectorXd logits(static_cast<Eigen::Index>(n));
  DiscreteState probe = x;
  for (std::uint64_t c = 0; c < n; ++c) {
    set_block_config(probe, dims, c);
    logits[static_cast<Eigen::Index>(c)] = counted.energy(embed(probe));
    require_finite(logits[static_cast<Eigen::Index>(c)], "block_gibbs_step");
  }
  const std::uint64_t picked =
      static_cast<std::uint64_t>(rng.categorical_from_logits(logits));
  set_block_config(x, dims, picked);
  rec.accepted = picked != old_config;
  rec.acceptance_prob = 1.0;
  rec.energy_after = logits[static_cast<Eigen::Index>(picked)];
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord hamming_ball_step(const EnergyModel& model, DiscreteState& x,
                             const std::vector<int>& block_dims,
                             int ball_radius, RngStream& rng,
                             std::uint64_t cap) {
  if (block_dims.empty())
    throw std::invalid_argument("hamming_ball_step: empty block");
  if (ball_radius < 1)
    throw std::invalid_argument("hamming_ball_step: radius < 1");
  CountedModel counted(model);
  StepRecord rec;
  const std::size_t bs = block_dims.size();
  const int radius = std::min<int>(ball_radius, static_cast<int>(bs));
  const std::uint64_t n = block_config_count(x.arity, bs, cap);

  // Ball membership is a function of configs only; enumerate once.
  const std::uint64_t cur = get_block_config(x, block_dims);
  std::vector<std::uint64_t> ball_around_cur;
  for (std::uint64_t c = 0; c < n; ++c) {
    if (config_hamming(c, cur, x.arity, bs) <= radius)
      ball_around_cur.push_back(c);
  }
  const std::uint64_t u = ball_around_cur[static_cast<std::size_t>(
      rng.uniform_int(static_cast<std::int64_t>(ball_around_cur.size())))];

  // Resample the block from p restricted to the ball around u.
  std::vector<std::uint64_t> candidates;
  for (std::uint64_t c = 0; c < n; ++c) {
    if (config_hamming(c, u, x.arity, bs) <= radius) candidates.push_back(c);
  }
  Eigen::VectorXd logits(static_cast<Eigen::Index>(candidates.size()));
  DiscreteState probe = x;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    set_block_config(probe, block_dims, candidates[i]);
    logits[static_cast<Eigen::Index>(i)] = counted.energy(embed(probe));
    require_finite(logits[static_cast<Eigen::Index>(i)], "hamming_ball_step");
  }
  const std::size_t pick = static_cast<std::size_t>(
      rng.categorical_from_logits(logits));
  set_block_config(x, block_dims, candidates[pick]);
  rec.accepted = candidates[pick] != cur;
  rec.acceptance_prob = 1.0;  // acceptance-free auxiliary construction
  rec.energy_after = logits[static_cast<Eigen::Index>(pick)];
  rec.model_evals = counted.energy_evals();
  rec.gradient_evals = counted.grad_evals();
  return rec;
}

StepRecord HammingBallSampler::step(const EnergyModel& model, DiscreteState& x,
                                    RngStream& rng, std::uint64_t) const {
  std::vector<int> dims;
  if (mode_ == HbBlockMode::kTimeBlock) {
    // All factors at one uniformly chosen time step; requires the state to
    // factor as (time steps) x (block_size) coordinates.
    if (x.dim() % block_size_ != 0)
      throw std::invalid_argument(
          "HammingBallSampler: dim not divisible by block for time mode");
    const int t = static_cast<int>(rng.uniform_int(x.dim() / block_size_));
    dims.resize(static_cast<std::size_t>(block_size_));
    for (int k = 0; k < block_size_; ++k)
      dims[static_cast<std::size_t>(k)] = t * block_size_ + k;
  } else {
    dims = sample_distinct_dims(x.dim(), block_size_, rng);
  }
  return hamming_ball_step(model, x, dims, radius_, rng);
}

StepRecord rbm_block_gibbs_step(const EnergyModel& model, DiscreteState& x,
                                RngStream& rng) {
  const auto* rbm = dynamic_cast<const RbmModel*>(&model);
  if (rbm == nullptr)
    throw std::invalid_argument("rbm_block_gibbs_step: model is not an RBM");
  StepRecord rec;
  const Eigen::VectorXd ph = rbm->hidden_probs(embed(x));
  Eigen::VectorXd h(ph.size());
  for (Eigen::Index j = 0; j < ph.size(); ++j)
    h[j] = rng.bernoulli(ph[j]) ? 1.0 : 0.0;
  const Eigen::VectorXd px = rbm->visible_probs(h);
  DiscreteState next = x;
  for (Eigen::Index i = 0; i < px.size(); ++i)
    next.values[static_cast<std::size_t>(i)] = rng.bernoulli(px[i]) ? 1 : 0;
  rec.accepted = next != x;
  rec.acceptance_prob = 1.0;
  // f is never evaluated by this kernel; energy_after stays NaN and the
  // counters stay zero.
  x = std::move(next);
  return rec;
}

std::string LocallyBalancedSampler::label() const {
  std::string t = std::isinf(tau_) ? "inf" : [this] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", tau_);
    return std::string(buf);
  }();
  return "lb-tau" + t + "-r" + std::to_string(radius_);
}

}  // namespace gwg
