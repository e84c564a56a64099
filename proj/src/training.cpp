#include "gwg/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gwg/numerics.hpp"

namespace gwg {

// --------------------------------------------------------- ReplayBuffer

ReplayBuffer::ReplayBuffer(int capacity, int dim, std::int32_t arity,
                           RngStream& rng) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: empty capacity");
  states_.reserve(static_cast<std::size_t>(capacity));
  for (int i = 0; i < capacity; ++i)
    states_.push_back(uniform_random_state(dim, arity, rng));
}

std::vector<int> ReplayBuffer::sample_indices(int count, RngStream& rng) const {
  if (count > size())
    throw std::invalid_argument("ReplayBuffer: batch exceeds buffer");
  return sample_distinct_dims(size(), count, rng);
}

// ---------------------------------------------------------- IsingFamily

namespace {

Eigen::Index triangle_size(int d) {
  return static_cast<Eigen::Index>(d) * (d - 1) / 2;
}

}  // namespace

IsingFamily::IsingFamily(int dim)
    : model_(Eigen::MatrixXd::Zero(dim, dim), 1.0,
             Eigen::VectorXd::Zero(dim)) {}

Eigen::Index IsingFamily::n_params() const {
  return triangle_size(model_.dim());
}

Eigen::VectorXd IsingFamily::params() const {
  const int d = model_.dim();
  Eigen::VectorXd p(n_params());
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) p[idx++] = model_.coupling()(i, j);
  return p;
}

void IsingFamily::set_params(const Eigen::VectorXd& p) {
  const int d = model_.dim();
  if (p.size() != n_params())
    throw std::invalid_argument("IsingFamily: parameter size mismatch");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) J(i, j) = J(j, i) = p[idx++];
  model_ = IsingModel(std::move(J), 1.0, Eigen::VectorXd::Zero(d));
}

Eigen::VectorXd IsingFamily::suff_stats(const DiscreteState& x) const {
  // d f / d J_ij (i<j) = 2 x_i x_j under the symmetric parameterization.
  const int d = model_.dim();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_params());
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i) {
    const bool xi = x.values[static_cast<std::size_t>(i)] != 0;
    for (int j = i + 1; j < d; ++j, ++idx) {
      if (xi && x.values[static_cast<std::size_t>(j)] != 0) s[idx] = 2.0;
    }
  }
  return s;
}

std::pair<double, Eigen::VectorXd> IsingFamily::penalty() const {
  const Eigen::VectorXd p = params();
  Eigen::VectorXd sub(p.size());
  double value = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    value += std::abs(p[i]);
    sub[i] = p[i] > 0.0 ? 1.0 : (p[i] < 0.0 ? -1.0 : 0.0);
  }
  // The matrix-level penalty counts both (i,j) and (j,i).
  return {2.0 * value, 2.0 * sub};
}

// ---------------------------------------------------------- PottsFamily

PottsFamily::PottsFamily(int positions, int categories)
    : model_(positions, categories) {}

Eigen::Index PottsFamily::coupling_params() const {
  return triangle_size(model_.dim()) * model_.arity() * model_.arity();
}

Eigen::Index PottsFamily::n_params() const {
  return coupling_params() +
         static_cast<Eigen::Index>(model_.dim()) * model_.arity();
}

Eigen::VectorXd PottsFamily::params() const {
  const int d = model_.dim();
  const int k = model_.arity();
  Eigen::VectorXd p(n_params());
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const auto blk = model_.block(i, j);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) p[idx++] = blk(a, b);
    }
  }
  p.tail(static_cast<Eigen::Index>(d) * k) = model_.fields();
  return p;
}

void PottsFamily::set_params(const Eigen::VectorXd& p) {
  const int d = model_.dim();
  const int k = model_.arity();
  if (p.size() != n_params())
    throw std::invalid_argument("PottsFamily: parameter size mismatch");
  Eigen::Index idx = 0;
  Eigen::MatrixXd blk(k, k);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) blk(a, b) = p[idx++];
      model_.set_block(i, j, blk);
    }
  }
  for (int i = 0; i < d; ++i)
    model_.set_field(i, p.segment(coupling_params() +
                                      static_cast<Eigen::Index>(i) * k,
                                  k));
}

Eigen::VectorXd PottsFamily::suff_stats(const DiscreteState& x) const {
  // f = h.v + v'Mv with M_ij = J_ij mirrored: d f / d J_ij[a,b] (i<j) is
  // 2 * 1(x_i=a, x_j=b); d f / d h_i[a] = 1(x_i=a).
  const int d = model_.dim();
  const int k = model_.arity();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n_params());
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i) {
    const int xi = x.values[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j) {
      const int xj = x.values[static_cast<std::size_t>(j)];
      s[idx + static_cast<Eigen::Index>(xi) * k + xj] = 2.0;
      idx += static_cast<Eigen::Index>(k) * k;
    }
  }
  for (int i = 0; i < d; ++i) {
    s[coupling_params() + static_cast<Eigen::Index>(i) * k +
      x.values[static_cast<std::size_t>(i)]] = 1.0;
  }
  return s;
}

std::pair<double, Eigen::VectorXd> PottsFamily::penalty() const {
  const auto [value, sub_m] = block_l1_penalty(model_.coupling_matrix(),
                                               model_.arity());
  const int d = model_.dim();
  const int k = model_.arity();
  Eigen::VectorXd sub = Eigen::VectorXd::Zero(n_params());
  Eigen::Index idx = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          sub[idx++] = 2.0 * sub_m(static_cast<Eigen::Index>(i) * k + a,
                                   static_cast<Eigen::Index>(j) * k + b);
    }
  }
  return {value, sub};
}

// ------------------------------------------------------------ gradients

Eigen::VectorXd ml_gradient(const ParamFamily& family,
                            const std::vector<DiscreteState>& data_batch,
                            const std::vector<DiscreteState>& sample_batch) {
  if (data_batch.empty() || sample_batch.empty())
    throw std::invalid_argument("ml_gradient: empty batch");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(family.n_params());
  for (const auto& x : data_batch) grad += family.suff_stats(x);
  grad /= static_cast<double>(data_batch.size());
  Eigen::VectorXd neg = Eigen::VectorXd::Zero(family.n_params());
  for (const auto& x : sample_batch) neg += family.suff_stats(x);
  neg /= static_cast<double>(sample_batch.size());
  return grad - neg;
}

std::pair<double, Eigen::MatrixXd> l1_penalty(const Eigen::MatrixXd& J) {
  Eigen::MatrixXd sub(J.rows(), J.cols());
  double value = 0.0;
  for (Eigen::Index i = 0; i < J.rows(); ++i) {
    for (Eigen::Index j = 0; j < J.cols(); ++j) {
      value += std::abs(J(i, j));
      sub(i, j) = J(i, j) > 0.0 ? 1.0 : (J(i, j) < 0.0 ? -1.0 : 0.0);
    }
  }
  return {value, std::move(sub)};
}

std::pair<double, Eigen::MatrixXd> block_l1_penalty(const Eigen::MatrixXd& M,
                                                    int categories) {
  if (M.rows() % categories != 0)
    throw std::invalid_argument("block_l1_penalty: bad block size");
  const Eigen::Index d = M.rows() / categories;
  Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  double value = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const auto blk = M.block(i * categories, j * categories, categories,
                               categories);
      const double norm = blk.norm();
      value += norm;
      if (norm > 0.0)
        sub.block(i * categories, j * categories, categories, categories) =
            blk / norm;
    }
  }
  return {value, std::move(sub)};
}

void adam_ascend(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                 AdamState& state, const TrainConfig& cfg) {
  if (state.t == 0) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] += cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

TrainHistory pcd_train(ParamFamily& family,
                       const std::vector<DiscreteState>& data,
                       const DiscreteSampler& sampler, const TrainConfig& cfg,
                       RngStream& rng, const Eigen::MatrixXd* J_true) {
  if (data.empty()) throw std::invalid_argument("pcd_train: empty dataset");
  const int dim = data.front().dim();
  const std::int32_t arity = data.front().arity;

  ReplayBuffer buffer(cfg.buffer_size, dim, arity, rng);
  Eigen::VectorXd params = family.params();
  AdamState adam;
  TrainHistory hist;

  const int data_batch_size =
      std::min<int>(cfg.batch_size, static_cast<int>(data.size()));
  const int buffer_batch_size = std::min<int>(cfg.batch_size, buffer.size());

  auto record = [&](int iter, double loss, double gnorm) {
    hist.iteration.push_back(iter);
    hist.loss_proxy.push_back(loss);
    hist.grad_norm.push_back(gnorm);
    if (J_true != nullptr) {
      const auto* ising = dynamic_cast<const IsingFamily*>(&family);
      hist.rmse.push_back(ising != nullptr
                              ? rmse(ising->coupling(), *J_true)
                              : std::numeric_limits<double>::quiet_NaN());
    } else {
      hist.rmse.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  };

  std::vector<DiscreteState> data_batch(
      static_cast<std::size_t>(data_batch_size));
  std::vector<DiscreteState> sample_batch(
      static_cast<std::size_t>(buffer_batch_size));
  std::vector<std::uint64_t> slot_steps(
      static_cast<std::size_t>(buffer.size()), 0);

  // With a full-data batch the positive-phase moment never changes, so it
  // is computed once up front.
  const bool full_data_batch =
      data_batch_size == static_cast<int>(data.size());
  Eigen::VectorXd data_moment;
  if (full_data_batch) {
    data_moment = Eigen::VectorXd::Zero(family.n_params());
    for (const auto& x : data) data_moment += family.suff_stats(x);
    data_moment /= static_cast<double>(data.size());
    data_batch = data;
  }

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    if (!full_data_batch) {
      const std::vector<int> data_idx = sample_distinct_dims(
          static_cast<int>(data.size()), data_batch_size, rng);
      for (int i = 0; i < data_batch_size; ++i)
        data_batch[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(
            data_idx[static_cast<std::size_t>(i)])];
    }

    const std::vector<int> buf_idx =
        buffer.sample_indices(buffer_batch_size, rng);
    const EnergyModel& model = family.model();
    for (int i = 0; i < buffer_batch_size; ++i) {
      const int slot = buf_idx[static_cast<std::size_t>(i)];
      DiscreteState& x = buffer.at(slot);
      // Per-slot step counters persist across iterations so systematic
      // scans keep sweeping instead of revisiting the first coordinates.
      std::uint64_t& t = slot_steps[static_cast<std::size_t>(slot)];
      for (int s = 0; s < cfg.mcmc_steps; ++s) {
        sampler.step(model, x, rng, t++);
      }
      sample_batch[static_cast<std::size_t>(i)] = x;
    }

    Eigen::VectorXd grad;
    if (full_data_batch) {
      Eigen::VectorXd neg = Eigen::VectorXd::Zero(family.n_params());
      for (const auto& x : sample_batch) neg += family.suff_stats(x);
      neg /= static_cast<double>(sample_batch.size());
      grad = data_moment - neg;
    } else {
      grad = ml_gradient(family, data_batch, sample_batch);
    }
    if (cfg.l1 > 0.0) grad -= cfg.l1 * family.penalty().second;
    if (!grad.allFinite())
      throw std::runtime_error("pcd_train: non-finite gradient");
    TrainConfig step_cfg = cfg;
    if (cfg.warmup > 0 && iter < cfg.warmup) {
      step_cfg.learning_rate = cfg.learning_rate *
                               static_cast<double>(iter + 1) /
                               static_cast<double>(cfg.warmup);
    }
    adam_ascend(params, grad, adam, step_cfg);
    family.set_params(params);

    if (cfg.checkpoint_every > 0 &&
        ((iter + 1) % cfg.checkpoint_every == 0 ||
         iter + 1 == cfg.iterations)) {
      double mean_data = 0.0, mean_samples = 0.0;
      const EnergyModel& m2 = family.model();
      for (const auto& x : data_batch) mean_data += m2.energy_state(x);
      for (const auto& x : sample_batch) mean_samples += m2.energy_state(x);
      record(iter + 1,
             mean_data / static_cast<double>(data_batch.size()) -
                 mean_samples / static_cast<double>(sample_batch.size()),
             grad.norm());
    }
  }
  if (cfg.iterations == 0) record(0, 0.0, 0.0);
  hist.final_params = family.params();
  return hist;
}

std::pair<double, Eigen::VectorXd> plm_objective(
    const PottsFamily& family, const std::vector<DiscreteState>& data) {
  if (data.empty()) throw std::invalid_argument("plm_objective: empty data");
  const PottsModel& m = family.potts();
  const int d = m.dim();
  const int k = m.arity();
  double value = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(family.n_params());
  const Eigen::Index field_offset = family.coupling_params();

  // Index of block (i<j) in the packed parameter order.
  auto block_offset = [&](int i, int j) {
    // Blocks are laid out for i ascending, then j in (i, d).
    const Eigen::Index before =
        static_cast<Eigen::Index>(i) * d - static_cast<Eigen::Index>(i) * (i + 1) / 2;
    return (before + (j - i - 1)) * k * k;
  };

  for (const auto& x : data) {
    const Eigen::VectorXd v = embed(x);
    const Eigen::VectorXd s = m.coupling_matrix() * v;  // (Mv)
    for (int i = 0; i < d; ++i) {
      // Local field phi_i[a] = h_i[a] + 2 (Mv)_i[a]; the i-th block of M v
      // already excludes self-coupling because J_ii = 0.
      Eigen::VectorXd phi = m.field(i) +
                            2.0 * s.segment(static_cast<Eigen::Index>(i) * k, k);
      const Eigen::VectorXd p = softmax(phi);
      const int xi = x.values[static_cast<std::size_t>(i)];
      value += phi[xi] - logsumexp(phi);

      // d/d h_i[a] = 1(x_i=a) - p_a
      for (int a = 0; a < k; ++a) {
        grad[field_offset + static_cast<Eigen::Index>(i) * k + a] +=
            (a == xi ? 1.0 : 0.0) - p[a];
      }
      // d/d J_il[a,b] (i<l): from position i's conditional,
      // 2 * ((1(x_i=a) - p_a) * 1(x_l=b)); from l's conditional the
      // symmetric term lands when the loop reaches l.
      for (int l = 0; l < d; ++l) {
        if (l == i) continue;
        const int xl = x.values[static_cast<std::size_t>(l)];
        const int lo = std::min(i, l);
        const int hi = std::max(i, l);
        const Eigen::Index off = block_offset(lo, hi);
        for (int a = 0; a < k; ++a) {
          const double coeff = 2.0 * ((a == xi ? 1.0 : 0.0) - p[a]);
          // Parameter J_{lo,hi}[r,c]: when i==lo the contribution is at
          // (a, x_l); when i==hi the block enters transposed, so (x_l, a).
          const Eigen::Index entry =
              i == lo ? static_cast<Eigen::Index>(a) * k + xl
                      : static_cast<Eigen::Index>(xl) * k + a;
          grad[off + entry] += coeff;
        }
      }
    }
  }
  const double n = static_cast<double>(data.size());
  value /= n;
  grad /= n;
  return {value, std::move(grad)};
}

TrainHistory plm_train(PottsFamily& family,
                       const std::vector<DiscreteState>& data,
                       const TrainConfig& cfg) {
  Eigen::VectorXd params = family.params();
  AdamState adam;
  TrainHistory hist;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    auto [value, grad] = plm_objective(family, data);
    if (!std::isfinite(value))
      throw std::runtime_error("plm_train: non-finite objective");
    if (cfg.l1 > 0.0) grad -= cfg.l1 * family.penalty().second;
    adam_ascend(params, grad, adam, cfg);
    family.set_params(params);
    if (cfg.checkpoint_every > 0 &&
        ((iter + 1) % cfg.checkpoint_every == 0 ||
         iter + 1 == cfg.iterations)) {
      hist.iteration.push_back(iter + 1);
      hist.loss_proxy.push_back(value);
      hist.grad_norm.push_back(grad.norm());
      hist.rmse.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  hist.final_params = family.params();
  return hist;
}

Eigen::MatrixXd coupling_strength(const PottsModel& model) {
  const int d = model.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      out(i, j) = model.block(i, j).norm();
    }
  }
  return out;
}

std::vector<std::pair<int, double>> recall_curve(
    const Eigen::MatrixXd& strengths,
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& contacts,
    int exclusion_window) {
  if (strengths.rows() != strengths.cols() ||
      contacts.rows() != strengths.rows() ||
      contacts.cols() != strengths.cols())
    throw std::invalid_argument("recall_curve: shape mismatch");
  const int d = static_cast<int>(strengths.rows());

  struct Entry {
    double strength;
    int i;
    int j;
  };
  std::vector<Entry> entries;
  int total_contacts = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (j - i <= exclusion_window) continue;
      entries.push_back({strengths(i, j), i, j});
      if (contacts(i, j)) ++total_contacts;
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.strength != b.strength) return a.strength > b.strength;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<std::pair<int, double>> curve;
  curve.reserve(entries.size());
  int hits = 0;
  for (std::size_t r = 0; r < entries.size(); ++r) {
    if (contacts(entries[r].i, entries[r].j)) ++hits;
    curve.emplace_back(static_cast<int>(r + 1),
                       total_contacts > 0
                           ? static_cast<double>(hits) / total_contacts
                           : 0.0);
  }
  return curve;
}

double rmse(const Eigen::MatrixXd& j_hat, const Eigen::MatrixXd& j_true) {
  if (j_hat.rows() != j_true.rows() || j_hat.cols() != j_true.cols())
    throw std::invalid_argument("rmse: shape mismatch");
  double acc = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < j_hat.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < j_hat.cols(); ++j) {
      const double diff = j_hat(i, j) - j_true(i, j);
      acc += diff * diff;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("rmse: no upper triangle");
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace gwg
