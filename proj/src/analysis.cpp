#include "gwg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "gwg/models/rbm.hpp"
#include "gwg/numerics.hpp"
#include "gwg/window.hpp"

namespace gwg {

namespace {

void check_enumerable(const EnergyModel& model, std::uint64_t cap) {
  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  if (n > cap)
    throw std::length_error("state space too large to enumerate");
}

Eigen::VectorXd enumerate_pi(const EnergyModel& model) {
  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  Eigen::VectorXd logp(static_cast<Eigen::Index>(n));
  for (std::uint64_t s = 0; s < n; ++s) {
    logp[static_cast<Eigen::Index>(s)] = model.energy_state(
        state_from_index(s, model.dim(), model.arity()));
  }
  const double lz = logsumexp(logp);
  return (logp.array() - lz).exp();
}

TransitionMatrix init_tm(const EnergyModel& model) {
  TransitionMatrix tm;
  tm.dim = model.dim();
  tm.arity = model.arity();
  tm.pi = enumerate_pi(model);
  const Eigen::Index n = tm.pi.size();
  tm.P = Eigen::MatrixXd::Zero(n, n);
  return tm;
}

// All states within the radius of x, plus the flat GWG proposal logits for
// moving from x (binary flips or masked one-hot moves).
Eigen::VectorXd gwg_proposal_probs(const EnergyModel& model,
                                   const DiscreteState& x,
                                   std::vector<DiscreteState>& moves) {
  const Eigen::VectorXd grad = model.gradient(embed(x));
  const int d = x.dim();
  const int k = x.arity;
  moves.clear();
  std::vector<double> logits;
  if (k == 2) {
    for (int i = 0; i < d; ++i) {
      moves.push_back(flipped(x, i));
      const double sign = x.values[static_cast<std::size_t>(i)] == 1 ? -1.0 : 1.0;
      logits.push_back(0.5 * sign * grad[i]);
    }
  } else {
    for (int i = 0; i < d; ++i) {
      const double cur = grad[static_cast<Eigen::Index>(i) * k +
                              x.values[static_cast<std::size_t>(i)]];
      for (int j = 0; j < k; ++j) {
        if (j == x.values[static_cast<std::size_t>(i)]) continue;
        moves.push_back(with_value(x, i, j));
        logits.push_back(
            0.5 * (grad[static_cast<Eigen::Index>(i) * k + j] - cur));
      }
    }
  }
  Eigen::VectorXd lv(static_cast<Eigen::Index>(logits.size()));
  for (std::size_t i = 0; i < logits.size(); ++i)
    lv[static_cast<Eigen::Index>(i)] = logits[i];
  return softmax(lv);
}

}  // namespace

std::pair<std::vector<DiscreteState>, Eigen::VectorXd> enumerate_distribution(
    const EnergyModel& model, std::uint64_t cap) {
  check_enumerable(model, cap);
  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  std::vector<DiscreteState> states;
  states.reserve(static_cast<std::size_t>(n));
  for (std::uint64_t s = 0; s < n; ++s)
    states.push_back(state_from_index(s, model.dim(), model.arity()));
  return {std::move(states), enumerate_pi(model)};
}

TransitionMatrix gwg_transition_matrix(const EnergyModel& model) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  const std::uint64_t n = tm.states();
  std::vector<DiscreteState> moves, back_moves;
  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, tm.dim, tm.arity);
    const double fx = model.energy_state(x);
    const Eigen::VectorXd q_fwd = gwg_proposal_probs(model, x, moves);
    double stay = 1.0;
    for (std::size_t m = 0; m < moves.size(); ++m) {
      const DiscreteState& y = moves[m];
      const double fy = model.energy_state(y);
      const Eigen::VectorXd q_rev = gwg_proposal_probs(model, y, back_moves);
      // Locate x among y's moves: same changed coordinate, reverse value.
      double q_back = -1.0;
      for (std::size_t r = 0; r < back_moves.size(); ++r) {
        if (back_moves[r] == x) {
          q_back = q_rev[static_cast<Eigen::Index>(r)];
          break;
        }
      }
      const double ratio =
          std::exp(fy - fx) * q_back / q_fwd[static_cast<Eigen::Index>(m)];
      const double accept = std::min(1.0, ratio);
      const double mass = q_fwd[static_cast<Eigen::Index>(m)] * accept;
      tm.P(static_cast<Eigen::Index>(s),
           static_cast<Eigen::Index>(state_index(y))) += mass;
      stay -= mass;
    }
    // Accumulated move mass can overshoot one by a few ulps; a negative
    // rejection mass would violate the entrywise non-negativity invariant.
    tm.P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) +=
        std::max(0.0, stay);
  }
  return tm;
}

TransitionMatrix locally_balanced_transition_matrix(const EnergyModel& model,
                                                    double tau, int radius) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  const std::uint64_t n = tm.states();
  const bool uniform = std::isinf(tau);

  // Precompute per-state window sums S(x) = sum exp((f(y)-f(x))/tau).
  std::vector<double> f(static_cast<std::size_t>(n));
  for (std::uint64_t s = 0; s < n; ++s)
    f[static_cast<std::size_t>(s)] =
        model.energy_state(state_from_index(s, tm.dim, tm.arity));
  std::vector<std::vector<std::uint64_t>> windows(
      static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, tm.dim, tm.arity);
    for (const DiscreteState& y : hamming_window(x, radius)) {
      const std::uint64_t sy = state_index(y);
      windows[static_cast<std::size_t>(s)].push_back(sy);
      z[static_cast<std::size_t>(s)] +=
          uniform ? 1.0
                  : std::exp((f[static_cast<std::size_t>(sy)] -
                              f[static_cast<std::size_t>(s)]) /
                             tau);
    }
  }
  for (std::uint64_t s = 0; s < n; ++s) {
    double stay = 1.0;
    for (const std::uint64_t sy : windows[static_cast<std::size_t>(s)]) {
      const double df =
          f[static_cast<std::size_t>(sy)] - f[static_cast<std::size_t>(s)];
      const double q_fwd =
          (uniform ? 1.0 : std::exp(df / tau)) / z[static_cast<std::size_t>(s)];
      const double q_rev = (uniform ? 1.0 : std::exp(-df / tau)) /
                           z[static_cast<std::size_t>(sy)];
      const double accept = std::min(1.0, std::exp(df) * q_rev / q_fwd);
      const double mass = q_fwd * accept;
      tm.P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(sy)) += mass;
      stay -= mass;
    }
    // Accumulated move mass can overshoot one by a few ulps; a negative
    // rejection mass would violate the entrywise non-negativity invariant.
    tm.P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) +=
        std::max(0.0, stay);
  }
  return tm;
}

TransitionMatrix gibbs_site_transition_matrix(const EnergyModel& model,
                                              int index) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  const std::uint64_t n = tm.states();
  const int k = tm.arity;
  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, tm.dim, tm.arity);
    Eigen::VectorXd logits(k);
    std::vector<std::uint64_t> targets(static_cast<std::size_t>(k));
    DiscreteState probe = x;
    for (int v = 0; v < k; ++v) {
      probe.values[static_cast<std::size_t>(index)] = v;
      logits[v] = model.energy_state(probe);
      targets[static_cast<std::size_t>(v)] = state_index(probe);
    }
    const Eigen::VectorXd probs = softmax(logits);
    for (int v = 0; v < k; ++v) {
      tm.P(static_cast<Eigen::Index>(s),
           static_cast<Eigen::Index>(targets[static_cast<std::size_t>(v)])) +=
          probs[v];
    }
  }
  return tm;
}

TransitionMatrix gibbs_transition_matrix(const EnergyModel& model) {
  TransitionMatrix tm;
  const int d = model.dim();
  for (int i = 0; i < d; ++i) {
    TransitionMatrix site = gibbs_site_transition_matrix(model, i);
    if (i == 0) {
      tm = std::move(site);
      tm.P /= static_cast<double>(d);
    } else {
      tm.P += site.P / static_cast<double>(d);
    }
  }
  return tm;
}

namespace {

void add_subsets(std::vector<std::vector<int>>& out, std::vector<int>& cur,
                 int next, int dim, int block_size) {
  if (static_cast<int>(cur.size()) == block_size) {
    out.push_back(cur);
    return;
  }
  for (int i = next; i < dim; ++i) {
    cur.push_back(i);
    add_subsets(out, cur, i + 1, dim, block_size);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> all_blocks(int dim, int block_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  add_subsets(out, cur, 0, dim, block_size);
  return out;
}

// Exact conditional resampling of the given dims: kernel rows over the
// full space (all states sharing the off-block coordinates communicate).
void add_block_kernel(Eigen::MatrixXd& P, const EnergyModel& model,
                      const std::vector<int>& dims, double weight) {
  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  const std::uint64_t k = static_cast<std::uint64_t>(model.arity());
  std::uint64_t configs = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) configs *= k;
  for (std::uint64_t s = 0; s < n; ++s) {
    DiscreteState x = state_from_index(s, model.dim(), model.arity());
    Eigen::VectorXd logits(static_cast<Eigen::Index>(configs));
    std::vector<std::uint64_t> targets(static_cast<std::size_t>(configs));
    for (std::uint64_t c = 0; c < configs; ++c) {
      std::uint64_t rem = c;
      for (std::size_t pos = dims.size(); pos-- > 0;) {
        x.values[static_cast<std::size_t>(dims[pos])] =
            static_cast<std::int32_t>(rem % k);
        rem /= k;
      }
      logits[static_cast<Eigen::Index>(c)] = model.energy_state(x);
      targets[static_cast<std::size_t>(c)] = state_index(x);
    }
    const Eigen::VectorXd probs = softmax(logits);
    for (std::uint64_t c = 0; c < configs; ++c) {
      P(static_cast<Eigen::Index>(s),
        static_cast<Eigen::Index>(targets[static_cast<std::size_t>(c)])) +=
          weight * probs[static_cast<Eigen::Index>(c)];
    }
  }
}

}  // namespace

TransitionMatrix block_gibbs_transition_matrix(const EnergyModel& model,
                                               int block_size) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  const auto blocks = all_blocks(model.dim(), block_size);
  const double weight = 1.0 / static_cast<double>(blocks.size());
  for (const auto& dims : blocks) add_block_kernel(tm.P, model, dims, weight);
  return tm;
}

TransitionMatrix hamming_ball_transition_matrix(const EnergyModel& model,
                                                int block_size,
                                                int ball_radius,
                                                HbBlockMode mode) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  const int k = model.arity();

  std::vector<std::vector<int>> blocks;
  if (mode == HbBlockMode::kTimeBlock) {
    if (model.dim() % block_size != 0)
      throw std::invalid_argument(
          "hamming_ball_transition_matrix: dim not divisible by block");
    for (int t = 0; t < model.dim() / block_size; ++t) {
      std::vector<int> dims(static_cast<std::size_t>(block_size));
      for (int j = 0; j < block_size; ++j)
        dims[static_cast<std::size_t>(j)] = t * block_size + j;
      blocks.push_back(std::move(dims));
    }
  } else {
    blocks = all_blocks(model.dim(), block_size);
  }
  const double block_weight = 1.0 / static_cast<double>(blocks.size());
  const int radius = std::min(ball_radius, block_size);

  std::uint64_t configs = 1;
  for (int i = 0; i < block_size; ++i) configs *= static_cast<std::uint64_t>(k);

  auto config_dist = [&](std::uint64_t a, std::uint64_t b) {
    int mism = 0;
    for (int i = 0; i < block_size; ++i) {
      if (a % static_cast<std::uint64_t>(k) != b % static_cast<std::uint64_t>(k))
        ++mism;
      a /= static_cast<std::uint64_t>(k);
      b /= static_cast<std::uint64_t>(k);
    }
    return mism;
  };

  // Ball size is center-independent.
  std::uint64_t ball_size = 0;
  for (std::uint64_t c = 0; c < configs; ++c)
    if (config_dist(c, 0) <= radius) ++ball_size;

  const std::uint64_t n = tm.states();
  for (const auto& dims : blocks) {
    for (std::uint64_t s = 0; s < n; ++s) {
      DiscreteState x = state_from_index(s, tm.dim, tm.arity);
      std::uint64_t cur = 0;
      for (const int d : dims) {
        cur = cur * static_cast<std::uint64_t>(k) +
              static_cast<std::uint64_t>(x.values[static_cast<std::size_t>(d)]);
      }
      // Marginalize the auxiliary u over the ball around the current block.
      for (std::uint64_t u = 0; u < configs; ++u) {
        if (config_dist(u, cur) > radius) continue;
        // Given u: resample block from p restricted to ball(u).
        std::vector<std::uint64_t> cands;
        std::vector<double> logits;
        DiscreteState probe = x;
        for (std::uint64_t c = 0; c < configs; ++c) {
          if (config_dist(c, u) > radius) continue;
          std::uint64_t rem = c;
          for (std::size_t pos = dims.size(); pos-- > 0;) {
            probe.values[static_cast<std::size_t>(dims[pos])] =
                static_cast<std::int32_t>(rem % static_cast<std::uint64_t>(k));
            rem /= static_cast<std::uint64_t>(k);
          }
          cands.push_back(state_index(probe));
          logits.push_back(model.energy_state(probe));
        }
        Eigen::VectorXd lv(static_cast<Eigen::Index>(logits.size()));
        for (std::size_t i = 0; i < logits.size(); ++i)
          lv[static_cast<Eigen::Index>(i)] = logits[i];
        const Eigen::VectorXd probs = softmax(lv);
        const double w = block_weight / static_cast<double>(ball_size);
        for (std::size_t i = 0; i < cands.size(); ++i) {
          tm.P(static_cast<Eigen::Index>(s),
               static_cast<Eigen::Index>(cands[i])) +=
              w * probs[static_cast<Eigen::Index>(i)];
        }
      }
    }
  }
  return tm;
}

TransitionMatrix rbm_block_gibbs_transition_matrix(const RbmModel& rbm) {
  check_enumerable(rbm, kEnumerationCap);
  TransitionMatrix tm = init_tm(rbm);
  const std::uint64_t n = tm.states();
  const int hd = rbm.hidden_dim();
  const std::uint64_t hn = 1ull << hd;
  if (hn > kEnumerationCap)
    throw std::length_error("rbm transition matrix: hidden space too large");

  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, tm.dim, 2);
    const Eigen::VectorXd ph = rbm.hidden_probs(embed(x));
    for (std::uint64_t hcfg = 0; hcfg < hn; ++hcfg) {
      double p_h = 1.0;
      Eigen::VectorXd h(hd);
      for (int j = 0; j < hd; ++j) {
        const bool on = (hcfg >> j) & 1ull;
        h[j] = on ? 1.0 : 0.0;
        p_h *= on ? ph[j] : 1.0 - ph[j];
      }
      if (p_h == 0.0) continue;
      const Eigen::VectorXd px = rbm.visible_probs(h);
      // Accumulate p(x'|h) over all x' by expanding the product measure.
      for (std::uint64_t s2 = 0; s2 < n; ++s2) {
        const DiscreteState y = state_from_index(s2, tm.dim, 2);
        double p_y = 1.0;
        for (int i = 0; i < tm.dim; ++i) {
          p_y *= y.values[static_cast<std::size_t>(i)] == 1 ? px[i]
                                                            : 1.0 - px[i];
        }
        tm.P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s2)) +=
            p_h * p_y;
      }
    }
  }
  return tm;
}

TransitionMatrix iid_transition_matrix(const EnergyModel& model) {
  check_enumerable(model, kEnumerationCap);
  TransitionMatrix tm = init_tm(model);
  for (Eigen::Index i = 0; i < tm.P.rows(); ++i)
    tm.P.row(i) = tm.pi.transpose();
  return tm;
}

StationarityCheck check_transition_matrix(const TransitionMatrix& tm) {
  StationarityCheck chk;
  const Eigen::Index n = tm.P.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    chk.max_row_sum_error =
        std::max(chk.max_row_sum_error, std::abs(tm.P.row(i).sum() - 1.0));
  }
  const Eigen::VectorXd piP = tm.P.transpose() * tm.pi;
  chk.max_stationarity_error = (piP - tm.pi).cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      chk.max_detailed_balance_error =
          std::max(chk.max_detailed_balance_error,
                   std::abs(tm.pi[i] * tm.P(i, j) - tm.pi[j] * tm.P(j, i)));
    }
  }
  return chk;
}

double spectral_gap(const TransitionMatrix& tm, double reversibility_tol) {
  const Eigen::Index n = tm.P.rows();
  if (n < 2) throw std::invalid_argument("spectral_gap: trivial chain");
  const StationarityCheck chk = check_transition_matrix(tm);
  if (chk.max_detailed_balance_error > reversibility_tol)
    throw std::invalid_argument("spectral_gap: kernel is not reversible");
  Eigen::VectorXd sqrt_pi = tm.pi.cwiseSqrt();
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      S(i, j) = sqrt_pi[i] * tm.P(i, j) / sqrt_pi[j];
    }
  }
  S = 0.5 * (S + S.transpose());  // scrub residual asymmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();  // ascending
  return 1.0 - ev[n - 2];
}

double asymptotic_variance(const TransitionMatrix& tm,
                           const Eigen::VectorXd& h) {
  const Eigen::Index n = tm.P.rows();
  if (h.size() != n)
    throw std::invalid_argument("asymptotic_variance: shape mismatch");
  const double mean = tm.pi.dot(h);
  const Eigen::VectorXd hc = h.array() - mean;
  const double var_pi = tm.pi.dot(hc.cwiseProduct(hc));
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - tm.P +
                      Eigen::VectorXd::Ones(n) * tm.pi.transpose();
  const Eigen::VectorXd g = A.partialPivLu().solve(hc);
  const double resid = (A * g - hc).cwiseAbs().maxCoeff();
  if (resid > 1e-8)
    throw std::invalid_argument("asymptotic_variance: reducible chain");
  return 2.0 * tm.pi.dot(hc.cwiseProduct(g)) - var_pi;
}

double theorem1_factor(double lipschitz, double diam) {
  if (lipschitz < 0.0 || diam < 0.0)
    throw std::invalid_argument("theorem1_factor: negative inputs");
  return std::exp(-0.5 * lipschitz * diam * diam);
}

double window_diameter(std::int32_t arity, int radius) {
  return arity == 2 ? std::sqrt(static_cast<double>(radius))
                    : std::sqrt(2.0 * static_cast<double>(radius));
}

Theorem1Report verify_theorem1(const EnergyModel& model, double lipschitz,
                               int radius) {
  Theorem1Report rep;
  rep.lipschitz = lipschitz;
  const double diam = window_diameter(model.arity(), radius);
  rep.c = theorem1_factor(lipschitz, diam);

  const TransitionMatrix q_gwg = gwg_transition_matrix(model);
  const TransitionMatrix q_bal =
      locally_balanced_transition_matrix(model, 2.0, radius);

  rep.gap_gwg = spectral_gap(q_gwg);
  rep.gap_balanced = spectral_gap(q_bal);

  const Eigen::Index n = q_gwg.P.rows();
  Eigen::VectorXd h(n);
  const DiscreteState zero(model.dim(), model.arity());
  for (Eigen::Index s = 0; s < n; ++s) {
    h[s] = static_cast<double>(hamming_distance(
        state_from_index(static_cast<std::uint64_t>(s), model.dim(),
                         model.arity()),
        zero));
  }
  rep.var_gwg = asymptotic_variance(q_gwg, h);
  rep.var_balanced = asymptotic_variance(q_bal, h);
  const double mean = q_gwg.pi.dot(h);
  rep.var_p = q_gwg.pi.dot(h.cwiseProduct(h)) - mean * mean;

  const double tol = 1e-9;
  rep.gap_bound_holds = rep.gap_gwg >= rep.c * rep.gap_balanced - tol;
  rep.variance_bound_holds =
      rep.var_gwg <=
      rep.var_balanced / rep.c + (1.0 - rep.c) / rep.c * rep.var_p + tol;
  return rep;
}

std::string Theorem1Report::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "L=" << lipschitz << " c=" << c << " gap_gwg=" << gap_gwg
     << " gap_balanced=" << gap_balanced << " var_gwg=" << var_gwg
     << " var_balanced=" << var_balanced << " var_p=" << var_p
     << " gap_bound=" << (gap_bound_holds ? "pass" : "fail")
     << " variance_bound=" << (variance_bound_holds ? "pass" : "fail");
  return os.str();
}

NormalizerBoundsReport verify_normalizer_bounds(const EnergyModel& model,
                                                double lipschitz, int radius) {
  check_enumerable(model, kEnumerationCap);
  NormalizerBoundsReport rep;
  rep.lipschitz = lipschitz;
  const double diam = window_diameter(model.arity(), radius);
  rep.bound_factor = std::exp(lipschitz * diam * diam / 4.0);
  rep.worst_lower_slack = std::numeric_limits<double>::infinity();
  rep.worst_upper_slack = std::numeric_limits<double>::infinity();

  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  bool ok = true;
  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, model.dim(), model.arity());
    const Eigen::VectorXd v = embed(x);
    const double fx = model.energy(v);
    const Eigen::VectorXd grad = model.gradient(v);

    double z_exact = 0.0;
    double z_taylor = 0.0;
    for (const DiscreteState& y : hamming_window(x, radius)) {
      z_exact += std::exp(0.5 * (model.energy_state(y) - fx));
      // First-order Taylor estimate of f(y) - f(x) along the move.
      const Eigen::VectorXd dy = embed(y) - v;
      z_taylor += std::exp(0.5 * grad.dot(dy));
    }
    const double lower = z_exact / rep.bound_factor;
    const double upper = z_exact * rep.bound_factor;
    const double tol = 1e-9 * std::max(1.0, z_exact);
    if (z_taylor < lower - tol || z_taylor > upper + tol) ok = false;
    rep.worst_lower_slack = std::min(rep.worst_lower_slack, z_taylor - lower);
    rep.worst_upper_slack = std::min(rep.worst_upper_slack, upper - z_taylor);
  }
  rep.holds = ok;
  return rep;
}

std::string NormalizerBoundsReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "L=" << lipschitz << " bound_factor=" << bound_factor
     << " worst_lower_slack=" << worst_lower_slack
     << " worst_upper_slack=" << worst_upper_slack << " "
     << (holds ? "pass" : "fail");
  return os.str();
}

BalancingReport verify_balancing(const EnergyModel& model, double tau,
                                 int radius) {
  check_enumerable(model, kEnumerationCap);
  BalancingReport rep;
  rep.tau = tau;

  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  // S(x) = sum over window of exp((f(y)-f(x))/tau).
  std::vector<double> f(static_cast<std::size_t>(n));
  for (std::uint64_t s = 0; s < n; ++s)
    f[static_cast<std::size_t>(s)] =
        model.energy_state(state_from_index(s, model.dim(), model.arity()));
  auto window_sum = [&](std::uint64_t s) {
    const DiscreteState x = state_from_index(s, model.dim(), model.arity());
    double total = 0.0;
    for (const DiscreteState& y : hamming_window(x, radius))
      total += std::exp((f[static_cast<std::size_t>(state_index(y))] -
                         f[static_cast<std::size_t>(s)]) /
                        tau);
    return total;
  };
  std::vector<double> z(static_cast<std::size_t>(n));
  for (std::uint64_t s = 0; s < n; ++s)
    z[static_cast<std::size_t>(s)] = window_sum(s);

  for (std::uint64_t s = 0; s < n; ++s) {
    const DiscreteState x = state_from_index(s, model.dim(), model.arity());
    for (const DiscreteState& y : hamming_window(x, radius)) {
      const std::uint64_t sy = state_index(y);
      const double df =
          f[static_cast<std::size_t>(sy)] - f[static_cast<std::size_t>(s)];
      const double q_fwd = std::exp(df / tau) / z[static_cast<std::size_t>(s)];
      const double q_rev = std::exp(-df / tau) / z[static_cast<std::size_t>(sy)];
      const double mh_ratio = std::exp(df) * q_rev / q_fwd;
      const double z_ratio =
          z[static_cast<std::size_t>(s)] / z[static_cast<std::size_t>(sy)];
      // Relative error: the ratios span many orders of magnitude, so an
      // absolute comparison would just measure their size.
      rep.max_identity_error =
          std::max(rep.max_identity_error, std::abs(mh_ratio / z_ratio - 1.0));
      const double residual = std::exp((1.0 - 2.0 / tau) * df);
      rep.max_residual_error =
          std::max(rep.max_residual_error,
                   std::abs(mh_ratio / (residual * z_ratio) - 1.0));
    }
  }
  rep.holds = tau == 2.0 ? rep.max_identity_error <= 1e-12
                         : rep.max_residual_error <= 1e-12;
  return rep;
}

std::string BalancingReport::to_text() const {
  std::ostringstream os;
  os.precision(10);
  os << "tau=" << tau << " max_identity_error=" << max_identity_error
     << " max_residual_error=" << max_residual_error << " "
     << (holds ? "pass" : "fail");
  return os.str();
}

}  // namespace gwg
