// Discrete kernels: gradient-informed proposals, exact locally-balanced
// steps, Gibbs variants, Hamming ball, RBM alternation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gwg/analysis.hpp"
#include "gwg/models/base.hpp"
#include "gwg/models/cubic.hpp"
#include "gwg/models/fhmm.hpp"
#include "gwg/models/ising.hpp"
#include "gwg/models/potts.hpp"
#include "gwg/models/rbm.hpp"
#include "gwg/numerics.hpp"
#include "gwg/samplers.hpp"
#include "gwg/state.hpp"
#include "gwg/window.hpp"
#include "testkit.hpp"

using gwg::DiscreteState;

namespace {

DiscreteState make_state(std::vector<std::int32_t> values, std::int32_t arity = 2) {
  DiscreteState x;
  x.values = std::move(values);
  x.arity = arity;
  return x;
}

gwg::IsingModel pair_model() {
  // f(x) = 2 x0 x1.
  Eigen::MatrixXd j(2, 2);
  j << 0, 1, 1, 0;
  return gwg::IsingModel(j, 1.0, Eigen::VectorXd::Zero(2));
}

gwg::IsingModel constant_model(int dim) {
  return gwg::IsingModel(Eigen::MatrixXd::Zero(dim, dim), 0.0,
                         Eigen::VectorXd::Zero(dim));
}

// Long-run state frequencies of a stepping function, thinned so that the
// retained draws are nearly independent and the multinomial 3-sigma bound
// applies.
template <typename StepFn>
double frequency_sigma(const gwg::EnergyModel& model, StepFn&& step,
                       DiscreteState x, std::uint64_t total_steps,
                       std::uint64_t thin, std::uint64_t burnin,
                       gwg::RngStream& rng) {
  const std::uint64_t n_states =
      gwg::state_space_size(model.dim(), model.arity());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_states), 0);
  for (std::uint64_t t = 0; t < burnin; ++t) step(x, rng, t);
  for (std::uint64_t t = 0; t < total_steps; ++t) {
    step(x, rng, burnin + t);
    if ((t + 1) % thin == 0)
      ++counts[static_cast<std::size_t>(gwg::state_index(x))];
  }
  const testkit::Enumeration e = testkit::enumerate_naive(model);
  return testkit::max_multinomial_sigma(counts, e.probs);
}

// Window normalizer Z(x) = sum over radius-1 neighbors of exp(diff / 2),
// computed with brute-force energy differences.
double window_normalizer(const gwg::EnergyModel& model,
                         const DiscreteState& x) {
  double z = 0.0;
  for (const auto& [state, diff] : testkit::exact_local_differences(model, x, 1))
    z += std::exp(diff / 2.0);
  return z;
}

void check_exact_kernel(const gwg::TransitionMatrix& tm,
                        bool expect_reversible = true) {
  const gwg::StationarityCheck check = gwg::check_transition_matrix(tm);
  CHECK(check.max_row_sum_error < 1e-12);
  CHECK(check.max_stationarity_error < 1e-10);
  if (expect_reversible) CHECK(check.max_detailed_balance_error < 1e-10);
}

}  // namespace

// ------------------------------------------------------------ diff_binary

TEST_CASE("diff_binary applies the sign pattern -(2x-1) to the gradient") {
  const DiscreteState x = make_state({0, 1});
  Eigen::VectorXd grad(2);
  grad << 0.7, -1.3;
  const Eigen::VectorXd d = gwg::diff_binary_from_grad(x, grad);
  CHECK(d[0] == 0.7);    // x0 = 0: flipping up gains +grad
  CHECK(d[1] == 1.3);    // x1 = 1: flipping down gains -grad
}

TEST_CASE("diff_binary hand case: f = 2 x0 x1 at [1, 0]") {
  const gwg::IsingModel m = pair_model();
  const DiscreteState x = make_state({1, 0});
  const Eigen::VectorXd d = gwg::diff_binary(m, x);
  CHECK(d[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("diff_binary is exact on zero-diagonal ising models") {
  gwg::RngStream rng(31, 0);
  for (int t = 0; t < 10; ++t) {
    const gwg::IsingModel m = gwg::er_ising(10, 4.0, 0.3, rng);
    const DiscreteState x = gwg::uniform_random_state(10, 2, rng);
    const Eigen::VectorXd d = gwg::diff_binary(m, x);
    for (const auto& [state, diff] :
         testkit::exact_local_differences(m, x, 1)) {
      int flipped_at = -1;
      for (int i = 0; i < 10; ++i)
        if (state.values[static_cast<std::size_t>(i)] !=
            x.values[static_cast<std::size_t>(i)])
          flipped_at = i;
      REQUIRE(flipped_at >= 0);
      CHECK(std::abs(d[flipped_at] - diff) < 1e-10);
    }
  }
}

TEST_CASE("first-order flip estimates on a cubic energy respect the bound") {
  // With curvature L over the hypercube and unit moves, the estimate can
  // be off by at most L/2 per flip.
  gwg::RngStream rng(32, 1);
  const gwg::CubicModel m = gwg::random_cubic(7, rng);
  const double bound = m.lipschitz_bound() / 2.0;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const DiscreteState x = gwg::uniform_random_state(7, 2, rng);
    const Eigen::VectorXd d = gwg::diff_binary(m, x);
    for (const auto& [state, diff] :
         testkit::exact_local_differences(m, x, 1)) {
      for (int i = 0; i < 7; ++i)
        if (state.values[static_cast<std::size_t>(i)] !=
            x.values[static_cast<std::size_t>(i)])
          worst = std::max(worst, std::abs(d[i] - diff));
    }
  }
  CHECK(worst > 1e-6);   // the energy is genuinely non-multilinear
  CHECK(worst <= bound);
}

TEST_CASE("exact_local_differences: constant energy gives all zeros") {
  const gwg::IsingModel m = constant_model(5);
  const DiscreteState x = make_state({1, 0, 1, 1, 0});
  for (const auto& [state, diff] : testkit::exact_local_differences(m, x, 2))
    CHECK(diff == 0.0);
}

TEST_CASE("exact_local_differences agrees with the edge-list evaluation") {
  gwg::RngStream rng(33, 2);
  const gwg::IsingModel m = gwg::er_ising(8, 4.0, 0.25, rng);
  const DiscreteState x = gwg::uniform_random_state(8, 2, rng);
  const double fx =
      testkit::edge_list_ising_energy(m.coupling(), m.theta(), m.bias(), x);
  for (const auto& [state, diff] : testkit::exact_local_differences(m, x, 1)) {
    const double fy = testkit::edge_list_ising_energy(m.coupling(), m.theta(),
                                                      m.bias(), state);
    CHECK(diff == doctest::Approx(fy - fx).epsilon(1e-12));
  }
}

// ------------------------------------------------------- diff_categorical

TEST_CASE("diff_categorical zeroes the current-value column") {
  gwg::RngStream rng(34, 3);
  const gwg::PottsModel m = gwg::random_potts(4, 3, 0.5, rng);
  for (int t = 0; t < 10; ++t) {
    const DiscreteState x = gwg::uniform_random_state(4, 3, rng);
    const Eigen::MatrixXd d = gwg::diff_categorical(m, x);
    for (int i = 0; i < 4; ++i)
      CHECK(d(i, x.values[static_cast<std::size_t>(i)]) == 0.0);
  }
}

TEST_CASE("diff_categorical is exact for a linear (field-only) energy") {
  gwg::RngStream rng(35, 4);
  gwg::PottsModel m(3, 4);
  Eigen::MatrixXd theta(3, 4);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd h(4);
    for (int k = 0; k < 4; ++k) h[k] = theta(i, k) = rng.normal();
    m.set_field(i, h);
  }
  const DiscreteState x = make_state({2, 0, 3}, 4);
  const Eigen::MatrixXd d = gwg::diff_categorical(m, x);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 4; ++k)
      CHECK(d(i, k) == doctest::Approx(
                           theta(i, k) -
                           theta(i, x.values[static_cast<std::size_t>(i)]))
                           .epsilon(1e-12));
}

TEST_CASE("diff_categorical at K=2 matches diff_binary") {
  gwg::RngStream rng(36, 5);
  const gwg::IsingModel ising = gwg::er_ising(6, 4.0, 0.3, rng);
  const gwg::PottsModel potts = gwg::potts_from_ising(ising);
  for (int t = 0; t < 10; ++t) {
    const DiscreteState x = gwg::uniform_random_state(6, 2, rng);
    const Eigen::VectorXd d_bin = gwg::diff_binary(ising, x);

    // API level: the categorical entry for the flipped value equals the
    // binary flip estimate; the current-value column is zero.
    const Eigen::MatrixXd d_api = gwg::diff_categorical(ising, x);
    for (int i = 0; i < 6; ++i) {
      const int cur = x.values[static_cast<std::size_t>(i)];
      CHECK(d_api(i, cur) == 0.0);
      CHECK(d_api(i, 1 - cur) == doctest::Approx(d_bin[i]).epsilon(1e-12));
    }

    // Formula level: feed the D*K one-hot gradient of the equivalent
    // two-category pairwise model through the categorical formula. Both
    // estimates are exact flip differences here, so they must agree.
    Eigen::VectorXd onehot = Eigen::VectorXd::Zero(12);
    for (int i = 0; i < 6; ++i)
      onehot[2 * i + x.values[static_cast<std::size_t>(i)]] = 1.0;
    const Eigen::MatrixXd d_cat =
        gwg::diff_categorical_from_grad(x, potts.gradient(onehot));
    for (int i = 0; i < 6; ++i) {
      const int other = 1 - x.values[static_cast<std::size_t>(i)];
      CHECK(d_cat(i, other) == doctest::Approx(d_bin[i]).epsilon(1e-10));
    }
  }
}

// ---------------------------------------------------------------- gwg_step

TEST_CASE("gwg_step on a constant energy always accepts") {
  const gwg::IsingModel m = constant_model(5);
  gwg::RngStream rng(37, 6);
  DiscreteState x(5, 2);
  for (int t = 0; t < 200; ++t) {
    const gwg::StepRecord rec = gwg::gwg_step(m, x, rng);
    CHECK(rec.acceptance_prob == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec.accepted);
    CHECK(rec.model_evals == 2);
    CHECK(rec.gradient_evals == 2);
  }
  // The uniform proposal shows up in the exact kernel: from any state,
  // each single flip carries probability 1/D and the diagonal is empty.
  const gwg::TransitionMatrix tm = gwg::gwg_transition_matrix(m);
  for (Eigen::Index a = 0; a < tm.P.rows(); ++a) {
    CHECK(tm.P(a, a) == doctest::Approx(0.0).epsilon(1e-12));
    for (Eigen::Index b = 0; b < tm.P.cols(); ++b) {
      const int d = testkit::naive_hamming(
          gwg::state_from_index(static_cast<std::uint64_t>(a), 5, 2),
          gwg::state_from_index(static_cast<std::uint64_t>(b), 5, 2));
      if (d == 1)
        CHECK(tm.P(a, b) == doctest::Approx(0.2).epsilon(1e-12));
      else if (d > 1)
        CHECK(tm.P(a, b) == 0.0);
    }
  }
}

TEST_CASE("gwg_step proposal weights: hand softmax for f = 2 x0 x1") {
  const gwg::IsingModel m = pair_model();
  const gwg::TransitionMatrix tm = gwg::gwg_transition_matrix(m);
  // At x = [1, 0] the flip estimates are [0, 2], so the index distribution
  // is softmax([0, 1]).
  const double q0 = std::exp(0.0) / (std::exp(0.0) + std::exp(1.0));
  const double q1 = std::exp(1.0) / (std::exp(0.0) + std::exp(1.0));
  CHECK(q0 == doctest::Approx(0.2689).epsilon(1e-3));
  CHECK(q1 == doctest::Approx(0.7311).epsilon(1e-3));
  const auto row = gwg::state_index(make_state({1, 0}));
  // Flip of x0 ([1,0] -> [0,0]): zero energy gap, reverse index q is
  // larger, so the move is accepted whenever proposed.
  const auto to00 = gwg::state_index(make_state({0, 0}));
  CHECK(tm.P(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(to00)) ==
        doctest::Approx(q0).epsilon(1e-12));
  // Flip of x1 ([1,0] -> [1,1]): energy gain 2 dominates the proposal
  // asymmetry, so this move is accepted as well.
  const auto to11 = gwg::state_index(make_state({1, 1}));
  CHECK(tm.P(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(to11)) ==
        doctest::Approx(q1).epsilon(1e-12));
}

TEST_CASE("gwg_step long-run frequencies match the enumerated law") {
  gwg::RngStream model_rng(38, 7);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.25, model_rng);
  gwg::RngStream rng(39, 8);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t) {
        gwg::gwg_step(m, x, r);
      },
      DiscreteState(6, 2), 1000000, 10, 5000, rng);
  CHECK(sigma < 3.0);
}

TEST_CASE("gwg_step categorical long-run frequencies match the law") {
  gwg::RngStream model_rng(40, 9);
  const gwg::PottsModel m = gwg::random_potts(3, 3, 0.5, model_rng);
  gwg::RngStream rng(41, 10);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t) {
        gwg::gwg_step(m, x, r);
      },
      DiscreteState(3, 3), 1000000, 10, 5000, rng);
  CHECK(sigma < 3.0);
}

// ------------------------------------------------------ gwg_multisample

TEST_CASE("multisample with N=1 reproduces gwg_step trajectories") {
  gwg::RngStream model_rng(42, 11);
  const gwg::IsingModel m = gwg::er_ising(8, 4.0, 0.3, model_rng);
  gwg::RngStream rng_a(43, 12);
  gwg::RngStream rng_b(43, 12);
  DiscreteState xa(8, 2);
  DiscreteState xb(8, 2);
  for (int t = 0; t < 500; ++t) {
    const gwg::StepRecord ra = gwg::gwg_step(m, xa, rng_a);
    const gwg::StepRecord rb = gwg::gwg_multisample_step(m, xb, 1, rng_b);
    CHECK(xa == xb);
    CHECK(ra.accepted == rb.accepted);
    CHECK(ra.acceptance_prob == doctest::Approx(rb.acceptance_prob).epsilon(1e-12));
  }
}

TEST_CASE("multisample identity proposals are always accepted") {
  // With one dimension every draw picks index 0, so an even N toggles the
  // bit back to where it started.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd b(1);
  b << 0.4;
  const gwg::IsingModel m(j, 0.0, b);
  gwg::RngStream rng(44, 13);
  DiscreteState x = make_state({1});
  for (int t = 0; t < 50; ++t) {
    const DiscreteState before = x;
    const gwg::StepRecord rec = gwg::gwg_multisample_step(m, x, 2, rng);
    CHECK(rec.acceptance_prob == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x == before);
  }
}

TEST_CASE("multisample N=3 long-run frequencies match the law") {
  gwg::RngStream model_rng(45, 14);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.25, model_rng);
  gwg::RngStream rng(46, 15);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t) {
        gwg::gwg_multisample_step(m, x, 3, r);
      },
      DiscreteState(6, 2), 1000000, 10, 5000, rng);
  CHECK(sigma < 3.0);
}

// -------------------------------------------------- locally_balanced_step

TEST_CASE("locally balanced step on a constant energy always accepts") {
  const gwg::IsingModel m = constant_model(4);
  gwg::RngStream rng(47, 16);
  DiscreteState x(4, 2);
  for (int t = 0; t < 100; ++t) {
    const gwg::StepRecord rec = gwg::locally_balanced_step(m, x, 2.0, 1, rng);
    CHECK(rec.acceptance_prob == doctest::Approx(1.0).epsilon(1e-12));
    // Window cost accounting: both endpoint windows plus the two endpoint
    // energies.
    CHECK(rec.model_evals == 2 * 4 + 2);
    CHECK(rec.gradient_evals == 0);
  }
}

TEST_CASE("at tau=2 the acceptance equals the window-normalizer ratio") {
  gwg::RngStream model_rng(48, 17);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.4, model_rng);
  gwg::RngStream rng(49, 18);
  DiscreteState x(6, 2);
  int accepted_moves = 0;
  for (int t = 0; t < 300; ++t) {
    const DiscreteState before = x;
    const gwg::StepRecord rec = gwg::locally_balanced_step(m, x, 2.0, 1, rng);
    if (rec.accepted && x != before) {
      const double ratio =
          window_normalizer(m, before) / window_normalizer(m, x);
      CHECK(rec.acceptance_prob ==
            doctest::Approx(std::min(1.0, ratio)).epsilon(1e-12));
      ++accepted_moves;
    }
  }
  CHECK(accepted_moves > 50);
}

TEST_CASE("tau=infinity reduces to the uniform window random walk") {
  gwg::RngStream model_rng(50, 19);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.3, model_rng);
  const double inf = std::numeric_limits<double>::infinity();
  const gwg::TransitionMatrix tm =
      gwg::locally_balanced_transition_matrix(m, inf, 1);
  const testkit::Enumeration e = testkit::enumerate_naive(m);
  for (Eigen::Index a = 0; a < tm.P.rows(); ++a) {
    const DiscreteState xa =
        gwg::state_from_index(static_cast<std::uint64_t>(a), 5, 2);
    for (Eigen::Index b = 0; b < tm.P.cols(); ++b) {
      if (a == b) continue;
      const DiscreteState xb =
          gwg::state_from_index(static_cast<std::uint64_t>(b), 5, 2);
      if (testkit::naive_hamming(xa, xb) != 1) {
        CHECK(tm.P(a, b) == 0.0);
        continue;
      }
      const double expected =
          std::min(1.0, e.probs[b] / e.probs[a]) / 5.0;
      CHECK(tm.P(a, b) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  check_exact_kernel(tm);
}

// --------------------------------------------------------------- gibbs

TEST_CASE("gibbs conditional equals the marginal for a factorized model") {
  Eigen::MatrixXd logp(3, 2);
  logp << std::log(0.3), std::log(0.7), std::log(0.5), std::log(0.5),
      std::log(0.9), std::log(0.1);
  const gwg::FactorizedBase base{logp};
  const gwg::TransitionMatrix tm = gwg::gibbs_site_transition_matrix(base, 0);
  for (Eigen::Index a = 0; a < tm.P.rows(); ++a) {
    const DiscreteState xa =
        gwg::state_from_index(static_cast<std::uint64_t>(a), 3, 2);
    const auto b1 = gwg::state_index(gwg::with_value(xa, 0, 1));
    CHECK(tm.P(a, static_cast<Eigen::Index>(b1)) ==
          doctest::Approx(0.7).epsilon(1e-12));
  }
}

TEST_CASE("binary gibbs conditional is the two-point softmax") {
  gwg::RngStream model_rng(51, 20);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.35, model_rng);
  gwg::RngStream rng(52, 21);
  for (int t = 0; t < 20; ++t) {
    const DiscreteState x = gwg::uniform_random_state(6, 2, rng);
    const int i = static_cast<int>(rng.uniform_int(6));
    const double f1 = m.energy_state(gwg::with_value(x, i, 1));
    const double f0 = m.energy_state(gwg::with_value(x, i, 0));
    const double p1 = gwg::sigmoid(f1 - f0);
    const gwg::TransitionMatrix tm = gwg::gibbs_site_transition_matrix(m, i);
    const auto row = gwg::state_index(x);
    const auto up = gwg::state_index(gwg::with_value(x, i, 1));
    CHECK(tm.P(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(up)) ==
          doctest::Approx(p1).epsilon(1e-12));
  }
}

TEST_CASE("gibbs step costs exactly K energy evaluations") {
  gwg::RngStream model_rng(53, 22);
  const gwg::IsingModel ising = gwg::er_ising(6, 4.0, 0.3, model_rng);
  const gwg::PottsModel potts = gwg::random_potts(4, 3, 0.5, model_rng);
  gwg::RngStream rng(54, 23);
  DiscreteState xb(6, 2);
  const gwg::StepRecord rb = gwg::gibbs_step(ising, xb, 2, rng);
  CHECK(rb.model_evals == 2);
  CHECK(rb.gradient_evals == 0);
  DiscreteState xc(4, 3);
  const gwg::StepRecord rc = gwg::gibbs_step(potts, xc, 1, rng);
  CHECK(rc.model_evals == 3);
}

TEST_CASE("gibbs chains are stationary for the enumerated law") {
  gwg::RngStream model_rng(55, 24);
  const gwg::IsingModel m = gwg::er_ising(8, 4.0, 0.25, model_rng);
  check_exact_kernel(gwg::gibbs_transition_matrix(m));
  // The actual sweep-based stepper agrees by simulation as well.
  gwg::RngStream rng(56, 25);
  const gwg::GibbsSampler systematic(gwg::GibbsScan::kSystematic);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t t) {
        systematic.step(m, x, r, t);
      },
      DiscreteState(8, 2), 1000000, 16, 5000, rng);
  CHECK(sigma < 3.0);
}

// ---------------------------------------------------------- block gibbs

TEST_CASE("block size 1 equals single-site gibbs at a random index") {
  gwg::RngStream model_rng(57, 26);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.3, model_rng);
  const gwg::TransitionMatrix block1 = gwg::block_gibbs_transition_matrix(m, 1);
  const gwg::TransitionMatrix scan = gwg::gibbs_transition_matrix(m);
  CHECK((block1.P - scan.P).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("block size D resamples exactly from the target") {
  gwg::RngStream model_rng(58, 27);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.4, model_rng);
  const gwg::TransitionMatrix tm = gwg::block_gibbs_transition_matrix(m, 5);
  const testkit::Enumeration e = testkit::enumerate_naive(m);
  for (Eigen::Index a = 0; a < tm.P.rows(); ++a)
    CHECK((tm.P.row(a).transpose() - e.probs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("block gibbs is stationary at block size 2") {
  gwg::RngStream model_rng(59, 28);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.3, model_rng);
  check_exact_kernel(gwg::block_gibbs_transition_matrix(m, 2));
  gwg::RngStream rng(60, 29);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t) {
        gwg::block_gibbs_step(m, x, 2, r);
      },
      DiscreteState(6, 2), 600000, 8, 5000, rng);
  CHECK(sigma < 3.0);
}

// ---------------------------------------------------------- hamming ball

TEST_CASE("ball radius equal to block size reduces to block gibbs") {
  gwg::RngStream model_rng(61, 30);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.3, model_rng);
  const gwg::TransitionMatrix hb = gwg::hamming_ball_transition_matrix(m, 2, 2);
  const gwg::TransitionMatrix bg = gwg::block_gibbs_transition_matrix(m, 2);
  CHECK((hb.P - bg.P).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hamming ball kernel is stationary with auxiliary marginalized") {
  gwg::RngStream model_rng(62, 31);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.3, model_rng);
  check_exact_kernel(gwg::hamming_ball_transition_matrix(m, 3, 1));
}

TEST_CASE("hamming ball steps only touch the chosen block") {
  gwg::RngStream model_rng(63, 32);
  const gwg::IsingModel m = gwg::er_ising(8, 4.0, 0.3, model_rng);
  gwg::RngStream rng(64, 33);
  DiscreteState x(8, 2);
  const std::vector<int> block = {1, 3, 5};
  for (int t = 0; t < 200; ++t) {
    const DiscreteState before = x;
    const gwg::StepRecord rec = gwg::hamming_ball_step(m, x, block, 1, rng);
    // Acceptance-free construction: every draw stands, and the record's
    // accepted flag reports whether the block actually changed.
    CHECK(rec.acceptance_prob == 1.0);
    CHECK(rec.accepted == (x != before));
    for (int i = 0; i < 8; ++i) {
      if (std::find(block.begin(), block.end(), i) == block.end())
        CHECK(x.values[static_cast<std::size_t>(i)] ==
              before.values[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("hamming ball long-run frequencies match the law") {
  gwg::RngStream model_rng(65, 34);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.25, model_rng);
  gwg::RngStream rng(66, 35);
  const gwg::HammingBallSampler hb(3, 1);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t t) {
        hb.step(m, x, r, t);
      },
      DiscreteState(6, 2), 1000000, 10, 5000, rng);
  CHECK(sigma < 3.0);
}

// ------------------------------------------------------- rbm block gibbs

TEST_CASE("rbm alternation with zero weights draws from sigmoid(b)") {
  Eigen::VectorXd b(3);
  b << 0.8, -0.5, 0.0;
  const gwg::RbmModel m(Eigen::MatrixXd::Zero(2, 3), b,
                        Eigen::VectorXd::Zero(2));
  gwg::RngStream rng(67, 36);
  DiscreteState x = make_state({1, 1, 1});
  Eigen::Vector3d ones = Eigen::Vector3d::Zero();
  const int n = 40000;
  for (int t = 0; t < n; ++t) {
    const gwg::StepRecord rec = gwg::rbm_block_gibbs_step(m, x, rng);
    CHECK(rec.model_evals == 0);
    CHECK(rec.gradient_evals == 0);
    for (int i = 0; i < 3; ++i) ones[i] += x.values[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < 3; ++i) {
    const double p = gwg::sigmoid(b[i]);
    CHECK(std::abs(ones[i] / n - p) < 3.0 * std::sqrt(p * (1.0 - p) / n));
  }
}

TEST_CASE("rbm block gibbs is stationary over the joint") {
  gwg::RngStream model_rng(68, 37);
  const gwg::RbmModel m = gwg::random_rbm(4, 2, model_rng);
  check_exact_kernel(gwg::rbm_block_gibbs_transition_matrix(m));
  gwg::RngStream rng(69, 38);
  const double sigma = frequency_sigma(
      m,
      [&](DiscreteState& x, gwg::RngStream& r, std::uint64_t) {
        gwg::rbm_block_gibbs_step(m, x, r);
      },
      DiscreteState(4, 2), 400000, 5, 2000, rng);
  CHECK(sigma < 3.0);
}

// ------------------------------------------------------------ invariants

TEST_CASE("every exact kernel is stochastic, stationary, and reversible") {
  std::vector<std::unique_ptr<gwg::EnergyModel>> zoo;
  zoo.push_back(testkit::random_model("ising-er", 6, 101));
  zoo.push_back(testkit::random_model("cubic", 5, 102));
  zoo.push_back(testkit::random_model("potts", 3, 103));
  zoo.push_back(testkit::random_model("rbm", 4, 104));
  zoo.push_back(testkit::random_model("fhmm", 6, 105));
  for (const auto& m : zoo) {
    CAPTURE(m->name());
    check_exact_kernel(gwg::gwg_transition_matrix(*m));
    check_exact_kernel(gwg::locally_balanced_transition_matrix(*m, 2.0, 1));
    check_exact_kernel(gwg::locally_balanced_transition_matrix(*m, 1.0, 1));
    check_exact_kernel(gwg::gibbs_transition_matrix(*m));
    check_exact_kernel(gwg::gibbs_site_transition_matrix(*m, 0));
    check_exact_kernel(gwg::block_gibbs_transition_matrix(*m, 2));
    check_exact_kernel(gwg::hamming_ball_transition_matrix(*m, 2, 1));
  }
}

TEST_CASE("gwg equals the exact locally balanced kernel on ising") {
  gwg::RngStream model_rng(70, 39);
  for (int t = 0; t < 3; ++t) {
    const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.3, model_rng);
    const gwg::TransitionMatrix a = gwg::gwg_transition_matrix(m);
    const gwg::TransitionMatrix b =
        gwg::locally_balanced_transition_matrix(m, 2.0, 1);
    CHECK((a.P - b.P).cwiseAbs().maxCoeff() < 1e-12);
  }
}
