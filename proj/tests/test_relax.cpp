// Continuous-relaxation baselines: threshold map, tempered sigmoid,
// piecewise/smoothed densities, Langevin and Hamiltonian kernels.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gwg/models/ising.hpp"
#include "gwg/relax.hpp"
#include "gwg/rng.hpp"
#include "gwg/state.hpp"
#include "testkit.hpp"

using gwg::DiscreteState;

namespace {

gwg::IsingModel constant_model(int dim) {
  return gwg::IsingModel(Eigen::MatrixXd::Zero(dim, dim), 0.0,
                         Eigen::VectorXd::Zero(dim));
}

// Long-run threshold-pushforward frequencies of a relaxed kernel, thinned
// so the multinomial 3-sigma bound applies against the enumerated law.
template <typename StepFn>
double pushforward_sigma(const gwg::EnergyModel& model, StepFn&& step,
                         std::uint64_t total_steps, std::uint64_t thin,
                         std::uint64_t burnin, gwg::RngStream& rng) {
  const int d = model.dim();
  const std::uint64_t n_states = gwg::state_space_size(d, 2);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n_states), 0);
  Eigen::VectorXd z = rng.normal_vector(d);
  for (std::uint64_t t = 0; t < burnin; ++t) step(z, rng);
  for (std::uint64_t t = 0; t < total_steps; ++t) {
    step(z, rng);
    if ((t + 1) % thin == 0)
      ++counts[static_cast<std::size_t>(
          gwg::state_index(gwg::gamma_round(z)))];
  }
  const testkit::Enumeration e = testkit::enumerate_naive(model);
  return testkit::max_multinomial_sigma(counts, e.probs);
}

}  // namespace

// ------------------------------------------------------------ gamma_round

TEST_CASE("gamma_round thresholds at zero with ties mapping to 0") {
  Eigen::VectorXd z(2);
  z << -1.0, 2.0;
  const DiscreteState x = gwg::gamma_round(z);
  CHECK(x.values == std::vector<std::int32_t>{0, 1});
  Eigen::VectorXd tie(1);
  tie << 0.0;
  CHECK(gwg::gamma_round(tie).values == std::vector<std::int32_t>{0});
}

TEST_CASE("gamma_round matches the sign of every coordinate") {
  gwg::RngStream rng(80, 0);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd z = rng.normal_vector(7);
    const DiscreteState x = gwg::gamma_round(z);
    for (int i = 0; i < 7; ++i)
      CHECK(x.values[static_cast<std::size_t>(i)] == (z[i] > 0.0 ? 1 : 0));
  }
}

// ----------------------------------------------------------- gamma_lambda

TEST_CASE("gamma_lambda evaluates the tempered sigmoid") {
  Eigen::VectorXd z(3);
  z << 0.0, std::log(3.0), -std::log(3.0);
  const Eigen::VectorXd g = gwg::gamma_lambda(z, 1.0);
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(0.25).epsilon(1e-12));
  // Temperature rescales the input: lambda=2 at 2 ln 3 equals lambda=1 at ln 3.
  Eigen::VectorXd z2(1);
  z2 << 2.0 * std::log(3.0);
  CHECK(gwg::gamma_lambda(z2, 2.0)[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("gamma_lambda is monotone in z and rejects non-positive lambda") {
  gwg::RngStream rng(81, 1);
  Eigen::VectorXd z(50);
  for (int i = 0; i < 50; ++i) z[i] = -5.0 + 0.2 * i + 0.01 * rng.uniform01();
  const Eigen::VectorXd g = gwg::gamma_lambda(z, 0.5);
  for (int i = 1; i < 50; ++i) CHECK(g[i] > g[i - 1]);
  CHECK_THROWS_AS(gwg::gamma_lambda(z, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gwg::gamma_lambda(z, -1.0), std::invalid_argument);
}

// ------------------------------------------------- log_pc / relaxed grad

TEST_CASE("log_pc is the Gaussian term plus the thresholded energy") {
  gwg::RngStream model_rng(82, 2);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.4, model_rng);
  gwg::RngStream rng(83, 3);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd z = rng.normal_vector(5);
    const double expected =
        -0.5 * z.squaredNorm() + m.energy_state(gwg::gamma_round(z));
    CHECK(gwg::log_pc(m, z) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("log_pc is constant within an orthant once the Gaussian is removed") {
  gwg::RngStream model_rng(84, 4);
  const gwg::IsingModel m = gwg::er_ising(6, 3.0, 0.4, model_rng);
  gwg::RngStream rng(85, 5);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd sign = rng.normal_vector(6);
    // Two points in the same orthant: multiply magnitudes, keep signs.
    Eigen::VectorXd za(6);
    Eigen::VectorXd zb(6);
    for (int i = 0; i < 6; ++i) {
      const double s = sign[i] > 0.0 ? 1.0 : -1.0;
      za[i] = s * (0.1 + rng.uniform01());
      zb[i] = s * (0.1 + 2.0 * rng.uniform01());
    }
    const double ga = gwg::log_pc(m, za) + 0.5 * za.squaredNorm();
    const double gb = gwg::log_pc(m, zb) + 0.5 * zb.squaredNorm();
    CHECK(ga == doctest::Approx(gb).epsilon(1e-12));
  }
}

TEST_CASE("relaxed gradient of a zero energy is minus z") {
  const gwg::IsingModel m = constant_model(6);
  gwg::RngStream rng(86, 6);
  const Eigen::VectorXd z = rng.normal_vector(6);
  const Eigen::VectorXd g = gwg::grad_log_pc_lambda(m, z, 0.7);
  CHECK((g + z).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("relaxed gradient matches finite differences of the smooth density") {
  gwg::RngStream model_rng(87, 7);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.5, model_rng);
  gwg::RngStream rng(88, 8);
  for (const double lambda : {0.5, 1.0, 2.0}) {
    const Eigen::VectorXd z = rng.normal_vector(6);
    const auto smooth = [&](const Eigen::VectorXd& v) {
      return -0.5 * v.squaredNorm() + m.energy(gwg::gamma_lambda(v, lambda));
    };
    const Eigen::VectorXd fd = testkit::fd_gradient(smooth, z, 1e-4);
    const Eigen::VectorXd g = gwg::grad_log_pc_lambda(m, z, lambda);
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    CHECK((g - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
  }
}

// -------------------------------------------------------------- rmala

TEST_CASE("rmala on a zero energy reproduces standard normal moments") {
  const gwg::IsingModel m = constant_model(3);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon = 0.8;
  gwg::RngStream rng(89, 9);
  Eigen::VectorXd z = rng.normal_vector(3);
  const int burnin = 2000;
  const int steps = 200000;
  for (int t = 0; t < burnin; ++t) gwg::rmala_step(m, z, cfg, rng);
  std::vector<double> first(static_cast<std::size_t>(steps));
  std::vector<double> second(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) {
    gwg::rmala_step(m, z, cfg, rng);
    first[static_cast<std::size_t>(t)] = z[0];
    second[static_cast<std::size_t>(t)] = z[0] * z[0];
  }
  const double avar1 = testkit::batch_means_asymptotic_variance(first, 100);
  const double avar2 = testkit::batch_means_asymptotic_variance(second, 100);
  double mean1 = 0.0;
  double mean2 = 0.0;
  for (int t = 0; t < steps; ++t) {
    mean1 += first[static_cast<std::size_t>(t)];
    mean2 += second[static_cast<std::size_t>(t)];
  }
  mean1 /= steps;
  mean2 /= steps;
  CHECK(std::abs(mean1 - 0.0) < 3.0 * std::sqrt(avar1 / steps));
  CHECK(std::abs(mean2 - 1.0) < 3.0 * std::sqrt(avar2 / steps));
}

TEST_CASE("rmala acceptance approaches one as the step size vanishes") {
  gwg::RngStream model_rng(90, 10);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.4, model_rng);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  gwg::RngStream rng(91, 11);
  // Mean acceptance rises monotonically along a shrinking step ladder and
  // is within noise of one at the bottom (the approach rate is O(sqrt(eps))).
  double prev = 0.0;
  for (const double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    cfg.epsilon = eps;
    Eigen::VectorXd z = rng.normal_vector(5);
    double total = 0.0;
    for (int t = 0; t < 200; ++t)
      total += gwg::rmala_step(m, z, cfg, rng).acceptance_prob;
    const double mean = total / 200.0;
    CHECK(mean > prev);
    prev = mean;
  }
  CHECK(prev > 0.999);
}

TEST_CASE("rmala rejects non-positive lambda or epsilon") {
  const gwg::IsingModel m = constant_model(3);
  gwg::RngStream rng(92, 12);
  Eigen::VectorXd z = rng.normal_vector(3);
  gwg::RelaxConfig bad;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(gwg::rmala_step(m, z, bad, rng), std::invalid_argument);
  bad.lambda = 1.0;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(gwg::rmala_step(m, z, bad, rng), std::invalid_argument);
}

TEST_CASE("rmala pushforward matches the enumerated law") {
  gwg::RngStream model_rng(93, 13);
  const gwg::IsingModel m = gwg::er_ising(4, 3.0, 0.3, model_rng);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon = 0.5;
  gwg::RngStream rng(94, 14);
  const double sigma = pushforward_sigma(
      m,
      [&](Eigen::VectorXd& z, gwg::RngStream& r) {
        gwg::rmala_step(m, z, cfg, r);
      },
      1000000, 20, 5000, rng);
  CHECK(sigma < 3.0);
}

// --------------------------------------------------------------- rhmc

TEST_CASE("rhmc on a Gaussian conserves the Hamiltonian well") {
  const gwg::IsingModel m = constant_model(10);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon = 0.05;
  cfg.leapfrog_steps = 5;
  gwg::RngStream rng(95, 15);
  Eigen::VectorXd z = rng.normal_vector(10);
  double total = 0.0;
  const int steps = 2000;
  for (int t = 0; t < steps; ++t)
    total += gwg::rhmc_step(m, z, cfg, rng).acceptance_prob;
  CHECK(total / steps >= 0.95);
}

TEST_CASE("rhmc acceptance goes to one as the step size vanishes") {
  gwg::RngStream model_rng(96, 16);
  const gwg::IsingModel m = gwg::er_ising(5, 3.0, 0.4, model_rng);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon = 1e-8;
  cfg.leapfrog_steps = 5;
  gwg::RngStream rng(97, 17);
  Eigen::VectorXd z = rng.normal_vector(5);
  for (int t = 0; t < 100; ++t) {
    const gwg::StepRecord rec = gwg::rhmc_step(m, z, cfg, rng);
    CHECK(rec.acceptance_prob > 1.0 - 1e-6);
  }
}

TEST_CASE("rhmc pushforward matches the enumerated law") {
  gwg::RngStream model_rng(98, 18);
  const gwg::IsingModel m = gwg::er_ising(4, 3.0, 0.3, model_rng);
  gwg::RelaxConfig cfg;
  cfg.lambda = 1.0;
  cfg.epsilon = 0.3;
  cfg.leapfrog_steps = 5;
  gwg::RngStream rng(99, 19);
  const double sigma = pushforward_sigma(
      m,
      [&](Eigen::VectorXd& z, gwg::RngStream& r) {
        gwg::rhmc_step(m, z, cfg, r);
      },
      400000, 10, 5000, rng);
  CHECK(sigma < 3.0);
}

TEST_CASE("leapfrog integration is reversible under momentum negation") {
  gwg::RngStream model_rng(100, 20);
  const gwg::IsingModel m = gwg::er_ising(6, 4.0, 0.5, model_rng);
  const double lambda = 1.0;
  const double eps = 0.05;
  const int k = 5;
  // Same integrator the Hamiltonian kernel uses: half-kick, drift, kicks.
  const auto leapfrog = [&](Eigen::VectorXd& z, Eigen::VectorXd& v) {
    v += 0.5 * eps * gwg::grad_log_pc_lambda(m, z, lambda);
    for (int s = 0; s < k; ++s) {
      z += eps * v;
      const double scale = s + 1 == k ? 0.5 : 1.0;
      v += scale * eps * gwg::grad_log_pc_lambda(m, z, lambda);
    }
  };
  gwg::RngStream rng(101, 21);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd z0 = rng.normal_vector(6);
    const Eigen::VectorXd v0 = rng.normal_vector(6);
    Eigen::VectorXd z = z0;
    Eigen::VectorXd v = v0;
    leapfrog(z, v);
    v = -v;
    leapfrog(z, v);
    v = -v;
    CHECK((z - z0).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((v - v0).cwiseAbs().maxCoeff() < 1e-8);
  }
}
