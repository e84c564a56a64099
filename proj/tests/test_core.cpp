// Core state/window/model-contract/RNG behavior.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gwg/model.hpp"
#include "gwg/models/cubic.hpp"
#include "gwg/models/ising.hpp"
#include "gwg/rng.hpp"
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

}  // namespace

TEST_CASE("flipped toggles exactly one bit") {
  const DiscreteState x = make_state({0, 1, 1});
  const DiscreteState y = gwg::flipped(x, 0);
  CHECK(y == make_state({1, 1, 1}));
  CHECK(gwg::flipped(make_state({0, 0}), 1) == make_state({0, 1}));
}

TEST_CASE("flipped is an involution") {
  const DiscreteState x = make_state({1});
  CHECK(gwg::flipped(gwg::flipped(x, 0), 0) == x);
  gwg::RngStream rng(7, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteState z = gwg::uniform_random_state(9, 2, rng);
    const int i = static_cast<int>(rng.uniform_int(9));
    CHECK(gwg::flipped(gwg::flipped(z, i), i) == z);
    CHECK(gwg::hamming_distance(gwg::flipped(z, i), z) == 1);
  }
}

TEST_CASE("flipped rejects categorical states") {
  const DiscreteState x = make_state({0, 1}, 3);
  CHECK_THROWS_AS((void)gwg::flipped(x, 0), std::invalid_argument);
}

TEST_CASE("with_value sets one coordinate") {
  CHECK(gwg::with_value(make_state({2, 0}, 3), 0, 1) == make_state({1, 0}, 3));
  CHECK(gwg::with_value(make_state({0, 0, 0}, 3), 2, 2) ==
        make_state({0, 0, 2}, 3));
  // No-op case: setting a coordinate to its current value returns x.
  const DiscreteState x = make_state({1, 2, 0}, 3);
  CHECK(gwg::with_value(x, 1, x.values[1]) == x);
}

TEST_CASE("hamming_window radius-1 sizes") {
  const auto w3 = gwg::hamming_window(make_state({0, 0, 0}), 1);
  CHECK(w3.size() == 3);
  const auto w6 = gwg::hamming_window(make_state({0, 0}, 4), 1);
  CHECK(w6.size() == 6);
}

TEST_CASE("hamming_window radius-2 matches brute-force enumeration") {
  // Oracle: walk all 16 binary states of D=4 and bin them by distance.
  const DiscreteState x = make_state({1, 0, 1, 1});
  std::set<std::vector<std::int32_t>> oracle;
  for (std::uint64_t idx = 0; idx < 16; ++idx) {
    const DiscreteState s = gwg::state_from_index(idx, 4, 2);
    const int d = testkit::naive_hamming(s, x);
    if (d >= 1 && d <= 2) oracle.insert(s.values);
  }
  CHECK(oracle.size() == 10);  // C(4,1) + C(4,2)
  const auto window = gwg::hamming_window(x, 2);
  CHECK(window.size() == oracle.size());
  std::set<std::vector<std::int32_t>> got;
  for (const auto& s : window) got.insert(s.values);
  CHECK(got == oracle);
}

TEST_CASE("hamming_window properties: excludes x, respects radius and count") {
  gwg::RngStream rng(11, 2);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 2 + static_cast<int>(rng.uniform_int(5));
    const std::int32_t arity = 2 + static_cast<std::int32_t>(rng.uniform_int(3));
    const int radius = 1 + static_cast<int>(rng.uniform_int(std::min(dim, 3)));
    const DiscreteState x = gwg::uniform_random_state(dim, arity, rng);
    const auto window = gwg::hamming_window(x, radius);
    // Closed-form count: sum_j C(D,j) (K-1)^j.
    double expected = 0.0;
    double binom = 1.0;
    double pow_a = 1.0;
    for (int j = 1; j <= radius; ++j) {
      binom = binom * (dim - j + 1) / j;
      pow_a *= arity - 1;
      expected += binom * pow_a;
    }
    CHECK(static_cast<double>(window.size()) == expected);
    std::set<std::vector<std::int32_t>> seen;
    for (const auto& s : window) {
      CHECK(s != x);
      const int d = testkit::naive_hamming(s, x);
      CHECK(d >= 1);
      CHECK(d <= radius);
      CHECK(seen.insert(s.values).second);  // no duplicates
    }
  }
}

TEST_CASE("hamming_window enforces the enumeration cap") {
  const DiscreteState x(40, 2);
  CHECK_THROWS_AS((void)gwg::hamming_window(x, 40, /*max_size=*/1024),
                  std::length_error);
}

TEST_CASE("embed maps binary states to raw 0/1 vectors") {
  const Eigen::VectorXd v = gwg::embed(make_state({1, 0}));
  REQUIRE(v.size() == 2);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);
}

TEST_CASE("embed one-hot encodes categorical states") {
  const Eigen::VectorXd v = gwg::embed(make_state({2}, 3));
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 1.0);
}

TEST_CASE("embed round-trips: decode(embed(x)) == x, rows one-hot") {
  gwg::RngStream rng(13, 3);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = 1 + static_cast<int>(rng.uniform_int(6));
    const std::int32_t arity = 2 + static_cast<std::int32_t>(rng.uniform_int(4));
    const DiscreteState x = gwg::uniform_random_state(dim, arity, rng);
    const Eigen::VectorXd v = gwg::embed(x);
    if (arity == 2) {
      REQUIRE(v.size() == dim);
      for (int i = 0; i < dim; ++i)
        CHECK(v[i] == static_cast<double>(x.values[i]));
      continue;
    }
    REQUIRE(v.size() == static_cast<Eigen::Index>(dim) * arity);
    for (int i = 0; i < dim; ++i) {
      double row_sum = 0.0;
      int argmax = -1;
      for (std::int32_t k = 0; k < arity; ++k) {
        const double e = v[static_cast<Eigen::Index>(i) * arity + k];
        CHECK((e == 0.0 || e == 1.0));
        row_sum += e;
        if (e == 1.0) argmax = k;
      }
      CHECK(row_sum == 1.0);  // exactly one 1 per dimension
      CHECK(argmax == x.values[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("state_index and state_from_index are inverse bijections") {
  for (std::uint64_t idx = 0; idx < 81; ++idx) {
    const DiscreteState x = gwg::state_from_index(idx, 4, 3);
    CHECK(gwg::state_index(x) == idx);
  }
  // First coordinate is most significant.
  CHECK(gwg::state_index(make_state({1, 0, 0})) == 4);
}

TEST_CASE("energy and gradient are pure and finite-difference consistent") {
  gwg::RngStream rng(17, 4);
  const auto model = testkit::random_model("ising-er", 12, 99);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteState x = gwg::uniform_random_state(12, 2, rng);
    const Eigen::VectorXd v = gwg::embed(x);
    const double e1 = model->energy(v);
    const double e2 = model->energy(v);
    CHECK(e1 == e2);  // purity: identical input, identical output
    const Eigen::VectorXd g1 = model->gradient(v);
    const Eigen::VectorXd g2 = model->gradient(v);
    CHECK((g1 - g2).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd fd = testkit::fd_gradient(*model, v, 1e-4);
    const double scale = std::max(1.0, g1.cwiseAbs().maxCoeff());
    CHECK((g1 - fd).cwiseAbs().maxCoeff() / scale < 1e-5);
  }
}

TEST_CASE("fused energy_and_gradient agrees with the split calls") {
  gwg::RngStream rng(19, 5);
  const auto model = testkit::random_model("cubic", 8, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd v =
        gwg::embed(gwg::uniform_random_state(8, 2, rng));
    Eigen::VectorXd g_fused;
    const double e_fused = model->energy_and_gradient(v, g_fused);
    CHECK(e_fused == doctest::Approx(model->energy(v)).epsilon(1e-14));
    CHECK((g_fused - model->gradient(v)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("CountedModel tallies every call, fused counts once each") {
  const auto inner = testkit::random_model("ising-er", 6, 3);
  gwg::CountedModel counted(*inner);
  const Eigen::VectorXd v = gwg::embed(DiscreteState(6, 2));
  (void)counted.energy(v);
  (void)counted.energy(v);
  (void)counted.gradient(v);
  Eigen::VectorXd g;
  (void)counted.energy_and_gradient(v, g);
  CHECK(counted.energy_evals() == 3);
  CHECK(counted.grad_evals() == 2);
  counted.reset_counts();
  CHECK(counted.energy_evals() == 0);
  CHECK(counted.grad_evals() == 0);
}

TEST_CASE("RngStream: same (seed, stream) reproduces the exact sequence") {
  gwg::RngStream a(0xDEADBEEF, 42);
  gwg::RngStream b(0xDEADBEEF, 42);
  for (int i = 0; i < 200; ++i) CHECK(a.next_u64() == b.next_u64());
  // Draw-type interleaving also replays identically.
  gwg::RngStream c(0xDEADBEEF, 42);
  gwg::RngStream d(0xDEADBEEF, 42);
  for (int i = 0; i < 50; ++i) {
    CHECK(c.uniform01() == d.uniform01());
    CHECK(c.uniform_int(17) == d.uniform_int(17));
    CHECK(c.normal() == d.normal());
  }
}

TEST_CASE("RngStream: different streams of one seed decorrelate") {
  gwg::RngStream a(123, 0);
  gwg::RngStream b(123, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("RngStream uniform_int stays in range and covers all values") {
  gwg::RngStream rng(31, 6);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::int64_t v = rng.uniform_int(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) CHECK(c > 800);  // ~1000 each expected
  CHECK_THROWS_AS((void)rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("categorical_from_logits follows the softmax weights") {
  gwg::RngStream rng(37, 7);
  Eigen::VectorXd logits(3);
  logits << 0.0, 1.0, 2.0;
  Eigen::VectorXd w = logits.array().exp();
  w /= w.sum();
  std::vector<std::int64_t> counts(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i)
    ++counts[static_cast<std::size_t>(rng.categorical_from_logits(logits))];
  CHECK(testkit::max_multinomial_sigma(counts, w) < 3.0);
}

TEST_CASE("constructor guards reject invalid states") {
  CHECK_THROWS_AS(DiscreteState(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteState(4, 1), std::invalid_argument);
}
