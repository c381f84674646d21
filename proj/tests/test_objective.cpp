#include <cmath>

#include <doctest.h>

#include "erbp/errors.hpp"
#include "erbp/objective.hpp"
#include "test_helpers.hpp"

using namespace erbp;

TEST_CASE("cross entropy values") {
  CHECK(cross_entropy({1, 0}, {1, 0}) <= 1e-11);
  CHECK(cross_entropy({0.5, 0.5}, {0, 1}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(cross_entropy({0.25, 0.75}, {0, 1}) ==
        doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  // clamp keeps the loss finite at p = 0
  CHECK(std::isfinite(cross_entropy({0.0, 1.0}, {1, 0})));
  CHECK_THROWS_AS(cross_entropy({0.5, 0.5}, {1, 0, 0}), ConfigError);
}

TEST_CASE("cross entropy sums over heads") {
  const double two_heads = cross_entropy({0.5, 0.5, 0.25, 0.75}, {1, 0, 0, 1});
  CHECK(two_heads ==
        doctest::Approx(std::log(2.0) + std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("total loss composition") {
  const DefaultPrior l2 = make_default_prior(3, 6, PriorVariant::kL2, 3.0);
  const Vector b0(6, 0.0);

  // lambda = 0 limit: no prior attached
  const LossBreakdown none = total_loss(0.7, nullptr, Matrix(), Vector());
  CHECK(none.total == 0.7);
  CHECK(none.prior_loss == 0.0);
  CHECK(none.lambda == 0.0);

  // l_c=0.5, l_RBP=2, lambda=3 -> 6.5 (single entry off by sqrt(2) gives l_RBP=2)
  Matrix w = l2.d;
  w(0, 1) += std::sqrt(2.0);
  const LossBreakdown with = total_loss(0.5, &l2, w, b0);
  CHECK(with.prior_loss == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(with.total == doctest::Approx(6.5).epsilon(1e-12));

  // w = d, b = 0 -> total equals the data loss for any lambda
  const LossBreakdown at_mean = total_loss(0.9, &l2, l2.d, b0);
  CHECK(at_mean.total == 0.9);
}

TEST_CASE("accuracy of the hand-built comparison network is 100") {
  MLP net = erbp::testing::build_hamming_network(3);
  Rng rng(5);
  const Dataset d = generate_identity_dataset(rng, 3);
  CHECK(accuracy(net, d)[0] == 100.0);
}

TEST_CASE("constant classifier scores 50 on balanced data") {
  Rng rng(5);
  MLPConfig cfg;
  cfg.n_half = 3;
  cfg.hidden = 6;
  MLP net = MLP::init(cfg, rng);
  for (Layer& l : net.layers()) {
    for (double& x : l.w.data) x = 0.0;
  }
  for (Layer& l : net.heads()) {
    for (double& x : l.w.data) x = 0.0;
  }
  net.heads()[0].b = {1.0, 0.0};  // always predicts "equal"
  const Dataset d = generate_identity_dataset(rng, 3);
  CHECK(accuracy(net, d)[0] == 50.0);
}

TEST_CASE("accuracy is invariant under dataset permutation and bounded") {
  Rng rng(6);
  MLPConfig cfg;
  cfg.n_half = 4;
  cfg.hidden = 9;
  MLP net = MLP::init(cfg, rng);
  Dataset d = generate_identity_dataset(rng, 4);
  const double base = accuracy(net, d)[0];
  CHECK(base >= 0.0);
  CHECK(base <= 100.0);
  std::vector<Example> reversed(d.examples.rbegin(), d.examples.rend());
  d.examples = reversed;
  CHECK(accuracy(net, d)[0] == base);
}

TEST_CASE("accuracy rejects an empty dataset") {
  Rng rng(6);
  MLPConfig cfg;
  cfg.n_half = 2;
  cfg.hidden = 4;
  const MLP net = MLP::init(cfg, rng);
  CHECK_THROWS_AS(accuracy(net, Dataset{}), ConfigError);
}
