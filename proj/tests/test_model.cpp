#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <doctest.h>

#include "erbp/dataset.hpp"
#include "erbp/errors.hpp"
#include "erbp/model.hpp"
#include "erbp/objective.hpp"
#include "erbp/optim.hpp"
#include "test_helpers.hpp"

using namespace erbp;

namespace {

MLPConfig make_cfg(std::size_t n, std::size_t hidden, std::size_t depth, Fusion fusion,
                   std::size_t heads = 1) {
  MLPConfig cfg;
  cfg.n_half = n;
  cfg.hidden = hidden;
  cfg.depth = depth;
  cfg.fusion = fusion;
  cfg.heads = heads;
  return cfg;
}

Vector random_binary_input(Rng& rng, std::size_t n) {
  Vector v(2 * n);
  for (double& x : v) x = static_cast<double>(rng.next_below(2));
  return v;
}

}  // namespace

TEST_CASE("dr activation") {
  CHECK(dr_activation(1, 0) == 1.0);
  CHECK(dr_activation(0.5, 0.5) == 0.0);
  CHECK(dr_activation(0, 1) == 1.0);
}

TEST_CASE("init shapes follow the fusion wiring") {
  Rng rng(1);
  const MLP plain = MLP::init(make_cfg(3, 10, 1, Fusion::kNone), rng);
  CHECK(plain.layers()[0].w.rows == 10);
  CHECK(plain.layers()[0].w.cols == 6);
  CHECK(plain.heads()[0].w.rows == 2);
  CHECK(plain.heads()[0].w.cols == 10);

  const MLP mid = MLP::init(make_cfg(3, 10, 2, Fusion::kMid), rng);
  CHECK(mid.layers()[0].w.cols == 6);
  CHECK(mid.layers()[1].w.cols == 13);  // 10 hidden + 3 comparison outputs
  CHECK(mid.heads()[0].w.cols == 10);

  const MLP mid1 = MLP::init(make_cfg(3, 10, 1, Fusion::kMid), rng);
  CHECK(mid1.heads()[0].w.cols == 13);

  const MLP early = MLP::init(make_cfg(3, 10, 1, Fusion::kEarly), rng);
  CHECK(early.layers()[0].w.cols == 9);  // 3n inputs
}

TEST_CASE("init is deterministic given the seed") {
  Rng a(42), b(42);
  const MLP m1 = MLP::init(make_cfg(4, 12, 3, Fusion::kMid, 2), a);
  const MLP m2 = MLP::init(make_cfg(4, 12, 3, Fusion::kMid, 2), b);
  for (std::size_t l = 0; l < m1.layers().size(); ++l) {
    CHECK(m1.layers()[l].w.data == m2.layers()[l].w.data);
    CHECK(m1.layers()[l].b == m2.layers()[l].b);
  }
  for (std::size_t h = 0; h < m1.heads().size(); ++h) {
    CHECK(m1.heads()[h].w.data == m2.heads()[h].w.data);
  }
}

TEST_CASE("config validation") {
  Rng rng(1);
  CHECK_THROWS_AS(MLP::init(make_cfg(3, 10, 6, Fusion::kNone), rng), ConfigError);
  CHECK_THROWS_AS(MLP::init(make_cfg(0, 10, 1, Fusion::kNone), rng), ConfigError);
  MLPConfig three_heads = make_cfg(3, 10, 1, Fusion::kNone);
  three_heads.heads = 3;
  CHECK_THROWS_AS(MLP::init(three_heads, rng), ConfigError);
}

TEST_CASE("forward is pure and outputs sum to one per head") {
  Rng rng(7);
  MLP net = MLP::init(make_cfg(4, 9, 2, Fusion::kMid, 2), rng);
  const Vector input = random_binary_input(rng, 4);
  const Vector p1 = net.forward(input);
  (void)net.backward(example_target(Example{input, {1, 0}, {0, 1}}, 2));
  const Vector p2 = net.predict(input);
  CHECK(p1 == p2);
  REQUIRE(p1.size() == 4);
  CHECK(p1[0] + p1[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p1[2] + p1[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("all-zero weights give the symmetric output") {
  Rng rng(7);
  MLP net = MLP::init(make_cfg(3, 8, 1, Fusion::kNone), rng);
  for (Layer& l : net.layers()) {
    for (double& x : l.w.data) x = 0.0;
  }
  for (Layer& l : net.heads()) {
    for (double& x : l.w.data) x = 0.0;
  }
  const Vector p = net.predict({1, 0, 1, 0, 0, 1});
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
}

TEST_CASE("hand-built comparison network classifies identity exhaustively at n=3") {
  MLP net = erbp::testing::build_hamming_network(3);
  for (std::size_t bits = 0; bits < 64; ++bits) {
    Vector input(6);
    for (std::size_t j = 0; j < 6; ++j) {
      input[j] = static_cast<double>((bits >> (5 - j)) & 1u);
    }
    const Vector p = net.predict(input);
    const bool equal = halves_equal(input);
    if (equal) {
      CHECK(p[0] > 0.5);
    } else {
      CHECK(p[1] > 0.5);
    }
    CHECK(net.classify(input)[0] == (equal ? 0u : 1u));
  }
}

TEST_CASE("classify breaks exact ties toward class 0") {
  Rng rng(7);
  MLP net = MLP::init(make_cfg(2, 4, 1, Fusion::kNone), rng);
  for (Layer& l : net.layers()) {
    for (double& x : l.w.data) x = 0.0;
  }
  for (Layer& l : net.heads()) {
    for (double& x : l.w.data) x = 0.0;
  }
  CHECK(net.classify({1, 1, 0, 0})[0] == 0);
}

TEST_CASE("zero-weight network backward gives the analytic head gradient") {
  Rng rng(7);
  MLP net = MLP::init(make_cfg(3, 6, 1, Fusion::kMid), rng);
  for (Layer& l : net.layers()) {
    for (double& x : l.w.data) x = 0.0;
  }
  for (Layer& l : net.heads()) {
    for (double& x : l.w.data) x = 0.0;
  }
  const Vector input{1, 0, 0, 0, 0, 0};  // pair 0 differs -> dr = (1,0,0)
  (void)net.forward(input);
  const Gradients g = net.backward({1, 0});
  // softmax(0) - [1,0] = (-0.5, +0.5)
  CHECK(g.heads[0].b[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g.heads[0].b[1] == doctest::Approx(0.5).epsilon(1e-12));
  // hidden activations are zero, so head weight gradients live only on the
  // comparison slots
  for (std::size_t c = 0; c < 6; ++c) {
    CHECK(g.heads[0].w(0, c) == 0.0);
  }
  CHECK(g.heads[0].w(0, 6) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g.heads[0].w(1, 6) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.heads[0].w(0, 7) == 0.0);
}

TEST_CASE("backward without forward is a usage error") {
  Rng rng(3);
  MLP net = MLP::init(make_cfg(2, 5, 1, Fusion::kNone), rng);
  CHECK_THROWS_AS(net.backward({1, 0}), std::logic_error);
  (void)net.forward({1, 0, 1, 0});
  (void)net.backward({1, 0});
  CHECK_THROWS_AS(net.backward({1, 0}), std::logic_error);  // cache consumed
}

TEST_CASE("analytic gradients match finite differences on small nets") {
  struct Case {
    std::size_t depth;
    Fusion fusion;
    std::size_t heads;
  };
  for (const Case& c : {Case{1, Fusion::kNone, 1}, Case{2, Fusion::kMid, 1},
                        Case{1, Fusion::kEarly, 1}, Case{2, Fusion::kNone, 2}}) {
    Rng rng(100 + c.depth + static_cast<int>(c.fusion) * 10 + c.heads);
    MLP net = MLP::init(make_cfg(3, 7, c.depth, c.fusion, c.heads), rng);
    for (Layer& l : net.layers()) {
      for (double& x : l.b) x += rng.next_uniform(-0.3, 0.3);
    }
    const Vector input = random_binary_input(rng, 3);
    Vector target(2 * c.heads, 0.0);
    for (std::size_t h = 0; h < c.heads; ++h) target[2 * h] = 1.0;

    (void)net.forward(input);
    const Gradients g = net.backward(target);

    const double eps = 1e-5;
    double max_rel = 0.0;
    auto fd_tensor = [&](Vector& params, const Vector& grad) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + eps;
        const double up = cross_entropy(net.predict(input), target);
        params[i] = saved - eps;
        const double down = cross_entropy(net.predict(input), target);
        params[i] = saved;
        const double fd = (up - down) / (2 * eps);
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
        max_rel = std::max(max_rel, std::abs(fd - grad[i]) / denom);
      }
    };
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      fd_tensor(net.layers()[l].w.data, g.layers[l].w.data);
      fd_tensor(net.layers()[l].b, g.layers[l].b);
    }
    for (std::size_t h = 0; h < net.heads().size(); ++h) {
      fd_tensor(net.heads()[h].w.data, g.heads[h].w.data);
      fd_tensor(net.heads()[h].b, g.heads[h].b);
    }
    CHECK(max_rel <= 1e-4);
  }
}

TEST_CASE("gradients vanish at the optimum of a separable toy set") {
  // four points labelled by their first bit: linearly separable, so the
  // cross-entropy optimum saturates and the gradient norm collapses
  const std::vector<Vector> inputs{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto label = [](const Vector& x) {
    return x[0] == 1.0 ? Vector{1, 0} : Vector{0, 1};
  };
  Rng rng(99);
  MLP net = MLP::init(make_cfg(1, 4, 1, Fusion::kNone), rng);
  OptimizerState opt = make_optimizer(OptimizerKind::kAdam, 0.1);
  for (int step = 0; step < 12000; ++step) {
    const Vector& x = inputs[step % inputs.size()];
    (void)net.forward(x);
    const Gradients g = net.backward(label(x));
    optimizer_step(net, g, opt);
  }
  double norm_sq = 0.0;
  for (const Vector& x : inputs) {
    (void)net.forward(x);
    const Gradients g = net.backward(label(x));
    for (const Layer& l : g.layers) {
      for (double v : l.w.data) norm_sq += v * v;
      for (double v : l.b) norm_sq += v * v;
    }
    for (const Layer& l : g.heads) {
      for (double v : l.w.data) norm_sq += v * v;
      for (double v : l.b) norm_sq += v * v;
    }
  }
  CHECK(std::sqrt(norm_sq) < 1e-6);
}

TEST_CASE("input gradients flow through the comparison units") {
  // real-valued probe input keeps |x-y| away from its kink
  Rng rng(55);
  MLP net = MLP::init(make_cfg(3, 8, 1, Fusion::kEarly), rng);
  Vector input{0.9, 0.2, 0.7, 0.1, 0.8, 0.4};
  const Vector target{0, 1};
  (void)net.forward(input);
  const Gradients g = net.backward(target);
  const double eps = 1e-6;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double saved = input[i];
    input[i] = saved + eps;
    const double up = cross_entropy(net.predict(input), target);
    input[i] = saved - eps;
    const double down = cross_entropy(net.predict(input), target);
    input[i] = saved;
    const double fd = (up - down) / (2 * eps);
    CHECK(g.input[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("checkpoint round-trip preserves parameters bitwise") {
  Rng rng(77);
  MLP net = MLP::init(make_cfg(4, 10, 2, Fusion::kMid, 2), rng);
  const std::string path =
      (std::filesystem::temp_directory_path() / "erbp_model_rt.txt").string();
  net.save(path);
  const MLP back = MLP::load(path);
  REQUIRE(back.layers().size() == net.layers().size());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    CHECK(back.layers()[l].w.data == net.layers()[l].w.data);
    CHECK(back.layers()[l].b == net.layers()[l].b);
  }
  for (std::size_t h = 0; h < net.heads().size(); ++h) {
    CHECK(back.heads()[h].w.data == net.heads()[h].w.data);
    CHECK(back.heads()[h].b == net.heads()[h].b);
  }
  // byte-identical re-serialization
  net.save(path + ".a");
  back.save(path + ".b");
  std::ifstream fa(path + ".a"), fb(path + ".b");
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(sa == sb);
  for (const char* suffix : {"", ".a", ".b"}) {
    std::filesystem::remove(path + suffix);
  }
}

TEST_CASE("checkpoint loader rejects malformed files") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "erbp_model_bad.txt").string();
  {
    std::ofstream f(path);
    f << "not a checkpoint\n";
  }
  CHECK_THROWS_AS(MLP::load(path), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(MLP::load(path), IoError);
}
