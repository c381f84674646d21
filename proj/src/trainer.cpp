#include "erbp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "erbp/errors.hpp"

namespace erbp {

std::string prior_name(PriorVariant v) {
  switch (v) {
    case PriorVariant::kNone: return "none";
    case PriorVariant::kL1: return "l1";
    case PriorVariant::kL2: return "l2";
  }
  return "none";
}

PriorVariant prior_from_name(const std::string& name) {
  if (name == "none") return PriorVariant::kNone;
  if (name == "l1") return PriorVariant::kL1;
  if (name == "l2") return PriorVariant::kL2;
  throw ConfigError("unknown prior '" + name + "'");
}

Rng data_stream(std::uint64_t seed) {
  return Rng(seed);
}

Rng trainer_stream(std::uint64_t seed) {
  // distinct stream from the dataset generator for the same run seed
  return Rng(seed ^ 0x747261696E657221ULL);
}

void validate_run_config(const RunConfig& cfg) {
  validate_config(cfg.model);
  if (cfg.epochs < 1) throw ConfigError("run: epochs must be >= 1");
  if (cfg.lambda < 0.0) throw ConfigError("run: lambda must be nonnegative");
  if (cfg.lr <= 0.0) throw ConfigError("run: learning rate must be positive");
  const bool joint = cfg.task == Task::kJoint;
  if (joint != (cfg.model.heads == 2)) {
    throw ConfigError("run: two heads if and only if the task is joint");
  }
  if (cfg.prior != PriorVariant::kNone) {
    if (cfg.model.fusion == Fusion::kEarly) {
      throw ConfigError(
          "run: the weight prior targets a 2*n_half-wide first layer; early "
          "fusion widens it");
    }
    if (cfg.model.hidden < 2 * cfg.model.n_half) {
      throw ConfigError("run: prior requires hidden >= 2*n_half");
    }
  }
}

namespace {

void check_split(const RunConfig& cfg, const Split& split) {
  if (split.train.n_half != cfg.model.n_half || split.test.n_half != cfg.model.n_half) {
    throw ConfigError("run: split n_half does not match the model config");
  }
  if (split.train.size() == 0) throw ConfigError("run: empty training set");
  const bool joint = cfg.task == Task::kJoint;
  if (joint && split.train.examples[0].pattern_label.empty()) {
    throw ConfigError("run: joint task requires pattern labels in the dataset");
  }
}

}  // namespace

std::pair<MLP, RunRecord> train_run(const RunConfig& cfg, const Split& split) {
  validate_run_config(cfg);
  check_split(cfg, split);
  const auto t0 = std::chrono::steady_clock::now();

  Rng rng = trainer_stream(cfg.seed);
  MLPConfig mc = cfg.model;
  mc.seed = cfg.seed;
  MLP net = MLP::init(mc, rng);

  DefaultPrior prior;
  const bool use_prior = cfg.prior != PriorVariant::kNone;
  if (use_prior) {
    prior = make_default_prior(mc.n_half, mc.hidden, cfg.prior, cfg.lambda);
  }

  OptimizerState opt = make_optimizer(cfg.optimizer, cfg.lr);

  RunRecord rec;
  rec.config = cfg;
  rec.epoch_loss.reserve(cfg.epochs);

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(rng, order);
    LossBreakdown epoch_sum;
    for (std::size_t idx : order) {
      const Example& ex = split.train.examples[idx];
      const Vector target = example_target(ex, mc.heads);
      const Vector probs = net.forward(ex.input);
      const double l_c = cross_entropy(probs, target);
      Gradients grads = net.backward(target);
      double l_rbp = 0.0;
      if (use_prior) {
        l_rbp = erbp_loss(net.layers()[0].w, net.layers()[0].b, prior);
        // lambda = 0 must follow the exact same arithmetic as prior == none
        if (cfg.lambda != 0.0) {
          auto [gw, gb] = erbp_grad(net.layers()[0].w, net.layers()[0].b, prior);
          for (std::size_t i = 0; i < gw.data.size(); ++i) {
            grads.layers[0].w.data[i] += cfg.lambda * gw.data[i];
          }
          for (std::size_t i = 0; i < gb.size(); ++i) {
            grads.layers[0].b[i] += cfg.lambda * gb[i];
          }
        }
      }
      optimizer_step(net, grads, opt);
      epoch_sum.data_loss += l_c;
      epoch_sum.prior_loss += l_rbp;
      epoch_sum.total += l_c + (use_prior ? cfg.lambda * l_rbp : 0.0);
    }
    const double steps = static_cast<double>(order.size());
    rec.epoch_loss.push_back({epoch_sum.data_loss / steps, epoch_sum.prior_loss / steps,
                              epoch_sum.total / steps, use_prior ? cfg.lambda : 0.0});
  }

  const EvalResult train_eval = evaluate(net, split.train);
  const EvalResult test_eval = evaluate(net, split.test);
  rec.train_acc = train_eval.acc;
  rec.test_acc = test_eval.acc;
  rec.final_train_data_loss = train_eval.mean_loss;
  rec.final_test_data_loss = test_eval.mean_loss;
  rec.final_prior_loss =
      use_prior ? erbp_loss(net.layers()[0].w, net.layers()[0].b, prior) : 0.0;
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return {std::move(net), std::move(rec)};
}

EvalResult evaluate(const MLP& m, const Dataset& d) {
  if (d.size() == 0) throw ConfigError("evaluate: dataset is empty");
  EvalResult out;
  out.acc = accuracy(m, d);
  double loss = 0.0;
  for (const Example& ex : d.examples) {
    loss += cross_entropy(m.predict(ex.input), example_target(ex, m.config().heads));
  }
  out.mean_loss = loss / static_cast<double>(d.size());
  return out;
}

namespace {

constexpr double kFdEps = 1e-5;
constexpr double kKinkMargin = 1e-3;

struct ProbeResult {
  double loss = 0.0;
  double min_abs_pre = 0.0;  // smallest |pre-activation| seen
};

// Total objective at the current parameters, replayed manually so the probe
// can also report how close any ReLU pre-activation sits to its kink.
ProbeResult probe_loss(const MLP& net, const Vector& input, const Vector& target,
                       const DefaultPrior* prior) {
  const std::size_t n = net.config().n_half;
  Vector dr(n);
  for (std::size_t i = 0; i < n; ++i) dr[i] = dr_activation(input[i], input[n + i]);

  Vector a = input;
  if (net.config().fusion == Fusion::kEarly) a.insert(a.end(), dr.begin(), dr.end());

  double min_abs = 1e300;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    Vector z = mat_vec(net.layers()[l].w, a);
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] += net.layers()[l].b[i];
      min_abs = std::min(min_abs, std::abs(z[i]));
    }
    a = relu(z);
    if (l == 0 && net.config().fusion == Fusion::kMid) {
      a.insert(a.end(), dr.begin(), dr.end());
    }
  }

  ProbeResult r;
  for (std::size_t h = 0; h < net.heads().size(); ++h) {
    Vector logits = mat_vec(net.heads()[h].w, a);
    for (std::size_t i = 0; i < logits.size(); ++i) logits[i] += net.heads()[h].b[i];
    const Vector probs = softmax(logits);
    r.loss += cross_entropy(probs, {target[2 * h], target[2 * h + 1]});
  }
  if (prior != nullptr) {
    r.loss += prior->lambda * erbp_loss(net.layers()[0].w, net.layers()[0].b, *prior);
  }
  r.min_abs_pre = min_abs;
  return r;
}

}  // namespace

double gradient_check(const RunConfig& cfg, std::size_t n_points) {
  validate_run_config(cfg);
  Rng rng(cfg.seed ^ 0x67726164636B21ULL);

  double max_rel = 0.0;
  for (std::size_t point = 0; point < n_points; ++point) {
    MLPConfig mc = cfg.model;
    mc.seed = rng.next_u64();
    Rng init_rng(mc.seed);
    MLP net = MLP::init(mc, init_rng);
    // Jitter all parameters so biases leave zero and weights decorrelate from
    // the prior means.
    auto jitter = [&rng](std::vector<Layer>& group) {
      for (Layer& l : group) {
        for (double& x : l.w.data) x += rng.next_uniform(-0.2, 0.2);
        for (double& x : l.b) x += rng.next_uniform(-0.2, 0.2);
      }
    };
    jitter(net.layers());
    jitter(net.heads());

    Vector input(2 * mc.n_half);
    for (double& x : input) x = static_cast<double>(rng.next_below(2));
    Vector target(2 * mc.heads, 0.0);
    for (std::size_t h = 0; h < mc.heads; ++h) {
      target[2 * h + rng.next_below(2)] = 1.0;
    }

    DefaultPrior prior;
    const bool use_prior = cfg.prior != PriorVariant::kNone && cfg.lambda != 0.0;
    if (use_prior) {
      prior = make_default_prior(mc.n_half, mc.hidden, cfg.prior, cfg.lambda);
    }
    const DefaultPrior* prior_ptr = use_prior ? &prior : nullptr;

    // Analytic gradient of the total objective.
    (void)net.forward(input);
    Gradients analytic = net.backward(target);
    if (use_prior) {
      auto [gw, gb] = erbp_grad(net.layers()[0].w, net.layers()[0].b, prior);
      for (std::size_t i = 0; i < gw.data.size(); ++i) {
        analytic.layers[0].w.data[i] += cfg.lambda * gw.data[i];
      }
      for (std::size_t i = 0; i < gb.size(); ++i) {
        analytic.layers[0].b[i] += cfg.lambda * gb[i];
      }
    }

    auto check_tensor = [&](Vector& params, const Vector& grad, bool first_layer_w,
                            bool first_layer_b, const Matrix* d_ref) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (use_prior && cfg.prior == PriorVariant::kL1) {
          // L1 kink at w == d (or b == 0)
          const double dist = first_layer_w ? std::abs(params[i] - d_ref->data[i])
                              : first_layer_b ? std::abs(params[i])
                                              : 2.0 * kKinkMargin;
          if (dist <= kKinkMargin) continue;
        }
        const double saved = params[i];
        params[i] = saved + kFdEps;
        const ProbeResult up = probe_loss(net, input, target, prior_ptr);
        params[i] = saved - kFdEps;
        const ProbeResult down = probe_loss(net, input, target, prior_ptr);
        params[i] = saved;
        if (std::min(up.min_abs_pre, down.min_abs_pre) <= kKinkMargin) continue;
        const double fd = (up.loss - down.loss) / (2.0 * kFdEps);
        // the 1e-3 floor keeps cancellation noise (|loss| * 1e-16 / eps) from
        // masquerading as relative error on near-zero gradients while still
        // flagging any real defect above 1e-7 absolute
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
        max_rel = std::max(max_rel, std::abs(fd - grad[i]) / denom);
      }
    };

    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      check_tensor(net.layers()[l].w.data, analytic.layers[l].w.data, l == 0, false,
                   use_prior ? &prior.d : nullptr);
      check_tensor(net.layers()[l].b, analytic.layers[l].b, false, l == 0,
                   use_prior ? &prior.d : nullptr);
    }
    for (std::size_t h = 0; h < net.heads().size(); ++h) {
      check_tensor(net.heads()[h].w.data, analytic.heads[h].w.data, false, false, nullptr);
      check_tensor(net.heads()[h].b, analytic.heads[h].b, false, false, nullptr);
    }
  }
  return max_rel;
}

}  // namespace erbp
