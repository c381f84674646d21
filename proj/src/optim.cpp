#include "erbp/optim.hpp"

#include <cmath>

#include "erbp/errors.hpp"

namespace erbp {

std::string optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

OptimizerState make_optimizer(OptimizerKind kind, double lr) {
  if (lr <= 0.0) throw ConfigError("optimizer: learning rate must be positive");
  OptimizerState s;
  s.kind = kind;
  s.lr = lr;
  return s;
}

namespace {

void check_shapes(const MLP& params, const Gradients& grads) {
  if (grads.layers.size() != params.layers().size() ||
      grads.heads.size() != params.heads().size()) {
    throw ConfigError("optimizer: gradient structure does not match parameters");
  }
  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    if (!grads.layers[i].w.same_shape(params.layers()[i].w) ||
        grads.layers[i].b.size() != params.layers()[i].b.size()) {
      throw ConfigError("optimizer: layer gradient shape mismatch");
    }
  }
  for (std::size_t i = 0; i < grads.heads.size(); ++i) {
    if (!grads.heads[i].w.same_shape(params.heads()[i].w) ||
        grads.heads[i].b.size() != params.heads()[i].b.size()) {
      throw ConfigError("optimizer: head gradient shape mismatch");
    }
  }
}

// Applies fn(param_tensor, grad_tensor, moment_m, moment_v) over every
// parameter tensor, layers first, then heads.
template <class Fn>
void zip_tensors(MLP& params, const Gradients& grads, OptimizerState& state, Fn fn) {
  const std::size_t n_layers = params.layers().size();
  for (std::size_t i = 0; i < n_layers; ++i) {
    fn(params.layers()[i].w.data, grads.layers[i].w.data, state.m[i].w.data,
       state.v[i].w.data);
    fn(params.layers()[i].b, grads.layers[i].b, state.m[i].b, state.v[i].b);
  }
  for (std::size_t i = 0; i < params.heads().size(); ++i) {
    fn(params.heads()[i].w.data, grads.heads[i].w.data, state.m[n_layers + i].w.data,
       state.v[n_layers + i].w.data);
    fn(params.heads()[i].b, grads.heads[i].b, state.m[n_layers + i].b,
       state.v[n_layers + i].b);
  }
}

void ensure_moments(const MLP& params, OptimizerState& state) {
  if (!state.m.empty()) return;
  auto zeros_like = [](const Layer& l) {
    return Layer{Matrix(l.w.rows, l.w.cols), Vector(l.b.size(), 0.0)};
  };
  for (const Layer& l : params.layers()) {
    state.m.push_back(zeros_like(l));
    state.v.push_back(zeros_like(l));
  }
  for (const Layer& l : params.heads()) {
    state.m.push_back(zeros_like(l));
    state.v.push_back(zeros_like(l));
  }
}

}  // namespace

void sgd_step(MLP& params, const Gradients& grads, OptimizerState& state) {
  check_shapes(params, grads);
  const double lr = state.lr;
  auto apply = [lr](Vector& p, const Vector& g) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
  };
  for (std::size_t i = 0; i < params.layers().size(); ++i) {
    apply(params.layers()[i].w.data, grads.layers[i].w.data);
    apply(params.layers()[i].b, grads.layers[i].b);
  }
  for (std::size_t i = 0; i < params.heads().size(); ++i) {
    apply(params.heads()[i].w.data, grads.heads[i].w.data);
    apply(params.heads()[i].b, grads.heads[i].b);
  }
}

void adam_step(MLP& params, const Gradients& grads, OptimizerState& state) {
  check_shapes(params, grads);
  ensure_moments(params, state);
  state.t += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  const double lr = state.lr;
  const double eps = state.eps;
  zip_tensors(params, grads, state,
              [&](Vector& p, const Vector& g, Vector& m, Vector& v) {
                for (std::size_t i = 0; i < p.size(); ++i) {
                  m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                  v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                  const double m_hat = m[i] / corr1;
                  const double v_hat = v[i] / corr2;
                  p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
                }
              });
}

void optimizer_step(MLP& params, const Gradients& grads, OptimizerState& state) {
  if (state.kind == OptimizerKind::kSgd) {
    sgd_step(params, grads, state);
  } else {
    adam_step(params, grads, state);
  }
}

}  // namespace erbp
