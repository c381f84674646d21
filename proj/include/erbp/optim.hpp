#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "erbp/model.hpp"

namespace erbp {

enum class OptimizerKind { kSgd, kAdam };

std::string optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& name);

inline constexpr double kDefaultSgdLr = 0.01;
inline constexpr double kDefaultAdamLr = 0.001;

// SGD needs only the rate. Adam keeps first/second moment buffers shaped like
// the parameters (layers then heads) plus the step counter; buffers are
// allocated lazily on the first step.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = kDefaultAdamLr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t t = 0;
  std::vector<Layer> m;
  std::vector<Layer> v;
};

OptimizerState make_optimizer(OptimizerKind kind, double lr);

// p <- p - lr * g
void sgd_step(MLP& params, const Gradients& grads, OptimizerState& state);

// Standard Adam with bias correction; t is incremented before the update.
void adam_step(MLP& params, const Gradients& grads, OptimizerState& state);

void optimizer_step(MLP& params, const Gradients& grads, OptimizerState& state);

}  // namespace erbp
