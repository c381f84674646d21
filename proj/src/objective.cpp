#include "erbp/objective.hpp"

#include <cmath>

#include "erbp/errors.hpp"

namespace erbp {

double cross_entropy(const Vector& probs, const Vector& target) {
  if (probs.size() != target.size()) {
    throw ConfigError("cross_entropy: probs/target length mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (target[i] != 0.0) {
      loss -= target[i] * std::log(probs[i] > kLogClamp ? probs[i] : kLogClamp);
    }
  }
  return loss;
}

LossBreakdown total_loss(double data_loss, const DefaultPrior* prior,
                         const Matrix& w, const Vector& b) {
  LossBreakdown out;
  out.data_loss = data_loss;
  if (prior != nullptr) {
    out.prior_loss = erbp_loss(w, b, *prior);
    out.lambda = prior->lambda;
  }
  out.total = out.data_loss + out.lambda * out.prior_loss;
  return out;
}

Vector example_target(const Example& ex, std::size_t heads) {
  if (heads == 1) return ex.label;
  if (ex.pattern_label.empty()) {
    throw ConfigError("two-head model requires examples with a pattern label");
  }
  Vector t = ex.label;
  t.insert(t.end(), ex.pattern_label.begin(), ex.pattern_label.end());
  return t;
}

std::vector<double> accuracy(const MLP& m, const Dataset& d) {
  if (d.size() == 0) throw ConfigError("accuracy: dataset is empty");
  const std::size_t heads = m.config().heads;
  std::vector<std::size_t> correct(heads, 0);
  for (const Example& ex : d.examples) {
    const Vector target = example_target(ex, heads);
    const std::vector<std::size_t> pred = m.classify(ex.input);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t truth = target[2 * h] == 1.0 ? 0 : 1;
      if (pred[h] == truth) ++correct[h];
    }
  }
  std::vector<double> out(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    out[h] = 100.0 * static_cast<double>(correct[h]) / static_cast<double>(d.size());
  }
  return out;
}

}  // namespace erbp
