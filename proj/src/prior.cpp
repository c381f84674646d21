#include "erbp/prior.hpp"

#include <cmath>
#include <string>

#include "erbp/errors.hpp"

namespace erbp {
namespace {

double sign0(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

void check_dims(const Matrix& w, const Vector& b, const DefaultPrior& prior) {
  if (!w.same_shape(prior.d)) {
    throw ConfigError("erbp prior: weight matrix shape does not match default matrix");
  }
  if (b.size() != prior.bias_prior.size()) {
    throw ConfigError("erbp prior: bias length does not match prior");
  }
}

}  // namespace

Matrix build_default_matrix(std::size_t n_half, std::size_t hidden) {
  if (n_half == 0) throw ConfigError("default matrix: n_half must be positive");
  if (hidden < 2 * n_half) {
    throw ConfigError("default matrix: hidden size " + std::to_string(hidden) +
                      " cannot house all comparison pairs (need >= " +
                      std::to_string(2 * n_half) + ")");
  }
  Matrix d(hidden, 2 * n_half);
  for (std::size_t i = 0; i < n_half; ++i) {
    d(2 * i, i) = 1.0;
    d(2 * i, n_half + i) = -1.0;
    d(2 * i + 1, i) = -1.0;
    d(2 * i + 1, n_half + i) = 1.0;
  }
  return d;
}

DefaultPrior make_default_prior(std::size_t n_half, std::size_t hidden,
                                PriorVariant variant, double lambda) {
  if (variant == PriorVariant::kNone) {
    throw ConfigError("default prior: variant must be L1 or L2");
  }
  if (lambda < 0.0) throw ConfigError("default prior: lambda must be nonnegative");
  DefaultPrior prior;
  prior.d = build_default_matrix(n_half, hidden);
  prior.bias_prior = Vector(hidden, 0.0);
  prior.variant = variant;
  prior.lambda = lambda;
  return prior;
}

double erbp_loss(const Matrix& w, const Vector& b, const DefaultPrior& prior) {
  check_dims(w, b, prior);
  double loss = 0.0;
  if (prior.variant == PriorVariant::kL1) {
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      loss += std::abs(w.data[i] - prior.d.data[i]);
    }
    for (double bi : b) loss += std::abs(bi);
  } else {
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      const double diff = w.data[i] - prior.d.data[i];
      loss += diff * diff;
    }
    for (double bi : b) loss += bi * bi;
  }
  return loss;
}

std::pair<Matrix, Vector> erbp_grad(const Matrix& w, const Vector& b,
                                    const DefaultPrior& prior) {
  check_dims(w, b, prior);
  Matrix gw(w.rows, w.cols);
  Vector gb(b.size(), 0.0);
  if (prior.variant == PriorVariant::kL1) {
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      gw.data[i] = sign0(w.data[i] - prior.d.data[i]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) gb[i] = sign0(b[i]);
  } else {
    for (std::size_t i = 0; i < w.data.size(); ++i) {
      gw.data[i] = 2.0 * (w.data[i] - prior.d.data[i]);
    }
    for (std::size_t i = 0; i < b.size(); ++i) gb[i] = 2.0 * b[i];
  }
  return {std::move(gw), std::move(gb)};
}

}  // namespace erbp
