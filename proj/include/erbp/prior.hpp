#pragma once

#include <cstddef>
#include <utility>

#include "erbp/linalg.hpp"

namespace erbp {

enum class PriorVariant { kNone, kL1, kL2 };

// Weight prior pulling the first hidden layer toward the default comparison
// matrix. Covers first-layer weights and biases only; deeper layers and the
// output heads are never regularized by it.
struct DefaultPrior {
  Matrix d;           // hidden x 2*n_half template
  Vector bias_prior;  // all zeros, length hidden
  PriorVariant variant = PriorVariant::kL2;
  double lambda = 0.0;
};

// The default matrix: for each compared dimension i there are two hidden rows,
// row 2i with +1 at column i and -1 at column n_half+i, and row 2i+1 with the
// signs inverted. Rows beyond 2*n_half are all zero. Every column sums to 0.
// Requires hidden >= 2*n_half (one +/- pair per compared dimension).
Matrix build_default_matrix(std::size_t n_half, std::size_t hidden);

DefaultPrior make_default_prior(std::size_t n_half, std::size_t hidden,
                                PriorVariant variant, double lambda);

// L1: sum |w - d| + sum |b|.  L2: sum (w - d)^2 + sum b^2.
// Zero exactly when (w, b) equals (d, 0).
double erbp_loss(const Matrix& w, const Vector& b, const DefaultPrior& prior);

// Gradients of erbp_loss w.r.t. w and b.
// L2: 2(w - d) and 2b.  L1: sign(w - d) and sign(b), with sign(0) = 0.
std::pair<Matrix, Vector> erbp_grad(const Matrix& w, const Vector& b,
                                    const DefaultPrior& prior);

}  // namespace erbp
