#pragma once

#include <vector>

#include "erbp/dataset.hpp"
#include "erbp/model.hpp"
#include "erbp/prior.hpp"

namespace erbp {

// Components of the training objective l_t = l_c + lambda * l_RBP.
struct LossBreakdown {
  double data_loss = 0.0;   // l_c
  double prior_loss = 0.0;  // l_RBP, unweighted
  double total = 0.0;       // l_t
  double lambda = 0.0;
};

inline constexpr double kLogClamp = 1e-12;

// -sum t_i ln(max(p_i, 1e-12)), summed across heads when probs/target hold
// concatenated per-head pairs.
double cross_entropy(const Vector& probs, const Vector& target);

// prior may be null (standard network): total == data_loss, lambda == 0.
LossBreakdown total_loss(double data_loss, const DefaultPrior* prior,
                         const Matrix& w, const Vector& b);

// Percent correct per head over the dataset.
std::vector<double> accuracy(const MLP& m, const Dataset& d);

// Flat concatenated target for an example, matching the model's head count.
Vector example_target(const Example& ex, std::size_t heads);

}  // namespace erbp
