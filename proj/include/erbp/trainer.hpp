#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "erbp/dataset.hpp"
#include "erbp/model.hpp"
#include "erbp/objective.hpp"
#include "erbp/optim.hpp"
#include "erbp/prior.hpp"

namespace erbp {

std::string prior_name(PriorVariant v);
PriorVariant prior_from_name(const std::string& name);

struct RunConfig {
  MLPConfig model;
  Task task = Task::kIdentity;
  PatternKind pattern = PatternKind::kSingleBit;  // joint / pattern tasks only
  bool parity_odd = false;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double lr = kDefaultAdamLr;
  std::size_t epochs = 20;
  PriorVariant prior = PriorVariant::kNone;
  double lambda = 0.0;  // ignored when prior == kNone
  std::uint64_t seed = 0;
};

struct RunRecord {
  RunConfig config;
  std::vector<LossBreakdown> epoch_loss;  // mean over the epoch's steps
  std::vector<double> train_acc;          // percent, per head
  std::vector<double> test_acc;
  double final_train_data_loss = 0.0;
  double final_test_data_loss = 0.0;
  double final_prior_loss = 0.0;  // unweighted l_RBP after training
  double wall_ms = 0.0;
};

struct EvalResult {
  std::vector<double> acc;  // percent per head
  double mean_loss = 0.0;   // mean cross-entropy (summed over heads)
};

void validate_run_config(const RunConfig& cfg);

// One training run at batch size 1: per epoch, iterate the training examples
// in a seed-deterministic shuffled order; per example forward -> cross-entropy
// gradient -> plus lambda * prior gradient on the first layer -> optimizer
// step. Evaluates train and test after the final epoch.
std::pair<MLP, RunRecord> train_run(const RunConfig& cfg, const Split& split);

// Accuracy and mean data loss; mutates nothing.
EvalResult evaluate(const MLP& m, const Dataset& d);

// Max relative error between the analytic gradient of the total objective and
// central finite differences (eps = 1e-5) over n_points random parameter
// points, skipping parameters within 1e-3 of a ReLU or L1 kink.
double gradient_check(const RunConfig& cfg, std::size_t n_points);

// Deterministic sub-streams derived from a run seed. Dataset generation and
// network initialization draw from distinct streams so they never alias.
Rng data_stream(std::uint64_t seed);
Rng trainer_stream(std::uint64_t seed);

}  // namespace erbp
