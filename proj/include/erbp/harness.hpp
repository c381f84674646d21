#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "erbp/trainer.hpp"

namespace erbp {

// Named model variants matching the columns of the experiment tables.
enum class Variant { kStandard, kEarlyFusion, kMidFusion, kErbpL1, kErbpL2 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);
// Label for an arbitrary fusion/prior combination ("custom" when it matches
// no named variant).
std::string variant_label(Fusion fusion, PriorVariant prior);

Fusion variant_fusion(Variant v);
PriorVariant variant_prior(Variant v);

struct PlannedRun {
  std::size_t run_id = 0;
  std::string experiment;
  Variant variant = Variant::kStandard;
  RunConfig config;
};

// Axes of one experiment. The seed for replicate i is base_seed + i in every
// cell, so cells are paired: replicate i sees the same datasets across
// variants, lambdas and optimizers.
struct ExperimentSpec {
  std::string name = "custom";
  Task task = Task::kIdentity;
  std::vector<PatternKind> patterns;  // joint task only; empty -> single_bit
  bool parity_odd = false;
  std::vector<Variant> variants = {Variant::kStandard, Variant::kEarlyFusion,
                                   Variant::kMidFusion, Variant::kErbpL1,
                                   Variant::kErbpL2};
  std::vector<std::size_t> n_halves = {3, 10, 30};
  std::vector<std::size_t> hiddens;  // empty -> per-variant grid-best default
  std::vector<std::size_t> depths = {1};
  std::vector<double> lambdas = {3.0};
  std::vector<OptimizerKind> optimizers = {OptimizerKind::kAdam};
  std::size_t epochs = 20;
  double lr = 0.0;  // 0 -> per-optimizer default
  std::size_t seeds = 10;
  std::uint64_t base_seed = 1;
};

// Built-in experiments: table1, table2, table3, lambda_sweep, joint.
ExperimentSpec experiment_preset(const std::string& name);
ExperimentSpec spec_from_json_file(const std::string& path);

// Hidden size used when a spec does not pin one: grid-best per variant, with
// the ERBP fallback to 2*n_half where the paper grid cannot house the prior.
std::size_t default_hidden(Variant v, std::size_t n_half);

// Budget-scaled learning rate used when a spec does not pin one: scales with
// the number of optimizer steps (epochs * train size at batch size 1) so that
// small datasets still move the weights, clamped to [0.001, 0.01] for Adam and
// [0.01, 0.03] for SGD.
double auto_lr(OptimizerKind optimizer, std::size_t n_half, std::size_t epochs);

// Materializes the full run list. Everything is validated here, before any
// run starts; the lambda axis applies to prior variants only (others run once
// with lambda 0).
std::vector<PlannedRun> plan_runs(const ExperimentSpec& spec);

// Dataset generation + split + training for one planned configuration.
RunRecord execute_run(const RunConfig& cfg);

// Executes the plan with OpenMP across runs (threads <= 0 picks the OpenMP
// default). Runs share nothing; records come back in plan order regardless of
// scheduling, so output is identical to the serial path.
std::vector<RunRecord> run_grid(const std::vector<PlannedRun>& plan, int threads = 0);
// Serial reference implementation, kept for tests and the benchmark.
std::vector<RunRecord> run_grid_serial(const std::vector<PlannedRun>& plan);

// One results.csv line.
struct ResultRow {
  std::size_t run_id = 0;
  std::string experiment;
  std::string variant;
  std::size_t n_half = 0, hidden = 0, depth = 0;
  std::string fusion, prior;
  double lambda = 0.0;
  std::string optimizer;
  double lr = 0.0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  double train_acc = 0.0, test_acc = 0.0;
  bool has_pattern = false;
  double pattern_train_acc = 0.0, pattern_test_acc = 0.0;
  double final_data_loss = 0.0, final_prior_loss = 0.0;
  double wall_ms = 0.0;
};

extern const char* const kResultsCsvHeader;

std::vector<ResultRow> make_rows(const std::vector<PlannedRun>& plan,
                                 const std::vector<RunRecord>& records);

// with_timing writes measured wall_ms; the default writes 0 so that reruns of
// the same spec and base seed produce byte-identical files.
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out,
              bool with_timing = false);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path,
              bool with_timing = false);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Mean and population standard deviation per grid cell (all axis coordinates
// except the seed), in first-appearance order.
struct AggregateRow {
  std::string experiment, variant, fusion, prior, optimizer;
  std::size_t n_half = 0, hidden = 0, depth = 0, epochs = 0;
  double lambda = 0.0, lr = 0.0;
  std::size_t n_seeds = 0;
  double mean_test_acc = 0.0, std_test_acc = 0.0;
  bool has_pattern = false;
  double mean_pattern_test_acc = 0.0, std_pattern_test_acc = 0.0;
  std::vector<double> seed_test_accs;
};

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);

void emit_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path);

// Static SVG line chart: mean test accuracy vs log10(lambda), one series per
// variant. Rows with lambda <= 0 cannot sit on a log axis and are skipped.
void emit_sweep_plot(const std::vector<AggregateRow>& rows, const std::string& path);

}  // namespace erbp
