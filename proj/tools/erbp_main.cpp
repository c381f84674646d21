// Command-line front end: dataset generation, single runs, experiment grids,
// gradient checking and report generation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erbp/errors.hpp"
#include "erbp/harness.hpp"

namespace {

using namespace erbp;

struct ModelFlags {
  std::size_t n_half = 3;
  std::size_t hidden = 10;
  std::size_t depth = 1;
  std::string fusion = "none";
  std::string prior = "none";
  double lambda = 3.0;
  std::string optimizer = "adam";
  double lr = 0.0;  // 0 -> per-optimizer default
  std::size_t epochs = 20;
  std::string task = "identity";
  std::string pattern = "single_bit";
  bool parity_odd = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--n-half", f.n_half, "half-vector dimension n");
  cmd->add_option("--hidden", f.hidden, "hidden layer width");
  cmd->add_option("--depth", f.depth, "number of hidden layers (1-5)");
  cmd->add_option("--fusion", f.fusion, "comparison-unit wiring: none|early|mid");
  cmd->add_option("--prior", f.prior, "weight prior: none|l1|l2");
  cmd->add_option("--lambda", f.lambda, "prior strength (ignored with --prior none)");
  cmd->add_option("--optimizer", f.optimizer, "sgd|adam");
  cmd->add_option("--lr", f.lr, "learning rate (default: budget-scaled by dataset size)");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--task", f.task, "identity|single_bit|parity_zero|joint");
  cmd->add_option("--pattern", f.pattern, "joint pattern: single_bit|parity_zero");
  cmd->add_flag("--parity-odd", f.parity_odd,
                "parity task checks odd-indexed positions instead of even");
}

RunConfig config_from_flags(const ModelFlags& f, std::uint64_t seed) {
  RunConfig cfg;
  cfg.model.n_half = f.n_half;
  cfg.model.hidden = f.hidden;
  cfg.model.depth = f.depth;
  cfg.model.fusion = fusion_from_name(f.fusion);
  cfg.task = task_from_name(f.task);
  cfg.model.heads = cfg.task == Task::kJoint ? 2 : 1;
  cfg.pattern = f.pattern == "parity_zero" ? PatternKind::kParityZero
                                           : PatternKind::kSingleBit;
  cfg.parity_odd = f.parity_odd;
  cfg.optimizer = optimizer_from_name(f.optimizer);
  cfg.lr = f.lr > 0.0 ? f.lr : auto_lr(cfg.optimizer, f.n_half, f.epochs);
  cfg.epochs = f.epochs;
  cfg.prior = prior_from_name(f.prior);
  cfg.lambda = cfg.prior == PriorVariant::kNone ? 0.0 : f.lambda;
  cfg.seed = seed;
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

Dataset generate_for(const RunConfig& cfg, Rng& rng) {
  switch (cfg.task) {
    case Task::kIdentity: return generate_identity_dataset(rng, cfg.model.n_half);
    case Task::kSingleBit:
      return generate_pattern_dataset(rng, cfg.model.n_half, PatternKind::kSingleBit);
    case Task::kParityZero:
      return generate_pattern_dataset(rng, cfg.model.n_half, PatternKind::kParityZero,
                                      cfg.parity_odd);
    case Task::kJoint:
      return generate_joint_dataset(rng, cfg.model.n_half, cfg.pattern, cfg.parity_odd);
  }
  throw ConfigError("unreachable task");
}

int cmd_generate(const ModelFlags& flags, std::uint64_t seed, const std::string& out) {
  ensure_dir(out);
  RunConfig cfg = config_from_flags(flags, seed);
  Rng rng = data_stream(seed);
  const Dataset d = generate_for(cfg, rng);
  const Split split = split_train_test(rng, d);
  write_dataset(d, out + "/dataset.txt");
  write_dataset(split.train, out + "/train.txt");
  write_dataset(split.test, out + "/test.txt");
  std::cout << "wrote " << d.size() << " examples (" << split.train.size() << " train, "
            << split.test.size() << " test) to " << out << "\n";
  return 0;
}

int cmd_train(const ModelFlags& flags, std::uint64_t seed, const std::string& out,
              const std::string& data_path, bool timing) {
  RunConfig cfg = config_from_flags(flags, seed);
  Rng rng = data_stream(seed);
  Dataset d;
  if (!data_path.empty()) {
    d = read_dataset(data_path);
    if (d.n_half != cfg.model.n_half) {
      throw ConfigError("--data file has n_half=" + std::to_string(d.n_half) +
                        " but --n-half is " + std::to_string(cfg.model.n_half));
    }
    if (task_name(d.task) != flags.task) {
      throw ConfigError("--data file task '" + task_name(d.task) +
                        "' does not match --task " + flags.task);
    }
  } else {
    d = generate_for(cfg, rng);
  }
  const Split split = split_train_test(rng, d);
  auto [net, rec] = train_run(cfg, split);

  std::printf("train acc: %.2f%%", rec.train_acc[0]);
  if (rec.train_acc.size() > 1) std::printf(" (pattern %.2f%%)", rec.train_acc[1]);
  std::printf("\ntest acc:  %.2f%%", rec.test_acc[0]);
  if (rec.test_acc.size() > 1) std::printf(" (pattern %.2f%%)", rec.test_acc[1]);
  std::printf("\nfinal train data loss: %.6f\n", rec.final_train_data_loss);
  if (cfg.prior != PriorVariant::kNone) {
    std::printf("final prior loss: %.6f (lambda %g)\n", rec.final_prior_loss, cfg.lambda);
  }
  std::printf("wall: %.1f ms\n", rec.wall_ms);

  if (!out.empty()) {
    ensure_dir(out);
    PlannedRun p{0, "train", Variant::kStandard, cfg};
    // label by what the config actually is
    const std::string label = variant_label(cfg.model.fusion, cfg.prior);
    std::vector<ResultRow> rows = make_rows({p}, {rec});
    rows[0].variant = label;
    emit_csv(rows, out + "/results.csv", timing);
    net.save(out + "/model.txt");
    std::cout << "wrote " << out << "/results.csv and " << out << "/model.txt\n";
  }
  return 0;
}

int cmd_grid(const std::string& name, const std::string& config_path, std::size_t seeds,
             std::uint64_t base_seed, const std::string& out, int threads, bool timing,
             bool serial) {
  ExperimentSpec spec =
      config_path.empty() ? experiment_preset(name) : spec_from_json_file(config_path);
  if (seeds > 0) spec.seeds = seeds;
  spec.base_seed = base_seed;
  const std::vector<PlannedRun> plan = plan_runs(spec);
  std::cout << "experiment '" << spec.name << "': " << plan.size() << " runs\n";

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<RunRecord> records =
      serial ? run_grid_serial(plan) : run_grid(plan, threads);
  const double total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();

  const std::vector<ResultRow> rows = make_rows(plan, records);
  const std::vector<AggregateRow> cells = aggregate(rows);

  ensure_dir(out);
  emit_csv(rows, out + "/results.csv", timing);
  emit_aggregate_csv(cells, out + "/aggregate.csv");

  bool plotted = false;
  std::set<double> sweep_lambdas;
  for (const AggregateRow& c : cells) {
    if (c.lambda > 0.0) sweep_lambdas.insert(c.lambda);
  }
  if (sweep_lambdas.size() >= 2) {
    emit_sweep_plot(cells, out + "/sweep.svg");
    plotted = true;
  }

  std::printf("%-28s %6s %6s %8s %8s\n", "cell", "n", "hidden", "mean", "std");
  for (const AggregateRow& c : cells) {
    std::string label = c.variant;
    if (c.lambda > 0.0) label += " lambda=" + std::to_string(c.lambda).substr(0, 5);
    if (c.depth > 1) label += " h=" + std::to_string(c.depth);
    if (c.optimizer != "adam") label += " " + c.optimizer;
    std::printf("%-28s %6zu %6zu %8.2f %8.2f\n", label.c_str(), c.n_half, c.hidden,
                c.mean_test_acc, c.std_test_acc);
    if (c.has_pattern) {
      std::printf("%-28s %6s %6s %8.2f %8.2f\n", "  (pattern head)", "", "",
                  c.mean_pattern_test_acc, c.std_pattern_test_acc);
    }
  }
  std::printf("total: %.1f s%s\n", total_ms / 1000.0, serial ? " (serial)" : "");
  std::cout << "wrote " << out << "/results.csv, " << out << "/aggregate.csv"
            << (plotted ? ", " + out + "/sweep.svg" : "") << "\n";
  return 0;
}

int cmd_gradcheck(const ModelFlags& flags, std::uint64_t seed, std::size_t points) {
  RunConfig cfg = config_from_flags(flags, seed);
  const double max_rel = gradient_check(cfg, points);
  std::printf("max relative error over %zu points: %.3g (threshold 1e-4)\n", points,
              max_rel);
  return max_rel <= 1e-4 ? 0 : 1;
}

int cmd_report(const std::string& in, const std::string& out) {
  const std::vector<ResultRow> rows = read_results_csv(in);
  if (rows.empty()) throw ConfigError("report: no result rows in '" + in + "'");
  const std::vector<AggregateRow> cells = aggregate(rows);
  ensure_dir(out);
  emit_aggregate_csv(cells, out + "/aggregate.csv");
  std::set<double> sweep_lambdas;
  for (const AggregateRow& c : cells) {
    if (c.lambda > 0.0) sweep_lambdas.insert(c.lambda);
  }
  std::string plotted;
  if (sweep_lambdas.size() >= 2) {
    emit_sweep_plot(cells, out + "/sweep.svg");
    plotted = ", " + out + "/sweep.svg";
  }
  std::cout << "aggregated " << rows.size() << " runs into " << cells.size()
            << " cells: " << out << "/aggregate.csv" << plotted << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"identity-relation learning with default-weight priors"};
  app.require_subcommand(1);

  ModelFlags flags;
  std::uint64_t base_seed = 1;
  std::size_t seeds = 0;
  std::string out = "out";
  std::string data_path, config_path, grid_name = "table1", report_in;
  int threads = 0;
  std::size_t points = 20;
  bool timing = false, serial = false;

  CLI::App* generate = app.add_subcommand("generate", "write dataset files");
  add_model_flags(generate, flags);
  generate->add_option("--base-seed", base_seed, "seed for generation and split");
  generate->add_option("--out", out, "output directory");

  CLI::App* train = app.add_subcommand("train", "single training run");
  add_model_flags(train, flags);
  train->add_option("--base-seed", base_seed, "run seed");
  train->add_option("--out", out, "output directory (results.csv + model.txt)");
  train->add_option("--data", data_path, "train on a dataset file instead of generating");
  train->add_flag("--timing", timing, "write measured wall_ms into results.csv");

  CLI::App* grid = app.add_subcommand("grid", "run an experiment grid");
  grid->add_option("name", grid_name,
                   "built-in experiment: table1|table2|table3|lambda_sweep|joint");
  grid->add_option("--config", config_path, "JSON experiment spec file");
  grid->add_option("--seeds", seeds, "simulations per cell (default 10)");
  grid->add_option("--base-seed", base_seed, "first seed; replicate i uses base+i");
  grid->add_option("--out", out, "output directory");
  grid->add_option("--threads", threads, "OpenMP threads (default: all)");
  grid->add_flag("--timing", timing,
                 "write measured wall_ms into results.csv (breaks byte reproducibility)");
  grid->add_flag("--serial", serial, "use the serial reference executor");

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_model_flags(gradcheck, flags);
  gradcheck->add_option("--base-seed", base_seed, "seed for parameter points");
  gradcheck->add_option("--points", points, "random parameter points to test");

  CLI::App* report = app.add_subcommand("report", "aggregate a results CSV");
  report->add_option("--in", report_in, "results.csv to aggregate")->required();
  report->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) return cmd_generate(flags, base_seed, out);
    if (train->parsed()) return cmd_train(flags, base_seed, out, data_path, timing);
    if (grid->parsed()) {
      return cmd_grid(grid_name, config_path, seeds, base_seed, out, threads, timing,
                      serial);
    }
    if (gradcheck->parsed()) return cmd_gradcheck(flags, base_seed, points);
    if (report->parsed()) return cmd_report(report_in, out);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const erbp::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const erbp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
