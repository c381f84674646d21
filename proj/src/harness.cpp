#include "erbp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include <omp.h>

#include <json.hpp>

#include "erbp/errors.hpp"

namespace erbp {
namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kStandard: return "standard";
    case Variant::kEarlyFusion: return "early_fusion";
    case Variant::kMidFusion: return "mid_fusion";
    case Variant::kErbpL1: return "erbp_l1";
    case Variant::kErbpL2: return "erbp_l2";
  }
  return "standard";
}

Variant variant_from_name(const std::string& name) {
  if (name == "standard") return Variant::kStandard;
  if (name == "early_fusion") return Variant::kEarlyFusion;
  if (name == "mid_fusion") return Variant::kMidFusion;
  if (name == "erbp_l1") return Variant::kErbpL1;
  if (name == "erbp_l2") return Variant::kErbpL2;
  throw ConfigError("unknown variant '" + name + "'");
}

Fusion variant_fusion(Variant v) {
  switch (v) {
    case Variant::kEarlyFusion: return Fusion::kEarly;
    case Variant::kMidFusion: return Fusion::kMid;
    default: return Fusion::kNone;
  }
}

PriorVariant variant_prior(Variant v) {
  switch (v) {
    case Variant::kErbpL1: return PriorVariant::kL1;
    case Variant::kErbpL2: return PriorVariant::kL2;
    default: return PriorVariant::kNone;
  }
}

std::string variant_label(Fusion fusion, PriorVariant prior) {
  if (prior == PriorVariant::kNone) {
    if (fusion == Fusion::kNone) return "standard";
    if (fusion == Fusion::kEarly) return "early_fusion";
    return "mid_fusion";
  }
  if (fusion == Fusion::kNone) {
    return prior == PriorVariant::kL1 ? "erbp_l1" : "erbp_l2";
  }
  return "custom";
}

std::size_t default_hidden(Variant v, std::size_t n_half) {
  if (v == Variant::kErbpL1 || v == Variant::kErbpL2) {
    // prior needs one +/- row pair per compared dimension
    return std::max<std::size_t>(10, 2 * n_half);
  }
  if (v == Variant::kStandard && n_half >= 10) return 30;
  return 10;
}

double auto_lr(OptimizerKind optimizer, std::size_t n_half, std::size_t epochs) {
  // Budget-scaled rate: with batch size 1 the number of optimizer steps is
  // epochs * train size, and Adam moves each weight at most lr per step, so
  // tiny datasets (n=3 has 240 steps) need a larger rate for the weights to
  // traverse the init-to-prior distance at all.
  const double train_size =
      0.75 * 2.0 * std::min<double>(std::pow(2.0, static_cast<double>(n_half)), 500.0);
  const double steps = static_cast<double>(epochs) * train_size;
  if (optimizer == OptimizerKind::kSgd) {
    return std::clamp(8.0 / steps, 0.01, 0.03);
  }
  return std::clamp(4.0 / steps, 0.001, 0.01);
}

ExperimentSpec experiment_preset(const std::string& name) {
  ExperimentSpec spec;
  spec.name = name;
  if (name == "table1") {
    return spec;
  }
  if (name == "table2") {
    spec.n_halves = {3};
    spec.depths = {2, 3, 4, 5};
    return spec;
  }
  if (name == "table3") {
    spec.variants = {Variant::kErbpL1, Variant::kErbpL2};
    spec.n_halves = {3};
    spec.optimizers = {OptimizerKind::kAdam, OptimizerKind::kSgd};
    spec.lambdas = {1.0, 30.0};
    return spec;
  }
  if (name == "lambda_sweep") {
    spec.variants = {Variant::kErbpL1, Variant::kErbpL2};
    spec.n_halves = {3};
    spec.lambdas = {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0};
    return spec;
  }
  if (name == "joint") {
    spec.task = Task::kJoint;
    spec.patterns = {PatternKind::kSingleBit, PatternKind::kParityZero};
    spec.variants = {Variant::kErbpL1, Variant::kErbpL2};
    spec.n_halves = {10};
    spec.hiddens = {50};
    spec.lambdas = {1.0, 3.0, 10.0, 30.0};
    return spec;
  }
  throw ConfigError("unknown experiment '" + name +
                    "' (built-ins: table1 table2 table3 lambda_sweep joint)");
}

namespace {

PatternKind pattern_from_name(const std::string& name) {
  if (name == "single_bit") return PatternKind::kSingleBit;
  if (name == "parity_zero") return PatternKind::kParityZero;
  throw ConfigError("unknown pattern '" + name + "'");
}

std::string pattern_name(PatternKind k) {
  return k == PatternKind::kSingleBit ? "single_bit" : "parity_zero";
}

}  // namespace

ExperimentSpec spec_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open spec file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 1);
  }
  ExperimentSpec spec;
  try {
    if (j.contains("name")) spec.name = j["name"].get<std::string>();
    if (j.contains("task")) spec.task = task_from_name(j["task"].get<std::string>());
    if (j.contains("patterns")) {
      spec.patterns.clear();
      for (const auto& p : j["patterns"]) {
        spec.patterns.push_back(pattern_from_name(p.get<std::string>()));
      }
    }
    if (j.contains("parity_odd")) spec.parity_odd = j["parity_odd"].get<bool>();
    if (j.contains("variants")) {
      spec.variants.clear();
      for (const auto& v : j["variants"]) {
        spec.variants.push_back(variant_from_name(v.get<std::string>()));
      }
    }
    if (j.contains("n_half")) spec.n_halves = j["n_half"].get<std::vector<std::size_t>>();
    if (j.contains("hidden")) spec.hiddens = j["hidden"].get<std::vector<std::size_t>>();
    if (j.contains("depth")) spec.depths = j["depth"].get<std::vector<std::size_t>>();
    if (j.contains("lambda")) spec.lambdas = j["lambda"].get<std::vector<double>>();
    if (j.contains("optimizer")) {
      spec.optimizers.clear();
      for (const auto& o : j["optimizer"]) {
        spec.optimizers.push_back(optimizer_from_name(o.get<std::string>()));
      }
    }
    if (j.contains("epochs")) spec.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("lr")) spec.lr = j["lr"].get<double>();
    if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::size_t>();
    if (j.contains("base_seed")) spec.base_seed = j["base_seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad spec field: ") + e.what());
  }
  return spec;
}

std::vector<PlannedRun> plan_runs(const ExperimentSpec& spec) {
  if (spec.seeds < 1) throw ConfigError("grid: seeds must be >= 1");
  if (spec.variants.empty() || spec.n_halves.empty() || spec.depths.empty() ||
      spec.lambdas.empty() || spec.optimizers.empty()) {
    throw ConfigError("grid: every axis needs at least one value");
  }
  std::vector<PatternKind> patterns = spec.patterns;
  if (patterns.empty()) patterns = {PatternKind::kSingleBit};
  if (spec.task != Task::kJoint) patterns = {PatternKind::kSingleBit};

  std::vector<PlannedRun> plan;
  for (Variant variant : spec.variants) {
    const PriorVariant prior = variant_prior(variant);
    // the lambda axis is meaningful only under a prior
    std::vector<double> lambdas = prior == PriorVariant::kNone
                                      ? std::vector<double>{0.0}
                                      : spec.lambdas;
    for (PatternKind pattern : patterns) {
      for (std::size_t n_half : spec.n_halves) {
        std::vector<std::size_t> hiddens = spec.hiddens;
        if (hiddens.empty()) hiddens = {default_hidden(variant, n_half)};
        for (std::size_t hidden : hiddens) {
          for (std::size_t depth : spec.depths) {
            for (OptimizerKind optimizer : spec.optimizers) {
              for (double lambda : lambdas) {
                for (std::size_t rep = 0; rep < spec.seeds; ++rep) {
                  RunConfig cfg;
                  cfg.model.n_half = n_half;
                  cfg.model.hidden = hidden;
                  cfg.model.depth = depth;
                  cfg.model.fusion = variant_fusion(variant);
                  cfg.model.heads = spec.task == Task::kJoint ? 2 : 1;
                  cfg.task = spec.task;
                  cfg.pattern = pattern;
                  cfg.parity_odd = spec.parity_odd;
                  cfg.optimizer = optimizer;
                  cfg.lr = spec.lr > 0.0 ? spec.lr
                                         : auto_lr(optimizer, n_half, spec.epochs);
                  cfg.epochs = spec.epochs;
                  cfg.prior = prior;
                  cfg.lambda = lambda;
                  cfg.seed = spec.base_seed + rep;
                  validate_run_config(cfg);
                  std::string experiment = spec.name;
                  if (spec.task == Task::kJoint && patterns.size() > 1) {
                    experiment += "_" + pattern_name(pattern);
                  }
                  plan.push_back({plan.size(), experiment, variant, cfg});
                }
              }
            }
          }
        }
      }
    }
  }
  if (plan.empty()) throw ConfigError("grid: empty plan");
  return plan;
}

RunRecord execute_run(const RunConfig& cfg) {
  Rng rng = data_stream(cfg.seed);
  Dataset d;
  switch (cfg.task) {
    case Task::kIdentity:
      d = generate_identity_dataset(rng, cfg.model.n_half);
      break;
    case Task::kSingleBit:
      d = generate_pattern_dataset(rng, cfg.model.n_half, PatternKind::kSingleBit);
      break;
    case Task::kParityZero:
      d = generate_pattern_dataset(rng, cfg.model.n_half, PatternKind::kParityZero,
                                   cfg.parity_odd);
      break;
    case Task::kJoint:
      d = generate_joint_dataset(rng, cfg.model.n_half, cfg.pattern, cfg.parity_odd);
      break;
  }
  const Split split = split_train_test(rng, d);
  return train_run(cfg, split).second;
}

std::vector<RunRecord> run_grid(const std::vector<PlannedRun>& plan, int threads) {
  std::vector<RunRecord> records(plan.size());
  std::exception_ptr failure = nullptr;
  const int n_threads = threads > 0 ? threads : omp_get_max_threads();
  const std::int64_t n = static_cast<std::int64_t>(plan.size());
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      records[static_cast<std::size_t>(i)] =
          execute_run(plan[static_cast<std::size_t>(i)].config);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<RunRecord> run_grid_serial(const std::vector<PlannedRun>& plan) {
  std::vector<RunRecord> records;
  records.reserve(plan.size());
  for (const PlannedRun& run : plan) records.push_back(execute_run(run.config));
  return records;
}

const char* const kResultsCsvHeader =
    "run_id,experiment,variant,n_half,hidden,depth,fusion,prior,lambda,optimizer,"
    "lr,epochs,seed,train_acc,test_acc,pattern_train_acc,pattern_test_acc,"
    "final_data_loss,final_prior_loss,wall_ms";

std::vector<ResultRow> make_rows(const std::vector<PlannedRun>& plan,
                                 const std::vector<RunRecord>& records) {
  if (plan.size() != records.size()) {
    throw ConfigError("make_rows: plan and records differ in length");
  }
  std::vector<ResultRow> rows;
  rows.reserve(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PlannedRun& p = plan[i];
    const RunRecord& r = records[i];
    ResultRow row;
    row.run_id = p.run_id;
    row.experiment = p.experiment;
    row.variant = variant_name(p.variant);
    row.n_half = p.config.model.n_half;
    row.hidden = p.config.model.hidden;
    row.depth = p.config.model.depth;
    row.fusion = fusion_name(p.config.model.fusion);
    row.prior = prior_name(p.config.prior);
    row.lambda = p.config.prior == PriorVariant::kNone ? 0.0 : p.config.lambda;
    row.optimizer = optimizer_name(p.config.optimizer);
    row.lr = p.config.lr;
    row.epochs = p.config.epochs;
    row.seed = p.config.seed;
    row.train_acc = r.train_acc.at(0);
    row.test_acc = r.test_acc.at(0);
    row.has_pattern = r.train_acc.size() > 1;
    if (row.has_pattern) {
      row.pattern_train_acc = r.train_acc[1];
      row.pattern_test_acc = r.test_acc[1];
    }
    row.final_data_loss = r.final_train_data_loss;
    row.final_prior_loss = r.final_prior_loss;
    row.wall_ms = r.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool with_timing) {
  out << kResultsCsvHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.run_id << ',' << r.experiment << ',' << r.variant << ',' << r.n_half << ','
        << r.hidden << ',' << r.depth << ',' << r.fusion << ',' << r.prior << ','
        << fmt_g(r.lambda) << ',' << r.optimizer << ',' << fmt_g(r.lr) << ','
        << r.epochs << ',' << r.seed << ',' << fmt_g(r.train_acc) << ','
        << fmt_g(r.test_acc) << ',';
    if (r.has_pattern) {
      out << fmt_g(r.pattern_train_acc) << ',' << fmt_g(r.pattern_test_acc);
    } else {
      out << ',';
    }
    out << ',' << fmt_g(r.final_data_loss) << ',' << fmt_g(r.final_prior_loss) << ','
        << (with_timing ? std::llround(r.wall_ms) : 0LL) << "\n";
  }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path,
              bool with_timing) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  emit_csv(rows, f, with_timing);
  if (!f) throw IoError("write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + s + "'", line_no);
  }
}

std::size_t parse_size(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError("malformed integer '" + s + "'", line_no);
  }
}

}  // namespace

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(f, line)) throw ParseError("empty results file", 1);
  if (line != kResultsCsvHeader) throw ParseError("unexpected results header", 1);
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fld = split_csv_line(line);
    if (fld.size() != 20) {
      throw ParseError("expected 20 fields, found " + std::to_string(fld.size()),
                       line_no);
    }
    ResultRow r;
    r.run_id = parse_size(fld[0], line_no);
    r.experiment = fld[1];
    r.variant = fld[2];
    r.n_half = parse_size(fld[3], line_no);
    r.hidden = parse_size(fld[4], line_no);
    r.depth = parse_size(fld[5], line_no);
    r.fusion = fld[6];
    r.prior = fld[7];
    r.lambda = parse_double(fld[8], line_no);
    r.optimizer = fld[9];
    r.lr = parse_double(fld[10], line_no);
    r.epochs = parse_size(fld[11], line_no);
    r.seed = parse_size(fld[12], line_no);
    r.train_acc = parse_double(fld[13], line_no);
    r.test_acc = parse_double(fld[14], line_no);
    r.has_pattern = !fld[15].empty() || !fld[16].empty();
    if (r.has_pattern) {
      r.pattern_train_acc = parse_double(fld[15], line_no);
      r.pattern_test_acc = parse_double(fld[16], line_no);
    }
    r.final_data_loss = parse_double(fld[17], line_no);
    r.final_prior_loss = parse_double(fld[18], line_no);
    r.wall_ms = parse_double(fld[19], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

struct Stats {
  double mean = 0.0;
  double stdev = 0.0;
};

Stats mean_std(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - s.mean) * (x - s.mean);
  s.stdev = std::sqrt(acc / static_cast<double>(xs.size()));
  return s;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> cells;
  std::map<std::string, std::size_t> index;
  for (const ResultRow& r : rows) {
    std::ostringstream key;
    key << r.experiment << '|' << r.variant << '|' << r.n_half << '|' << r.hidden << '|'
        << r.depth << '|' << r.fusion << '|' << r.prior << '|' << fmt_g(r.lambda) << '|'
        << r.optimizer << '|' << fmt_g(r.lr) << '|' << r.epochs;
    auto [it, inserted] = index.emplace(key.str(), cells.size());
    if (inserted) {
      AggregateRow cell;
      cell.experiment = r.experiment;
      cell.variant = r.variant;
      cell.fusion = r.fusion;
      cell.prior = r.prior;
      cell.optimizer = r.optimizer;
      cell.n_half = r.n_half;
      cell.hidden = r.hidden;
      cell.depth = r.depth;
      cell.epochs = r.epochs;
      cell.lambda = r.lambda;
      cell.lr = r.lr;
      cell.has_pattern = r.has_pattern;
      cells.push_back(std::move(cell));
    }
    cells[it->second].seed_test_accs.push_back(r.test_acc);
  }
  // second pass for the pattern head, cell order preserved
  std::map<std::string, std::vector<double>> pattern_values;
  for (const ResultRow& r : rows) {
    if (!r.has_pattern) continue;
    std::ostringstream key;
    key << r.experiment << '|' << r.variant << '|' << r.n_half << '|' << r.hidden << '|'
        << r.depth << '|' << r.fusion << '|' << r.prior << '|' << fmt_g(r.lambda) << '|'
        << r.optimizer << '|' << fmt_g(r.lr) << '|' << r.epochs;
    pattern_values[key.str()].push_back(r.pattern_test_acc);
  }
  for (auto& [key, idx] : index) {
    AggregateRow& cell = cells[idx];
    cell.n_seeds = cell.seed_test_accs.size();
    const Stats s = mean_std(cell.seed_test_accs);
    cell.mean_test_acc = s.mean;
    cell.std_test_acc = s.stdev;
    if (cell.has_pattern) {
      const Stats ps = mean_std(pattern_values[key]);
      cell.mean_pattern_test_acc = ps.mean;
      cell.std_pattern_test_acc = ps.stdev;
    }
  }
  return cells;
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "experiment,variant,n_half,hidden,depth,fusion,prior,lambda,optimizer,lr,"
         "epochs,n_seeds,mean_test_acc,std_test_acc,mean_pattern_test_acc,"
         "std_pattern_test_acc,seed_test_accs\n";
  for (const AggregateRow& r : rows) {
    out << r.experiment << ',' << r.variant << ',' << r.n_half << ',' << r.hidden << ','
        << r.depth << ',' << r.fusion << ',' << r.prior << ',' << fmt_g(r.lambda) << ','
        << r.optimizer << ',' << fmt_g(r.lr) << ',' << r.epochs << ',' << r.n_seeds
        << ',' << fmt_g(r.mean_test_acc) << ',' << fmt_g(r.std_test_acc) << ',';
    if (r.has_pattern) {
      out << fmt_g(r.mean_pattern_test_acc) << ',' << fmt_g(r.std_pattern_test_acc);
    } else {
      out << ',';
    }
    out << ',';
    for (std::size_t i = 0; i < r.seed_test_accs.size(); ++i) {
      out << (i ? ";" : "") << fmt_g(r.seed_test_accs[i]);
    }
    out << "\n";
  }
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  emit_aggregate_csv(rows, f);
  if (!f) throw IoError("write failed for '" + path + "'");
}

void emit_sweep_plot(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const AggregateRow& r : rows) {
    if (r.lambda <= 0.0) continue;  // log axis
    series[r.variant].push_back({r.lambda, r.mean_test_acc});
  }
  if (series.empty()) {
    throw ConfigError("sweep plot: no rows with positive lambda");
  }
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
  }

  double min_l = 1e300, max_l = -1e300;
  for (const auto& [name, pts] : series) {
    min_l = std::min(min_l, pts.front().first);
    max_l = std::max(max_l, pts.back().first);
  }
  const double lo = std::log10(min_l), hi = std::log10(max_l);
  const double span = hi > lo ? hi - lo : 1.0;

  const double width = 640, height = 440;
  const double x0 = 70, x1 = 600, y0 = 380, y1 = 30;
  auto px = [&](double lambda) {
    return x0 + (std::log10(lambda) - lo) / span * (x1 - x0);
  };
  auto py = [&](double acc) { return y0 + acc / 100.0 * (y1 - y0); };

  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                        "#9467bd"};
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
    << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << (x0 + x1) / 2
    << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << "test accuracy vs regularization strength</text>\n";
  // axes
  f << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
    << "\" stroke=\"black\"/>\n";
  for (int acc = 0; acc <= 100; acc += 25) {
    f << "<line x1=\"" << x0 << "\" y1=\"" << py(acc) << "\" x2=\"" << x1 << "\" y2=\""
      << py(acc) << "\" stroke=\"#dddddd\"/>\n";
    f << "<text x=\"" << x0 - 8 << "\" y=\"" << py(acc) + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << acc
      << "</text>\n";
  }
  // x ticks at every lambda present in the first series
  std::vector<double> ticks;
  for (const auto& [name, pts] : series) {
    for (const auto& [l, a] : pts) {
      if (std::find(ticks.begin(), ticks.end(), l) == ticks.end()) ticks.push_back(l);
    }
  }
  std::sort(ticks.begin(), ticks.end());
  for (double l : ticks) {
    f << "<line x1=\"" << px(l) << "\" y1=\"" << y0 << "\" x2=\"" << px(l) << "\" y2=\""
      << y0 + 5 << "\" stroke=\"black\"/>\n";
    f << "<text x=\"" << px(l) << "\" y=\"" << y0 + 20
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt_g(l) << "</text>\n";
  }
  f << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 40
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">lambda "
       "(log scale)</text>\n";
  f << "<text x=\"18\" y=\"" << (y0 + y1) / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       "transform=\"rotate(-90 18 "
    << (y0 + y1) / 2 << ")\">test accuracy (%)</text>\n";

  std::size_t color = 0;
  double legend_y = y1 + 12;
  for (const auto& [name, pts] : series) {
    const char* c = kColors[color++ % 5];
    f << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (const auto& [l, a] : pts) f << px(l) << ',' << py(a) << ' ';
    f << "\"/>\n";
    for (const auto& [l, a] : pts) {
      f << "<circle cx=\"" << px(l) << "\" cy=\"" << py(a) << "\" r=\"3\" fill=\"" << c
        << "\"/>\n";
    }
    f << "<text x=\"" << x0 + 12 << "\" y=\"" << legend_y
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << c << "\">" << name
      << "</text>\n";
    legend_y += 16;
  }
  f << "</svg>\n";
  if (!f) throw IoError("write failed for '" + path + "'");
}

}  // namespace erbp
