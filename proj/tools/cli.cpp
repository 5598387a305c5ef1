#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "beamlearn/experiment.hpp"
#include "beamlearn/io.hpp"
#include "beamlearn/learning.hpp"

namespace beamlearn::cli {

namespace {

struct Options {
  SystemConfig system;
  std::uint64_t count = 1000;
  int k = 1;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 1;
  bool test_on_train = false;
  std::vector<std::uint64_t> sizes;
  std::vector<double> snr_grid{0.0, 5.0, 10.0, 15.0, 20.0};
  std::uint64_t n_test = 2000;
  unsigned threads = 0;
  std::string input;
  std::string out;
};

void add_system_flags(CLI::App& cmd, Options& o, bool with_snr) {
  cmd.add_option("--n-beams", o.system.n_beams, "Number of fixed beams N")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd.add_option("--n-users", o.system.n_users, "Number of users K")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  if (with_snr)
    cmd.add_option("--snr-db", o.system.snr_db, "Transmit SNR in dB")->capture_default_str();
  cmd.add_option("--alpha", o.system.path_loss_exponent, "Path-loss exponent")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--min-radius", o.system.min_radius, "Smallest user distance")
      ->check(CLI::Bound(1e-12, 1.0 - 1e-12))
      ->capture_default_str();
  cmd.add_option("--seed", o.system.rng_seed, "Layout RNG seed")->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void add_learning_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--k", o.k, "Neighbors in the k-NN vote")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void print_report(std::ostream& out, const EvalReport& r) {
  char line[128];
  auto emit = [&](const char* key, double value) {
    std::snprintf(line, sizeof line, "%-24s %.6f\n", key, value);
    out << line;
  };
  out << "n_test                   " << r.n_test << '\n';
  emit("class_accuracy", r.class_accuracy);
  emit("rate_ratio", r.rate_ratio);
  emit("mean_model_sum_rate", r.mean_model_sum_rate);
  emit("mean_oracle_sum_rate", r.mean_oracle_sum_rate);
  emit("mean_baseline_sum_rate", r.mean_baseline_sum_rate);
  out << "distinct_classes         " << r.distinct_classes << '\n';
  if (r.exceeds_oracle) out << "warning: model rate exceeds the stored oracle rate\n";
}

int run_generate(const Options& o, std::ostream& out) {
  o.system.validate();
  const auto ds = label_dataset(o.system, o.count, o.threads);
  io::write_dataset(ds, o.out);
  out << "wrote " << ds.size() << " examples to " << o.out << '\n';
  return 0;
}

int run_evaluate(const Options& o, std::ostream& out) {
  const auto ds = preprocess(io::read_dataset(o.input));
  if (ds.size() < 2 && !o.test_on_train)
    throw DomainError("need at least two examples to split into train and test");
  auto [train, test] = split_dataset(ds, o.train_fraction, o.split_seed);
  if (o.test_on_train) test = train;
  const KnnModel model(std::move(train), o.k);
  print_report(out, evaluate_model(model, test, ds.config));
  return 0;
}

ExperimentConfig experiment_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.base = o.system;
  cfg.snr_grid_db = o.snr_grid;
  if (!o.sizes.empty()) cfg.training_sizes = o.sizes;
  cfg.n_test = o.n_test;
  cfg.k = o.k;
  cfg.output_path = o.out;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

int run_sweep(const Options& o, io::SweepKind kind, std::ostream& out) {
  io::ResultsFile results;
  results.sweep = kind;
  results.config = experiment_config(o);
  results.rows = kind == io::SweepKind::kSnr ? run_snr_sweep(results.config)
                                             : run_size_sweep(results.config);
  io::write_results(results, o.out);
  for (const auto& row : results.rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%12g  %-8s  %10.6f  %.6f\n", row.sweep_var,
                  std::string(to_string(row.method)).c_str(), row.mean_sum_rate,
                  row.std_error);
    out << line;
  }
  out << "wrote " << results.rows.size() << " rows to " << o.out << '\n';
  return 0;
}

int run_inspect(const Options& o, std::ostream& out) {
  const auto ds = io::read_dataset(o.input);
  std::map<std::uint64_t, std::size_t> histogram;
  for (const auto& ex : ds.examples) ++histogram[ex.label.mask()];
  out << "n_examples        " << ds.size() << '\n'
      << "n_beams           " << ds.config.n_beams << '\n'
      << "n_users           " << ds.config.n_users << '\n'
      << "distinct_classes  " << histogram.size() << '\n'
      << "class_bound       2^" << ds.config.n_beams << '\n'
      << "class histogram (active beams: count)\n";
  std::vector<std::pair<std::uint64_t, std::size_t>> sorted(histogram.begin(), histogram.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [mask, count] : sorted) {
    std::string beams = "{";
    for (int b : ActiveBeamSet(mask).beams()) {
      if (beams.size() > 1) beams += ',';
      beams += std::to_string(b);
    }
    beams += '}';
    out << "  " << beams << ": " << count << '\n';
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned beam allocation for fixed-beam multiuser MIMO"};
  app.name(args.empty() ? "beamlearn" : args.front());
  app.require_subcommand(1);
  Options o;

  auto* generate = app.add_subcommand("generate", "Sample, label and write a dataset");
  add_system_flags(*generate, o, true);
  generate->add_option("--count", o.count, "Number of layouts")->capture_default_str();
  generate->add_option("--out", o.out, "Output dataset file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Train and score a k-NN model on a dataset");
  evaluate->add_option("dataset", o.input, "Dataset file")->required()->check(CLI::ExistingFile);
  add_learning_flags(*evaluate, o);
  evaluate->add_option("--train-fraction", o.train_fraction, "Training share of the split")
      ->check(CLI::Bound(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  evaluate->add_option("--seed", o.split_seed, "Split seed")->capture_default_str();
  evaluate->add_flag("--test-on-train", o.test_on_train, "Score on the training split");

  auto* sweep_snr = app.add_subcommand("sweep-snr", "Average sum rate versus SNR");
  add_system_flags(*sweep_snr, o, false);
  add_learning_flags(*sweep_snr, o);
  sweep_snr->add_option("--snr-grid", o.snr_grid, "SNR points in dB")->delimiter(',');
  sweep_snr->add_option("--sizes", o.sizes, "Training sizes; the largest is used")
      ->delimiter(',');
  sweep_snr->add_option("--n-test", o.n_test, "Test layouts per point")->capture_default_str();
  sweep_snr->add_option("--out", o.out, "Output results file")->required();

  auto* sweep_size = app.add_subcommand("sweep-size", "Average sum rate versus training size");
  add_system_flags(*sweep_size, o, true);
  add_learning_flags(*sweep_size, o);
  sweep_size->add_option("--sizes", o.sizes, "Training set sizes")->delimiter(',');
  sweep_size->add_option("--n-test", o.n_test, "Test layouts")->capture_default_str();
  sweep_size->add_option("--out", o.out, "Output results file")->required();

  auto* inspect = app.add_subcommand("inspect", "Dataset class statistics");
  inspect->add_option("dataset", o.input, "Dataset file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e, out, err);
    if (status != 0) {
      const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      err << sub->help();
      return 1;
    }
    return 0;
  }

  try {
    if (generate->parsed()) return run_generate(o, out);
    if (evaluate->parsed()) return run_evaluate(o, out);
    if (sweep_snr->parsed()) return run_sweep(o, io::SweepKind::kSnr, out);
    if (sweep_size->parsed()) return run_sweep(o, io::SweepKind::kSize, out);
    if (inspect->parsed()) return run_inspect(o, out);
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    const auto* sub = app.get_subcommands().front();
    err << sub->help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace beamlearn::cli
