#include "beamlearn/experiment.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <tuple>

namespace beamlearn {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kModel: return "model";
    case Method::kOracle: return "oracle";
    case Method::kBaseline: return "baseline";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  if (name == "model") return Method::kModel;
  if (name == "oracle") return Method::kOracle;
  if (name == "baseline") return Method::kBaseline;
  throw DomainError("unknown method '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  base.validate();
  if (snr_grid_db.empty()) throw DomainError("SNR grid is empty");
  if (training_sizes.empty()) throw DomainError("training size grid is empty");
  if (n_test < 100) throw DomainError("n_test must be >= 100");
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DomainError("train_fraction must lie in (0, 1)");
  if (!std::is_sorted(training_sizes.begin(), training_sizes.end(),
                      std::less_equal<>{}))
    throw DomainError("training sizes must be strictly increasing");
  if (training_sizes.front() < static_cast<std::uint64_t>(k))
    throw DomainError("smallest training size must be >= k");
}

std::vector<ResultRow> rows_from_report(double sweep_var, const EvalReport& r) {
  return {
      {sweep_var, Method::kModel, r.mean_model_sum_rate, r.model_stderr, r.n_test},
      {sweep_var, Method::kOracle, r.mean_oracle_sum_rate, r.oracle_stderr, r.n_test},
      {sweep_var, Method::kBaseline, r.mean_baseline_sum_rate, r.baseline_stderr, r.n_test},
  };
}

const ResultRow& find_row(const std::vector<ResultRow>& rows, double sweep_var, Method m) {
  auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& row) {
    return row.sweep_var == sweep_var && row.method == m;
  });
  if (it == rows.end())
    throw DomainError("no " + std::string(to_string(m)) + " row at " + std::to_string(sweep_var));
  return *it;
}

namespace {

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.sweep_var, a.method) < std::tie(b.sweep_var, b.method);
  });
}

LabeledDataset prefix(const LabeledDataset& ds, std::size_t n) {
  LabeledDataset out;
  out.config = ds.config;
  out.examples.assign(ds.examples.begin(),
                      ds.examples.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace

std::vector<ResultRow> size_sweep_rows(const LabeledDataset& training,
                                       const LabeledDataset& test,
                                       const std::vector<std::uint64_t>& sizes, int k) {
  std::vector<ResultRow> rows;
  for (auto size : sizes) {
    if (size > training.size())
      throw DomainError("training size " + std::to_string(size) + " exceeds the " +
                        std::to_string(training.size()) + " labeled examples");
    const KnnModel model(preprocess(prefix(training, size)), k);
    const auto report = evaluate_model(model, test, training.config);
    auto point = rows_from_report(static_cast<double>(size), report);
    rows.insert(rows.end(), point.begin(), point.end());
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_size_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto max_size = cfg.training_sizes.back();
  const auto training = label_layouts(cfg.base, 1, max_size, cfg.threads);
  const auto test = label_layouts(cfg.base, max_size + 1, cfg.n_test, cfg.threads);
  return size_sweep_rows(training, test, cfg.training_sizes, cfg.k);
}

std::vector<ResultRow> run_snr_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto n_train = cfg.training_sizes.back();
  std::vector<ResultRow> rows;
  for (double snr : cfg.snr_grid_db) {
    SystemConfig point = cfg.base;
    point.snr_db = snr;
    const auto training = label_layouts(point, 1, n_train, cfg.threads);
    const auto test = label_layouts(point, n_train + 1, cfg.n_test, cfg.threads);
    const KnnModel model(preprocess(training), cfg.k);
    const auto report = evaluate_model(model, test, point);
    auto r = rows_from_report(snr, report);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  sort_rows(rows);
  return rows;
}

}  // namespace beamlearn
