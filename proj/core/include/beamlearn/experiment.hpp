#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "beamlearn/learning.hpp"

namespace beamlearn {

enum class Method { kModel, kOracle, kBaseline };

std::string_view to_string(Method m);
/// Throws DomainError on an unknown name.
Method method_from_string(std::string_view name);

struct ExperimentConfig {
  SystemConfig base;
  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<std::uint64_t> training_sizes{100, 1000, 10000};
  std::uint64_t n_test = 2000;
  int k = 1;
  double train_fraction = 0.8;
  std::string output_path;
  unsigned threads = 0;

  /// Grids nonempty, n_test >= 100, training sizes strictly increasing and
  /// >= k, base config valid.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// One point of one curve. `sweep_var` is the SNR in dB or the training
/// set size, depending on the sweep.
struct ResultRow {
  double sweep_var = 0.0;
  Method method = Method::kModel;
  double mean_sum_rate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Average sum rate versus transmit SNR at the largest training size.
/// Layouts 1..(S + n_test) are relabeled at every SNR point; the first S
/// (S = training_sizes.back()) train the model, the remainder are the test
/// set. Rows are sorted by (sweep_var, method).
std::vector<ResultRow> run_snr_sweep(const ExperimentConfig& cfg);

/// Average sum rate versus training set size at cfg.base.snr_db. Labels the
/// largest training set once; each size trains on its prefix and is scored
/// on the same n_test held-out layouts.
std::vector<ResultRow> run_size_sweep(const ExperimentConfig& cfg);

/// Size-sweep core over caller-provided data: trains on each prefix of
/// `training` and scores on `test`.
std::vector<ResultRow> size_sweep_rows(const LabeledDataset& training,
                                       const LabeledDataset& test,
                                       const std::vector<std::uint64_t>& sizes, int k);

/// Model / oracle / baseline rows for one evaluation.
std::vector<ResultRow> rows_from_report(double sweep_var, const EvalReport& report);

/// Looks up the row for (sweep_var, method); throws DomainError if absent.
const ResultRow& find_row(const std::vector<ResultRow>& rows, double sweep_var, Method m);

}  // namespace beamlearn
