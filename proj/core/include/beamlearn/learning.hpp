#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "beamlearn/allocation.hpp"
#include "beamlearn/system_model.hpp"

namespace beamlearn {

/// Sorted-angle cosines of a layout: nonincreasing, one entry per user.
struct FeatureVector {
  std::vector<double> values;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LabeledExample {
  FeatureVector feature;
  ActiveBeamSet label;
  double oracle_sum_rate = 0.0;
  std::uint64_t layout_id = 0;
  UserLayout layout;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct LabeledDataset {
  SystemConfig config;
  std::vector<LabeledExample> examples;

  [[nodiscard]] std::size_t size() const { return examples.size(); }
  [[nodiscard]] bool empty() const { return examples.empty(); }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Instance-based model: the training set itself plus the neighbor count.
/// Immutable once built, so concurrent queries are safe.
class KnnModel {
 public:
  /// Throws DomainError if `training` is empty or k is outside
  /// [1, training.size()].
  KnnModel(LabeledDataset training, int k = 1);

  [[nodiscard]] const LabeledDataset& training() const { return training_; }
  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int dimension() const { return training_.config.n_users; }

 private:
  LabeledDataset training_;
  int k_;
};

struct EvalReport {
  double mean_model_sum_rate = 0.0;
  double mean_oracle_sum_rate = 0.0;
  double mean_baseline_sum_rate = 0.0;
  double model_stderr = 0.0;
  double oracle_stderr = 0.0;
  double baseline_stderr = 0.0;
  double rate_ratio = 0.0;  // mean model / mean oracle
  double class_accuracy = 0.0;
  std::size_t n_test = 0;
  std::size_t distinct_classes = 0;  // in the model's training set
  /// Set when the model beats the stored oracle rate by more than rounding.
  bool exceeds_oracle = false;
};

FeatureVector extract_features(const UserLayout& layout);

/// Squared Euclidean distance. Throws DomainError on dimension mismatch.
double feature_distance(const FeatureVector& a, const FeatureVector& b);

/// Samples, scores and labels layouts 1..n_layouts with the exhaustive
/// oracle. Output is ordered by layout id for any thread count.
/// `threads` = 0 uses the hardware concurrency.
LabeledDataset label_dataset(const SystemConfig& config, std::uint64_t n_layouts,
                             unsigned threads = 0,
                             double oracle_budget = kDefaultOracleBudget);

/// Labels the given layout ids, in order.
LabeledDataset label_layouts(const SystemConfig& config, std::uint64_t first_layout_id,
                             std::uint64_t count, unsigned threads = 0,
                             double oracle_budget = kDefaultOracleBudget);

/// Builds one labeled example from a layout.
LabeledExample label_layout(const UserLayout& layout, const SystemConfig& config,
                            double oracle_budget = kDefaultOracleBudget);

/// Drops examples with non-finite features and exact duplicate features
/// (first occurrence kept).
LabeledDataset preprocess(const LabeledDataset& ds);

/// Seeded shuffle, then the first ceil(train_fraction * n) examples go to
/// training and the rest to test.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        double train_fraction,
                                                        std::uint64_t split_seed);

/// Majority label among the k nearest training features. Neighbor ties go
/// to the smaller layout id; vote ties to the smaller summed distance, then
/// the smaller mask.
ActiveBeamSet knn_predict(const KnnModel& model, const FeatureVector& query);

/// Scores the model on each test layout against the stored oracle rate and
/// the greedy baseline.
EvalReport evaluate_model(const KnnModel& model, const LabeledDataset& test,
                          const SystemConfig& config);

/// Number of distinct labels in a dataset.
std::size_t distinct_classes(const LabeledDataset& ds);

}  // namespace beamlearn
