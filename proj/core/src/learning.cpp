#include "beamlearn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>

#include "beamlearn/random.hpp"
#include "beamlearn/statistics.hpp"

namespace beamlearn {

namespace {

constexpr std::uint32_t kSplitStreamTag = 0x73706c74u;  // "splt"

// Runs body(i) for i in [0, n) over up to `threads` workers. Each index is
// written by exactly one worker, so ordering of results never depends on
// scheduling. The first exception is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back([&, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Neighbor {
  double distance;
  std::uint64_t layout_id;
  std::size_t index;

  bool operator<(const Neighbor& other) const {
    if (distance != other.distance) return distance < other.distance;
    return layout_id < other.layout_id;
  }
};

}  // namespace

KnnModel::KnnModel(LabeledDataset training, int k) : training_(std::move(training)), k_(k) {
  if (training_.empty()) throw DomainError("k-NN model needs at least one training example");
  if (k_ < 1 || static_cast<std::size_t>(k_) > training_.size())
    throw DomainError("k = " + std::to_string(k_) + " outside [1, " +
                      std::to_string(training_.size()) + "]");
}

FeatureVector extract_features(const UserLayout& layout) {
  std::vector<double> angles;
  angles.reserve(layout.positions.size());
  for (const auto& p : layout.positions) angles.push_back(p.theta);
  std::sort(angles.begin(), angles.end());
  FeatureVector f;
  f.values.reserve(angles.size());
  for (double theta : angles) f.values.push_back(std::cos(theta));
  return f;
}

double feature_distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.values.size() != b.values.size())
    throw DomainError("feature dimensions differ: " + std::to_string(a.values.size()) +
                      " vs " + std::to_string(b.values.size()));
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff = a.values[i] - b.values[i];
    d += diff * diff;
  }
  return d;
}

LabeledExample label_layout(const UserLayout& layout, const SystemConfig& config,
                            double oracle_budget) {
  const auto gains = channel_gain_matrix(layout, config);
  const auto best = exhaustive_oracle(gains, config, oracle_budget);
  LabeledExample ex;
  ex.feature = extract_features(layout);
  ex.label = best.active;
  ex.oracle_sum_rate = best.sum_rate;
  ex.layout_id = layout.layout_id;
  ex.layout = layout;
  return ex;
}

LabeledDataset label_layouts(const SystemConfig& config, std::uint64_t first_layout_id,
                             std::uint64_t count, unsigned threads, double oracle_budget) {
  config.validate();
  check_oracle_budget(config.n_beams, config.n_users, oracle_budget);
  LabeledDataset ds;
  ds.config = config;
  ds.examples.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const auto layout = sample_layout(config, first_layout_id + i);
    ds.examples[i] = label_layout(layout, config, oracle_budget);
  });
  return ds;
}

LabeledDataset label_dataset(const SystemConfig& config, std::uint64_t n_layouts,
                             unsigned threads, double oracle_budget) {
  return label_layouts(config, 1, n_layouts, threads, oracle_budget);
}

LabeledDataset preprocess(const LabeledDataset& ds) {
  LabeledDataset out;
  out.config = ds.config;
  std::set<std::vector<double>> seen;
  for (const auto& ex : ds.examples) {
    const auto& v = ex.feature.values;
    if (!std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) continue;
    if (!seen.insert(v).second) continue;
    out.examples.push_back(ex);
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        double train_fraction,
                                                        std::uint64_t split_seed) {
  if (ds.empty()) throw DomainError("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DomainError("train_fraction must lie in (0, 1)");

  const std::size_t n = ds.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto rng = random::keyed_engine(split_seed, n, kSplitStreamTag);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(random::uniform_below(rng, i + 1));
    std::swap(order[i], order[j]);
  }

  // The 1e-9 slack keeps representation error in fraction * n (e.g. 0.7 * 10)
  // from bumping an exact product up to the next integer.
  const auto n_train = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9)));

  std::pair<LabeledDataset, LabeledDataset> out;
  out.first.config = ds.config;
  out.second.config = ds.config;
  out.first.examples.reserve(n_train);
  out.second.examples.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i)
    (i < n_train ? out.first : out.second).examples.push_back(ds.examples[order[i]]);
  return out;
}

ActiveBeamSet knn_predict(const KnnModel& model, const FeatureVector& query) {
  const auto& examples = model.training().examples;
  const auto k = static_cast<std::size_t>(model.k());
  if (query.values.size() != static_cast<std::size_t>(model.dimension()))
    throw DomainError("query dimension " + std::to_string(query.values.size()) +
                      " does not match model dimension " + std::to_string(model.dimension()));

  if (k == 1) {
    Neighbor best{feature_distance(query, examples[0].feature), examples[0].layout_id, 0};
    for (std::size_t i = 1; i < examples.size(); ++i) {
      const Neighbor cand{feature_distance(query, examples[i].feature), examples[i].layout_id, i};
      if (cand < best) best = cand;
    }
    return examples[best.index].label;
  }

  // Max-heap holding the k best seen so far.
  std::vector<Neighbor> heap;
  heap.reserve(k + 1);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const Neighbor cand{feature_distance(query, examples[i].feature), examples[i].layout_id, i};
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end());
    } else if (cand < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end());
    }
  }

  struct Vote {
    std::size_t count = 0;
    double distance_sum = 0.0;
  };
  std::map<ActiveBeamSet, Vote> votes;
  std::sort(heap.begin(), heap.end());
  for (const auto& nb : heap) {
    auto& v = votes[examples[nb.index].label];
    ++v.count;
    v.distance_sum += nb.distance;
  }
  // std::map iterates masks ascending, so strict comparisons keep the
  // smaller mask on a full tie.
  auto winner = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    const auto& [c, s] = it->second;
    const auto& [wc, ws] = winner->second;
    if (c > wc || (c == wc && s < ws)) winner = it;
  }
  return winner->first;
}

std::size_t distinct_classes(const LabeledDataset& ds) {
  std::set<ActiveBeamSet> labels;
  for (const auto& ex : ds.examples) labels.insert(ex.label);
  return labels.size();
}

EvalReport evaluate_model(const KnnModel& model, const LabeledDataset& test,
                          const SystemConfig& config) {
  if (test.empty()) throw DomainError("cannot evaluate on an empty test set");
  if (config.n_users != model.dimension() ||
      config.n_beams != model.training().config.n_beams)
    throw DomainError("test config does not match the model's N and K");

  RunningMean model_rate, oracle_rate, baseline_rate;
  std::size_t correct = 0;
  for (const auto& ex : test.examples) {
    const auto gains = channel_gain_matrix(ex.layout, config);
    const auto predicted = knn_predict(model, ex.feature);
    const auto alloc = assign_best_users(predicted, gains, config);
    model_rate.add(evaluate_rates(alloc, gains, config).sum_rate);
    oracle_rate.add(ex.oracle_sum_rate);
    baseline_rate.add(evaluate_rates(greedy_baseline(gains, config), gains, config).sum_rate);
    correct += (predicted == ex.label);
  }

  EvalReport r;
  r.n_test = test.size();
  r.mean_model_sum_rate = model_rate.mean();
  r.mean_oracle_sum_rate = oracle_rate.mean();
  r.mean_baseline_sum_rate = baseline_rate.mean();
  r.model_stderr = model_rate.stderr_of_mean();
  r.oracle_stderr = oracle_rate.stderr_of_mean();
  r.baseline_stderr = baseline_rate.stderr_of_mean();
  r.rate_ratio = r.mean_oracle_sum_rate > 0.0 ? r.mean_model_sum_rate / r.mean_oracle_sum_rate
                                              : 1.0;
  r.class_accuracy = static_cast<double>(correct) / static_cast<double>(r.n_test);
  r.distinct_classes = distinct_classes(model.training());
  r.exceeds_oracle = r.rate_ratio > 1.0 + 1e-12;
  return r;
}

}  // namespace beamlearn
