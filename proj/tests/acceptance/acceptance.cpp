// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Pass criterion numbers (e.g. `acceptance 1 7`) to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beamlearn/experiment.hpp"
#include "beamlearn/io.hpp"
#include "beamlearn/learning.hpp"
#include "beamlearn/statistics.hpp"
#include "brute_force.hpp"

using namespace beamlearn;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SystemConfig desk_config(double snr_db = 20.0) {
  SystemConfig c;
  c.n_beams = 8;
  c.n_users = 3;
  c.snr_db = snr_db;
  c.rng_seed = 2024;
  return c;
}

oracle::GainTable table_of(const GainMatrix& g) {
  oracle::GainTable t(static_cast<std::size_t>(g.n_users()));
  for (int k = 0; k < g.n_users(); ++k) {
    const auto row = g.row(k);
    t[static_cast<std::size_t>(k)].assign(row.begin(), row.end());
  }
  return t;
}

// 1. Oracle equivalence against the two-user double loop.
Outcome oracle_equivalence() {
  Outcome o;
  SystemConfig c;
  c.n_beams = 6;
  c.n_users = 2;
  c.snr_db = 10.0;
  c.rng_seed = 99;
  const auto t0 = Clock::now();
  int exact = 0;
  for (std::uint64_t id = 1; id <= 200; ++id) {
    const auto gains = channel_gain_matrix(sample_layout(c, id), c);
    const auto got = exhaustive_oracle(gains, c);
    const auto ref = oracle::two_user_brute_force(table_of(gains), c.n_beams, c.snr_db);
    std::vector<int> beams;
    for (const auto& b : got.allocation.beam_of_user) beams.push_back(b.value_or(0));
    exact += beams == ref.beams && got.active.mask() == oracle::mask_of(ref.beams) &&
             got.sum_rate == ref.sum_rate;
  }
  const double elapsed = seconds_since(t0);
  o.require(exact == 200, fmt("%d/200 exact", exact));
  o.require(elapsed < 10.0, fmt("runtime %.2fs >= 10s", elapsed));
  o.detail = fmt("%d/200 exact matches in %.3fs", exact, elapsed) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

// 2. Beam pattern: unit peak, grid nulls, and the N = 4 spot value.
Outcome kernel_checks() {
  Outcome o;
  double worst_peak = 0.0, worst_null = 0.0;
  for (int n_beams : {2, 3, 4, 5, 8, 16, 32, 64}) {
    SystemConfig c;
    c.n_beams = n_beams;
    c.n_users = 1;
    for (int n = 1; n <= n_beams; ++n) {
      const double theta = std::acos(beam_steering_cosine(n, n_beams));
      for (int m = 1; m <= n_beams; ++m) {
        const double g = beam_gain(theta, m, c);
        if (m == n)
          worst_peak = std::max(worst_peak, std::abs(g - 1.0));
        else
          worst_null = std::max(worst_null, std::abs(g));
      }
    }
  }
  SystemConfig c4;
  c4.n_beams = 4;
  c4.n_users = 1;
  const double spot = beam_gain(std::acos(beam_steering_cosine(2, 4) + 0.25), 2, c4);
  o.require(worst_peak <= 1e-12, fmt("peak error %.3g", worst_peak));
  o.require(worst_null <= 1e-12, fmt("null error %.3g", worst_null));
  o.require(std::abs(spot - 0.426777) <= 1e-6, fmt("spot %.9f", spot));
  o.detail = fmt("max |peak-1| %.2e, max null %.2e, N=4 spot %.6f", worst_peak, worst_null,
                 spot) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

// 3. Rate formula: single user, orthogonal pair, hand-derived pair.
Outcome rate_checks() {
  Outcome o;
  double worst = 0.0;
  for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
    SystemConfig c1;
    c1.n_beams = 1;
    c1.n_users = 1;
    c1.snr_db = snr_db;
    const double snr = std::pow(10.0, snr_db / 10.0);
    Allocation one{{1}};
    const double r1 = evaluate_rates(one, GainMatrix(1, 1, std::vector<double>{1.0}), c1).sum_rate;
    worst = std::max(worst, std::abs(r1 - std::log2(1.0 + snr)));

    SystemConfig c2 = c1;
    c2.n_beams = 2;
    c2.n_users = 2;
    Allocation two{{1, 2}};
    const double r2 = evaluate_rates(two, GainMatrix(2, 2, {1.0, 0.0, 0.0, 1.0}), c2).sum_rate;
    worst = std::max(worst, std::abs(r2 - 2.0 * std::log2(1.0 + snr / 2.0)));
  }
  SystemConfig c;
  c.n_beams = 2;
  c.n_users = 2;
  c.snr_db = 10.0;
  const double hand =
      evaluate_rates(Allocation{{1, 2}}, GainMatrix(2, 2, {1.0, 0.1, 0.1, 1.0}), c).sum_rate;
  o.require(worst <= 1e-12, fmt("closed-form error %.3g", worst));
  o.require(std::abs(hand - 4.2310) <= 1e-4, fmt("hand case %.6f", hand));
  o.detail = fmt("closed-form max error %.2e, hand case %.6f", worst, hand) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

struct SizeSweepResult {
  std::vector<ResultRow> rows;
  std::vector<double> ratios;
  double seconds = 0.0;
};

const std::vector<std::uint64_t> kSizes{100, 1000, 10000, 100000};

const SizeSweepResult& size_sweep() {
  static const SizeSweepResult result = [] {
    SizeSweepResult r;
    ExperimentConfig cfg;
    cfg.base = desk_config(20.0);
    cfg.training_sizes = kSizes;
    cfg.n_test = 2000;
    cfg.k = 1;
    const auto t0 = Clock::now();
    r.rows = run_size_sweep(cfg);
    r.seconds = seconds_since(t0);
    for (auto s : kSizes)
      r.ratios.push_back(find_row(r.rows, static_cast<double>(s), Method::kModel).mean_sum_rate /
                         find_row(r.rows, static_cast<double>(s), Method::kOracle).mean_sum_rate);
    return r;
  }();
  return result;
}

// 4. Training-size trend at N = 8, K = 3, 20 dB.
Outcome size_trend() {
  Outcome o;
  const auto& r = size_sweep();
  std::string curve;
  for (std::size_t i = 0; i < kSizes.size(); ++i) {
    const auto& row = find_row(r.rows, static_cast<double>(kSizes[i]), Method::kModel);
    curve += fmt("%s%.3f", i ? " " : "", row.mean_sum_rate);
    if (i == 0) continue;
    const auto& prev = find_row(r.rows, static_cast<double>(kSizes[i - 1]), Method::kModel);
    const double tol = pooled_stderr(prev.std_error, row.std_error);
    o.require(row.mean_sum_rate >= prev.mean_sum_rate - tol,
              fmt("model drops %.4f -> %.4f beyond %.4f", prev.mean_sum_rate, row.mean_sum_rate,
                  tol));
  }
  o.require(r.ratios.back() > r.ratios.front(),
            fmt("ratio %.4f at 1e5 not above %.4f at 1e2", r.ratios.back(), r.ratios.front()));
  o.require(r.seconds < 600.0, fmt("runtime %.1fs >= 600s", r.seconds));
  o.detail = "model means [" + curve + "], rate_ratio " +
             fmt("%.4f -> %.4f, %.1fs", r.ratios.front(), r.ratios.back(), r.seconds) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

// 5. Ordering at the largest training size.
Outcome ordering() {
  Outcome o;
  const auto& r = size_sweep();
  const double s = static_cast<double>(kSizes.back());
  const auto& model = find_row(r.rows, s, Method::kModel);
  const auto& best = find_row(r.rows, s, Method::kOracle);
  const auto& base = find_row(r.rows, s, Method::kBaseline);
  const double gap_om = best.mean_sum_rate - model.mean_sum_rate;
  const double gap_mb = model.mean_sum_rate - base.mean_sum_rate;
  const double tol_om = pooled_stderr(best.std_error, model.std_error);
  const double tol_mb = pooled_stderr(model.std_error, base.std_error);
  o.require(gap_om > -tol_om, fmt("oracle-model gap %.4f <= -%.4f", gap_om, tol_om));
  o.require(gap_mb > -tol_mb, fmt("model-baseline gap %.4f <= -%.4f", gap_mb, tol_mb));
  o.detail = fmt("oracle %.3f >= model %.3f >= baseline %.3f (gaps %.3f/%.3f, stderr %.3f/%.3f)",
                 best.mean_sum_rate, model.mean_sum_rate, base.mean_sum_rate, gap_om, gap_mb,
                 tol_om, tol_mb) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

// 6. SNR sweep shape.
Outcome snr_shape() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.base = desk_config();
  cfg.snr_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0};
  cfg.training_sizes = {10000};
  cfg.n_test = 2000;
  const auto t0 = Clock::now();
  const auto rows = run_snr_sweep(cfg);
  const double elapsed = seconds_since(t0);
  std::string curves;
  for (auto m : {Method::kOracle, Method::kModel, Method::kBaseline}) {
    curves += std::string(curves.empty() ? "" : " | ") + std::string(to_string(m)) + ":";
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
      const double v = find_row(rows, cfg.snr_grid_db[i], m).mean_sum_rate;
      curves += fmt(" %.2f", v);
      if (i > 0) {
        const double prev = find_row(rows, cfg.snr_grid_db[i - 1], m).mean_sum_rate;
        o.require(v > prev, fmt("%s not increasing at %g dB", std::string(to_string(m)).c_str(),
                                cfg.snr_grid_db[i]));
      }
    }
  }
  for (double snr : cfg.snr_grid_db) {
    const double best = find_row(rows, snr, Method::kOracle).mean_sum_rate;
    o.require(best >= find_row(rows, snr, Method::kModel).mean_sum_rate,
              fmt("model above oracle at %g dB", snr));
    o.require(best >= find_row(rows, snr, Method::kBaseline).mean_sum_rate,
              fmt("baseline above oracle at %g dB", snr));
  }
  o.detail = curves + fmt(" (%.1fs)", elapsed) + (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

std::string pipeline_bytes(const SystemConfig& c) {
  const auto ds = label_dataset(c, 2000);
  std::ostringstream os;
  io::write_dataset(os, ds);
  const auto [train, test] = split_dataset(preprocess(ds), 0.8, 7);
  const KnnModel model(train, 1);
  const auto report = evaluate_model(model, test, c);
  io::ResultsFile results;
  results.sweep = io::SweepKind::kSize;
  results.config.base = c;
  results.config.training_sizes = {train.size()};
  results.rows = rows_from_report(static_cast<double>(train.size()), report);
  io::write_results(os, results);
  return os.str();
}

// 7. Property suites.
Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(77);
  const auto c = desk_config();

  int perm_failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    auto layout = sample_layout(c, static_cast<std::uint64_t>(trial % 500) + 1);
    const auto f = extract_features(layout);
    std::shuffle(layout.positions.begin(), layout.positions.end(), rng);
    perm_failures += extract_features(layout) != f;
  }
  o.require(perm_failures == 0, fmt("%d permutation failures", perm_failures));

  int metric_failures = 0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    FeatureVector a{{u(rng), u(rng), u(rng)}}, b{{u(rng), u(rng), u(rng)}};
    const double d = feature_distance(a, b);
    metric_failures += !(d > 0.0) || d != feature_distance(b, a) || feature_distance(a, a) != 0.0;
  }
  o.require(metric_failures == 0, fmt("%d metric-axiom failures", metric_failures));

  const auto ds = label_dataset(c, 3000);
  const auto self = evaluate_model(KnnModel(ds, 1), ds, c);
  o.require(self.class_accuracy == 1.0, fmt("self-match accuracy %.6f", self.class_accuracy));

  std::ostringstream os;
  io::write_dataset(os, ds);
  std::istringstream in(os.str());
  o.require(io::read_dataset(in) == ds, "dataset round trip differs");

  const bool identical = pipeline_bytes(c) == pipeline_bytes(c);
  o.require(identical, "pipeline runs differ");

  const auto classes = distinct_classes(ds);
  o.require(classes <= (std::size_t{1} << c.n_beams), fmt("%zu classes > 2^N", classes));

  o.detail = fmt("perm failures %d/10000, metric failures %d/10000, self-match %.3f, "
                 "round-trip ok, pipeline byte-identical %s, classes %zu <= %d",
                 perm_failures, metric_failures, self.class_accuracy, identical ? "yes" : "no",
                 classes, 1 << c.n_beams) +
             (o.detail.empty() ? "" : " [" + o.detail + "]");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (N=6, K=2, 200 layouts, < 10 s)", oracle_equivalence},
      {"beam kernel peak/null within 1e-12, N=4 spot 0.426777 +- 1e-6", kernel_checks},
      {"rate formulas within 1e-12, hand case 4.2310 +- 1e-4", rate_checks},
      {"training-size trend (N=8, K=3, 20 dB, 1e2..1e5, 2000 test)", size_trend},
      {"ordering oracle >= model >= baseline at 1e5", ordering},
      {"SNR sweep strictly increasing, oracle dominant", snr_shape},
      {"property suites", properties},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
