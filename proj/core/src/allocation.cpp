#include "beamlearn/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace beamlearn {

namespace {

constexpr int kUnserved = 0;

// Rates for a dense beam list (0 = unserved). Both evaluate_rates and the
// oracle go through here so their sums agree bit for bit.
double rate_kernel(std::span<const int> beam_of_user, const GainMatrix& gains,
                   double total_power, double* sinr_out, double* rate_out) {
  int served = 0;
  for (int b : beam_of_user) served += (b != kUnserved);
  if (served == 0) {
    for (std::size_t k = 0; k < beam_of_user.size(); ++k) {
      if (sinr_out) sinr_out[k] = 0.0;
      if (rate_out) rate_out[k] = 0.0;
    }
    return 0.0;
  }
  const double p = total_power / served;
  double sum = 0.0;
  const int n_users = static_cast<int>(beam_of_user.size());
  for (int k = 0; k < n_users; ++k) {
    const int own = beam_of_user[static_cast<std::size_t>(k)];
    double sinr = 0.0;
    if (own != kUnserved) {
      double interference = 0.0;
      for (int j = 0; j < n_users; ++j) {
        const int other = beam_of_user[static_cast<std::size_t>(j)];
        if (j != k && other != kUnserved) interference += p * gains.at(k, other);
      }
      sinr = p * gains.at(k, own) / (1.0 + interference);
    }
    const double rate = std::log2(1.0 + sinr);
    if (sinr_out) sinr_out[k] = sinr;
    if (rate_out) rate_out[k] = rate;
    sum += rate;
  }
  return sum;
}

void check_dimensions(const GainMatrix& gains, const SystemConfig& config) {
  if (gains.n_users() != config.n_users || gains.n_beams() != config.n_beams)
    throw DomainError("gain matrix is " + std::to_string(gains.n_users()) + "x" +
                      std::to_string(gains.n_beams()) + ", config expects " +
                      std::to_string(config.n_users) + "x" + std::to_string(config.n_beams));
}

std::vector<int> dense_beams(const Allocation& alloc, int n_beams) {
  std::vector<int> beams;
  beams.reserve(alloc.beam_of_user.size());
  std::uint64_t seen = 0;
  for (const auto& b : alloc.beam_of_user) {
    if (!b) {
      beams.push_back(kUnserved);
      continue;
    }
    if (*b < 1 || *b > n_beams)
      throw DomainError("allocated beam " + std::to_string(*b) + " outside [1, " +
                        std::to_string(n_beams) + "]");
    const std::uint64_t bit = std::uint64_t{1} << (*b - 1);
    if (seen & bit) throw DomainError("beam " + std::to_string(*b) + " assigned twice");
    seen |= bit;
    beams.push_back(*b);
  }
  return beams;
}

Allocation from_dense(std::span<const int> beams) {
  Allocation alloc;
  alloc.beam_of_user.reserve(beams.size());
  for (int b : beams)
    alloc.beam_of_user.push_back(b == kUnserved ? std::nullopt : std::optional<int>(b));
  return alloc;
}

std::string budget_message(int n_beams, int n_users, double budget) {
  std::ostringstream os;
  os << "exhaustive search over N^K = " << n_beams << "^" << n_users << " = "
     << std::pow(static_cast<double>(n_beams), n_users)
     << " candidate mappings exceeds the enumeration budget of " << budget;
  return os.str();
}

// Depth-first walk in lexicographic order (beams 1..N, then unserved). A
// strict improvement test keeps the first maximizer, i.e. the
// lexicographically smallest one.
struct OracleSearch {
  const GainMatrix& gains;
  double total_power;
  std::vector<int> current;
  std::vector<int> best;
  double best_rate = -1.0;
  std::uint64_t used = 0;

  void visit(std::size_t user) {
    if (user == current.size()) {
      const double rate = rate_kernel(current, gains, total_power, nullptr, nullptr);
      if (rate > best_rate) {
        best_rate = rate;
        best = current;
      }
      return;
    }
    for (int b = 1; b <= gains.n_beams(); ++b) {
      const std::uint64_t bit = std::uint64_t{1} << (b - 1);
      if (used & bit) continue;
      used |= bit;
      current[user] = b;
      visit(user + 1);
      used &= ~bit;
    }
    current[user] = kUnserved;
    visit(user + 1);
  }
};

}  // namespace

int Allocation::served_count() const {
  return static_cast<int>(std::count_if(beam_of_user.begin(), beam_of_user.end(),
                                        [](const auto& b) { return b.has_value(); }));
}

ActiveBeamSet ActiveBeamSet::of(const Allocation& alloc) {
  ActiveBeamSet set;
  for (const auto& b : alloc.beam_of_user)
    if (b) set.insert(*b);
  return set;
}

std::vector<int> ActiveBeamSet::beams() const {
  std::vector<int> out;
  for (int n = 1; n <= 64; ++n)
    if (contains(n)) out.push_back(n);
  return out;
}

BudgetExceeded::BudgetExceeded(int n_beams, int n_users, double budget)
    : DomainError(budget_message(n_beams, n_users, budget)),
      candidates_(std::pow(static_cast<double>(n_beams), n_users)) {}

RateReport evaluate_rates(const Allocation& alloc, const GainMatrix& gains,
                          const SystemConfig& config) {
  check_dimensions(gains, config);
  if (alloc.beam_of_user.size() != static_cast<std::size_t>(config.n_users))
    throw DomainError("allocation has " + std::to_string(alloc.beam_of_user.size()) +
                      " users, config expects " + std::to_string(config.n_users));
  const auto beams = dense_beams(alloc, config.n_beams);
  RateReport report;
  report.per_user_sinr.resize(beams.size());
  report.per_user_rate.resize(beams.size());
  report.sum_rate = rate_kernel(beams, gains, config.transmit_power(),
                                report.per_user_sinr.data(), report.per_user_rate.data());
  return report;
}

Allocation assign_best_users(ActiveBeamSet active, const GainMatrix& gains,
                             const SystemConfig& config) {
  check_dimensions(gains, config);
  if (active.size() > config.n_users)
    throw DomainError("active set has " + std::to_string(active.size()) +
                      " beams but only " + std::to_string(config.n_users) + " users");
  if (config.n_beams < 64 && (active.mask() >> config.n_beams) != 0)
    throw DomainError("active set names a beam beyond N");

  std::vector<int> beams(static_cast<std::size_t>(config.n_users), kUnserved);
  std::vector<int> free_beams = active.beams();
  std::vector<bool> user_taken(static_cast<std::size_t>(config.n_users), false);

  while (!free_beams.empty()) {
    double best_gain = -1.0;
    std::size_t best_beam_pos = 0;
    int best_user = -1;
    // Beams ascending, users ascending, strict '>': ties keep the smaller
    // beam, then the smaller user.
    for (std::size_t i = 0; i < free_beams.size(); ++i) {
      for (int k = 0; k < config.n_users; ++k) {
        if (user_taken[static_cast<std::size_t>(k)]) continue;
        const double g = gains.at(k, free_beams[i]);
        if (g > best_gain) {
          best_gain = g;
          best_beam_pos = i;
          best_user = k;
        }
      }
    }
    if (best_user < 0) break;
    beams[static_cast<std::size_t>(best_user)] = free_beams[best_beam_pos];
    user_taken[static_cast<std::size_t>(best_user)] = true;
    free_beams.erase(free_beams.begin() + static_cast<std::ptrdiff_t>(best_beam_pos));
  }
  return from_dense(beams);
}

void check_oracle_budget(int n_beams, int n_users, double budget) {
  if (std::pow(static_cast<double>(n_beams), n_users) > budget)
    throw BudgetExceeded(n_beams, n_users, budget);
}

OracleResult exhaustive_oracle(const GainMatrix& gains, const SystemConfig& config,
                               double budget) {
  check_dimensions(gains, config);
  check_oracle_budget(config.n_beams, config.n_users, budget);

  OracleSearch search{gains, config.transmit_power(),
                      std::vector<int>(static_cast<std::size_t>(config.n_users), kUnserved),
                      {}};
  search.visit(0);

  OracleResult result;
  result.allocation = from_dense(search.best);
  result.active = ActiveBeamSet::of(result.allocation);
  result.sum_rate = search.best_rate;
  return result;
}

Allocation greedy_baseline(const GainMatrix& gains, const SystemConfig& config) {
  check_dimensions(gains, config);
  const int n_users = config.n_users;
  std::vector<double> best_gain(static_cast<std::size_t>(n_users));
  for (int k = 0; k < n_users; ++k) {
    const auto row = gains.row(k);
    best_gain[static_cast<std::size_t>(k)] = *std::max_element(row.begin(), row.end());
  }
  std::vector<int> order(static_cast<std::size_t>(n_users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return best_gain[static_cast<std::size_t>(a)] > best_gain[static_cast<std::size_t>(b)];
  });

  std::vector<int> beams(static_cast<std::size_t>(n_users), kUnserved);
  std::uint64_t claimed = 0;
  for (int k : order) {
    int pick = kUnserved;
    double pick_gain = -1.0;
    for (int b = 1; b <= config.n_beams; ++b) {
      if (claimed & (std::uint64_t{1} << (b - 1))) continue;
      if (gains.at(k, b) > pick_gain) {
        pick_gain = gains.at(k, b);
        pick = b;
      }
    }
    if (pick == kUnserved) continue;
    claimed |= std::uint64_t{1} << (pick - 1);
    beams[static_cast<std::size_t>(k)] = pick;
  }
  return from_dense(beams);
}

}  // namespace beamlearn
