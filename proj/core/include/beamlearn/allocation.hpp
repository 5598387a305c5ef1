#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beamlearn/system_model.hpp"

namespace beamlearn {

/// User -> beam assignment. Entry k is the 1-based beam serving user k, or
/// nullopt when user k is unserved. No beam may appear twice.
struct Allocation {
  std::vector<std::optional<int>> beam_of_user;

  [[nodiscard]] int served_count() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Subset of the N fixed beams; bit (n-1) set means beam n carries a user.
/// This is the class label predicted by the learned model.
class ActiveBeamSet {
 public:
  constexpr ActiveBeamSet() = default;
  constexpr explicit ActiveBeamSet(std::uint64_t mask) : mask_(mask) {}

  static ActiveBeamSet of(const Allocation& alloc);

  [[nodiscard]] constexpr std::uint64_t mask() const { return mask_; }
  [[nodiscard]] constexpr int size() const { return std::popcount(mask_); }
  [[nodiscard]] constexpr bool empty() const { return mask_ == 0; }
  [[nodiscard]] constexpr bool contains(int beam) const {
    return ((mask_ >> (beam - 1)) & 1u) != 0;
  }
  constexpr void insert(int beam) { mask_ |= std::uint64_t{1} << (beam - 1); }

  /// Active beam indices in ascending order.
  [[nodiscard]] std::vector<int> beams() const;

  friend constexpr bool operator==(ActiveBeamSet, ActiveBeamSet) = default;
  friend constexpr auto operator<=>(ActiveBeamSet, ActiveBeamSet) = default;

 private:
  std::uint64_t mask_ = 0;
};

struct RateReport {
  std::vector<double> per_user_sinr;
  std::vector<double> per_user_rate;  // bits/s/Hz
  double sum_rate = 0.0;
};

/// Default refusal threshold for the exhaustive search, in N^K mappings.
inline constexpr double kDefaultOracleBudget = 1e8;

/// Raised by the exhaustive oracle when N^K exceeds its enumeration budget.
class BudgetExceeded : public DomainError {
 public:
  BudgetExceeded(int n_beams, int n_users, double budget);

  [[nodiscard]] double candidate_count() const { return candidates_; }

 private:
  double candidates_;
};

struct OracleResult {
  Allocation allocation;
  ActiveBeamSet active;
  double sum_rate = 0.0;
};

/// Equal-power SINR and rate per user. Total power P is split evenly across
/// the served users; noise power is one.
RateReport evaluate_rates(const Allocation& alloc, const GainMatrix& gains,
                          const SystemConfig& config);

/// Decodes an active beam set into an allocation: repeatedly match the
/// (active beam, free user) pair with the largest gain. Ties go to the
/// smaller beam, then the smaller user.
Allocation assign_best_users(ActiveBeamSet active, const GainMatrix& gains,
                             const SystemConfig& config);

/// Optimal allocation by enumerating every one-to-one user -> beam mapping,
/// each user optionally unserved. Ties resolve to the lexicographically
/// smallest beam_of_user, with "unserved" ordered after beam N.
///
/// Throws BudgetExceeded when N^K > budget.
OracleResult exhaustive_oracle(const GainMatrix& gains, const SystemConfig& config,
                               double budget = kDefaultOracleBudget);

/// Checks that N^K fits in `budget`; throws BudgetExceeded otherwise.
void check_oracle_budget(int n_beams, int n_users, double budget = kDefaultOracleBudget);

/// Low-complexity reference scheduler. Users go in descending order of their
/// best gain and each grabs its strongest unclaimed beam.
Allocation greedy_baseline(const GainMatrix& gains, const SystemConfig& config);

}  // namespace beamlearn
