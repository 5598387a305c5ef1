#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamlearn {

/// Raised when an argument violates a documented precondition (bad index,
/// dimension mismatch, invalid configuration).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cell, array and power parameters shared by every stage of the pipeline.
///
/// `snr_db` is the total transmit power over the noise power. Users never
/// sit closer to the base station than `min_radius`, which keeps the
/// rho^-alpha path loss finite.
struct SystemConfig {
  int n_beams = 8;
  int n_users = 3;
  double snr_db = 20.0;
  double path_loss_exponent = 2.0;
  double min_radius = 0.01;
  std::uint64_t rng_seed = 1;

  /// Throws DomainError unless 1 <= n_users <= n_beams <= 64,
  /// min_radius in (0,1), path_loss_exponent >= 0 and snr_db finite.
  void validate() const;

  /// Linear total transmit power with noise power normalized to one.
  [[nodiscard]] double transmit_power() const;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Polar position of one user in the unit cell.
struct UserPosition {
  double rho = 1.0;
  double theta = 1.0;  // radians, strictly inside (0, pi)

  friend bool operator==(const UserPosition&, const UserPosition&) = default;
};

/// One scenario: the positions of all K users.
struct UserLayout {
  std::vector<UserPosition> positions;
  std::uint64_t layout_id = 0;

  friend bool operator==(const UserLayout&, const UserLayout&) = default;
};

/// K x N beam power gains, path loss included. Row k holds user k; column
/// n-1 holds beam n.
class GainMatrix {
 public:
  GainMatrix() = default;
  GainMatrix(int n_users, int n_beams, std::uint64_t source_layout_id = 0);
  GainMatrix(int n_users, int n_beams, std::vector<double> row_major,
             std::uint64_t source_layout_id = 0);

  [[nodiscard]] int n_users() const { return n_users_; }
  [[nodiscard]] int n_beams() const { return n_beams_; }
  [[nodiscard]] std::uint64_t source_layout_id() const { return source_layout_id_; }

  /// Gain of 1-based `beam` at 0-based `user`.
  [[nodiscard]] double at(int user, int beam) const {
    return gains_[static_cast<std::size_t>(user) * n_beams_ + (beam - 1)];
  }
  double& at(int user, int beam) {
    return gains_[static_cast<std::size_t>(user) * n_beams_ + (beam - 1)];
  }

  [[nodiscard]] std::span<const double> row(int user) const {
    return {gains_.data() + static_cast<std::size_t>(user) * n_beams_,
            static_cast<std::size_t>(n_beams_)};
  }

  [[nodiscard]] std::span<const double> values() const { return gains_; }

 private:
  int n_users_ = 0;
  int n_beams_ = 0;
  std::vector<double> gains_;
  std::uint64_t source_layout_id_ = 0;
};

/// Draws the K user positions of layout `layout_id`, area-uniform over the
/// upper half of the unit disk. A pure function of (config.rng_seed,
/// layout_id); bit-identical across platforms and thread counts.
UserLayout sample_layout(const SystemConfig& config, std::uint64_t layout_id);

/// Normalized Dirichlet kernel sin(N psi/2) / (N sin(psi/2)), with the
/// removable singularities at psi = 2 pi m replaced by their limit.
double beam_kernel(double psi, int n_elements);

/// Steering cosine of 1-based beam `beam_index` on the DFT (Butler) grid.
double beam_steering_cosine(int beam_index, int n_beams);

/// Power pattern of beam `beam_index` (1-based) towards angle `theta`.
/// Equal to 1 on the beam axis and 0 on the axis of every other beam.
double beam_gain(double theta, int beam_index, const SystemConfig& config);

/// Line-of-sight gains: entry (k, n) = rho_k^-alpha * beam_gain(theta_k, n).
GainMatrix channel_gain_matrix(const UserLayout& layout, const SystemConfig& config);

}  // namespace beamlearn
