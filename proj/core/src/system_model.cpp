#include "beamlearn/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beamlearn/random.hpp"

namespace beamlearn {

namespace {

constexpr std::uint32_t kLayoutStreamTag = 0x6c61796fu;  // "layo"

// Below this distance from a singularity the kernel equals its limit to
// well under one ulp.
constexpr double kSingularityWidth = 1e-8;

}  // namespace

void SystemConfig::validate() const {
  if (n_users < 1) throw DomainError("n_users must be >= 1");
  if (n_beams < n_users) throw DomainError("n_beams must be >= n_users");
  if (n_beams > 64) throw DomainError("n_beams must be <= 64");
  if (!(min_radius > 0.0 && min_radius < 1.0))
    throw DomainError("min_radius must lie in (0, 1)");
  if (!(path_loss_exponent >= 0.0) || !std::isfinite(path_loss_exponent))
    throw DomainError("path_loss_exponent must be finite and >= 0");
  if (!std::isfinite(snr_db)) throw DomainError("snr_db must be finite");
}

double SystemConfig::transmit_power() const { return std::pow(10.0, snr_db / 10.0); }

GainMatrix::GainMatrix(int n_users, int n_beams, std::uint64_t source_layout_id)
    : n_users_(n_users),
      n_beams_(n_beams),
      gains_(static_cast<std::size_t>(n_users) * n_beams, 0.0),
      source_layout_id_(source_layout_id) {
  if (n_users < 0 || n_beams < 0) throw DomainError("negative gain matrix dimension");
}

GainMatrix::GainMatrix(int n_users, int n_beams, std::vector<double> row_major,
                       std::uint64_t source_layout_id)
    : n_users_(n_users),
      n_beams_(n_beams),
      gains_(std::move(row_major)),
      source_layout_id_(source_layout_id) {
  if (n_users < 0 || n_beams < 0) throw DomainError("negative gain matrix dimension");
  if (gains_.size() != static_cast<std::size_t>(n_users) * n_beams)
    throw DomainError("gain matrix data does not match K x N");
  for (double g : gains_)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw DomainError("gain matrix entries must be finite and >= 0");
}

UserLayout sample_layout(const SystemConfig& config, std::uint64_t layout_id) {
  auto rng = random::keyed_engine(config.rng_seed, layout_id, kLayoutStreamTag);
  UserLayout layout;
  layout.layout_id = layout_id;
  layout.positions.reserve(static_cast<std::size_t>(config.n_users));
  for (int k = 0; k < config.n_users; ++k) {
    const double u1 = random::uniform_open_closed(rng);
    const double u2 = random::uniform_open(rng);
    UserPosition p;
    p.rho = std::max(config.min_radius, std::sqrt(u1));
    p.theta = u2 * std::numbers::pi;
    layout.positions.push_back(p);
  }
  return layout;
}

double beam_kernel(double psi, int n_elements) {
  const double n = n_elements;
  const double m = std::nearbyint(psi / (2.0 * std::numbers::pi));
  if (std::abs(psi - 2.0 * std::numbers::pi * m) < kSingularityWidth) {
    // D_N(2 pi m) = (-1)^(m (N - 1))
    const auto parity = static_cast<long long>(std::abs(m)) * (n_elements - 1);
    return parity % 2 == 0 ? 1.0 : -1.0;
  }
  const double value = std::sin(n * psi / 2.0) / (n * std::sin(psi / 2.0));
  return std::clamp(value, -1.0, 1.0);
}

double beam_steering_cosine(int beam_index, int n_beams) {
  return static_cast<double>(2 * beam_index - 1 - n_beams) / n_beams;
}

double beam_gain(double theta, int beam_index, const SystemConfig& config) {
  if (beam_index < 1 || beam_index > config.n_beams)
    throw DomainError("beam index " + std::to_string(beam_index) + " outside [1, " +
                      std::to_string(config.n_beams) + "]");
  const double psi =
      std::numbers::pi * (std::cos(theta) - beam_steering_cosine(beam_index, config.n_beams));
  const double d = beam_kernel(psi, config.n_beams);
  return d * d;
}

GainMatrix channel_gain_matrix(const UserLayout& layout, const SystemConfig& config) {
  if (layout.positions.size() != static_cast<std::size_t>(config.n_users))
    throw DomainError("layout has " + std::to_string(layout.positions.size()) +
                      " users, config expects " + std::to_string(config.n_users));
  GainMatrix gains(config.n_users, config.n_beams, layout.layout_id);
  for (int k = 0; k < config.n_users; ++k) {
    const auto& p = layout.positions[static_cast<std::size_t>(k)];
    const double path_loss = std::pow(p.rho, -config.path_loss_exponent);
    for (int n = 1; n <= config.n_beams; ++n)
      gains.at(k, n) = path_loss * beam_gain(p.theta, n, config);
  }
  return gains;
}

}  // namespace beamlearn
