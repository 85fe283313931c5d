#include "colme/bounds.hpp"

#include <cmath>
#include <string>

namespace colme {

void BoundConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (num_agents < 1) {
    throw std::invalid_argument("num_agents must be at least 1");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be a finite non-negative real");
  }
}

BoundConfig make_bound_config(double delta, std::size_t num_agents, double sigma) {
  BoundConfig cfg{delta, num_agents, sigma};
  cfg.validate();
  return cfg;
}

double confidence_radius(const BoundConfig& cfg, std::uint64_t n) {
  if (n == 0) return kInfinity;
  const double nd = static_cast<double>(n);
  const double inv = 1.0 / nd;
  const double log_term = std::log(std::sqrt(nd + 1.0) / cfg.gamma());
  return cfg.sigma * std::sqrt(2.0 * inv * (1.0 + inv) * log_term);
}

std::uint64_t inverse_radius_ceil(const BoundConfig& cfg, double x, std::uint64_t ceiling) {
  if (!(x > 0.0)) throw std::invalid_argument("inverse_radius_ceil: x must be positive");
  if (!(cfg.sigma > 0.0)) throw std::invalid_argument("inverse_radius_ceil: sigma must be positive");
  if (ceiling < 1) throw std::invalid_argument("inverse_radius_ceil: ceiling must be at least 1");

  if (confidence_radius(cfg, 1) < x) return 1;

  // Bracket: radius(lo) >= x > radius(hi). Both ends are checked explicitly,
  // so the search does not lean on global monotonicity.
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  for (;;) {
    if (hi > ceiling) hi = ceiling;
    if (confidence_radius(cfg, hi) < x) break;
    if (hi == ceiling) {
      throw InversionOverflow("inverse_radius_ceil: x = " + std::to_string(x) +
                              " needs more than " + std::to_string(ceiling) + " samples");
    }
    lo = hi;
    hi = hi > ceiling / 2 ? ceiling : hi * 2;
  }

  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (confidence_radius(cfg, mid) < x) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ConfidenceRadius::ConfidenceRadius(const BoundConfig& cfg, std::uint64_t cached_up_to) : cfg_(cfg) {
  cfg_.validate();
  table_.resize(cached_up_to + 1);
  for (std::uint64_t n = 0; n <= cached_up_to; ++n) table_[n] = confidence_radius(cfg_, n);
}

}  // namespace colme
