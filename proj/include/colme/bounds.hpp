#pragma once
/*
Time-uniform confidence radius for sigma-sub-Gaussian means (Laplace method).

  beta(n) = sigma * sqrt( 2/n * (1 + 1/n) * ln( sqrt(n + 1) / gamma ) ),
  gamma   = delta / (8 * A),

with beta(0) = +inf. With probability at least 1 - delta/8 every empirical
mean an agent holds stays within beta(count) of the true mean, uniformly
over time and over the A agents.

inverse_radius_ceil(x) is the smallest n >= 1 with beta(n) < x.
*/

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace colme {

struct BoundConfig {
  double delta{0.001};
  std::size_t num_agents{1};
  double sigma{0.5};

  double gamma() const { return delta / (8.0 * static_cast<double>(num_agents)); }

  // Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

BoundConfig make_bound_config(double delta, std::size_t num_agents, double sigma);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::uint64_t kDefaultInversionCeiling = std::uint64_t{1} << 40;

// Raised when the inversion would need more samples than the configured ceiling.
class InversionOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

double confidence_radius(const BoundConfig& cfg, std::uint64_t n);

std::uint64_t inverse_radius_ceil(const BoundConfig& cfg, double x,
                                  std::uint64_t ceiling = kDefaultInversionCeiling);

/// Radius evaluator with a precomputed table for counts in [0, cached_up_to].
/// Counts past the table are evaluated directly, so lookups are exact either way.
class ConfidenceRadius {
 public:
  explicit ConfidenceRadius(const BoundConfig& cfg, std::uint64_t cached_up_to = 0);

  double operator()(std::uint64_t n) const {
    return n < table_.size() ? table_[n] : confidence_radius(cfg_, n);
  }

  const BoundConfig& config() const { return cfg_; }

 private:
  BoundConfig cfg_;
  std::vector<double> table_;
};

}  // namespace colme
