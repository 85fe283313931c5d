#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "colme/bounds.hpp"
#include "colme/model.hpp"

namespace colme {

enum class QueryStrategy {
  none,                    // no collaboration (local baseline)
  round_robin,             // fixed cycle over every peer
  restricted_round_robin,  // cycle restricted to the optimistic class
  oracle_restricted,       // cycle restricted to the true class
};

enum class WeightScheme { simple, soft, aggressive, class_uniform, oracle_simple, local };

std::string_view to_string(QueryStrategy s);
std::string_view to_string(WeightScheme s);
std::optional<QueryStrategy> parse_strategy(std::string_view name);
std::optional<WeightScheme> parse_scheme(std::string_view name);

// A support with no usable statistics (every count is zero).
class DegenerateSupport : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Next query target after the memory's cursor, skipping the owner. For the
/// restricted strategies only members of `allowed` qualify; round_robin
/// ignores it. Returns nothing (cursor untouched) when no peer qualifies.
/// Otherwise the cursor moves just past the returned peer.
std::optional<AgentId> choose_agent(QueryStrategy strategy, AgentMemory& mem, const AgentSet& allowed);

// Weight vectors below are aligned with `support` and sum to 1.
std::vector<double> weights_simple(const AgentMemory& mem, const AgentSet& support);

/// Overlap weighting: u_l = n_l * |I_a ∩ I_l| / |hull(I_a, I_l)|.
std::vector<double> weights_soft(const AgentMemory& mem, const AgentSet& support,
                                 const ConfidenceRadius& radius);

/// Soft weighting gated by |I_a ∩ I_l| > min(beta(n_l), beta(n_a)).
std::vector<double> weights_aggressive(const AgentMemory& mem, const AgentSet& support,
                                       const ConfidenceRadius& radius);

std::vector<double> weights_class_uniform(const AgentSet& support, const AgentMemory& mem);

/// Weighted aggregate of stored averages. `local` ignores the support;
/// `oracle_simple` is simple weighting and expects the true class as support.
double estimate(const AgentMemory& mem, const AgentSet& support, WeightScheme scheme,
                const ConfidenceRadius& radius);

}  // namespace colme
