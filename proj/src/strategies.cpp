#include "colme/strategies.hpp"

#include <algorithm>
#include <cmath>

namespace colme {

std::string_view to_string(QueryStrategy s) {
  switch (s) {
    case QueryStrategy::none: return "none";
    case QueryStrategy::round_robin: return "rr";
    case QueryStrategy::restricted_round_robin: return "rrr";
    case QueryStrategy::oracle_restricted: return "oracle";
  }
  return "?";
}

std::string_view to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::simple: return "simple";
    case WeightScheme::soft: return "soft";
    case WeightScheme::aggressive: return "aggressive";
    case WeightScheme::class_uniform: return "class-uniform";
    case WeightScheme::oracle_simple: return "oracle";
    case WeightScheme::local: return "local";
  }
  return "?";
}

std::optional<QueryStrategy> parse_strategy(std::string_view name) {
  for (auto s : {QueryStrategy::none, QueryStrategy::round_robin, QueryStrategy::restricted_round_robin,
                 QueryStrategy::oracle_restricted}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<WeightScheme> parse_scheme(std::string_view name) {
  for (auto s : {WeightScheme::simple, WeightScheme::soft, WeightScheme::aggressive,
                 WeightScheme::class_uniform, WeightScheme::oracle_simple, WeightScheme::local}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<AgentId> choose_agent(QueryStrategy strategy, AgentMemory& mem, const AgentSet& allowed) {
  const std::size_t n = mem.num_agents();
  const AgentId owner = mem.owner();
  if (strategy == QueryStrategy::none || n < 2) return std::nullopt;

  std::optional<AgentId> pick;
  if (strategy == QueryStrategy::round_robin) {
    pick = mem.cursor() == owner ? (owner + 1) % n : mem.cursor();
  } else {
    // First allowed member at or after the cursor, wrapping once; owner excluded.
    auto it = std::lower_bound(allowed.begin(), allowed.end(), mem.cursor());
    for (std::size_t step = 0; step < allowed.size(); ++step, ++it) {
      if (it == allowed.end()) it = allowed.begin();
      if (*it != owner) {
        pick = *it;
        break;
      }
    }
  }
  if (pick) mem.set_cursor((*pick + 1) % n);
  return pick;
}

namespace {

struct Overlap {
  double intersection;
  double ratio;  // intersection / hull length
};

Overlap overlap(const AgentMemory& mem, AgentId l, const ConfidenceRadius& radius) {
  const AgentId a = mem.owner();
  const double ra = radius(mem.count(a));
  const double rl = radius(mem.count(l));
  const auto ia = ConfidenceInterval::around(mem.avg(a), ra);
  const auto il = ConfidenceInterval::around(mem.avg(l), rl);
  const double inter = std::max(0.0, std::min(ia.hi, il.hi) - std::max(ia.lo, il.lo));
  const double hull = std::max(ia.hi, il.hi) - std::min(ia.lo, il.lo);
  if (l == a || hull == 0.0) return {inter, 1.0};  // identical intervals
  return {inter, inter / hull};
}

// Unnormalized weight of support member `l`.
double raw_weight(const AgentMemory& mem, AgentId l, WeightScheme scheme, const ConfidenceRadius& radius) {
  const std::uint64_t n = mem.count(l);
  if (n == 0) return 0.0;
  switch (scheme) {
    case WeightScheme::simple:
    case WeightScheme::oracle_simple:
      return static_cast<double>(n);
    case WeightScheme::class_uniform:
      return 1.0;
    case WeightScheme::soft:
      return static_cast<double>(n) * overlap(mem, l, radius).ratio;
    case WeightScheme::aggressive: {
      const Overlap o = overlap(mem, l, radius);
      const double gate_radius = std::min(radius(n), radius(mem.count(mem.owner())));
      const bool gate = l == mem.owner() || o.intersection > gate_radius;
      return gate ? static_cast<double>(n) * o.ratio : 0.0;
    }
    case WeightScheme::local:
      return l == mem.owner() ? 1.0 : 0.0;
  }
  return 0.0;
}

bool falls_back_to_owner(WeightScheme scheme) {
  return scheme == WeightScheme::soft || scheme == WeightScheme::aggressive;
}

std::vector<double> normalized(const AgentMemory& mem, const AgentSet& support, WeightScheme scheme,
                               const ConfidenceRadius& radius) {
  if (support.empty()) throw DegenerateSupport("weights: empty support");
  std::vector<double> w(support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    w[i] = raw_weight(mem, support[i], scheme, radius);
    total += w[i];
  }
  if (total > 0.0) {
    for (double& x : w) x /= total;
    return w;
  }
  if (falls_back_to_owner(scheme)) {
    auto it = std::lower_bound(support.begin(), support.end(), mem.owner());
    if (it != support.end() && *it == mem.owner()) {
      std::fill(w.begin(), w.end(), 0.0);
      w[static_cast<std::size_t>(it - support.begin())] = 1.0;
      return w;
    }
  }
  throw DegenerateSupport(std::string("weights(") + std::string(to_string(scheme)) +
                          "): no support member has usable statistics");
}

}  // namespace

std::vector<double> weights_simple(const AgentMemory& mem, const AgentSet& support) {
  return normalized(mem, support, WeightScheme::simple, ConfidenceRadius(BoundConfig{}));
}

std::vector<double> weights_soft(const AgentMemory& mem, const AgentSet& support,
                                 const ConfidenceRadius& radius) {
  return normalized(mem, support, WeightScheme::soft, radius);
}

std::vector<double> weights_aggressive(const AgentMemory& mem, const AgentSet& support,
                                       const ConfidenceRadius& radius) {
  return normalized(mem, support, WeightScheme::aggressive, radius);
}

std::vector<double> weights_class_uniform(const AgentSet& support, const AgentMemory& mem) {
  return normalized(mem, support, WeightScheme::class_uniform, ConfidenceRadius(BoundConfig{}));
}

double estimate(const AgentMemory& mem, const AgentSet& support, WeightScheme scheme,
                const ConfidenceRadius& radius) {
  if (scheme == WeightScheme::local) return mem.avg(mem.owner());
  if (support.empty()) throw DegenerateSupport("estimate: empty support");

  double total = 0.0;
  double acc = 0.0;
  for (AgentId l : support) {
    const double u = raw_weight(mem, l, scheme, radius);
    total += u;
    acc += u * mem.avg(l);
  }
  if (total > 0.0) return acc / total;
  if (falls_back_to_owner(scheme) && contains(support, mem.owner())) return mem.avg(mem.owner());
  throw DegenerateSupport(std::string("estimate(") + std::string(to_string(scheme)) +
                          "): no support member has usable statistics");
}

}  // namespace colme
