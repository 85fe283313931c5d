#pragma once
/*
Closed-form complexity calculators for Restricted-Round-Robin with simple
(eta = 0) or class-uniform (eta > 0) weighting.

  n*(a,l) = ceil_inv((gap(a,l) - eta) / 4)          l outside the eta-class of a
          = ceil_inv((sep(a) - eta) / 4)            l inside it
  zeta(a) = n*(a,a) + A - 1 - #{ l outside : n*(a,a) > n*(a,l) + A - 1 }
  tau(a)  = max(zeta, ceil(ceil_inv(eps) / |C| + (|C| - 1) / 2))   eta = 0
          = max(zeta, ceil_inv(eps) + |C| - 1)                     eta > 0

where sep(a) is the smallest gap from a to an agent outside its eta-class and
ceil_inv(x) = inverse_radius_ceil(x). All sizes are taken from the realized
instance.
*/

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "colme/bounds.hpp"
#include "colme/model.hpp"

namespace colme {

// Every agent lies within eta of `a`: there is nothing to separate.
class TriviallyIdentified : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

std::uint64_t n_star(const ProblemInstance& inst, AgentId a, AgentId l, const BoundConfig& cfg,
                     double eta = 0.0);

// 0 for single-class instances.
std::uint64_t zeta(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double eta = 0.0);

std::uint64_t tau(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double epsilon,
                  double eta = 0.0);

/// Collaboration beats local estimation for every epsilon strictly below this.
double epsilon_threshold(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double eta = 0.0);

/// Mean-estimation time of the oracle baseline for a class of `cls_size` agents.
std::uint64_t oracle_tau(std::size_t cls_size, const BoundConfig& cfg, double epsilon);

struct TheoryRow {
  AgentId agent{0};
  double class_mean{0.0};
  std::size_t class_size{0};
  std::optional<std::uint64_t> n_star_self;  // empty for single-class instances
  std::uint64_t zeta{0};
  double epsilon{0.0};
  std::uint64_t tau{0};
  double epsilon_threshold{kInfinity};
  bool collaboration_wins{false};  // epsilon < epsilon_threshold
};

struct TheoryReport {
  double eta{0.0};
  std::vector<TheoryRow> rows;  // agent-major, one row per epsilon
};

TheoryReport theory_report(const ProblemInstance& inst, const BoundConfig& cfg,
                           const std::vector<double>& epsilons, double eta = 0.0);

/// CSV header: agent_id,class_mean,class_size,n_star_self,zeta,eps,tau,eps_threshold
void write_theory_csv(std::ostream& out, const TheoryReport& report);

}  // namespace colme
