#include "colme/theory.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "colme/format.hpp"

namespace colme {

namespace {

void check_sizes(const ProblemInstance& inst, const BoundConfig& cfg) {
  cfg.validate();
  if (cfg.num_agents != inst.num_agents()) {
    throw std::invalid_argument("bound config num_agents differs from the instance size");
  }
}

// Memoizes inversions across the many (a, l) pairs sharing a gap.
class SampleCounts {
 public:
  SampleCounts(const ProblemInstance& inst, const BoundConfig& cfg, double eta)
      : inst_(inst), cfg_(cfg), eta_(eta) {}

  std::uint64_t n_star(AgentId a, AgentId l) {
    const auto sep = inst_.separation_gap(a, eta_);
    if (!sep) throw TriviallyIdentified("every agent is within eta of agent " + std::to_string(a));
    const double g = inst_.gap(a, l);
    return inverse_for(g > eta_ ? g : *sep);
  }

  std::uint64_t zeta(AgentId a) {
    if (!inst_.separation_gap(a, eta_)) return 0;
    const std::uint64_t self = n_star(a, a);
    const std::uint64_t spread = inst_.num_agents() - 1;
    std::uint64_t early = 0;
    for (AgentId l = 0; l < inst_.num_agents(); ++l) {
      if (inst_.gap(a, l) > eta_ && self > n_star(a, l) + spread) ++early;
    }
    return self + spread - early;
  }

 private:
  std::uint64_t inverse_for(double gap) {
    auto it = cache_.find(gap);
    if (it != cache_.end()) return it->second;
    const std::uint64_t n = inverse_radius_ceil(cfg_, (gap - eta_) / 4.0);
    cache_.emplace(gap, n);
    return n;
  }

  const ProblemInstance& inst_;
  BoundConfig cfg_;
  double eta_;
  std::map<double, std::uint64_t> cache_;
};

std::uint64_t ceil_div(std::uint64_t num, std::uint64_t den) { return (num + den - 1) / den; }

std::uint64_t collaboration_time(std::uint64_t local_time, std::size_t cls_size, double eta) {
  const std::uint64_t c = cls_size;
  if (eta > 0.0) return local_time + c - 1;
  // ceil(N / C + (C - 1) / 2) == ceil((2N + C(C - 1)) / 2C)
  return ceil_div(2 * local_time + c * (c - 1), 2 * c);
}

}  // namespace

std::uint64_t n_star(const ProblemInstance& inst, AgentId a, AgentId l, const BoundConfig& cfg, double eta) {
  check_sizes(inst, cfg);
  return SampleCounts(inst, cfg, eta).n_star(a, l);
}

std::uint64_t zeta(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double eta) {
  check_sizes(inst, cfg);
  return SampleCounts(inst, cfg, eta).zeta(a);
}

std::uint64_t tau(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double epsilon, double eta) {
  check_sizes(inst, cfg);
  const std::uint64_t z = SampleCounts(inst, cfg, eta).zeta(a);
  const std::uint64_t local_time = inverse_radius_ceil(cfg, epsilon);
  return std::max(z, collaboration_time(local_time, true_class(inst, a, eta).size(), eta));
}

double epsilon_threshold(const ProblemInstance& inst, AgentId a, const BoundConfig& cfg, double eta) {
  check_sizes(inst, cfg);
  if (!inst.separation_gap(a, eta)) {
    throw TriviallyIdentified("epsilon_threshold: agent " + std::to_string(a) + " has no agent to separate");
  }
  return confidence_radius(cfg, SampleCounts(inst, cfg, eta).zeta(a));
}

std::uint64_t oracle_tau(std::size_t cls_size, const BoundConfig& cfg, double epsilon) {
  if (cls_size < 1) throw std::invalid_argument("oracle_tau: class size must be at least 1");
  return collaboration_time(inverse_radius_ceil(cfg, epsilon), cls_size, 0.0);
}

TheoryReport theory_report(const ProblemInstance& inst, const BoundConfig& cfg,
                           const std::vector<double>& epsilons, double eta) {
  check_sizes(inst, cfg);
  SampleCounts counts(inst, cfg, eta);
  std::vector<std::uint64_t> local_times;
  for (double e : epsilons) local_times.push_back(inverse_radius_ceil(cfg, e));

  TheoryReport report{eta, {}};
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    const TrueClass cls = true_class(inst, a, eta);
    const bool separable = inst.separation_gap(a, eta).has_value();
    TheoryRow base;
    base.agent = a;
    base.class_mean = eta == 0.0 ? inst.mean(a) : class_mean(inst, cls);
    base.class_size = cls.size();
    if (separable) base.n_star_self = counts.n_star(a, a);
    base.zeta = counts.zeta(a);
    base.epsilon_threshold = separable ? confidence_radius(cfg, base.zeta) : kInfinity;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      TheoryRow row = base;
      row.epsilon = epsilons[e];
      row.tau = std::max(row.zeta, collaboration_time(local_times[e], cls.size(), eta));
      row.collaboration_wins = row.epsilon < row.epsilon_threshold;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_theory_csv(std::ostream& out, const TheoryReport& report) {
  out << "agent_id,class_mean,class_size,n_star_self,zeta,eps,tau,eps_threshold\n";
  for (const auto& r : report.rows) {
    out << r.agent << ',' << format_real(r.class_mean) << ',' << r.class_size << ','
        << (r.n_star_self ? std::to_string(*r.n_star_self) : std::string()) << ',' << r.zeta << ','
        << format_real(r.epsilon) << ',' << r.tau << ',' << format_real(r.epsilon_threshold) << '\n';
  }
}

}  // namespace colme
