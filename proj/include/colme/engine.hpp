#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "colme/bounds.hpp"
#include "colme/model.hpp"
#include "colme/strategies.hpp"

namespace colme {

/// A named (query strategy, weighting scheme) pair.
struct Algorithm {
  std::string name;
  QueryStrategy strategy{QueryStrategy::restricted_round_robin};
  WeightScheme scheme{WeightScheme::simple};

  // Whether the optimistic class is computed (and traced) for this pair.
  bool tracks_class() const {
    return strategy != QueryStrategy::oracle_restricted && scheme != WeightScheme::local &&
           scheme != WeightScheme::oracle_simple;
  }
};

/// Presets: rr, rrr, soft-rrr, agg-rrr, local, oracle, eta-rrr. Also accepts an
/// explicit `strategy/scheme` pair such as `rrr/soft`.
std::optional<Algorithm> parse_algorithm(std::string_view name);

// Empty when the pair is usable; otherwise a human-readable reason.
std::string algorithm_mismatch(QueryStrategy strategy, WeightScheme scheme);

const std::vector<std::string>& preset_algorithm_names();

enum class TraceMode { aggregate, full };

struct SimulationConfig {
  std::uint64_t horizon{2500};
  std::size_t runs{20};
  std::uint64_t seed{0};
  double delta{0.001};
  double eta{0.0};
  std::size_t samples_per_round{1};
  std::vector<Algorithm> algorithms;
  std::vector<double> epsilons;
  // Per-algorithm horizon, keyed by algorithm name.
  std::map<std::string, std::uint64_t> horizon_overrides;
  TraceMode trace_mode{TraceMode::aggregate};
  // Upper bound for full-mode trace storage.
  std::size_t trace_memory_budget{std::size_t{1} << 30};
  std::size_t jobs{1};

  std::uint64_t horizon_for(const Algorithm& alg) const;
  void validate() const;
};

// ---------------------------------------------------------------------------
// Randomness

/// Gaussian stream of one agent in one run. Every draw is a pure function of
/// (seed, run, agent, t, j), so all algorithms and any thread schedule see the
/// same values.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t run, AgentId agent, double mean, double sigma);

  double draw(std::uint64_t t, std::size_t j = 0) const;

 private:
  std::uint64_t key_;
  double mean_;
  double sigma_;
};

double draw_sample(const SampleStream& stream, std::uint64_t t, std::size_t j = 0);

// Uniform in (0, 1], a pure function of the inputs.
double hashed_uniform(std::uint64_t key, std::uint64_t counter);

// ---------------------------------------------------------------------------
// Instances

struct ClassDescription {
  std::vector<double> class_means;
  std::size_t num_agents{0};
  double sigma{0.5};
  // Optional fixed class index per agent; random uniform membership otherwise.
  std::vector<std::size_t> membership;
};

ProblemInstance make_instance(const ClassDescription& desc, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Simulation

struct SimulationParams {
  double delta{0.001};
  double eta{0.0};
  std::size_t samples_per_round{1};
};

// Sample for (agent, t, j); t starts at 1.
using SampleSource = std::function<double(AgentId, std::uint64_t, std::size_t)>;

SampleSource gaussian_source(const ProblemInstance& inst, std::uint64_t seed, std::uint64_t run);

/// Synchronous rounds for every agent of one instance under one algorithm.
/// Each step runs perceive, query and estimate for all agents, with a barrier
/// between phases: queries only read owners' post-perceive statistics.
class Simulation {
 public:
  Simulation(const ProblemInstance& inst, Algorithm algorithm, SimulationParams params,
             SampleSource source, std::uint64_t horizon_hint = 0);

  void step();

  std::uint64_t time() const { return t_; }
  std::size_t num_agents() const { return memories_.size(); }
  const Algorithm& algorithm() const { return algorithm_; }
  const ConfidenceRadius& radius() const { return radius_; }

  const AgentMemory& memory(AgentId a) const { return memories_[a]; }
  double estimate(AgentId a) const { return estimates_[a]; }
  // Last query target of `a`, if it queried in the latest step.
  std::optional<AgentId> last_query(AgentId a) const { return last_query_[a]; }

  // Optimistic class used by the latest estimate phase (empty when untracked).
  const AgentSet& estimate_class(AgentId a) const { return estimate_classes_[a]; }

  const TrueClass& true_class(AgentId a) const { return true_classes_[a]; }
  // Value the estimate should approach: the eta-class mean (mu_a when eta = 0).
  double target(AgentId a) const { return targets_[a]; }

 private:
  void perceive();
  void query();
  void estimate_phase();

  const ProblemInstance* inst_;
  Algorithm algorithm_;
  SimulationParams params_;
  SampleSource source_;
  ConfidenceRadius radius_;
  std::uint64_t t_{0};

  std::vector<AgentMemory> memories_;
  std::vector<TrueClass> true_classes_;
  std::vector<double> targets_;
  std::vector<double> estimates_;
  std::vector<std::optional<AgentId>> last_query_;
  std::vector<AgentSet> estimate_classes_;
  AgentSet scratch_;
  std::vector<double> block_;
};

// ---------------------------------------------------------------------------
// Experiments

class ResourceLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-step sums over the agents of one group.
struct CurveSums {
  std::vector<double> sum;
  std::vector<double> sumsq;
  std::size_t population{0};

  void resize(std::uint64_t horizon, std::size_t pop);
  void add(std::uint64_t t, double v) {
    sum[t - 1] += v;
    sumsq[t - 1] += v * v;
  }
};

/// Trace of one algorithm over one run.
struct RunTrace {
  std::string algorithm;
  std::size_t run{0};
  std::uint64_t horizon{0};

  // Per-agent group index into `group_means` (grouping by the agent's own mean).
  std::vector<double> group_means;
  std::vector<std::size_t> agent_group;

  std::vector<CurveSums> error_curves;
  std::vector<CurveSums> precision_curves;  // empty when the class is untracked

  // First t from which the optimistic class equals the true class for every
  // remaining step; nothing when still wrong at the horizon. Empty if untracked.
  std::vector<std::optional<std::uint64_t>> class_time;
  // conv[e][a]: empirical convergence time for epsilons[e].
  std::vector<std::vector<std::optional<std::uint64_t>>> conv;

  // Full mode only, indexed [agent][t - 1].
  std::vector<std::vector<double>> estimates;
  std::vector<std::vector<double>> errors;
  std::vector<std::vector<double>> precisions;

  bool tracks_class() const { return !precision_curves.empty(); }
};

struct ExperimentResult {
  SimulationConfig config;
  std::vector<RunTrace> traces;  // run-major, then algorithm order

  const RunTrace& trace(std::size_t run, std::size_t algorithm_index) const {
    return traces.at(run * config.algorithms.size() + algorithm_index);
  }
};

RunTrace simulate_run(const ProblemInstance& inst, const SimulationConfig& cfg, const Algorithm& alg,
                      std::size_t run);

using ProgressCallback = std::function<void(std::size_t run, std::size_t completed, std::size_t total)>;

/// Every configured algorithm over every run. Runs are independent tasks on a
/// pool of cfg.jobs threads; output does not depend on the pool size.
ExperimentResult run_experiment(const SimulationConfig& cfg, const ProblemInstance& inst,
                                const ProgressCallback& progress = {});

}  // namespace colme
