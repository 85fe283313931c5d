#include "colme/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

namespace colme {

// ---------------------------------------------------------------------------
// Algorithms

namespace {

struct Preset {
  const char* name;
  QueryStrategy strategy;
  WeightScheme scheme;
};

constexpr Preset kPresets[] = {
    {"rr", QueryStrategy::round_robin, WeightScheme::simple},
    {"rrr", QueryStrategy::restricted_round_robin, WeightScheme::simple},
    {"soft-rrr", QueryStrategy::restricted_round_robin, WeightScheme::soft},
    {"agg-rrr", QueryStrategy::restricted_round_robin, WeightScheme::aggressive},
    {"local", QueryStrategy::none, WeightScheme::local},
    {"oracle", QueryStrategy::oracle_restricted, WeightScheme::oracle_simple},
    {"eta-rrr", QueryStrategy::restricted_round_robin, WeightScheme::class_uniform},
};

}  // namespace

const std::vector<std::string>& preset_algorithm_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

std::string algorithm_mismatch(QueryStrategy strategy, WeightScheme scheme) {
  const bool oracle_strategy = strategy == QueryStrategy::oracle_restricted;
  const bool oracle_scheme = scheme == WeightScheme::oracle_simple;
  if (oracle_strategy != oracle_scheme) {
    return "strategy '" + std::string(to_string(strategy)) + "' cannot be combined with scheme '" +
           std::string(to_string(scheme)) + "' (oracle strategy and oracle scheme go together)";
  }
  const bool no_queries = strategy == QueryStrategy::none;
  const bool local_scheme = scheme == WeightScheme::local;
  if (no_queries != local_scheme) {
    return "strategy '" + std::string(to_string(strategy)) + "' cannot be combined with scheme '" +
           std::string(to_string(scheme)) + "' (strategy none and scheme local go together)";
  }
  return {};
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return Algorithm{p.name, p.strategy, p.scheme};
  }
  const auto slash = name.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  const auto strategy = parse_strategy(name.substr(0, slash));
  const auto scheme = parse_scheme(name.substr(slash + 1));
  if (!strategy || !scheme || !algorithm_mismatch(*strategy, *scheme).empty()) return std::nullopt;
  return Algorithm{std::string(name), *strategy, *scheme};
}

std::uint64_t SimulationConfig::horizon_for(const Algorithm& alg) const {
  auto it = horizon_overrides.find(alg.name);
  return it == horizon_overrides.end() ? horizon : it->second;
}

void SimulationConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be a finite non-negative real");
  if (samples_per_round < 1) throw std::invalid_argument("samples_per_round must be at least 1");
  if (algorithms.empty()) throw std::invalid_argument("at least one algorithm is required");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw std::invalid_argument("epsilon must be positive");
  }
  for (const auto& [name, h] : horizon_overrides) {
    if (h < 1) throw std::invalid_argument("horizon override for '" + name + "' must be at least 1");
  }
}

// ---------------------------------------------------------------------------
// Randomness

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t key, std::uint64_t value) { return mix(key ^ mix(value)); }

double to_unit(std::uint64_t bits) {
  // 53 random bits mapped to (0, 1].
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

constexpr std::uint64_t kSampleDomain = 0x53414d504c45ULL;    // "SAMPLE"
constexpr std::uint64_t kInstanceDomain = 0x494e5354ULL;      // "INST"

}  // namespace

double hashed_uniform(std::uint64_t key, std::uint64_t counter) { return to_unit(combine(key, counter)); }

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t run, AgentId agent, double mean, double sigma)
    : key_(combine(combine(combine(kSampleDomain, seed), run), agent)), mean_(mean), sigma_(sigma) {}

double SampleStream::draw(std::uint64_t t, std::size_t j) const {
  const std::uint64_t base = combine(combine(key_, t), j);
  const double u1 = hashed_uniform(base, 1);
  const double u2 = hashed_uniform(base, 2);
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean_ + sigma_ * z;
}

double draw_sample(const SampleStream& stream, std::uint64_t t, std::size_t j) { return stream.draw(t, j); }

SampleSource gaussian_source(const ProblemInstance& inst, std::uint64_t seed, std::uint64_t run) {
  auto streams = std::make_shared<std::vector<SampleStream>>();
  streams->reserve(inst.num_agents());
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    streams->emplace_back(seed, run, a, inst.mean(a), inst.sigma());
  }
  return [streams](AgentId a, std::uint64_t t, std::size_t j) { return (*streams)[a].draw(t, j); };
}

// ---------------------------------------------------------------------------
// Instances

ProblemInstance make_instance(const ClassDescription& desc, std::uint64_t seed) {
  const std::size_t k = desc.class_means.size();
  if (k == 0) throw std::invalid_argument("make_instance: at least one class mean is required");
  std::vector<double> sorted = desc.class_means;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("make_instance: class means must be distinct");
  }

  std::vector<double> means;
  if (!desc.membership.empty()) {
    if (desc.num_agents != 0 && desc.membership.size() != desc.num_agents) {
      throw std::invalid_argument("make_instance: membership list length differs from num_agents");
    }
    for (std::size_t c : desc.membership) {
      if (c >= k) throw std::invalid_argument("make_instance: membership index out of range");
      means.push_back(desc.class_means[c]);
    }
  } else {
    if (desc.num_agents < k) throw std::invalid_argument("make_instance: fewer agents than classes");
    const std::uint64_t key = combine(kInstanceDomain, seed);
    for (std::size_t a = 0; a < desc.num_agents; ++a) {
      auto c = static_cast<std::size_t>(hashed_uniform(key, a) * static_cast<double>(k));
      means.push_back(desc.class_means[std::min(c, k - 1)]);
    }
  }
  return ProblemInstance(std::move(means), desc.sigma);
}

// ---------------------------------------------------------------------------
// Simulation

Simulation::Simulation(const ProblemInstance& inst, Algorithm algorithm, SimulationParams params,
                       SampleSource source, std::uint64_t horizon_hint)
    : inst_(&inst),
      algorithm_(std::move(algorithm)),
      params_(params),
      source_(std::move(source)),
      radius_(make_bound_config(params.delta, inst.num_agents(), inst.sigma()),
              horizon_hint * params.samples_per_round) {
  if (params_.samples_per_round < 1) throw std::invalid_argument("samples_per_round must be at least 1");
  if (!(params_.eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
  if (const auto why = algorithm_mismatch(algorithm_.strategy, algorithm_.scheme); !why.empty()) {
    throw std::invalid_argument(why);
  }
  const std::size_t n = inst.num_agents();
  memories_.reserve(n);
  true_classes_.reserve(n);
  for (AgentId a = 0; a < n; ++a) {
    memories_.emplace_back(a, n);
    true_classes_.push_back(colme::true_class(inst, a, params_.eta));
    targets_.push_back(params_.eta == 0.0 ? inst.mean(a) : class_mean(inst, true_classes_.back()));
  }
  estimates_.assign(n, 0.0);
  last_query_.assign(n, std::nullopt);
  estimate_classes_.resize(n);
  scratch_.reserve(n);
  block_.resize(params_.samples_per_round);
}

void Simulation::step() {
  ++t_;
  perceive();
  query();
  estimate_phase();
}

void Simulation::perceive() {
  for (auto& mem : memories_) {
    for (std::size_t j = 0; j < block_.size(); ++j) block_[j] = source_(mem.owner(), t_, j);
    mem.perceive(block_);
  }
}

void Simulation::query() {
  if (algorithm_.strategy == QueryStrategy::none) return;
  // Writes touch only non-owner entries, and reads only owner entries, so the
  // post-perceive snapshot is observed regardless of agent order.
  for (auto& mem : memories_) {
    const AgentSet* allowed = &scratch_;
    switch (algorithm_.strategy) {
      case QueryStrategy::restricted_round_robin:
        optimistic_class_into(mem, radius_, params_.eta, scratch_);
        break;
      case QueryStrategy::oracle_restricted:
        allowed = &true_classes_[mem.owner()].members;
        break;
      default:
        scratch_.clear();
        break;
    }
    const auto target = choose_agent(algorithm_.strategy, mem, *allowed);
    last_query_[mem.owner()] = target;
    if (target) {
      const AgentMemory& peer = memories_[*target];
      mem.store(*target, peer.avg(*target), peer.count(*target));
    }
  }
}

void Simulation::estimate_phase() {
  for (auto& mem : memories_) {
    const AgentId a = mem.owner();
    switch (algorithm_.scheme) {
      case WeightScheme::local:
        estimates_[a] = mem.avg(a);
        break;
      case WeightScheme::oracle_simple:
        estimates_[a] = colme::estimate(mem, true_classes_[a].members, WeightScheme::oracle_simple, radius_);
        break;
      default:
        optimistic_class_into(mem, radius_, params_.eta, estimate_classes_[a]);
        estimates_[a] = colme::estimate(mem, estimate_classes_[a], algorithm_.scheme, radius_);
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Experiments

void CurveSums::resize(std::uint64_t horizon, std::size_t pop) {
  sum.assign(horizon, 0.0);
  sumsq.assign(horizon, 0.0);
  population = pop;
}

namespace {

std::size_t intersection_size(const AgentSet& x, const AgentSet& y) {
  std::size_t n = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::optional<std::uint64_t> settle_time(std::uint64_t last_violation, std::uint64_t horizon) {
  if (last_violation >= horizon) return std::nullopt;
  return last_violation + 1;
}

}  // namespace

RunTrace simulate_run(const ProblemInstance& inst, const SimulationConfig& cfg, const Algorithm& alg,
                      std::size_t run) {
  const std::uint64_t horizon = cfg.horizon_for(alg);
  const std::size_t n = inst.num_agents();
  const SimulationParams params{cfg.delta, cfg.eta, cfg.samples_per_round};
  Simulation sim(inst, alg, params, gaussian_source(inst, cfg.seed, run), horizon);

  RunTrace trace;
  trace.algorithm = alg.name;
  trace.run = run;
  trace.horizon = horizon;
  trace.group_means = inst.distinct_means();
  std::vector<std::size_t> group_sizes(trace.group_means.size(), 0);
  for (AgentId a = 0; a < n; ++a) {
    const auto it = std::lower_bound(trace.group_means.begin(), trace.group_means.end(), inst.mean(a));
    const auto g = static_cast<std::size_t>(it - trace.group_means.begin());
    trace.agent_group.push_back(g);
    ++group_sizes[g];
  }
  const bool tracks = alg.tracks_class();
  trace.error_curves.resize(group_sizes.size());
  for (std::size_t g = 0; g < group_sizes.size(); ++g) trace.error_curves[g].resize(horizon, group_sizes[g]);
  if (tracks) {
    trace.precision_curves.resize(group_sizes.size());
    for (std::size_t g = 0; g < group_sizes.size(); ++g) trace.precision_curves[g].resize(horizon, group_sizes[g]);
  }
  const bool full = cfg.trace_mode == TraceMode::full;
  if (full) {
    trace.estimates.assign(n, std::vector<double>(horizon));
    trace.errors.assign(n, std::vector<double>(horizon));
    if (tracks) trace.precisions.assign(n, std::vector<double>(horizon));
  }

  std::vector<std::uint64_t> last_mismatch(n, 0);
  std::vector<std::vector<std::uint64_t>> last_bad(cfg.epsilons.size(), std::vector<std::uint64_t>(n, 0));

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    sim.step();
    for (AgentId a = 0; a < n; ++a) {
      const std::size_t g = trace.agent_group[a];
      const double err = std::abs(sim.estimate(a) - sim.target(a));
      trace.error_curves[g].add(t, err);
      for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
        if (err > cfg.epsilons[e]) last_bad[e][a] = t;
      }
      if (full) {
        trace.estimates[a][t - 1] = sim.estimate(a);
        trace.errors[a][t - 1] = err;
      }
      if (tracks) {
        const AgentSet& cls = sim.estimate_class(a);
        const AgentSet& truth = sim.true_class(a).members;
        const double prec =
            static_cast<double>(intersection_size(cls, truth)) / static_cast<double>(cls.size());
        trace.precision_curves[g].add(t, prec);
        if (full) trace.precisions[a][t - 1] = prec;
        if (cls != truth) last_mismatch[a] = t;
      }
    }
  }

  if (tracks) {
    trace.class_time.resize(n);
    for (AgentId a = 0; a < n; ++a) trace.class_time[a] = settle_time(last_mismatch[a], horizon);
  }
  trace.conv.resize(cfg.epsilons.size());
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    trace.conv[e].resize(n);
    for (AgentId a = 0; a < n; ++a) trace.conv[e][a] = settle_time(last_bad[e][a], horizon);
  }
  return trace;
}

ExperimentResult run_experiment(const SimulationConfig& cfg, const ProblemInstance& inst,
                                 const ProgressCallback& progress) {
  cfg.validate();
  if (cfg.trace_mode == TraceMode::full) {
    double bytes = 0.0;
    for (const auto& alg : cfg.algorithms) {
      bytes += static_cast<double>(cfg.runs) * static_cast<double>(inst.num_agents()) *
               static_cast<double>(cfg.horizon_for(alg)) * 3.0 * sizeof(double);
    }
    if (bytes > static_cast<double>(cfg.trace_memory_budget)) {
      throw ResourceLimitExceeded("full traces need about " + std::to_string(static_cast<std::uint64_t>(bytes)) +
                                  " bytes, over the budget of " + std::to_string(cfg.trace_memory_budget) +
                                  "; use the aggregate trace mode");
    }
  }

  ExperimentResult result;
  result.config = cfg;
  const std::size_t n_alg = cfg.algorithms.size();
  result.traces.resize(cfg.runs * n_alg);

  std::atomic<std::size_t> next_run{0};
  std::size_t completed = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t run = next_run.fetch_add(1);
      if (run >= cfg.runs) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        for (std::size_t k = 0; k < n_alg; ++k) {
          result.traces[run * n_alg + k] = simulate_run(inst, cfg, cfg.algorithms[k], run);
        }
        std::lock_guard lock(mu);
        ++completed;
        if (progress) progress(run, completed, cfg.runs);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads = std::min(cfg.jobs, cfg.runs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace colme
