#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colme/engine.hpp"
#include "colme/model.hpp"

namespace colme {

/// |optimistic ∩ truth| / |optimistic|; both sets sorted.
double precision(const AgentSet& optimistic, const AgentSet& truth);

double error(double estimate, double target);

/// Smallest tau with errors[t] <= epsilon for every t in [tau, H] (1-based);
/// nothing when the last error exceeds epsilon.
std::optional<std::uint64_t> convergence_time(std::span<const double> errors, double epsilon);

struct Summary {
  double avg{0.0};
  double std{0.0};  // population standard deviation
  double max{0.0};
  std::size_t count{0};          // values that entered avg/std/max
  std::size_t contributors{0};   // agents (runs-then-agents) or values (pooled)
  std::size_t not_converged{0};  // missing values, excluded from the statistics
};

// Pooled avg/std/max over present values; missing ones are only counted.
Summary summarize(std::span<const std::optional<double>> values);

enum class AggregationOrder {
  runs_then_agents,  // per-agent avg/std over runs, then averaged over agents
  pooled,            // every (agent, run) value treated alike
};

/// values[run][agent], restricted to `agents`.
Summary aggregate(const std::vector<std::vector<std::optional<double>>>& values, const AgentSet& agents,
                  AggregationOrder order);

// ---------------------------------------------------------------------------
// Experiment post-processing

struct CurvePoint {
  double mean{0.0};
  double std{0.0};
};

struct MetricCurve {
  std::string algorithm;
  std::string group;   // "all" or the class mean
  std::string metric;  // "error" or "precision"
  std::vector<CurvePoint> points;  // index t - 1
};

/// Per-step mean/std pooled over the agents of each class (and "all") and runs.
std::vector<MetricCurve> experiment_curves(const ExperimentResult& result);

struct EventRow {
  std::string algorithm;
  AgentId agent{0};
  std::size_t run{0};
  std::string group;
  std::string metric;  // "class_time" or "conv(<eps>)"
  std::optional<double> value;
};

std::vector<EventRow> experiment_events(const ExperimentResult& result);

struct SummaryRow {
  std::string algorithm;
  std::string group;
  std::string metric;
  Summary summary;
};

std::vector<SummaryRow> experiment_summaries(const ExperimentResult& result, AggregationOrder order);

// Event values of one algorithm/metric as values[run][agent].
std::vector<std::vector<std::optional<double>>> event_table(const ExperimentResult& result,
                                                            const std::string& algorithm,
                                                            const std::string& metric);

std::string conv_metric_name(double epsilon);
std::string group_label(double class_mean);

void write_curves_csv(std::ostream& out, const std::vector<MetricCurve>& curves);
void write_events_csv(std::ostream& out, const std::vector<EventRow>& events);
void write_summaries_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace colme
