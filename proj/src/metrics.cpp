#include "colme/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "colme/format.hpp"

namespace colme {

double precision(const AgentSet& optimistic, const AgentSet& truth) {
  if (optimistic.empty()) throw std::invalid_argument("precision: empty optimistic class");
  std::size_t hits = 0;
  for (AgentId l : optimistic) hits += contains(truth, l) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(optimistic.size());
}

double error(double estimate, double target) { return std::abs(estimate - target); }

std::optional<std::uint64_t> convergence_time(std::span<const double> errors, double epsilon) {
  if (errors.empty() || errors.back() > epsilon) return std::nullopt;
  std::uint64_t t = errors.size();
  while (t > 1 && errors[t - 2] <= epsilon) --t;
  return t;
}

namespace {

struct Moments {
  double sum{0.0};
  double sumsq{0.0};
  double max{-kInfinity};
  std::size_t n{0};

  void add(double v) {
    sum += v;
    sumsq += v * v;
    max = std::max(max, v);
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double std() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sumsq / static_cast<double>(n) - m * m));
  }
};

}  // namespace

Summary summarize(std::span<const std::optional<double>> values) {
  Moments m;
  Summary s;
  for (const auto& v : values) {
    if (v) {
      m.add(*v);
    } else {
      ++s.not_converged;
    }
  }
  if (m.n > 0) {
    s.avg = m.mean();
    s.std = m.std();
    s.max = m.max;
  }
  s.count = m.n;
  s.contributors = m.n;
  return s;
}

Summary aggregate(const std::vector<std::vector<std::optional<double>>>& values, const AgentSet& agents,
                  AggregationOrder order) {
  if (order == AggregationOrder::pooled) {
    std::vector<std::optional<double>> flat;
    for (const auto& run : values) {
      for (AgentId a : agents) flat.push_back(run.at(a));
    }
    return summarize(flat);
  }

  Summary s;
  Moments per_agent_means;
  double std_sum = 0.0;
  double overall_max = -kInfinity;
  std::vector<std::optional<double>> column;
  for (AgentId a : agents) {
    column.clear();
    for (const auto& run : values) column.push_back(run.at(a));
    const Summary agent = summarize(column);
    s.not_converged += agent.not_converged;
    s.count += agent.count;
    if (agent.count == 0) continue;
    per_agent_means.add(agent.avg);
    std_sum += agent.std;
    overall_max = std::max(overall_max, agent.max);
  }
  s.contributors = per_agent_means.n;
  if (per_agent_means.n > 0) {
    s.avg = per_agent_means.mean();
    s.std = std_sum / static_cast<double>(per_agent_means.n);
    s.max = overall_max;
  }
  return s;
}

std::string conv_metric_name(double epsilon) { return "conv(" + format_real(epsilon) + ")"; }

std::string group_label(double class_mean) { return format_real(class_mean); }

namespace {

std::size_t algorithm_index(const ExperimentResult& result, const std::string& algorithm) {
  const auto& algs = result.config.algorithms;
  for (std::size_t k = 0; k < algs.size(); ++k) {
    if (algs[k].name == algorithm) return k;
  }
  throw std::invalid_argument("unknown algorithm '" + algorithm + "' in experiment result");
}

std::vector<std::string> metric_names(const ExperimentResult& result, const RunTrace& sample) {
  std::vector<std::string> names;
  if (sample.tracks_class()) names.emplace_back("class_time");
  for (double e : result.config.epsilons) names.push_back(conv_metric_name(e));
  return names;
}

std::vector<CurvePoint> pooled_curve(const std::vector<const CurveSums*>& parts) {
  const std::size_t horizon = parts.front()->sum.size();
  std::size_t population = 0;
  for (const auto* p : parts) population += p->population;
  std::vector<CurvePoint> points(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    double s = 0.0;
    double ss = 0.0;
    for (const auto* p : parts) {
      s += p->sum[i];
      ss += p->sumsq[i];
    }
    const double n = static_cast<double>(population);
    const double mean = s / n;
    points[i] = {mean, std::sqrt(std::max(0.0, ss / n - mean * mean))};
  }
  return points;
}

}  // namespace

std::vector<MetricCurve> experiment_curves(const ExperimentResult& result) {
  std::vector<MetricCurve> curves;
  const std::size_t n_alg = result.config.algorithms.size();
  for (std::size_t k = 0; k < n_alg; ++k) {
    std::vector<const RunTrace*> traces;
    for (std::size_t r = 0; r < result.config.runs; ++r) traces.push_back(&result.trace(r, k));
    const RunTrace& first = *traces.front();

    auto emit = [&](const std::string& metric, auto member) {
      const std::size_t n_groups = first.group_means.size();
      std::vector<const CurveSums*> all;
      for (const auto* tr : traces) {
        for (const auto& c : tr->*member) all.push_back(&c);
      }
      curves.push_back({first.algorithm, "all", metric, pooled_curve(all)});
      for (std::size_t g = 0; g < n_groups; ++g) {
        std::vector<const CurveSums*> parts;
        for (const auto* tr : traces) parts.push_back(&(tr->*member)[g]);
        curves.push_back({first.algorithm, group_label(first.group_means[g]), metric, pooled_curve(parts)});
      }
    };
    emit("error", &RunTrace::error_curves);
    if (first.tracks_class()) emit("precision", &RunTrace::precision_curves);
  }
  return curves;
}

std::vector<std::vector<std::optional<double>>> event_table(const ExperimentResult& result,
                                                            const std::string& algorithm,
                                                            const std::string& metric) {
  const std::size_t k = algorithm_index(result, algorithm);
  std::vector<std::vector<std::optional<double>>> table;
  for (std::size_t r = 0; r < result.config.runs; ++r) {
    const RunTrace& tr = result.trace(r, k);
    const std::vector<std::optional<std::uint64_t>>* source = nullptr;
    if (metric == "class_time") {
      if (!tr.tracks_class()) throw std::invalid_argument("algorithm '" + algorithm + "' does not track classes");
      source = &tr.class_time;
    } else {
      for (std::size_t e = 0; e < result.config.epsilons.size(); ++e) {
        if (conv_metric_name(result.config.epsilons[e]) == metric) source = &tr.conv[e];
      }
      if (!source) throw std::invalid_argument("unknown metric '" + metric + "'");
    }
    std::vector<std::optional<double>> row;
    row.reserve(source->size());
    for (const auto& v : *source) {
      row.push_back(v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt);
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<EventRow> experiment_events(const ExperimentResult& result) {
  std::vector<EventRow> rows;
  const std::size_t n_alg = result.config.algorithms.size();
  for (std::size_t k = 0; k < n_alg; ++k) {
    for (std::size_t r = 0; r < result.config.runs; ++r) {
      const RunTrace& tr = result.trace(r, k);
      for (AgentId a = 0; a < tr.agent_group.size(); ++a) {
        const std::string group = group_label(tr.group_means[tr.agent_group[a]]);
        auto as_real = [](const std::optional<std::uint64_t>& v) {
          return v ? std::optional<double>(static_cast<double>(*v)) : std::nullopt;
        };
        if (tr.tracks_class()) rows.push_back({tr.algorithm, a, r, group, "class_time", as_real(tr.class_time[a])});
        for (std::size_t e = 0; e < result.config.epsilons.size(); ++e) {
          rows.push_back({tr.algorithm, a, r, group, conv_metric_name(result.config.epsilons[e]),
                          as_real(tr.conv[e][a])});
        }
      }
    }
  }
  return rows;
}

std::vector<SummaryRow> experiment_summaries(const ExperimentResult& result, AggregationOrder order) {
  std::vector<SummaryRow> rows;
  for (std::size_t k = 0; k < result.config.algorithms.size(); ++k) {
    const RunTrace& first = result.trace(0, k);
    std::vector<AgentSet> groups(first.group_means.size());
    AgentSet everyone;
    for (AgentId a = 0; a < first.agent_group.size(); ++a) {
      groups[first.agent_group[a]].push_back(a);
      everyone.push_back(a);
    }
    for (const auto& metric : metric_names(result, first)) {
      const auto table = event_table(result, first.algorithm, metric);
      rows.push_back({first.algorithm, "all", metric, aggregate(table, everyone, order)});
      for (std::size_t g = 0; g < groups.size(); ++g) {
        rows.push_back({first.algorithm, group_label(first.group_means[g]), metric, aggregate(table, groups[g], order)});
      }
    }
  }
  return rows;
}

void write_curves_csv(std::ostream& out, const std::vector<MetricCurve>& curves) {
  out << "algorithm,class,metric,t,mean,std\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      out << c.algorithm << ',' << c.group << ',' << c.metric << ',' << (i + 1) << ','
          << format_real(c.points[i].mean) << ',' << format_real(c.points[i].std) << '\n';
    }
  }
}

void write_events_csv(std::ostream& out, const std::vector<EventRow>& events) {
  out << "algorithm,agent,run,class,metric,value\n";
  for (const auto& e : events) {
    out << e.algorithm << ',' << e.agent << ',' << e.run << ',' << e.group << ',' << e.metric << ','
        << (e.value ? format_real(*e.value) : std::string("NA")) << '\n';
  }
}

void write_summaries_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "algorithm,class,metric,avg,std,max,not_converged_count\n";
  for (const auto& r : rows) {
    const bool empty = r.summary.count == 0;
    out << r.algorithm << ',' << r.group << ',' << r.metric << ','
        << (empty ? std::string("NA") : format_real(r.summary.avg)) << ','
        << (empty ? std::string("NA") : format_real(r.summary.std)) << ','
        << (empty ? std::string("NA") : format_real(r.summary.max)) << ',' << r.summary.not_converged << '\n';
  }
}

}  // namespace colme
