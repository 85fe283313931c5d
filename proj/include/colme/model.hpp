#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "colme/bounds.hpp"

namespace colme {

using AgentId = std::size_t;

// Sorted ascending, no duplicates.
using AgentSet = std::vector<AgentId>;

bool contains(const AgentSet& set, AgentId id);

/// Ground truth: one mean per agent and a shared sub-Gaussian scale.
class ProblemInstance {
 public:
  ProblemInstance(std::vector<double> means, double sigma);

  std::size_t num_agents() const { return means_.size(); }
  double sigma() const { return sigma_; }
  double mean(AgentId a) const { return means_.at(a); }
  const std::vector<double>& means() const { return means_; }

  double gap(AgentId a, AgentId l) const;

  // Smallest gap from `a` to an agent outside its eta-class; empty when every
  // agent is within eta of `a`.
  std::optional<double> separation_gap(AgentId a, double eta = 0.0) const;

  // Distinct means in ascending order.
  std::vector<double> distinct_means() const;

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;

 private:
  std::vector<double> means_;
  double sigma_;
};

/// Instance file: header `A sigma`, then one `agent_id mean` line per agent.
/// Reals are written in shortest round-trip form.
void write_instance(std::ostream& out, const ProblemInstance& inst);
ProblemInstance read_instance(std::istream& in);
void save_instance(const std::filesystem::path& path, const ProblemInstance& inst);
ProblemInstance load_instance(const std::filesystem::path& path);

struct TrueClass {
  AgentId owner{0};
  double eta{0.0};
  AgentSet members;

  std::size_t size() const { return members.size(); }
  bool contains(AgentId l) const { return colme::contains(members, l); }
};

TrueClass true_class(const ProblemInstance& inst, AgentId a, double eta = 0.0);

double class_mean(const ProblemInstance& inst, const TrueClass& cls);

struct ConfidenceInterval {
  double lo;
  double hi;

  static ConfidenceInterval around(double center, double radius) {
    return {center - radius, center + radius};
  }
  double width() const { return hi - lo; }
};

/// One agent's view of the system: (average, sample count) per peer plus the
/// query cursor. The owner's own entry is its local running average, kept as
/// (sum, count) and divided on read. A count of 0 marks a peer that was never
/// queried; its stored average is 0 and must not be consumed.
/// The local sum is kept relative to the first sample seen, which keeps
/// constant streams exact and limits cancellation for large means.
class AgentMemory {
 public:
  AgentMemory(AgentId owner, std::size_t num_agents);

  AgentId owner() const { return owner_; }
  std::size_t num_agents() const { return avgs_.size(); }

  double avg(AgentId l) const { return avgs_[l]; }
  std::uint64_t count(AgentId l) const { return counts_[l]; }
  std::span<const double> avgs() const { return avgs_; }
  std::span<const std::uint64_t> counts() const { return counts_; }

  AgentId cursor() const { return cursor_; }
  void set_cursor(AgentId c);

  // Folds a block of fresh local samples into the owner's running average.
  void perceive(std::span<const double> samples);

  // Overwrites the owner's local statistics (used to build test fixtures).
  void set_local(double avg, std::uint64_t count);

  // Records the statistics obtained by querying `peer` (peer != owner).
  void store(AgentId peer, double avg, std::uint64_t count);

 private:
  AgentId owner_;
  std::vector<double> avgs_;
  std::vector<std::uint64_t> counts_;
  double shift_{0.0};
  double local_sum_{0.0};
  AgentId cursor_;
};

/// |avg_self - avg_peer| - beta(n_self) - beta(n_peer); -inf when either count is 0.
double optimistic_distance(const AgentMemory& mem, AgentId peer, const ConfidenceRadius& radius);

/// Peers not yet provably farther than eta: { l : optimistic_distance(l) <= eta }.
AgentSet optimistic_class(const AgentMemory& mem, const ConfidenceRadius& radius, double eta = 0.0);

// Allocation-free variant for the simulation loop; `out` is overwritten.
void optimistic_class_into(const AgentMemory& mem, const ConfidenceRadius& radius, double eta,
                           AgentSet& out);

}  // namespace colme
