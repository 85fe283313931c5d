#pragma once
/*
Experiment manifests: flat `key = value` lines, `#` starts a comment, list
keys are repeated.

  name               experiment label
  agents, sigma      instance size and noise scale (with class_mean)
  class_mean         one line per class; membership drawn from the seed
  instance_file      alternative to class_mean: an instance file path,
                     relative to the manifest's directory
  horizon, runs, seed, delta, eta, samples_per_round
  algorithm          rr | rrr | soft-rrr | agg-rrr | local | oracle | eta-rrr
                     or an explicit strategy/scheme pair (e.g. rrr/soft)
  epsilon            one line per target precision
  horizon.<alg>      per-algorithm horizon override
  output             output directory, relative to the working directory
  trace              aggregate | full
  trace_budget_mb    memory ceiling for full traces
  aggregation        runs-then-agents | pooled
  mode               simulate | theory
*/

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "colme/engine.hpp"
#include "colme/metrics.hpp"
#include "colme/model.hpp"

namespace colme {

struct ManifestEntry {
  std::string key;
  std::string value;
  std::size_t line{0};
};

struct ManifestText {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  // where relative instance files are resolved

  // Replaces every entry of `key` with the given values (appended at the end).
  void set(const std::string& key, const std::vector<std::string>& values);
  std::string canonical() const;
};

struct Diagnostic {
  std::string key;
  std::string message;
  std::size_t line{0};  // 0 when not tied to a line

  std::string to_string() const;
};

// Syntax problems (lines without '=') are reported through validate_manifest.
ManifestText parse_manifest_text(const std::string& text, std::filesystem::path base_dir = {});

enum class RunMode { simulate, theory };

struct ExperimentManifest {
  std::string name{"experiment"};
  ClassDescription classes;
  std::optional<std::filesystem::path> instance_file;
  SimulationConfig sim;
  std::filesystem::path output_dir{"out"};
  AggregationOrder aggregation{AggregationOrder::runs_then_agents};
  RunMode mode{RunMode::simulate};

  ProblemInstance instance() const;
};

/// Every violation in the manifest, without running anything.
std::vector<Diagnostic> validate_manifest(const ManifestText& text);

/// Builds the manifest; throws std::invalid_argument listing the diagnostics
/// when validate_manifest reports any.
ExperimentManifest build_manifest(const ManifestText& text);

// Bundled manifests: "paper-3class", "paper-2class".
std::optional<std::string> bundled_manifest(const std::string& name);
std::vector<std::string> bundled_manifest_names();

/// Reads `source` as a file path, falling back to a bundled manifest name.
ManifestText load_manifest(const std::string& source);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace colme
