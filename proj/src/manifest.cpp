#include "colme/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bundled_manifests.hpp"

namespace colme {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

const std::set<std::string>& single_keys() {
  static const std::set<std::string> keys = {
      "name",  "agents",  "sigma", "instance_file", "horizon", "runs",        "seed",
      "delta", "eta",     "samples_per_round",      "output",  "trace",       "trace_budget_mb",
      "aggregation",      "mode"};
  return keys;
}

const std::set<std::string>& list_keys() {
  static const std::set<std::string> keys = {"class_mean", "algorithm", "epsilon"};
  return keys;
}

constexpr std::string_view kOverridePrefix = "horizon.";

// Shared by validate_manifest and build_manifest so both accept the same inputs.
struct Checked {
  std::vector<Diagnostic> diagnostics;
  ExperimentManifest manifest;
};

Checked check(const ManifestText& text) {
  Checked out;
  auto& diags = out.diagnostics;
  auto& m = out.manifest;
  auto report = [&](const std::string& key, const std::string& msg, std::size_t line) {
    diags.push_back({key, msg, line});
  };

  std::map<std::string, const ManifestEntry*> singles;
  std::map<std::string, std::vector<const ManifestEntry*>> lists;
  std::vector<const ManifestEntry*> overrides;

  for (const auto& e : text.entries) {
    if (e.key.empty()) {
      report("", "expected 'key = value', got '" + e.value + "'", e.line);
    } else if (single_keys().count(e.key)) {
      if (singles.count(e.key)) {
        report(e.key, "key given more than once", e.line);
      } else {
        singles[e.key] = &e;
      }
    } else if (list_keys().count(e.key)) {
      lists[e.key].push_back(&e);
    } else if (e.key.rfind(kOverridePrefix, 0) == 0) {
      overrides.push_back(&e);
    } else {
      report(e.key, "unknown key", e.line);
    }
  }

  auto single = [&](const std::string& key) -> const ManifestEntry* {
    auto it = singles.find(key);
    return it == singles.end() ? nullptr : it->second;
  };
  auto uint_key = [&](const std::string& key, std::uint64_t min, auto assign) {
    if (const auto* e = single(key)) {
      const auto v = to_uint(e->value);
      if (!v || *v < min) {
        report(key, key + " must be an integer >= " + std::to_string(min) + ", got '" + e->value + "'", e->line);
      } else {
        assign(*v);
      }
    }
  };
  auto real_key = [&](const std::string& key, auto ok, const std::string& rule, auto assign) {
    if (const auto* e = single(key)) {
      const auto v = to_real(e->value);
      if (!v || !ok(*v)) {
        report(key, key + " " + rule + ", got '" + e->value + "'", e->line);
      } else {
        assign(*v);
      }
    }
  };

  if (const auto* e = single("name")) m.name = e->value;
  if (const auto* e = single("output")) m.output_dir = e->value;

  // Instance
  const bool has_classes = lists.count("class_mean") > 0;
  if (const auto* e = single("instance_file")) {
    if (has_classes) report("instance_file", "instance_file and class_mean are mutually exclusive", e->line);
    std::filesystem::path p = e->value;
    if (p.is_relative()) p = text.base_dir / p;
    if (!std::filesystem::is_regular_file(p)) {
      report("instance_file", "instance file '" + p.string() + "' does not exist", e->line);
    } else {
      m.instance_file = p;
      try {
        const ProblemInstance inst = load_instance(p);
        m.classes.num_agents = inst.num_agents();
        m.classes.sigma = inst.sigma();
        if (!(inst.sigma() > 0.0)) report("instance_file", "instance sigma must be positive", e->line);
      } catch (const std::exception& ex) {
        report("instance_file", ex.what(), e->line);
      }
    }
    for (const char* k : {"agents", "sigma"}) {
      if (const auto* extra = single(k)) report(k, std::string(k) + " comes from the instance file", extra->line);
    }
  } else if (!has_classes) {
    report("class_mean", "either class_mean or instance_file is required", 0);
  } else {
    std::vector<double> means;
    for (const auto* c : lists["class_mean"]) {
      const auto v = to_real(c->value);
      if (!v) {
        report("class_mean", "class_mean must be a real, got '" + c->value + "'", c->line);
      } else if (std::find(means.begin(), means.end(), *v) != means.end()) {
        report("class_mean", "duplicate class mean " + c->value, c->line);
      } else {
        means.push_back(*v);
      }
    }
    m.classes.class_means = means;
    if (!single("agents")) report("agents", "agents is required with class_mean", 0);
    uint_key("agents", 1, [&](std::uint64_t v) { m.classes.num_agents = v; });
    if (m.classes.num_agents > 0 && m.classes.num_agents < means.size()) {
      report("agents", "agents must be at least the number of classes", single("agents")->line);
    }
    real_key("sigma", [](double v) { return v > 0.0; }, "must be positive",
             [&](double v) { m.classes.sigma = v; });
  }

  // Simulation
  auto& sim = m.sim;
  sim.runs = 20;
  uint_key("horizon", 1, [&](std::uint64_t v) { sim.horizon = v; });
  uint_key("runs", 1, [&](std::uint64_t v) { sim.runs = v; });
  uint_key("seed", 0, [&](std::uint64_t v) { sim.seed = v; });
  uint_key("samples_per_round", 1, [&](std::uint64_t v) { sim.samples_per_round = v; });
  real_key("delta", [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0, 1)",
           [&](double v) { sim.delta = v; });
  real_key("eta", [](double v) { return v >= 0.0; }, "must be non-negative", [&](double v) { sim.eta = v; });
  uint_key("trace_budget_mb", 1, [&](std::uint64_t v) { sim.trace_memory_budget = v << 20; });

  if (const auto* e = single("trace")) {
    if (e->value == "aggregate") {
      sim.trace_mode = TraceMode::aggregate;
    } else if (e->value == "full") {
      sim.trace_mode = TraceMode::full;
    } else {
      report("trace", "trace must be 'aggregate' or 'full', got '" + e->value + "'", e->line);
    }
  }
  if (const auto* e = single("aggregation")) {
    if (e->value == "runs-then-agents") {
      m.aggregation = AggregationOrder::runs_then_agents;
    } else if (e->value == "pooled") {
      m.aggregation = AggregationOrder::pooled;
    } else {
      report("aggregation", "aggregation must be 'runs-then-agents' or 'pooled', got '" + e->value + "'", e->line);
    }
  }
  if (const auto* e = single("mode")) {
    if (e->value == "simulate") {
      m.mode = RunMode::simulate;
    } else if (e->value == "theory") {
      m.mode = RunMode::theory;
    } else {
      report("mode", "mode must be 'simulate' or 'theory', got '" + e->value + "'", e->line);
    }
  }

  if (!lists.count("algorithm") && m.mode == RunMode::simulate) {
    report("algorithm", "at least one algorithm is required", 0);
  }
  std::set<std::string> seen_algs;
  for (const auto* e : lists["algorithm"]) {
    const auto alg = parse_algorithm(e->value);
    if (!alg) {
      std::string why = "unknown algorithm '" + e->value + "'";
      const auto slash = e->value.find('/');
      if (slash != std::string::npos) {
        const auto st = parse_strategy(e->value.substr(0, slash));
        const auto sc = parse_scheme(e->value.substr(slash + 1));
        if (st && sc) why = "algorithm '" + e->value + "': " + algorithm_mismatch(*st, *sc);
      }
      report("algorithm", why, e->line);
    } else if (!seen_algs.insert(alg->name).second) {
      report("algorithm", "duplicate algorithm '" + e->value + "'", e->line);
    } else {
      sim.algorithms.push_back(*alg);
    }
  }

  if (!lists.count("epsilon")) report("epsilon", "at least one epsilon is required", 0);
  for (const auto* e : lists["epsilon"]) {
    const auto v = to_real(e->value);
    if (!v) {
      report("epsilon", "epsilon must be a real, got '" + e->value + "'", e->line);
    } else if (!(*v > 0.0)) {
      report("epsilon", "epsilon must be positive", e->line);
    } else {
      sim.epsilons.push_back(*v);
    }
  }

  for (const auto* e : overrides) {
    const std::string alg = e->key.substr(kOverridePrefix.size());
    const auto v = to_uint(e->value);
    if (!seen_algs.count(alg)) {
      report(e->key, "horizon override for algorithm '" + alg + "', which is not configured", e->line);
    } else if (!v || *v < 1) {
      report(e->key, "horizon override must be an integer >= 1, got '" + e->value + "'", e->line);
    } else if (sim.horizon_overrides.count(alg)) {
      report(e->key, "key given more than once", e->line);
    } else {
      sim.horizon_overrides[alg] = *v;
    }
  }
  return out;
}

}  // namespace

void ManifestText::set(const std::string& key, const std::vector<std::string>& values) {
  std::erase_if(entries, [&](const ManifestEntry& e) { return e.key == key; });
  for (const auto& v : values) entries.push_back({key, v, 0});
}

std::string ManifestText::canonical() const {
  std::string out;
  for (const auto& e : entries) out += e.key + " = " + e.value + "\n";
  return out;
}

std::string Diagnostic::to_string() const {
  std::string s;
  if (line > 0) s += "line " + std::to_string(line) + ": ";
  if (!key.empty()) s += "[" + key + "] ";
  return s + message;
}

ManifestText parse_manifest_text(const std::string& text, std::filesystem::path base_dir) {
  ManifestText out;
  out.base_dir = std::move(base_dir);
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      out.entries.push_back({"", line, line_no});
    } else {
      out.entries.push_back({trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                             line_no});
    }
  }
  return out;
}

std::vector<Diagnostic> validate_manifest(const ManifestText& text) { return check(text).diagnostics; }

ExperimentManifest build_manifest(const ManifestText& text) {
  Checked c = check(text);
  if (!c.diagnostics.empty()) {
    std::string msg = "invalid manifest:";
    for (const auto& d : c.diagnostics) msg += "\n  " + d.to_string();
    throw std::invalid_argument(msg);
  }
  return std::move(c.manifest);
}

ProblemInstance ExperimentManifest::instance() const {
  if (instance_file) return load_instance(*instance_file);
  return make_instance(classes, sim.seed);
}

std::optional<std::string> bundled_manifest(const std::string& name) {
  for (const auto& b : kBundledManifests) {
    if (name == b.name) return std::string(b.text);
  }
  return std::nullopt;
}

std::vector<std::string> bundled_manifest_names() {
  std::vector<std::string> names;
  for (const auto& b : kBundledManifests) names.emplace_back(b.name);
  return names;
}

ManifestText load_manifest(const std::string& source) {
  const std::filesystem::path p = source;
  if (std::filesystem::is_regular_file(p)) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_manifest_text(buf.str(), p.parent_path());
  }
  if (auto text = bundled_manifest(source)) return parse_manifest_text(*text, std::filesystem::current_path());
  throw std::runtime_error("no manifest file or bundled manifest named '" + source + "'");
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace colme
