#include "colme/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "colme/manifest.hpp"
#include "colme/theory.hpp"

namespace colme::cli {

namespace {

namespace fs = std::filesystem;

std::optional<ManifestText> load(const std::string& source, const Overrides& ov, std::ostream& err) {
  ManifestText text;
  try {
    text = load_manifest(source);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return std::nullopt;
  }
  if (ov.seed) text.set("seed", {std::to_string(*ov.seed)});
  if (ov.runs) text.set("runs", {std::to_string(*ov.runs)});
  if (ov.horizon) text.set("horizon", {std::to_string(*ov.horizon)});
  if (ov.out) text.set("output", {*ov.out});
  if (ov.algorithms) {
    text.set("algorithm", *ov.algorithms);
    // horizon.<alg> lines for algorithms dropped by the override go with them
    const auto& keep = *ov.algorithms;
    std::erase_if(text.entries, [&](const ManifestEntry& e) {
      const std::string prefix = "horizon.";
      return e.key.starts_with(prefix) &&
             std::find(keep.begin(), keep.end(), e.key.substr(prefix.size())) == keep.end();
    });
  }
  return text;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_stamp(const fs::path& dir, const ExperimentManifest& m, const ManifestText& text) {
  auto f = open_output(dir / "stamp.txt");
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(text.canonical());
  f << "artifact_version=" << kArtifactVersion << '\n'
    << "manifest=" << m.name << '\n'
    << "seed=" << m.sim.seed << '\n'
    << "config_hash=" << hash.str() << '\n'
    << "created=" << utc_timestamp() << '\n';
}

int execute(const std::string& source, const Overrides& ov, bool theory_only, std::ostream& out,
            std::ostream& err) {
  const auto text = load(source, ov, err);
  if (!text) return kValidationFailure;
  const auto diags = validate_manifest(*text);
  if (!diags.empty()) {
    for (const auto& d : diags) err << "invalid manifest: " << d.to_string() << '\n';
    return kValidationFailure;
  }

  try {
    ExperimentManifest m = build_manifest(*text);
    m.sim.jobs = ov.jobs;
    const ProblemInstance inst = m.instance();
    const BoundConfig bounds = make_bound_config(m.sim.delta, inst.num_agents(), inst.sigma());

    fs::create_directories(m.output_dir);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& file, auto&& writer) {
      const fs::path p = m.output_dir / file;
      auto f = open_output(p);
      writer(f);
      if (!f) throw std::runtime_error("failed writing " + p.string());
      written.push_back(p);
    };

    emit("instance.txt", [&](std::ostream& f) { write_instance(f, inst); });
    emit("theory.csv", [&](std::ostream& f) {
      write_theory_csv(f, theory_report(inst, bounds, m.sim.epsilons, m.sim.eta));
    });

    if (!theory_only && m.mode == RunMode::simulate) {
      ProgressCallback progress;
      if (!ov.quiet) {
        progress = [&err](std::size_t run, std::size_t done, std::size_t total) {
          err << "run " << run << " finished (" << done << "/" << total << ")\n";
        };
      }
      const ExperimentResult result = run_experiment(m.sim, inst, progress);
      emit("curves.csv", [&](std::ostream& f) { write_curves_csv(f, experiment_curves(result)); });
      emit("events.csv", [&](std::ostream& f) { write_events_csv(f, experiment_events(result)); });
      emit("summaries.csv",
           [&](std::ostream& f) { write_summaries_csv(f, experiment_summaries(result, m.aggregation)); });
    }
    write_stamp(m.output_dir, m, *text);
    written.push_back(m.output_dir / "stamp.txt");

    if (!ov.quiet) {
      for (const auto& p : written) out << p.string() << '\n';
    }
    return kSuccess;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace

int run(const std::string& source, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return execute(source, ov, false, out, err);
}

int theory(const std::string& source, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return execute(source, ov, true, out, err);
}

int validate(const std::string& source, const Overrides& ov, std::ostream& out, std::ostream& err) {
  const auto text = load(source, ov, err);
  if (!text) return kValidationFailure;
  const auto diags = validate_manifest(*text);
  for (const auto& d : diags) out << d.to_string() << '\n';
  if (diags.empty() && !ov.quiet) out << "ok\n";
  return diags.empty() ? kSuccess : kValidationFailure;
}

}  // namespace colme::cli
