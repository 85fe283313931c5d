#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "colme/cli.hpp"
#include "colme/manifest.hpp"

namespace {

void add_overrides(CLI::App* cmd, colme::cli::Overrides& ov, std::string& algorithms) {
  cmd->add_option("--seed", ov.seed, "Base seed for instances and sample streams");
  cmd->add_option("--runs", ov.runs, "Number of independent runs");
  cmd->add_option("--horizon", ov.horizon, "Number of synchronous rounds");
  cmd->add_option("--out", ov.out, "Output directory");
  cmd->add_option("--algorithms", algorithms, "Comma-separated algorithm list (e.g. rrr,local,oracle)");
  cmd->add_option("--jobs", ov.jobs, "Worker threads for independent runs")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", ov.quiet, "No progress lines or file listing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative personalized mean estimation simulator"};
  app.require_subcommand(1);

  std::string source;
  std::string algorithms;
  colme::cli::Overrides ov;

  std::string names;
  for (const auto& n : colme::bundled_manifest_names()) names += (names.empty() ? "" : ", ") + n;
  const std::string manifest_help = "Manifest file or bundled name (" + names + ")";

  auto* run = app.add_subcommand("run", "Simulate an experiment and write CSV artifacts");
  auto* validate = app.add_subcommand("validate", "Check a manifest without running it");
  auto* theory = app.add_subcommand("theory", "Write the closed-form theory report only");
  for (auto* cmd : {run, validate, theory}) {
    cmd->add_option("manifest", source, manifest_help)->required();
    add_overrides(cmd, ov, algorithms);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : colme::cli::kValidationFailure;
  }

  if (!algorithms.empty()) {
    std::vector<std::string> list;
    std::stringstream ss(algorithms);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) list.push_back(item);
    }
    ov.algorithms = list;
  }

  if (run->parsed()) return colme::cli::run(source, ov, std::cout, std::cerr);
  if (theory->parsed()) return colme::cli::theory(source, ov, std::cout, std::cerr);
  return colme::cli::validate(source, ov, std::cout, std::cerr);
}
