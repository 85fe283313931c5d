#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace colme::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kRuntimeFailure = 2 };

// Command-line values that replace the manifest's keys before validation.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> out;
  std::optional<std::vector<std::string>> algorithms;
  std::size_t jobs{1};
  bool quiet{false};
};

int run(const std::string& manifest_source, const Overrides& overrides, std::ostream& out, std::ostream& err);

// Writes the theory report (and instance) only.
int theory(const std::string& manifest_source, const Overrides& overrides, std::ostream& out, std::ostream& err);

int validate(const std::string& manifest_source, const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace colme::cli
