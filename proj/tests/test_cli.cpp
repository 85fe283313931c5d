#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "colme/cli.hpp"

namespace fs = std::filesystem;
using namespace colme;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "colme_cli_test";

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path write_manifest(const std::string& name, const std::string& body) {
  fs::create_directories(kScratch);
  const fs::path p = kScratch / name;
  std::ofstream(p) << body;
  return p;
}

const char* kSmall = R"(name = small
agents = 9
sigma = 0.5
class_mean = 0.2
class_mean = 0.8
horizon = 60
runs = 3
seed = 5
algorithm = rrr
algorithm = oracle
algorithm = local
epsilon = 0.1
horizon.local = 90
)";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(int (*fn)(const std::string&, const cli::Overrides&, std::ostream&, std::ostream&),
                const std::string& source, const cli::Overrides& ov = {}) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = fn(source, ov, out, err);
  return {code, out.str(), err.str()};
}

std::string binary() {
  const char* b = std::getenv("COLME_BINARY");
  return b ? b : "";
}

}  // namespace

TEST_CASE("validate") {
  const auto ok = run_cli(cli::validate, "paper-3class");
  CHECK(ok.code == cli::kSuccess);
  CHECK(ok.out == "ok\n");

  const auto bad = write_manifest("bad.manifest", std::string(kSmall) + "epsilon = 0\nalgorithm = rrr/oracle\n");
  const auto res = run_cli(cli::validate, bad.string());
  CHECK(res.code == cli::kValidationFailure);
  CHECK(res.out.find("epsilon must be positive") != std::string::npos);
  CHECK(res.out.find("[algorithm]") != std::string::npos);

  CHECK(run_cli(cli::validate, (kScratch / "missing.manifest").string()).code == cli::kValidationFailure);
}

TEST_CASE("run and theory refuse invalid manifests") {
  const auto bad = write_manifest("bad2.manifest", std::string(kSmall) + "colour = red\n");
  const auto r = run_cli(cli::run, bad.string());
  CHECK(r.code == cli::kValidationFailure);
  CHECK(r.err.find("[colour] unknown key") != std::string::npos);
  CHECK(run_cli(cli::theory, bad.string()).code == cli::kValidationFailure);
}

TEST_CASE("run writes reproducible artifacts") {
  const auto m = write_manifest("small.manifest", kSmall);
  cli::Overrides first;
  first.out = (kScratch / "out1").string();
  const auto r1 = run_cli(cli::run, m.string(), first);
  REQUIRE(r1.code == cli::kSuccess);
  for (const char* f : {"instance.txt", "theory.csv", "curves.csv", "events.csv", "summaries.csv", "stamp.txt"}) {
    CHECK(fs::exists(kScratch / "out1" / f));
    CHECK(r1.out.find(f) != std::string::npos);
  }
  // progress goes to stderr, one line per run
  CHECK(r1.err.find("run 0 finished") != std::string::npos);
  CHECK(r1.out.find("finished") == std::string::npos);

  cli::Overrides second;
  second.out = (kScratch / "out2").string();
  second.jobs = 3;
  second.quiet = true;
  const auto r2 = run_cli(cli::run, m.string(), second);
  REQUIRE(r2.code == cli::kSuccess);
  CHECK(r2.out.empty());
  CHECK(r2.err.empty());
  for (const char* f : {"instance.txt", "theory.csv", "curves.csv", "events.csv", "summaries.csv"}) {
    CHECK(slurp(kScratch / "out1" / f) == slurp(kScratch / "out2" / f));
  }

  const auto stamp = slurp(kScratch / "out1" / "stamp.txt");
  CHECK(stamp.find("artifact_version=1.0.0\n") != std::string::npos);
  CHECK(stamp.find("manifest=small\n") != std::string::npos);
  CHECK(stamp.find("seed=5\n") != std::string::npos);
  CHECK(stamp.find("config_hash=") != std::string::npos);
  CHECK(stamp.find("created=") != std::string::npos);

  const auto events = slurp(kScratch / "out1" / "events.csv");
  CHECK(events.rfind("algorithm,agent,run,class,metric,value\n", 0) == 0);
  CHECK(events.find("local,8,2,") != std::string::npos);
  CHECK(slurp(kScratch / "out1" / "theory.csv").rfind("agent_id,class_mean,class_size,n_star_self,zeta,eps,tau,", 0) == 0);
}

TEST_CASE("overrides change the run") {
  const auto m = write_manifest("small.manifest", kSmall);
  cli::Overrides ov;
  ov.out = (kScratch / "out3").string();
  ov.seed = 99;
  ov.runs = 1;
  ov.horizon = 20;
  ov.algorithms = std::vector<std::string>{"rr"};
  ov.quiet = true;
  // horizon.local goes away together with local
  REQUIRE(run_cli(cli::run, m.string(), ov).code == cli::kSuccess);
  const auto summaries = slurp(kScratch / "out3" / "summaries.csv");
  CHECK(summaries.find("\nrr,all,class_time,") != std::string::npos);
  CHECK(summaries.find("rrr") == std::string::npos);
  CHECK(slurp(kScratch / "out3" / "stamp.txt").find("seed=99\n") != std::string::npos);

  // an override that keeps local keeps its horizon
  ov.algorithms = std::vector<std::string>{"local"};
  ov.out = (kScratch / "out4").string();
  REQUIRE(run_cli(cli::run, m.string(), ov).code == cli::kSuccess);
  CHECK(slurp(kScratch / "out4" / "curves.csv").find("\nlocal,all,error,90,") != std::string::npos);
  CHECK(run_cli(cli::validate, m.string(), ov).code == cli::kSuccess);
}

TEST_CASE("theory writes the report only") {
  const auto m = write_manifest("small.manifest", kSmall);
  cli::Overrides ov;
  ov.out = (kScratch / "theory").string();
  ov.quiet = true;
  REQUIRE(run_cli(cli::theory, m.string(), ov).code == cli::kSuccess);
  CHECK(fs::exists(kScratch / "theory" / "theory.csv"));
  CHECK(fs::exists(kScratch / "theory" / "stamp.txt"));
  CHECK_FALSE(fs::exists(kScratch / "theory" / "curves.csv"));

  const auto tm = write_manifest("theory.manifest", std::string(kSmall) + "mode = theory\n");
  ov.out = (kScratch / "theory_mode").string();
  REQUIRE(run_cli(cli::run, tm.string(), ov).code == cli::kSuccess);
  CHECK_FALSE(fs::exists(kScratch / "theory_mode" / "events.csv"));
}

TEST_CASE("runtime failures exit with 2") {
  fs::create_directories(kScratch);
  std::ofstream(kScratch / "blocker") << "x";
  const auto m = write_manifest("small.manifest", kSmall);
  cli::Overrides ov;
  ov.out = (kScratch / "blocker" / "sub").string();
  ov.quiet = true;
  CHECK(run_cli(cli::run, m.string(), ov).code == cli::kRuntimeFailure);

  const auto big = write_manifest("big.manifest", std::string(kSmall) + "trace = full\ntrace_budget_mb = 1\nruns = 1\n");
  ov.out = (kScratch / "big").string();
  // runs given twice is a validation problem, so set it through the override instead
  CHECK(run_cli(cli::run, big.string(), ov).code == cli::kValidationFailure);
  const auto big2 = write_manifest(
      "big2.manifest", std::string(kSmall) + "trace = full\ntrace_budget_mb = 1\nhorizon.rrr = 100000\n");
  const auto res = run_cli(cli::run, big2.string(), ov);
  CHECK(res.code == cli::kRuntimeFailure);
  CHECK(res.err.find("budget") != std::string::npos);
}

TEST_CASE("command-line binary") {
  const std::string bin = binary();
  if (bin.empty()) {
    MESSAGE("COLME_BINARY not set; skipping binary checks");
    return;
  }
  const auto m = write_manifest("small.manifest", kSmall);
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("validate paper-3class") == 0);
  CHECK(status("validate paper-2class --quiet") == 0);
  CHECK(status("") == 1);
  CHECK(status("frobnicate") == 1);
  CHECK(status("run") == 1);
  CHECK(status("validate nowhere.manifest") == 1);
  CHECK(status("run " + m.string() + " --quiet --runs 1 --horizon 15 --algorithms rrr,local --jobs 2 --out " +
               (kScratch / "bin").string()) == 0);
  CHECK(fs::exists(kScratch / "bin" / "curves.csv"));
  CHECK(status("theory paper-3class --quiet --out " + (kScratch / "bin_theory").string()) == 0);
  const auto theory = slurp(kScratch / "bin_theory" / "theory.csv");
  CHECK(theory.find(",0.1,") != std::string::npos);
  CHECK(status("run " + m.string() + " --jobs 0") == 1);
  fs::remove_all(kScratch);
}
