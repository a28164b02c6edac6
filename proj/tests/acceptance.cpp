// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. An optional list of criterion
// numbers (1..14) selects a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "otlab/suite.hpp"
#include "otlab/verify.hpp"

namespace fs = std::filesystem;
using otlab::cli::SuiteOptions;
using otlab::verify::VerificationReport;

namespace {

struct Criterion {
  int id;
  const char* title;
  std::function<std::vector<VerificationReport>(const SuiteOptions&)> fn;
  double runtime_cap_s;  // <= 0: no stated cap
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// criterion 14: byte-identical suite reports across invocations and worker counts
std::vector<VerificationReport> determinism_criterion(const SuiteOptions& opt) {
  VerificationReport r;
  r.check_id = "14-determinism";
  r.anchor = "suite-byte-identical-reports";
  r.slack = 1.0;
  r.theoretical = 0;
  r.seed = opt.seed;
#ifndef OTLAB_CLI_PATH
  r.inconclusive = true;
  r.notes = "CLI path not configured";
  return {r};
#else
  const std::string cli = OTLAB_CLI_PATH;
  const fs::path base = fs::temp_directory_path() / "otlab_acceptance_14";
  fs::remove_all(base);
  const struct {
    const char* name;
    int jobs;
  } runs[] = {{"a", 1}, {"b", 1}, {"c", 8}};
  std::vector<std::string> payloads;
  for (const auto& run : runs) {
    const fs::path out = base / run.name;
    char cmd[1024];
    std::snprintf(cmd, sizeof cmd,
                  "%s suite --seed %llu --jobs=%d --out %s > /dev/null 2>&1",
                  cli.c_str(), static_cast<unsigned long long>(opt.seed),
                  run.jobs, out.string().c_str());
    const int rc = std::system(cmd);
    if (rc != 0 && WEXITSTATUS(rc) != 0 && WEXITSTATUS(rc) != 1) {
      r.inconclusive = true;
      r.notes = std::string("suite run failed: ") + cmd;
      return {r};
    }
    payloads.push_back(slurp(out / "reports.json"));
  }
  const bool repeat_equal = payloads[0] == payloads[1];
  const bool jobs_equal = payloads[0] == payloads[2];
  r.empirical = (repeat_equal ? 0.0 : 1.0) + (jobs_equal ? 0.0 : 2.0);
  r.passed = repeat_equal && jobs_equal && !payloads[0].empty();
  r.notes = std::string("repeat=") + (repeat_equal ? "identical" : "DIFFERS") +
            " jobs-1-vs-8=" + (jobs_equal ? "identical" : "DIFFERS");
  fs::remove_all(base);
  return {r};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  using otlab::cli::SuiteOptions;
  SuiteOptions opt;
  opt.seed = 42;
  opt.jobs = 1;
  opt.config_digest = "acceptance";

  const std::vector<Criterion> criteria = {
      {1, "envelope closed form vs ODE oracle", otlab::cli::crit01_envelope_oracle, 10},
      {2, "1D uniform-target tightness", otlab::cli::crit02_example1d, 5},
      {3, "derivative Hoelder bound (exact 1D pair)", otlab::cli::crit03_theorem1, 30},
      {4, "second-difference bound and sharper remark", otlab::cli::crit04_second_difference, 0},
      {5, "refined Lipschitz bound 1/sqrt(K)", otlab::cli::crit05_caffarelli, 0},
      {6, "G-map pushforward KS distance", otlab::cli::crit06_gmap, 0},
      {7, "modulus chain inequality on random potentials", otlab::cli::crit07_moduli_lemma, 0},
      {8, "gradient vs second-difference bound", otlab::cli::crit08_sodin, 0},
      {9, "modulus gradient bound (1D exact, 2D entropic)", otlab::cli::crit09_ms_modulus, 0},
      {10, "concentration profile bounds", otlab::cli::crit10_ms_concentration, 60},
      {11, "transport-entropy and modified log-Sobolev", otlab::cli::crit11_talagrand_mlsi, 0},
      {12, "Marton enlargement bound", otlab::cli::crit12_marton, 0},
      {13, "2D entropic Lipschitz and envelope bounds", otlab::cli::crit13_nd_section, 300},
      {14, "suite determinism across runs and worker counts", determinism_criterion, 0},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  bool all_ok = true;
  for (const auto& c : criteria) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.id) == wanted.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<VerificationReport> reports;
    std::string error;
    try {
      reports = c.fn(opt);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool ok = error.empty() && !reports.empty();
    for (const auto& r : reports) ok = ok && r.passed;
    const bool time_ok = c.runtime_cap_s <= 0 || secs < c.runtime_cap_s;
    ok = ok && time_ok;
    all_ok = all_ok && ok;
    std::printf("[%s] %02d %-48s (%.1fs%s)\n", ok ? "PASS" : "FAIL", c.id,
                c.title, secs,
                c.runtime_cap_s > 0
                    ? (std::string(" / cap ") +
                       std::to_string(static_cast<int>(c.runtime_cap_s)) + "s")
                          .c_str()
                    : "");
    if (!error.empty()) std::printf("       error: %s\n", error.c_str());
    for (const auto& r : reports) {
      std::printf("       %-36s %s  empirical=%.6g bound=%.6g slack=%.3g%s%s\n",
                  r.check_id.c_str(), r.passed ? "pass" : "FAIL", r.empirical,
                  r.theoretical, r.slack, r.vacuous ? " (vacuous)" : "",
                  r.inconclusive ? " (inconclusive)" : "");
      if (!r.notes.empty()) std::printf("         note: %s\n", r.notes.c_str());
    }
  }
  return all_ok ? 0 : 1;
}
