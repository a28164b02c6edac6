#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otlab/verify.hpp"

namespace otlab::cli {

struct SuiteOptions {
  std::uint64_t seed = 42;
  int jobs = 1;
  std::string config_digest;
};

/// The full verification battery (criteria 1-13 of the acceptance suite), in a
/// fixed order. Deterministic for a given seed regardless of the job count.
std::vector<verify::VerificationReport> run_suite(const SuiteOptions& opt);

// individual criterion groups; ids are prefixed "NN-"
std::vector<verify::VerificationReport> crit01_envelope_oracle(const SuiteOptions&);
std::vector<verify::VerificationReport> crit02_example1d(const SuiteOptions&);
std::vector<verify::VerificationReport> crit03_theorem1(const SuiteOptions&);
std::vector<verify::VerificationReport> crit04_second_difference(const SuiteOptions&);
std::vector<verify::VerificationReport> crit05_caffarelli(const SuiteOptions&);
std::vector<verify::VerificationReport> crit06_gmap(const SuiteOptions&);
std::vector<verify::VerificationReport> crit07_moduli_lemma(const SuiteOptions&);
std::vector<verify::VerificationReport> crit08_sodin(const SuiteOptions&);
std::vector<verify::VerificationReport> crit09_ms_modulus(const SuiteOptions&);
std::vector<verify::VerificationReport> crit10_ms_concentration(const SuiteOptions&);
std::vector<verify::VerificationReport> crit11_talagrand_mlsi(const SuiteOptions&);
std::vector<verify::VerificationReport> crit12_marton(const SuiteOptions&);
std::vector<verify::VerificationReport> crit13_nd_section(const SuiteOptions&);

}  // namespace otlab::cli
