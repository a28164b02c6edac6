#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "otlab/measures.hpp"

namespace otlab::cli {

using json = nlohmann::json;

/// Nested key-value experiment configuration. The canonical serialization is
/// the sorted-key JSON dump; config_digest hashes it, so identical configs
/// always produce identical digests.
struct ExperimentConfig {
  std::string command;
  json data;

  static ExperimentConfig defaults(const std::string& command);
  static ExperimentConfig from_file(const std::filesystem::path& p,
                                    const std::string& command);

  /// Apply a --section.key=value override (value parsed as JSON when possible).
  void override_path(const std::string& dotted, const std::string& value);

  std::string canonical() const;
  std::string digest() const;

  double num(const std::string& dotted, double fallback) const;
  std::string str(const std::string& dotted, const std::string& fallback) const;
  std::uint64_t seed() const;
  int jobs() const;
  std::string out_dir() const;
};

/// Measure spec strings: "gaussian[:sigma]", "powerlaw:beta", "huber",
/// "uniform:lo:hi"; dimension given separately.
measures::Potential parse_measure(const std::string& spec, int dim);
/// Body spec strings: "box:lo1:hi1[:lo2:hi2[:lo3:hi3]]",
/// "ball:c1[:c2[:c3]]:radius".
measures::ConvexBody parse_body(const std::string& spec);

/// write-temp-then-rename
void atomic_write(const std::filesystem::path& p, const std::string& content);

/// Artifact header line carrying provenance ("# config_digest=... seed=...").
std::string artifact_header(const std::string& digest, std::uint64_t seed);

/// Minimal SVG polyline plot of (x, y) series.
std::string svg_lineplot(const std::vector<double>& x,
                         const std::vector<std::vector<double>>& ys,
                         const std::string& title);

}  // namespace otlab::cli
