#pragma once

#include <cstdint>
#include <string_view>

namespace otlab {

/// xoshiro256++ seeded through splitmix64. Substreams derived from the same
/// root are independent and reproducible for any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent substream; identical (root, id) always yields the same stream.
  Rng stream(std::uint64_t id) const;
  /// Substream keyed by a label (check ids etc.).
  Rng stream(std::string_view label) const;

  std::uint64_t next_u64();
  double uniform();                     // [0,1)
  double uniform(double a, double b);   // [a,b)
  double normal();                      // inverse-CDF transform
  std::uint64_t root() const { return root_; }

 private:
  std::uint64_t root_;
  std::uint64_t s_[4];
};

}  // namespace otlab
