#pragma once

#include <cstdint>
#include <limits>

namespace maxcorr {

/// SplitMix64 step; used for seeding and for deriving substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** (Blackman & Vigna) with a Marsaglia-polar normal sampler.
/// All arithmetic is specified here, so streams are identical on every
/// platform with IEEE doubles and a correctly rounded sqrt/log.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent substream `stream` of `seed` (e.g. one per replication).
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace maxcorr
