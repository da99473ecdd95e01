// SPDX-License-Identifier: Apache-2.0
#ifndef AARIS_COMMON_HPP
#define AARIS_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace aaris {

inline constexpr double kPi = 3.14159265358979323846;

/// 10^((dBm - 30)/10), i.e. dBm referenced to 1 mW, result in watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

/// Power ratio from dB.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Amplitude ratio from dB (20 dB -> 10x).
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// Prints a warning to stderr at most once per key.
void warn_once(const std::string& key, const std::string& message);

/// Seedable random stream. All draws are generated from explicitly coded
/// transforms of mt19937_64 output so that a fixed seed reproduces every
/// realization bit-exactly, independent of the standard library's
/// distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  /// Independent child stream; deterministic in (parent seed, tag).
  RngStream derive(std::uint64_t tag) const {
    return RngStream(mix(seed_ ^ (0x9E3779B97F4A7C15ULL * (tag + 1))));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t integer(std::uint64_t n);

  /// Standard normal via the Marsaglia polar method.
  double gaussian();

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer; decorrelates nearby seeds.
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace aaris

#endif  // AARIS_COMMON_HPP
