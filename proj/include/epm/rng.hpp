#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>

namespace epm {

/// Seeded random stream. Streams are split by hashing (seed, stream id)
/// through SplitMix64, so children of one parent never share state.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream; deterministic in (seed, stream, id).
  Rng split(std::uint64_t id) const;

  engine_type& engine() { return engine_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Gamma(shape, 1) for shape >= 1; small shapes go through sample_log_gamma.
  double gamma_unit(double shape);

  void save(std::ostream& os) const;
  void load(std::istream& is);

  friend bool operator==(const Rng& a, const Rng& b);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type engine_;
  std::normal_distribution<double> normal_;
  std::gamma_distribution<double> gamma_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace epm
