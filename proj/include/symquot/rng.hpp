#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace symquot {

/// Seeded random stream identified by (seed, stream_id).
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. It is seeded with a SplitMix64 mix of seed and stream_id, so
/// distinct stream ids give independent-looking streams and identical ids
/// reproduce identical draws regardless of which worker runs them.
/// Uniform doubles take the top 53 bits of one engine draw. Normal variates
/// use the Box-Muller transform on two uniforms and return the cosine branch
/// first, then the cached sine branch.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream keyed on this stream's identity and `child_id`.
  RngStream split(std::uint64_t child_id) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace symquot
