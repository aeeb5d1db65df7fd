#include "symquot/rng.hpp"

#include <cmath>
#include <numbers>

namespace symquot {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL))) {}

RngStream RngStream::split(std::uint64_t child_id) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream_id_)), child_id);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (cached_normal_) {
    double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

}  // namespace symquot
