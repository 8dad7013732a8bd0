#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace glidebench {

// Portable, explicitly seeded random stream.
//
// Generator: xoshiro256** (Blackman & Vigna). The 256-bit state is filled by
// four SplitMix64 steps starting from seed XOR fnv1a64(label), so a stream is
// fully determined by (seed, label) and independent of every other label.
//   uniform(): top 53 bits of next() scaled by 2^-53, in [0, 1).
//   normal():  Box-Muller on two uniforms, cosine branch only; the sine
//              variate is discarded so each call consumes exactly two words.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string label);

  std::uint64_t next();
  double uniform();
  double normal();

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace glidebench
