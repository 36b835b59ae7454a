#pragma once

#include <array>
#include <cstdint>

namespace funcito {

// Philox 4x64-10 counter-based generator (Salmon et al., SC 2011).
// Purely functional: a (counter, key) pair maps to a 4-word block, so any
// position in any stream is addressable in O(1) and generation order is
// irrelevant.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Deterministic stream of standard normals: key = (seed, stream constant),
// counter = (block index, stream id, 0, 0). Each block yields four normals
// via Box-Muller on 53-bit uniforms. Distinct stream ids give independent
// sequences; identical (seed, stream) pairs reproduce bit-identically.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double next();

  // Raw block access, exposed for known-answer tests.
  static Philox4x64::Counter raw_block(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t block_index);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 4> buf_{};
  int pos_ = 4;
};

// Deterministic stream of uniforms on (0, 1), same counter scheme as
// NormalStream but a disjoint key space.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream);

  double next();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace funcito
