#include "funcito/rng.hpp"

#include <cmath>
#include <numbers>

namespace funcito {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

// Distinguishes the normal- and uniform-stream key spaces from a bare seed.
constexpr std::uint64_t kStreamConstant = 0xDA3E39CB94B95BDBULL;
constexpr std::uint64_t kUniformConstant = 0xC2B2AE3D27D4EB4FULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline Philox4x64::Counter round_once(const Philox4x64::Counter& c, const Philox4x64::Key& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// u in (0, 1), 53-bit mantissa, never exactly 0 or 1
inline double to_unit(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter counter, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    counter = round_once(counter, key);
  }
  return counter;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

Philox4x64::Counter NormalStream::raw_block(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t block_index) {
  return Philox4x64::block({block_index, stream, 0, 0}, {seed, kStreamConstant});
}

void NormalStream::refill() {
  const auto w = raw_block(seed_, stream_, block_++);
  for (int pair = 0; pair < 2; ++pair) {
    const double u1 = to_unit(w[2 * pair]);
    const double u2 = to_unit(w[2 * pair + 1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    buf_[2 * pair] = r * std::cos(theta);
    buf_[2 * pair + 1] = r * std::sin(theta);
  }
  pos_ = 0;
}

double NormalStream::next() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

double UniformStream::next() {
  if (pos_ >= 4) {
    buf_ = Philox4x64::block({block_++, stream_, 0, 0}, {seed_, kUniformConstant});
    pos_ = 0;
  }
  return to_unit(buf_[pos_++]);
}

}  // namespace funcito
