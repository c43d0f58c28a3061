#include "tclpop/rng.hpp"

#include <cmath>
#include <numbers>

namespace tclpop {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr int kRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int r = 0; r < kRounds; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Philox4x32::Counter random_block(std::uint64_t seed, StreamTag tag, std::uint64_t item,
                                 std::uint32_t index) noexcept {
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(item),
                                static_cast<std::uint32_t>(item >> 32), index,
                                static_cast<std::uint32_t>(tag)};
  return Philox4x32::generate(ctr, key);
}

double uniform_open(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

double uniform_open32(std::uint32_t word) noexcept {
  return (static_cast<double>(word) + 0.5) * 0x1.0p-32;
}

double standard_normal(const Philox4x32::Counter& block) noexcept {
  const double radius = std::sqrt(-2.0 * std::log(uniform_open(block[0], block[1])));
  const double angle = 2.0 * std::numbers::pi * uniform_open32(block[2]);
  return radius * std::cos(angle);
}

}  // namespace tclpop
