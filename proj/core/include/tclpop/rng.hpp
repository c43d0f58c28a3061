#pragma once

#include <array>
#include <cstdint>

namespace tclpop {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A draw is a pure function of (key, counter): there is no hidden state, so
/// any unit at any step can regenerate its random numbers independently of
/// the order in which work is scheduled across threads.
class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Independent sub-streams carved out of a single seed.
enum class StreamTag : std::uint32_t {
  kStep = 0,
  kParamR = 1,
  kParamC = 2,
  kInitTemp = 3,
  kInitMode = 4,
};

/// Four raw 32-bit words for (seed, tag, item, index).
Philox4x32::Counter random_block(std::uint64_t seed, StreamTag tag, std::uint64_t item,
                                 std::uint32_t index) noexcept;

/// Uniform double in the open interval (0, 1) from two 32-bit words.
double uniform_open(std::uint32_t hi, std::uint32_t lo) noexcept;

/// Uniform double in (0, 1) with 32-bit resolution.
double uniform_open32(std::uint32_t word) noexcept;

/// Standard normal from a Box-Muller transform of the first three words of a block.
double standard_normal(const Philox4x32::Counter& block) noexcept;

}  // namespace tclpop
