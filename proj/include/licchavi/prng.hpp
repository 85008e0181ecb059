#pragma once

// Counter-based portable random numbers: Philox4x32-10 (Salmon et al., SC'11).
//
// A stream is identified by (seed, stream id). Block k of a stream is
// Philox(counter = {k_lo, k_hi, stream_lo, stream_hi}, key = {seed_lo, seed_hi}).
// The integer stream is bit-exact on every platform. uniform() uses the top
// 53 bits of a 64-bit draw; normal() is Box-Muller and relies on the platform
// libm for log/cos/sin.

#include <array>
#include <cstdint>

namespace licchavi {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  static constexpr int kRounds = 10;

  static Counter generate(Counter counter, Key key);
};

/// SplitMix64 finalizer; used to derive independent seeds from (seed, tag).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace licchavi
