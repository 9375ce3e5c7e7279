#pragma once

#include <array>
#include <cstdint>

namespace marton {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive stream ids from structured tags.
std::uint64_t mix64(std::uint64_t x);

// Combines a parent stream id with a child index into a new stream id.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t child);

// Stream tags for the independent random choices of a simulation.
namespace streams {
inline constexpr std::uint64_t kRows = 0x524f5753;      // "ROWS"
inline constexpr std::uint64_t kCols = 0x434f4c53;      // "COLS"
inline constexpr std::uint64_t kEta = 0x455441;         // "ETA"
inline constexpr std::uint64_t kMessages = 0x4d534753;  // "MSGS"
inline constexpr std::uint64_t kChannel = 0x4348414e;   // "CHAN"
inline constexpr std::uint64_t kMeasure = 0x4d454153;   // "MEAS"
inline constexpr std::uint64_t kSynthetic = 0x53594e;   // "SYN"
}  // namespace streams

// Counter-based generator: draw i of stream s under seed k is
// philox(counter = (i, s), key = k). Two instances built from the same
// (master_seed, stream_id) produce identical sequences on every platform.
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t position() const { return block_ * 2 + (have_spare_ ? 1 : 0); }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on (0, 1]; never returns 0.
  double uniform_pos();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Independent child stream, e.g. one per Monte Carlo trial.
  SeededRng substream(std::uint64_t child) const;

  // Stateless access: the 64-bit word at `index` of stream `stream`.
  static std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index);
  // Uniform on (0, 1] from word_at.
  static double uniform_pos_at(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

// Standard normal draw (Box-Muller on two uniforms); platform-independent.
double standard_normal(SeededRng& rng);

}  // namespace marton
