#include "marton/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace marton {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) {
  return philox4x32({static_cast<std::uint32_t>(index),
                     static_cast<std::uint32_t>(index >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32)},
                    {static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32)});
}

inline double to_unit(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t child) {
  return mix64(parent ^ mix64(child + 0x632be59bd9b4e019ull));
}

SeededRng::SeededRng(std::uint64_t master_seed, std::uint64_t stream_id)
    : seed_(master_seed), stream_(stream_id) {}

std::uint64_t SeededRng::next_u64() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const auto out = block(seed_, stream_, block_++);
  spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  have_spare_ = true;
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double SeededRng::uniform() { return to_unit(next_u64()); }

double SeededRng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t SeededRng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("SeededRng::below: n must be positive");
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t w = next_u64();
    if (w < limit) return w % n;
  }
}

SeededRng SeededRng::substream(std::uint64_t child) const {
  return SeededRng(seed_, derive_stream(stream_, child));
}

std::uint64_t SeededRng::word_at(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
  const auto out = block(seed, stream, index >> 1);
  if (index & 1) return (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double SeededRng::uniform_pos_at(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
  return static_cast<double>((word_at(seed, stream, index) >> 11) + 1) *
         0x1.0p-53;
}

double standard_normal(SeededRng& rng) {
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace marton
