#include <doctest.h>

#include <cmath>
#include <set>

#include "marton/rng.hpp"

using namespace marton;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                   A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                   A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("seed 42 stream 0 golden prefix") {
  SeededRng rng(42, 0);
  const std::uint64_t golden[10] = {0x77f5493b9ceaf053ull, 0x5742b3d712bf50adull, 0x53ba6cfdfcdb2127ull,
                                    0x744e06fb838f5a6eull, 0xa8875dcbd36c0225ull, 0xc609a5599a4d6d99ull,
                                    0xabaf0dabbac70475ull, 0x610e67f7961e5543ull, 0xd6cbaeb5539023bcull,
                                    0x3c58227f529f4963ull};
  for (auto g : golden) CHECK(rng.next_u64() == g);
}

TEST_CASE("same seed and stream reproduce; different streams differ") {
  SeededRng a(7, streams::kRows), b(7, streams::kRows), c(7, streams::kCols);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    same += x == c.next_u64();
  }
  CHECK(same == 0);
}

TEST_CASE("word_at matches sequential draws") {
  SeededRng r(99, 5);
  for (std::uint64_t i = 0; i < 9; ++i) CHECK(r.next_u64() == SeededRng::word_at(99, 5, i));
}

TEST_CASE("uniform ranges and moments") {
  SeededRng r(1, 2);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    double v = r.uniform_pos();
    CHECK_UNARY(v > 0.0);
    CHECK_UNARY(v <= 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3) < 0.005);
}

TEST_CASE("below is unbiased over a non power of two") {
  SeededRng r(3, 4);
  std::array<int, 3> counts{};
  const int n = 90000;
  for (int i = 0; i < n; ++i) ++counts[r.below(3)];
  for (int c : counts) CHECK(std::abs(c - n / 3.0) < 4 * std::sqrt(n * (1.0 / 3) * (2.0 / 3)));
}

TEST_CASE("derived streams are distinct") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t p = 0; p < 50; ++p)
    for (std::uint64_t c = 0; c < 50; ++c) ids.insert(derive_stream(p, c));
  CHECK(ids.size() == 2500);
}

TEST_CASE("standard normal moments") {
  SeededRng r(11, 0);
  double s = 0, s2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double z = standard_normal(r);
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.015);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

}
