#include <doctest.h>

#include <cmath>

#include "marton/channel.hpp"
#include "marton/error.hpp"

using namespace marton;

namespace {

ClassicalBroadcastChannel noiseless_bits() {
  std::vector<std::vector<std::vector<double>>> p = {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}};
  return ClassicalBroadcastChannel::from_tensor({"0", "1"}, {"0", "1"}, {"0", "1"}, p);
}

ClassicalBroadcastChannel random_channel(SeededRng& rng) {
  std::vector<std::vector<std::vector<double>>> p(2, std::vector<std::vector<double>>(2, std::vector<double>(2)));
  for (auto& m : p) {
    double s = 0;
    for (auto& row : m)
      for (auto& v : row) s += v = rng.uniform_pos();
    for (auto& row : m)
      for (auto& v : row) v /= s;
  }
  return ClassicalBroadcastChannel::from_tensor({"a", "b"}, {"0", "1"}, {"0", "1"}, p);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("classical joints") {
  auto ch = noiseless_bits();
  InputDesign d(JointPmf::from_matrix({{0.5, 0}, {0, 0.5}}), {0, InputDesign::kUnmapped,
                                                              InputDesign::kUnmapped, 1}, 2);
  auto [uy, vz] = build_classical_joints(ch, d);
  CHECK(uy(0, 0) == doctest::Approx(0.5));
  CHECK(uy(1, 1) == doctest::Approx(0.5));
  CHECK(uy(0, 1) == 0.0);

  // f ignores v: p(u, y) is the single-user joint.
  std::vector<std::vector<std::vector<double>>> p = {{{0.63, 0.07}, {0.27, 0.03}},
                                                     {{0.08, 0.12}, {0.32, 0.48}}};
  auto ch2 = ClassicalBroadcastChannel::from_tensor({"0", "1"}, {"0", "1"}, {"0", "1"}, p);
  InputDesign d2(JointPmf::from_matrix({{0.12, 0.28}, {0.18, 0.42}}), {0, 0, 1, 1}, 2);
  auto [uy2, vz2] = build_classical_joints(ch2, d2);
  CHECK(uy2(0, 0) == doctest::Approx(0.4 * 0.7));
  CHECK(uy2(1, 1) == doctest::Approx(0.6 * 0.8));
}

TEST_CASE("classical joints against enumeration") {
  SeededRng rng(31, 0);
  for (int t = 0; t < 10; ++t) {
    auto ch = random_channel(rng);
    std::vector<double> puv(4);
    double s = 0;
    for (auto& v : puv) s += v = rng.uniform_pos();
    for (auto& v : puv) v /= s;
    std::vector<std::uint32_t> f(4);
    for (auto& v : f) v = static_cast<std::uint32_t>(rng.below(2));
    InputDesign d(JointPmf({"0", "1"}, {"0", "1"}, puv, 1e-9), f, 2);
    auto [uy, vz] = build_classical_joints(ch, d);
    double want_uy[2][2] = {}, want_vz[2][2] = {};
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v)
        for (int y = 0; y < 2; ++y)
          for (int z = 0; z < 2; ++z) {
            const double w = puv[u * 2 + v] * ch.transition(f[u * 2 + v])(y, z);
            want_uy[u][y] += w;
            want_vz[v][z] += w;
          }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        CHECK(uy(a, b) == doctest::Approx(want_uy[a][b]).epsilon(1e-12));
        CHECK(vz(a, b) == doctest::Approx(want_vz[a][b]).epsilon(1e-12));
      }
  }
}

TEST_CASE("design validation") {
  CHECK_THROWS_AS(InputDesign(JointPmf::from_matrix({{0.5, 0.5}}), {0, InputDesign::kUnmapped}, 2),
                  InvalidArgument);
  CHECK_THROWS_AS(InputDesign(JointPmf::from_matrix({{0.5, 0.5}}), {0, 2}, 2), InvalidArgument);
  auto d = InputDesign::from_labels(JointPmf({"a", "b"}, {"c"}, std::vector<double>{0.5, 0.5}),
                                    {{"a,c", "1"}, {"b,c", "0"}}, {"0", "1"});
  CHECK(d.f(0, 0) == 1);
  CHECK(d.f(1, 0) == 0);
}

TEST_CASE("sampling") {
  auto ch = noiseless_bits();
  SeededRng rng(32, 0);
  for (int i = 0; i < 50; ++i) CHECK(ch.sample_output(1, rng) == std::make_pair<std::size_t, std::size_t>(1, 1));
  std::vector<std::vector<std::vector<double>>> det = {{{0.5, 0.5}, {0, 0}}, {{0, 0}, {0.3, 0.7}}};
  auto bob = ClassicalBroadcastChannel::from_tensor({"0", "1"}, {"0", "1"}, {"0", "1"}, det);
  for (int i = 0; i < 50; ++i) CHECK(bob.sample_output(1, rng).first == 1);

  auto ch3 = random_channel(rng);
  std::array<int, 4> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    auto [y, z] = ch3.sample_output(0, rng);
    ++counts[y * 2 + z];
  }
  for (int c = 0; c < 4; ++c) {
    const double p = ch3.transition(0).probs()[c];
    CHECK(std::abs(counts[c] - n * p) < 3.5 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("nfold classical") {
  SeededRng rng(33, 0);
  auto ch = random_channel(rng);
  auto one = nfold(ch, 1);
  CHECK(one.transition(1).probs() == ch.transition(1).probs());
  auto two = nfold(ch, 2);
  CHECK(two.x_size() == 4);
  CHECK(two.x_alphabet()[2] == "ba");
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      for (std::size_t z = 0; z < 4; ++z)
        CHECK(two.transition(x)(y, z) ==
              doctest::Approx(ch.transition(x / 2)(y / 2, z / 2) * ch.transition(x % 2)(y % 2, z % 2)));
  CHECK_THROWS_AS(nfold(ch, 30), CapExceeded);
}

TEST_CASE("cq states") {
  SeededRng rng(34, 0);
  std::vector<DensityOperator> states;
  for (int x = 0; x < 2; ++x) states.push_back(tensor(random_density(2, rng), random_density(2, rng)));
  CqBroadcastChannel ch({"0", "1"}, 2, 2, states);
  std::array<std::size_t, 2> dims{2, 2};
  std::array<std::size_t, 1> keep_b{0};
  CHECK(max_abs(ch.bob_state(1).matrix() - partial_trace(states[1], dims, keep_b).matrix()) < 1e-12);

  // point mass design
  InputDesign point(JointPmf::from_matrix({{0, 0}, {1, 0}}), {0, 0, 1, 0}, 2);
  auto js = build_joint_state(ch, point);
  ComplexMatrix want = kron(kron(DensityOperator::basis_state(2, 1).matrix(),
                                 DensityOperator::basis_state(2, 0).matrix()),
                            states[1].matrix());
  CHECK(max_abs(js.rho.matrix() - want) < 1e-12);

  InputDesign d(JointPmf::from_matrix({{0.3, 0.2}, {0.1, 0.4}}), {0, 1, 1, 0}, 2);
  auto full = build_joint_state(ch, d);
  CHECK(full.rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  std::array<std::size_t, 4> d4{2, 2, 2, 2};
  std::array<std::size_t, 2> ub{0, 2}, vc{1, 3};
  CHECK(max_abs(partial_trace(full.rho, d4, ub).matrix() - build_ub_state(ch, d).matrix()) < 1e-12);
  CHECK(max_abs(partial_trace(full.rho, d4, vc).matrix() - build_vc_state(ch, d).matrix()) < 1e-12);
}

TEST_CASE("diagonal cq embedding matches classical joint") {
  std::vector<DensityOperator> states;
  std::vector<std::vector<std::vector<double>>> p = {{{0.6, 0.1}, {0.2, 0.1}},
                                                     {{0.05, 0.15}, {0.3, 0.5}}};
  for (int x = 0; x < 2; ++x) {
    std::vector<double> diag{p[x][0][0], p[x][0][1], p[x][1][0], p[x][1][1]};
    states.push_back(DensityOperator::diagonal(diag));
  }
  CqBroadcastChannel cq({"0", "1"}, 2, 2, states);
  auto cl = ClassicalBroadcastChannel::from_tensor({"0", "1"}, {"0", "1"}, {"0", "1"}, p);
  InputDesign d(JointPmf::from_matrix({{0.25, 0.25}, {0.25, 0.25}}), {0, 1, 1, 0}, 2);
  auto ub = build_ub_state(cq, d);
  auto [uy, vz] = build_classical_joints(cl, d);
  CHECK(max_abs(ub.matrix() - ub.matrix().diagonal().asDiagonal().toDenseMatrix()) < 1e-15);
  for (int u = 0; u < 2; ++u)
    for (int y = 0; y < 2; ++y) CHECK(ub.matrix()(u * 2 + y, u * 2 + y).real() == doctest::Approx(uy(u, y)));
}

TEST_CASE("nfold quantum") {
  SeededRng rng(35, 0);
  std::vector<DensityOperator> states;
  std::vector<DensityOperator> bs, cs;
  for (int x = 0; x < 2; ++x) {
    bs.push_back(random_density(2, rng));
    cs.push_back(random_density(2, rng));
    states.push_back(tensor(bs.back(), cs.back()));
  }
  CqBroadcastChannel ch({"0", "1"}, 2, 2, states);
  auto two = nfold(ch, 2);
  CHECK(two.dim_b() == 4);
  // x = "10": B1 B2 C1 C2 ordering
  ComplexMatrix want = kron(kron(bs[1].matrix(), bs[0].matrix()), kron(cs[1].matrix(), cs[0].matrix()));
  CHECK(max_abs(two.state(2).matrix() - want) < 1e-12);
  CHECK(max_abs(two.bob_state(2).matrix() - kron(bs[1].matrix(), bs[0].matrix())) < 1e-12);
  CHECK_THROWS_AS(nfold(ch, 6), CapExceeded);
}

}
