#include <doctest.h>

#include <cmath>

#include "marton/error.hpp"
#include "marton/pmf.hpp"

using namespace marton;

TEST_SUITE("pmf") {

TEST_CASE("marginals") {
  auto m = marginals(JointPmf::from_matrix({{0.4, 0.1}, {0.1, 0.4}}));
  CHECK(m.first[0] == doctest::Approx(0.5));
  CHECK(m.second[1] == doctest::Approx(0.5));
  auto pt = marginals(JointPmf::from_matrix({{1, 0}, {0, 0}}));
  CHECK(pt.first[0] == 1.0);
  CHECK(pt.first[1] == 0.0);
  CHECK(pt.second[0] == 1.0);
  auto d = JointPmf::from_matrix({{0.45, 0.05}, {0.05, 0.45}});
  // direct row and column sums
  CHECK(d.row_marginal()[0] == doctest::Approx(0.45 + 0.05).epsilon(1e-15));
  CHECK(d.col_marginal()[1] == doctest::Approx(0.05 + 0.45).epsilon(1e-15));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(Pmf({"a", "b"}, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({"a", "b"}, {1.2, -0.2}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({"a", "a"}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(Pmf({"a"}, {0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(JointPmf({"0"}, {"0", "1"}, std::vector<double>{0.5}), InvalidArgument);
  Pmf p({"a", "b"}, {0.25, 0.75});
  CHECK(p.index_of("b") == 1);
  CHECK_THROWS_AS(p.index_of("c"), InvalidArgument);
}

TEST_CASE("sampling") {
  SeededRng rng(5, 1);
  Pmf point = Pmf::point_mass({"a", "b", "c"}, 1);
  for (int i = 0; i < 100; ++i) CHECK(point.sample(rng) == "b");

  Pmf u = Pmf::uniform({"a", "b", "c", "d"});
  std::array<int, 4> counts{};
  const int n = 1000000;
  for (int i = 0; i < n; ++i) ++counts[u.sample_index(rng)];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int c : counts) CHECK(std::abs(c - n * 0.25) < 3 * sigma);
}

TEST_CASE("joint cell sampling frequencies") {
  JointPmf j = JointPmf::from_matrix({{0.1, 0.2}, {0.3, 0.4}});
  SeededRng rng(8, 0);
  std::array<int, 4> counts{};
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[j.sample_cell(rng)];
  for (int c = 0; c < 4; ++c) {
    const double p = j.probs()[c];
    CHECK(std::abs(counts[c] - n * p) < 4 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("mutual information") {
  CHECK(mutual_information(JointPmf::from_matrix({{0.25, 0.25}, {0.25, 0.25}})) ==
        doctest::Approx(0.0));
  CHECK(mutual_information(JointPmf::from_matrix({{0.5, 0}, {0, 0.5}})) == doctest::Approx(1.0));
  const double mi = mutual_information(JointPmf::from_matrix({{0.45, 0.05}, {0.05, 0.45}}));
  // 1 - h2(0.1) from the formula
  const double h = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
  CHECK(mi == doctest::Approx(1 - h).epsilon(1e-12));
  CHECK(mi == doctest::Approx(0.531).epsilon(1e-3));
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
}

TEST_CASE("ratio and llr") {
  JointPmf j = JointPmf::from_matrix({{0.5, 0}, {0.25, 0.25}});
  CHECK(j.ratio(0, 0) == doctest::Approx(0.5 / (0.5 * 0.75)));
  CHECK(j.ratio(0, 1) == 0.0);
  CHECK(std::isinf(j.llr(0, 1)));
  CHECK(j.llr(0, 1) < 0);
}

TEST_CASE("product joint") {
  Pmf a({"x", "y"}, {0.3, 0.7}), b({"0", "1", "2"}, {0.2, 0.3, 0.5});
  JointPmf p = JointPmf::product(a, b);
  CHECK(p(1, 2) == doctest::Approx(0.35));
  CHECK(mutual_information(p) == doctest::Approx(0.0).epsilon(1e-12));
}

}
