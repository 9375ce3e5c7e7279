#include <doctest.h>

#include <cmath>

#include "marton/error.hpp"
#include "marton/quantum.hpp"
#include "support.hpp"

using namespace marton;
using namespace marton::testing;
using cd = std::complex<double>;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix random_hermitian(std::size_t d, SeededRng& rng) {
  ComplexMatrix g = random_ginibre(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

// S with 0 <= S <= I and T >= 0.

}  // namespace

TEST_SUITE("quantum") {

TEST_CASE("validation") {
  ComplexMatrix m(2, 2);
  m << 1, 1, 0, 0;
  CHECK_THROWS_AS(HermitianOperator{m}, InvalidArgument);
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityOperator{neg}, InvalidArgument);
  ComplexMatrix big(2, 2);
  big << 1, 0, 0, 1;
  CHECK_THROWS_AS(DensityOperator{big}, InvalidArgument);
}

TEST_CASE("tensor products") {
  CHECK(max_abs(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) -
                ComplexMatrix::Identity(4, 4)) == 0.0);
  auto p = tensor(DensityOperator::basis_state(2, 0), DensityOperator::basis_state(2, 1));
  CHECK(max_abs(p.matrix() - DensityOperator::basis_state(4, 1).matrix()) == 0.0);
  SeededRng rng(1, 0);
  for (int i = 0; i < 10; ++i) {
    auto a = random_density(3, rng), b = random_density(2, rng);
    CHECK(tensor(a, b).matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("partial trace") {
  ComplexVector bell = ComplexVector::Zero(4);
  bell[0] = bell[3] = 1 / std::sqrt(2.0);
  auto rho = DensityOperator::pure(bell);
  std::array<std::size_t, 2> dims{2, 2};
  for (std::size_t keep : {0, 1}) {
    std::array<std::size_t, 1> k{keep};
    CHECK(max_abs(partial_trace(rho, dims, k).matrix() - ComplexMatrix::Identity(2, 2) / 2.0) <
          1e-12);
  }
  SeededRng rng(2, 0);
  auto a = random_density(3, rng), b = random_density(4, rng);
  std::array<std::size_t, 2> d2{3, 4};
  std::array<std::size_t, 1> first{0}, second{1};
  CHECK(max_abs(partial_trace(tensor(a, b), d2, first).matrix() - a.matrix()) < 1e-12);
  CHECK(max_abs(partial_trace(tensor(a, b), d2, second).matrix() - b.matrix()) < 1e-12);
}

TEST_CASE("partial trace against explicit index sums") {
  SeededRng rng(3, 0);
  auto rho = random_density(12, rng);
  std::array<std::size_t, 3> dims{2, 3, 2};
  std::array<std::size_t, 2> keep{0, 2};
  ComplexMatrix got = partial_trace(rho.matrix(), dims, keep);
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int c2 = 0; c2 < 2; ++c2)
          for (int b = 0; b < 3; ++b)
            want(a * 2 + c, a2 * 2 + c2) += rho.matrix()(a * 6 + b * 2 + c, a2 * 6 + b * 2 + c2);
  CHECK(max_abs(got - want) < 1e-12);
}

TEST_CASE("permute subsystems") {
  SeededRng rng(4, 0);
  auto a = random_density(2, rng), b = random_density(3, rng);
  std::array<std::size_t, 2> dims{2, 3}, perm{1, 0};
  CHECK(max_abs(permute_subsystems(tensor(a, b).matrix(), dims, perm) - tensor(b, a).matrix()) <
        1e-12);
}

TEST_CASE("eigendecomposition") {
  std::array<double, 3> d{0.2, 0.5, 0.3};
  auto e = eig_hermitian(HermitianOperator::diagonal(d));
  CHECK(e.values[0] == doctest::Approx(0.5));
  CHECK(e.values[2] == doctest::Approx(0.2));
  auto x = eig_hermitian(HermitianOperator(pauli_x()));
  CHECK(x.values[0] == doctest::Approx(1.0));
  CHECK(x.values[1] == doctest::Approx(-1.0));
  SeededRng rng(5, 0);
  ComplexMatrix h = random_hermitian(8, rng);
  auto r = eig_hermitian(HermitianOperator(h));
  ComplexMatrix back = r.vectors * r.values.cast<cd>().asDiagonal() * r.vectors.adjoint();
  CHECK(max_abs(back - h) < 1e-9);
}

TEST_CASE("pretty good measurement") {
  std::vector<HermitianOperator> basis{HermitianOperator::basis_projector(2, 0),
                                       HermitianOperator::basis_projector(2, 1)};
  Povm p = pretty_good_measurement(basis);
  CHECK(p.size() == 3);
  CHECK(max_abs(p[0].matrix() - basis[0].matrix()) < 1e-12);
  CHECK(max_abs(p[1].matrix() - basis[1].matrix()) < 1e-12);
  CHECK(max_abs(p[2].matrix()) < 1e-12);

  SeededRng rng(6, 0);
  ComplexVector v = random_ginibre(3, 1, rng).col(0);
  std::vector<HermitianOperator> single{HermitianOperator::projector(v).scaled(0.3)};
  Povm ps = pretty_good_measurement(single);
  CHECK(max_abs(ps[0].matrix() - HermitianOperator::projector(v).matrix()) < 1e-9);

  ComplexVector v1 = random_ginibre(3, 1, rng).col(0), v2 = random_ginibre(3, 1, rng).col(0);
  std::vector<HermitianOperator> two{HermitianOperator::projector(v1),
                                     HermitianOperator::projector(v2)};
  Povm pt = pretty_good_measurement(two);
  HermitianOperator s = two[0] + two[1];
  ComplexMatrix support = support_projector(s).matrix();
  CHECK(max_abs(pt[0].matrix() + pt[1].matrix() - support) < 1e-9);
  CHECK(max_abs(pt[2].matrix() - (ComplexMatrix::Identity(3, 3) - support)) < 1e-9);
}

TEST_CASE("measurement") {
  std::vector<HermitianOperator> basis{HermitianOperator::basis_projector(2, 0),
                                       HermitianOperator::basis_projector(2, 1)};
  Povm p = Povm::with_completion(basis);
  SeededRng rng(7, 0);
  auto zero = DensityOperator::basis_state(2, 0);
  for (int i = 0; i < 100; ++i) CHECK(measure(zero, p, rng) == 0);
  auto mixed = DensityOperator::maximally_mixed(2);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ones += measure(mixed, p, rng) == 1;
  CHECK(std::abs(ones - n / 2.0) < 3 * std::sqrt(n * 0.25));

  SeededRng r1(9, 1), r2(9, 1);
  for (int i = 0; i < 50; ++i) CHECK(measure(mixed, p, r1) == measure(mixed, p, r2));
}

TEST_CASE("Hayashi-Nagaoka slack") {
  auto I = HermitianOperator::identity(3), Z = HermitianOperator::zero(3);
  CHECK(hayashi_nagaoka_check(I, Z) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hayashi_nagaoka_check(Z, I) >= -1e-12);
  SeededRng rng(10, 0);
  for (int i = 0; i < 200; ++i) {
    auto [s, t] = random_hn_pair(4, rng);
    CHECK(hayashi_nagaoka_check(s, t) >= -1e-9);
  }
}

TEST_CASE("support inverse square root") {
  std::array<double, 3> d{4.0, 0.0, 0.25};
  auto inv = inverse_sqrt_on_support(HermitianOperator::diagonal(d));
  CHECK(inv.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(inv.matrix()(1, 1).real() == 0.0);
  CHECK(inv.matrix()(2, 2).real() == doctest::Approx(2.0));
}

}
