#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "marton/divergence.hpp"
#include "marton/error.hpp"
#include "support.hpp"

using namespace marton;
using namespace marton::testing;

namespace {

struct Cells {
  std::vector<double> p, q, llr;
};

Cells cells_of(const JointPmf& j) {
  Cells c;
  for (std::size_t r = 0; r < j.rows(); ++r)
    for (std::size_t s = 0; s < j.cols(); ++s) {
      c.p.push_back(j(r, s));
      c.q.push_back(j.row_marginal()[r] * j.col_marginal()[s]);
      c.llr.push_back(j.llr(r, s));
    }
  return c;
}

// max over subsets A with p(A) >= 1 - eps of -log2 q(A).
double oracle_i0_sets(const JointPmf& j, double eps) {
  Cells c = cells_of(j);
  const std::size_t n = c.p.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    double p = 0, q = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) {
        p += c.p[i];
        q += c.q[i];
      }
    if (p >= 1 - eps - 1e-12) best = std::max(best, -std::log2(q));
  }
  return best;
}

// The linear program over 0 <= w <= 1 has an optimal vertex with at most one
// fractional coordinate: enumerate (full set, fractional cell) pairs.
double oracle_i0_lp(const JointPmf& j, double eps) {
  Cells c = cells_of(j);
  const std::size_t n = c.p.size();
  double best_q = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
    double p = 0, q = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1) {
        p += c.p[i];
        q += c.q[i];
      }
    if (p >= 1 - eps - 1e-12) best_q = std::min(best_q, q);
    for (std::size_t f = 0; f < n; ++f) {
      if (m >> f & 1 || c.p[f] <= 0) continue;
      const double w = (1 - eps - p) / c.p[f];
      if (w > 0 && w <= 1) best_q = std::min(best_q, q + w * c.q[f]);
    }
  }
  return -std::log2(best_q);
}

// min over G with p(G) >= 1 - eps of max_G llr.
double oracle_i_infty(const JointPmf& j, double eps) {
  Cells c = cells_of(j);
  const std::size_t n = c.p.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m < (std::size_t{1} << n); ++m) {
    double p = 0, top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (m >> i & 1 && c.p[i] > 0) {
        p += c.p[i];
        top = std::max(top, c.llr[i]);
      }
    if (p >= 1 - eps - 1e-12) best = std::min(best, top);
  }
  return best;
}

JointPmf square(const JointPmf& b) {
  std::vector<std::vector<double>> m(b.rows() * b.rows(), std::vector<double>(b.cols() * b.cols()));
  for (std::size_t r1 = 0; r1 < b.rows(); ++r1)
    for (std::size_t r2 = 0; r2 < b.rows(); ++r2)
      for (std::size_t c1 = 0; c1 < b.cols(); ++c1)
        for (std::size_t c2 = 0; c2 < b.cols(); ++c2)
          m[r1 * b.rows() + r2][c1 * b.cols() + c2] = b(r1, c1) * b(r2, c2);
  return JointPmf::from_matrix(m);
}

}  // namespace

TEST_SUITE("divergence") {

TEST_CASE("I_infty examples") {
  auto ind = JointPmf::from_matrix({{0.06, 0.14}, {0.24, 0.56}});
  CHECK(classical_i_infty(ind, 0.1).value == doctest::Approx(0.0).epsilon(1e-12));
  auto dsbs = JointPmf::from_matrix({{0.4, 0.1}, {0.1, 0.4}});
  auto r = classical_i_infty(dsbs, 0.25);
  CHECK(r.value == doctest::Approx(oracle_i_infty(dsbs, 0.25)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(std::log2(1.6)).epsilon(1e-12));
  CHECK(r.method == "lower-set");
  CHECK(reevaluate(dsbs, r) == doctest::Approx(r.value));
  auto corr = JointPmf::from_matrix({{0.5, 0}, {0, 0.5}});
  CHECK(classical_i_infty(corr, 0.0).value == doctest::Approx(1.0));
}

TEST_CASE("I_infty against subset oracle") {
  SeededRng rng(21, 0);
  for (int t = 0; t < 60; ++t) {
    auto j = random_joint(2 + rng.below(3), 2 + rng.below(2), rng, 0.2);
    const double eps = rng.uniform() * 0.5;
    CHECK(classical_i_infty(j, eps).value == doctest::Approx(oracle_i_infty(j, eps)).epsilon(1e-9));
  }
}

TEST_CASE("I0 examples") {
  auto full = JointPmf::from_matrix({{0.1, 0.2}, {0.3, 0.4}});
  for (auto m : {I0Method::greedy, I0Method::exhaustive, I0Method::randomized})
    CHECK(classical_i0(full, 0.0, m).value == doctest::Approx(0.0).epsilon(1e-12));
  auto bsc = JointPmf::from_matrix({{0.45, 0.05}, {0.05, 0.45}});
  CHECK(classical_i0(bsc, 0.15, I0Method::greedy).value == doctest::Approx(1.0));
  CHECK(classical_i0(bsc, 0.15, I0Method::exhaustive).value == doctest::Approx(1.0));
  CHECK(oracle_i0_sets(bsc, 0.15) == doctest::Approx(1.0));
  auto noiseless = JointPmf::from_matrix({{0.5, 0}, {0, 0.5}});
  CHECK(classical_i0(noiseless, 0.1, I0Method::exhaustive).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(classical_i0(bsc, 1.0), InvalidArgument);
  CHECK_THROWS_AS(classical_i0(bsc, -0.1), InvalidArgument);
}

TEST_CASE("I0 methods against oracles") {
  SeededRng rng(22, 0);
  for (int t = 0; t < 60; ++t) {
    auto j = random_joint(2 + rng.below(2), 2 + rng.below(3), rng, 0.15);
    const double eps = rng.uniform() * 0.6;
    auto g = classical_i0(j, eps, I0Method::greedy);
    auto e = classical_i0(j, eps, I0Method::exhaustive);
    auto r = classical_i0(j, eps, I0Method::randomized);
    CHECK(e.value == doctest::Approx(oracle_i0_sets(j, eps)).epsilon(1e-9));
    CHECK(r.value == doctest::Approx(oracle_i0_lp(j, eps)).epsilon(1e-9));
    CHECK(g.value <= e.value + 1e-9);
    CHECK(e.value <= r.value + 1e-9);
    REQUIRE(g.upper_bound.has_value());
    CHECK(*g.upper_bound == doctest::Approx(r.value).epsilon(1e-12));
    for (const auto* res : {&g, &e, &r}) {
      CHECK(res->constraint_mass >= 1 - eps - 1e-12);
      CHECK(reevaluate(j, *res) == doctest::Approx(res->value).epsilon(1e-9));
    }
  }
}

TEST_CASE("exhaustive handles the cell limit") {
  SeededRng rng(23, 0);
  auto j = random_joint(4, 6, rng);
  auto e = classical_i0(j, 0.3, I0Method::exhaustive);
  auto r = classical_i0(j, 0.3, I0Method::randomized);
  auto g = classical_i0(j, 0.3, I0Method::greedy);
  CHECK(g.value <= e.value + 1e-9);
  CHECK(e.value <= r.value + 1e-9);
  auto big = random_joint(5, 5, rng);
  CHECK_THROWS_AS(classical_i0(big, 0.3, I0Method::exhaustive), CapExceeded);
}

TEST_CASE("quantum I0") {
  std::vector<double> ub{0.5, 0, 0, 0.5};
  auto rho = DensityOperator::diagonal(ub);
  CHECK(quantum_i0(rho, 2, 0.0).value == doctest::Approx(1.0).epsilon(1e-9));

  SeededRng rng(24, 0);
  for (double eps : {0.1, 0.25, 0.5}) {
    auto a = random_density(2, rng), b = random_density(3, rng);
    ComplexMatrix cq = ComplexMatrix::Zero(6, 6);
    cq.block(0, 0, 3, 3) = 0.3 * b.matrix();
    cq.block(3, 3, 3, 3) = 0.7 * b.matrix();
    auto r = quantum_i0(DensityOperator(cq), 2, eps);
    CHECK(r.value == doctest::Approx(-std::log2(1 - eps)).epsilon(1e-9));
    CHECK(reevaluate(DensityOperator(cq), 2, r) == doctest::Approx(r.value).epsilon(1e-9));
  }
  for (int t = 0; t < 20; ++t) {
    auto j = random_joint(2 + rng.below(2), 2 + rng.below(2), rng, 0.1);
    const double eps = 0.05 + 0.5 * rng.uniform();
    auto q = quantum_i0(diagonal_embedding(j), j.rows(), eps);
    CHECK(q.value == doctest::Approx(classical_i0(j, eps, I0Method::randomized).value).epsilon(1e-9));
  }
}

TEST_CASE("quantum I0 on a rotated state") {
  // Conjugating B by a unitary leaves the value unchanged.
  SeededRng rng(25, 0);
  auto j = random_joint(2, 3, rng);
  ComplexMatrix u = random_unitary(3, rng);
  ComplexMatrix big = ComplexMatrix::Zero(6, 6);
  big.block(0, 0, 3, 3) = u;
  big.block(3, 3, 3, 3) = u;
  ComplexMatrix rot = big * diagonal_embedding(j).matrix() * big.adjoint();
  auto q = quantum_i0(DensityOperator(rot, 1e-9), 2, 0.2);
  CHECK(q.value == doctest::Approx(classical_i0(j, 0.2, I0Method::randomized).value).epsilon(1e-8));
}

TEST_CASE("llr spectrum") {
  auto bsc = JointPmf::from_matrix({{0.45, 0.05}, {0.05, 0.45}});
  auto s1 = llr_spectrum(bsc);
  double p = 0;
  for (const auto& a : s1.atoms) p += a.p;
  CHECK(p == doctest::Approx(1.0));
  CHECK(s1.atoms.size() == 2);
  CHECK(s1.atoms.back().llr == doctest::Approx(std::log2(0.45 / 0.25)));
  CHECK(s1.atoms.back().p == doctest::Approx(0.9));

  auto ind = JointPmf::from_matrix({{0.06, 0.14}, {0.24, 0.56}});
  auto si = iid_llr_spectrum(ind, 7);
  REQUIRE(si.atoms.size() == 1);
  CHECK(si.atoms[0].llr == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(si.atoms[0].p == doctest::Approx(1.0));

  SeededRng rng(26, 0);
  auto j = random_joint(2, 2, rng, 0.2);
  auto s2 = iid_llr_spectrum(j, 2);
  auto j2 = square(j);
  std::map<long long, std::pair<double, double>> brute;
  double null_q = 0;
  for (std::size_t r = 0; r < j2.rows(); ++r)
    for (std::size_t c = 0; c < j2.cols(); ++c) {
      const double q = j2.row_marginal()[r] * j2.col_marginal()[c];
      if (j2(r, c) == 0) {
        null_q += q;
        continue;
      }
      auto& e = brute[std::llround(j2.llr(r, c) * 1e6)];
      e.first += j2(r, c);
      e.second += q;
    }
  REQUIRE(s2.atoms.size() == brute.size());
  std::size_t i = 0;
  for (const auto& [key, pq] : brute) {
    CHECK(std::abs(s2.atoms[i].llr - static_cast<double>(key) * 1e-6) <= 1e-6);
    CHECK(s2.atoms[i].p == doctest::Approx(pq.first).epsilon(1e-12));
    CHECK(s2.atoms[i].q == doctest::Approx(pq.second).epsilon(1e-12));
    ++i;
  }
  CHECK(s2.null_q == doctest::Approx(null_q).epsilon(1e-12));
}

TEST_CASE("iid divergences") {
  SeededRng rng(27, 0);
  for (int t = 0; t < 10; ++t) {
    auto j = random_joint(2, 2, rng, 0.1);
    const double eps = 0.05 + 0.4 * rng.uniform();
    CHECK(classical_i0_iid(j, 1, eps).value ==
          doctest::Approx(classical_i0(j, eps, I0Method::randomized).value).epsilon(1e-9));
    CHECK(classical_i_infty_iid(j, 1, eps).value ==
          doctest::Approx(classical_i_infty(j, eps).value).epsilon(1e-9));
    auto j2 = square(j);
    CHECK(classical_i0_iid(j, 2, eps).value ==
          doctest::Approx(classical_i0(j2, eps, I0Method::randomized).value).epsilon(1e-9));
    CHECK(classical_i_infty_iid(j, 2, eps).value ==
          doctest::Approx(oracle_i_infty(j2, eps)).epsilon(1e-9));
    auto th = classical_i0_iid_threshold(iid_llr_spectrum(j, 2), eps);
    CHECK(th.value <= oracle_i0_sets(j2, eps) + 1e-9);
    CHECK(reevaluate(iid_llr_spectrum(j, 2), th) == doctest::Approx(th.value).epsilon(1e-9));
  }
}

TEST_CASE("iid convergence toward mutual information") {
  auto bsc = JointPmf::from_matrix({{0.45, 0.05}, {0.05, 0.45}});
  const double target = mutual_information(bsc);
  const double v128 = classical_i0_iid(bsc, 128, 0.05).value / 128;
  CHECK(std::abs(v128 - target) < 0.1);
  const double v8 = classical_i0_iid(bsc, 8, 0.05).value / 8;
  CHECK(std::abs(v128 - target) < std::abs(v8 - target));
}

TEST_CASE("atom cap") {
  SeededRng rng(28, 0);
  auto j = random_joint(3, 4, rng);
  CHECK_THROWS_AS(iid_llr_spectrum(j, 12, 1000), CapExceeded);
}

}
