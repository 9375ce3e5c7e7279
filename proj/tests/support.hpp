#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "marton/pmf.hpp"
#include "marton/quantum.hpp"
#include "marton/rng.hpp"

namespace marton::testing {

inline JointPmf random_joint(std::size_t rows, std::size_t cols, SeededRng& rng, double zero_frac = 0.0) {
  std::vector<double> p(rows * cols);
  double s = 0;
  for (auto& x : p) {
    x = rng.uniform() < zero_frac ? 0.0 : -std::log(rng.uniform_pos());
    s += x;
  }
  if (s == 0) {
    p[0] = 1;
    s = 1;
  }
  for (auto& x : p) x /= s;
  std::vector<std::string> rl, cl;
  for (std::size_t i = 0; i < rows; ++i) rl.push_back(std::to_string(i));
  for (std::size_t i = 0; i < cols; ++i) cl.push_back(std::to_string(i));
  return JointPmf(rl, cl, p, 1e-9);
}

inline DensityOperator diagonal_embedding(const JointPmf& j) {
  std::vector<double> d(j.probs().begin(), j.probs().end());
  return DensityOperator::diagonal(d);
}

inline std::pair<HermitianOperator, HermitianOperator> random_hn_pair(std::size_t d,
                                                                     SeededRng& rng) {
  ComplexMatrix u = random_unitary(d, rng);
  Eigen::VectorXd ev(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = rng.uniform();
  ComplexMatrix s = u * ev.cast<std::complex<double>>().asDiagonal() * u.adjoint();
  ComplexMatrix g = random_ginibre(d, d, rng);
  ComplexMatrix t = g * g.adjoint() * rng.uniform() * 3.0;
  return {HermitianOperator(s, 1e-9), HermitianOperator(t, 1e-9)};
}

}  // namespace marton::testing
