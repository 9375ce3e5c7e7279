#pragma once

#include <cstddef>

#include "marton/coding.hpp"

namespace marton {

enum class Setting { classical, quantum };

struct CoveringParams {
  double r = 1;
  double s = 1;
  double q = 1;
  double alpha = 1;
};

// 1/(alpha r s q) + (r + s)/(alpha^2 r s); may exceed 1.
double covering_bound(const CoveringParams& p);

// 40 eps~ + 16 eps0 (quantum) or 37 eps~ + 8 eps0 (classical).
double theorem_bound(double eps_tilde, double eps0, Setting setting);

struct EventBounds {
  // Probability that no acceptable cell exists in the band; valid for any
  // band exponents when eps_infty <= 1/4.
  double e1 = 0.0;
  // Same expression with -2 r1 in the first exponent.
  double e1_alt = 0.0;
  double e1_eps = 0.0;  // 36 eps~

  // Quantum index-error chains and their eps~ forms.
  double e2_chain = 0.0;
  double e3_chain = 0.0;
  double e23_eps_claimed = 0.0;  // 8 eps0 + 2 eps~
  double e23_eps_derived = 0.0;  // 8 eps0 + 4 eps~

  // Classical decoding-set events.
  double e2_classical = 0.0;  // 4 eps0, for each receiver
  double e3b_chain = 0.0;
  double e3c_chain = 0.0;
  double e3_eps_claimed = 0.0;  // eps~ / 2
  double e3_eps_derived = 0.0;  // eps~

  double total_quantum = 0.0;            // 40 eps~ + 16 eps0
  double total_classical = 0.0;          // 37 eps~ + 8 eps0
  double total_quantum_derived = 0.0;    // 36 + 2 * 4 = 44 eps~ + 16 eps0
  double total_classical_derived = 0.0;  // 36 + 2 * 1 = 38 eps~ + 8 eps0

  bool bands_valid = false;  // the eps~ forms apply
};

EventBounds event_bounds(const RateParams& p);

}  // namespace marton
