#include "marton/bounds.hpp"

#include <cmath>

#include "marton/error.hpp"

namespace marton {

double covering_bound(const CoveringParams& p) {
  if (!(p.r >= 1 && p.s >= 1 && p.q > 0 && p.q <= 1 && p.alpha > 0 && p.alpha <= 1)) {
    throw InvalidArgument("covering parameters need r, s >= 1 and q, alpha in (0, 1]");
  }
  return 1.0 / (p.alpha * p.r * p.s * p.q) + (p.r + p.s) / (p.alpha * p.alpha * p.r * p.s);
}

double theorem_bound(double eps_tilde, double eps0, Setting setting) {
  return setting == Setting::quantum ? 40.0 * eps_tilde + 16.0 * eps0
                                     : 37.0 * eps_tilde + 8.0 * eps0;
}

EventBounds event_bounds(const RateParams& p) {
  EventBounds b;
  const double et = p.eps_tilde, e0 = p.eps0;
  b.e1 = std::exp2(-p.r1 - p.r2 + p.I_inf + 2) + std::exp2(-p.r1 + 4) + std::exp2(-p.r2 + 4);
  b.e1_alt = std::exp2(-2 * p.r1 + p.I_inf + 2) + std::exp2(-p.r1 + 4) + std::exp2(-p.r2 + 4);
  b.e1_eps = 36.0 * et;

  b.e2_chain = 8.0 * e0 + std::exp2(p.R1 + 2 * p.r1 + p.r2 + 2 - p.I_inf - p.I0B);
  b.e3_chain = 8.0 * e0 + std::exp2(p.R2 + 2 * p.r2 + p.r1 + 2 - p.I_inf - p.I0C);
  b.e23_eps_claimed = 8.0 * e0 + 2.0 * et;
  b.e23_eps_derived = 8.0 * e0 + 4.0 * et;

  b.e2_classical = 4.0 * e0;
  b.e3b_chain = std::exp2(2 * p.r1 + p.r2 + p.R1 - p.I_inf - p.I0B);
  b.e3c_chain = std::exp2(p.r1 + 2 * p.r2 + p.R2 - p.I_inf - p.I0C);
  b.e3_eps_claimed = et / 2.0;
  b.e3_eps_derived = et;

  b.total_quantum = theorem_bound(et, e0, Setting::quantum);
  b.total_classical = theorem_bound(et, e0, Setting::classical);
  b.total_quantum_derived = 44.0 * et + 16.0 * e0;
  b.total_classical_derived = 38.0 * et + 8.0 * e0;

  b.bands_valid = et > 0.0 && et < 1.0 && all_hold(band_constraints(p));
  return b;
}

}  // namespace marton
