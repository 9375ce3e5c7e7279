#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "marton/bounds.hpp"
#include "marton/pmf.hpp"

namespace marton {

// a1 R1 + a2 R2 <= rhs
struct RateConstraint {
  std::string name;
  double a1 = 0.0;
  double a2 = 0.0;
  double rhs = 0.0;
};

// Nonnegative (R1, R2) under a list of constraints; vertices listed
// counterclockwise from the origin.
struct RateRegion {
  std::string name;
  std::vector<RateConstraint> constraints;
  std::vector<std::pair<double, double>> vertices;
  bool empty = false;
  double error_budget = 0.0;  // the eps the region is claimed for

  bool contains(double R1, double R2, double tol = 1e-9) const;
};

struct DivergenceInputs {
  double I0B = 0.0;
  double I0C = 0.0;
  double I_inf = 0.0;
  double eps0 = 0.0;
  double eps_infty = 0.0;
};

RateRegion marton_region(const DivergenceInputs& in, double eps_tilde, Setting setting);
RateRegion verdu_region(const DivergenceInputs& in, double gamma);
// Both regions with every penalty term dropped.
RateRegion marton_rate_part(const DivergenceInputs& in);
RateRegion verdu_rate_part(const DivergenceInputs& in);

// Vertex test; exact for convex polygons.
bool region_contains(const RateRegion& outer, const RateRegion& inner, double tol = 1e-9);

struct RegionComparison {
  RateRegion marton;
  RateRegion verdu;
  RateRegion marton_rates;
  RateRegion verdu_rates;
  bool rates_contained = false;      // verdu_rates inside marton_rates
  bool penalized_contained = false;  // verdu inside marton
};

RegionComparison compare_regions(const DivergenceInputs& in, double eps_tilde, double gamma,
                                 Setting setting);

struct CurveRow {
  std::size_t n = 0;
  double i0 = 0.0;
  double i0_per_n = 0.0;
  double i_inf = 0.0;
  double i_inf_per_n = 0.0;
  double target_i0 = 0.0;    // I[U;Y] of the base
  double target_inf = 0.0;   // I[U;V] of the base
  double gap_i0 = 0.0;       // |i0_per_n - target_i0|
  double gap_inf = 0.0;
  std::size_t atoms = 0;
};

// I0 (randomized, via the llr spectrum) of base_uy^n and I_infty of
// base_uv^n for each n.
std::vector<CurveRow> iid_convergence_curve(const JointPmf& base_uy, const JointPmf& base_uv,
                                            double eps0, double eps_infty,
                                            const std::vector<std::size_t>& ns);

}  // namespace marton
