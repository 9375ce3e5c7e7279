#include "marton/region.hpp"

#include <algorithm>
#include <cmath>

#include "marton/divergence.hpp"
#include "marton/error.hpp"

namespace marton {

namespace {

double cap_of(const std::vector<RateConstraint>& cs, double a1, double a2) {
  double v = INFINITY;
  for (const auto& c : cs)
    if (c.a1 == a1 && c.a2 == a2) v = std::min(v, c.rhs);
  return v;
}

// Constraints are of the forms R1 <= c1, R2 <= c2 and R1 + R2 <= c3.
void finish(RateRegion& r) {
  const double c1 = cap_of(r.constraints, 1, 0);
  const double c2 = cap_of(r.constraints, 0, 1);
  const double c3 = cap_of(r.constraints, 1, 1);
  const double a = std::min(c1, c3), b = std::min(c2, c3);
  r.vertices.clear();
  r.empty = !(a >= 0 && b >= 0 && c3 >= 0);
  if (r.empty) return;
  const double s = std::min(c3, a + b);
  std::vector<std::pair<double, double>> v = {{0, 0}, {a, 0}, {a, s - a}, {s - b, b}, {0, b}};
  for (const auto& p : v)
    if (r.vertices.empty() || std::abs(r.vertices.back().first - p.first) > 1e-12 ||
        std::abs(r.vertices.back().second - p.second) > 1e-12)
      r.vertices.push_back(p);
  if (r.vertices.size() > 1 && std::abs(r.vertices.back().first - r.vertices.front().first) <= 1e-12 &&
      std::abs(r.vertices.back().second - r.vertices.front().second) <= 1e-12)
    r.vertices.pop_back();
}

}  // namespace

bool RateRegion::contains(double R1, double R2, double tol) const {
  if (empty || R1 < -tol || R2 < -tol) return false;
  return std::all_of(constraints.begin(), constraints.end(), [&](const RateConstraint& c) {
    return c.a1 * R1 + c.a2 * R2 <= c.rhs + tol;
  });
}

RateRegion marton_region(const DivergenceInputs& in, double eps_tilde, Setting setting) {
  if (!(eps_tilde > 0 && eps_tilde < 1)) throw InvalidArgument("eps_tilde must lie in (0, 1)");
  const double L = std::log2(1.0 / eps_tilde);
  RateRegion r;
  r.name = "marton";
  r.constraints = {{"R1", 1, 0, in.I0B - 5 * L - 2},
                   {"R2", 0, 1, in.I0C - 5 * L - 2},
                   {"R1 + R2", 1, 1, in.I0B + in.I0C - in.I_inf - 11 * L - 5}};
  r.error_budget = theorem_bound(eps_tilde, in.eps0, setting);
  finish(r);
  return r;
}

RateRegion verdu_region(const DivergenceInputs& in, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw InvalidArgument("gamma must lie in (0, 1)");
  const double G = std::log2(1.0 / gamma);
  RateRegion r;
  r.name = "verdu";
  r.constraints = {{"R1", 1, 0, in.I0B - G}, {"R2", 0, 1, in.I0C - in.I_inf - 2 * G}};
  r.error_budget = 2 * in.eps0 + in.eps_infty + 2 * gamma + std::exp(-1.0 / gamma);
  finish(r);
  return r;
}

RateRegion marton_rate_part(const DivergenceInputs& in) {
  RateRegion r;
  r.name = "marton (rates only)";
  r.constraints = {{"R1", 1, 0, in.I0B},
                   {"R2", 0, 1, in.I0C},
                   {"R1 + R2", 1, 1, in.I0B + in.I0C - in.I_inf}};
  finish(r);
  return r;
}

RateRegion verdu_rate_part(const DivergenceInputs& in) {
  RateRegion r;
  r.name = "verdu (rates only)";
  r.constraints = {{"R1", 1, 0, in.I0B}, {"R2", 0, 1, in.I0C - in.I_inf}};
  finish(r);
  return r;
}

bool region_contains(const RateRegion& outer, const RateRegion& inner, double tol) {
  if (inner.empty) return true;
  return std::all_of(inner.vertices.begin(), inner.vertices.end(),
                     [&](const auto& v) { return outer.contains(v.first, v.second, tol); });
}

RegionComparison compare_regions(const DivergenceInputs& in, double eps_tilde, double gamma,
                                 Setting setting) {
  RegionComparison c{marton_region(in, eps_tilde, setting), verdu_region(in, gamma),
                     marton_rate_part(in), verdu_rate_part(in)};
  c.rates_contained = region_contains(c.marton_rates, c.verdu_rates);
  c.penalized_contained = region_contains(c.marton, c.verdu);
  return c;
}

std::vector<CurveRow> iid_convergence_curve(const JointPmf& base_uy, const JointPmf& base_uv,
                                            double eps0, double eps_infty,
                                            const std::vector<std::size_t>& ns) {
  std::vector<CurveRow> rows;
  const double t0 = mutual_information(base_uy), ti = mutual_information(base_uv);
  for (std::size_t n : ns) {
    if (n == 0) throw InvalidArgument("block lengths must be positive");
    CurveRow row;
    row.n = n;
    LlrSpectrum s = iid_llr_spectrum(base_uy, n);
    row.atoms = s.atoms.size();
    row.i0 = classical_i0_iid(s, eps0).value;
    row.i_inf = classical_i_infty_iid(base_uv, n, eps_infty).value;
    row.i0_per_n = row.i0 / static_cast<double>(n);
    row.i_inf_per_n = row.i_inf / static_cast<double>(n);
    row.target_i0 = t0;
    row.target_inf = ti;
    row.gap_i0 = std::abs(row.i0_per_n - t0);
    row.gap_inf = std::abs(row.i_inf_per_n - ti);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace marton
