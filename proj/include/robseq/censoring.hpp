#pragma once

#include <utility>

#include "robseq/dists.hpp"

namespace robseq {

// Censoring thresholds (c_lo, c_hi) for a likelihood-ratio pair at
// contamination radius eps, solved from the normalization equations
//
//   f(c_hi) = P0[r < c_hi] + P1[r >= c_hi]/c_hi = k/(1-eps)
//   g(c_lo) = P1[r > c_lo] + c_lo * P0[r <= c_lo] = 1/(1-eps)
//
// where k <= 1 is the total mass of the (possibly sub-probability) null
// density. f is continuous decreasing and g continuous increasing, so both
// roots come from bracketed bisection on log c. A pair is degenerate when
// c_lo >= c_hi; degenerate pairs are legal outputs (downstream factors fall
// back to 1), never errors.
struct CensoredPair {
  PairPtr pair;
  double eps = 0.0;
  double k = 1.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
  double log_c_lo = 0.0;
  double log_c_hi = 0.0;
  bool degenerate = false;
  // E_P0[clamped ratio]; NaN when degenerate
  double expected_clamp_null = 0.0;
  // expected_clamp_null + (c_hi - c_lo) * eps; NaN when degenerate
  double denom = 0.0;
  double log_denom = 0.0;
};

CensoredPair solve_thresholds(PairPtr pair, double eps);
CensoredPair solve_thresholds(PairPtr pair, double eps, double k);

// max(c_lo, min(c_hi, ratio(x))); finite even where the ratio is infinite
double clamp_ratio(const CensoredPair& cp, double x);
double log_clamp_ratio(const CensoredPair& cp, double x);

// E_model[clamped ratio]; closed form for Gaussian pairs under Gaussian or
// mixture models, exact summation for discrete, quadrature otherwise.
double expected_clamp(const CensoredPair& cp, const DensityModel& model);

// Quick sound degeneracy test: f(1) < k/(1-eps) and g(1) < 1/(1-eps) force
// c_hi < 1 < c_lo. Returns true only when degeneracy is certain.
bool degenerate_without_solving(const LikelihoodRatioPair& pair, double eps,
                                double k);

// The censored null/alternative densities on a finite support (k = 1 only).
std::pair<DiscreteDist, DiscreteDist> censored_discrete_densities(
    const CensoredPair& cp);

// Total-variation distances (D_TV(P0, Q0), D_TV(P1, Q1)) between the idealized
// models and the censored densities; both are <= eps by construction.
std::pair<double, double> check_lfd_membership(const CensoredPair& cp);

}  // namespace robseq
