#pragma once

#include <functional>
#include <optional>

#include "robseq/evalues.hpp"
#include "robseq/plugin.hpp"

namespace robseq {

// One-parameter exponential family in canonical form:
// p_theta(x) = h(x) exp(theta*T(x) - A(theta)).
struct ExpFamilySpec {
  std::function<double(double)> suff_stat;       // T(x)
  std::function<double(double)> log_partition;   // A(theta), convex
  std::function<double(double)> log_carrier;     // log h(x)
  std::function<ModelPtr(double)> make_model;    // P_theta
  std::function<PairPtr(double, double)> make_pair;  // (theta0, theta1)
  std::pair<double, double> theta_domain{-1e308, 1e308};
  bool gaussian_location = false;  // enables closed-form grid kernels

  static ExpFamilySpec gaussian_location_family(double sigma = 1.0);
};

struct CompositeNullSpec {
  ExpFamilySpec family;
  double a = 0.0;
  double b = 0.0;  // null is {P_theta : a <= theta <= b}

  CompositeNullSpec(ExpFamilySpec fam, double a_, double b_);
};

struct RiprProjection {
  double theta_star = 0.0;
  double k = 1.0;  // the interval-null projection is a genuine probability
  ModelPtr model;
};

// Nearest element of [a, b] from theta1; theta1 inside the null is an error.
RiprProjection ripr_project(const CompositeNullSpec& null_spec, double theta1);

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
};

// max over theta in [a, b] of E_{P_theta}[clamped ratio]: coarse grid of 129
// points, golden-section refinement of every local max bracket to 1e-10 in
// theta, final candidates re-evaluated in scalar closed form (the endpoints
// are always candidates, so the result dominates E at theta*).
SupResult sup_expected_clamp(const CompositeNullSpec& null_spec,
                             const CensoredPair& cp);

// Robust composite-null factor: pair (P_theta*, P_theta1), thresholds from
// the sub-probability normalization (k = 1 here), denominator
// sup_theta E_theta[clamp] + (c_hi - c_lo)*eps.
EFactor make_ripr_efactor(const CompositeNullSpec& null_spec, double theta1,
                          double eps);

struct CombinedRound {
  bool degenerate = true;
  CensoredPair cp;     // valid when !degenerate
  double denom = 1.0;  // sup-based denominator
  double log_denom = 0.0;
  double theta_hat = 0.0;
  double theta_star = 0.0;
};

// Threshold/sup cache for the combined method, same policy as the plug-in
// cache: reuse the whole round while the estimate moved less than tolerance.
struct CombinedCache {
  double tolerance = 1e-4;
  std::optional<double> solved_theta_hat;
  std::optional<CombinedRound> round;
};

// Composite null vs composite alternative: plug-in estimate for the
// alternative, its projection onto the null interval for the pair, and the
// sup-based denominator. Factor 1 before burn-in and on degenerate rounds.
struct CombinedState {
  CompositeNullSpec null_spec;
  MedianEstimator estimator;
  double eps;
  std::optional<CombinedCache> cache;  // engaged when caching is on

  CombinedState(CompositeNullSpec null_spec_, AlternativeClass alt_class,
                double eps_, bool enable_cache = false);
};

// The round implied by the estimator's current state (past data only).
CombinedRound combined_current_round(const CombinedState& state,
                                     CombinedCache* cache = nullptr);

PluginStepResult combined_step(CombinedState& state, double x_next);

}  // namespace robseq
