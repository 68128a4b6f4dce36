#pragma once

#include <string>
#include <variant>
#include <vector>

#include "robseq/evalues.hpp"
#include "robseq/ripr.hpp"

// Numerical evaluation of the growth-rate formulas and bounds used by the
// acceptance tests and the theory-sweep report.
namespace robseq::theory {

// E_{q_data}[log clamp] - log(denominator): the almost-sure limit of
// log-wealth over n when the data law is q_data. Exact summation for
// discrete, piecewise closed form + quadrature in the middle band otherwise
// (log clamp is constant on the outer clamp regions).
double theoretical_slope(const EFactor& ef, const DensityModel& q_data);

// KL divergence between the censored alternative and null densities,
// D(Q1 || Q0) = E_{Q1}[log clamp]; 0 for degenerate censorings.
double kl_censored(const CensoredPair& cp);

// Lower bound on the growth rate in terms of the censored KL:
// kl - 2*(log c_hi - log c_lo)*eps - log(1 + 2*(c_hi - c_lo)*eps).
double growth_lower_bound(const CensoredPair& cp);

// The optimality-gap restatement of the same bound with the threshold
// extremes replaced by their hard limits:
// kl - 4*eps*log((1-eps)/eps) - log(3 - 2*eps*(1-2*eps)/(1-eps)).
double growth_gap_bound(const CensoredPair& cp);

struct SweepRow {
  double eps;
  double c_lo;
  double c_hi;
  double c_hi_times_eps;
  double r_theoretical;
  double kl_limit;
};

struct SimpleSweepScenario {
  double mu0 = 0.0;
  double mu1 = 1.0;
};

struct RiprSweepScenario {
  double a = -0.5;
  double b = 0.5;
  double theta1 = 1.0;
};

using SweepScenario = std::variant<SimpleSweepScenario, RiprSweepScenario>;

// Rows of (eps, c_lo, c_hi, c_hi*eps, slope at the clean alternative,
// KL limit) over a decreasing eps grid.
std::vector<SweepRow> asymptotic_sweep(const SweepScenario& scenario,
                                       const std::vector<double>& eps_grid);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace robseq::theory
