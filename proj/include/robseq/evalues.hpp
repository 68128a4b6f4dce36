#pragma once

#include <optional>

#include "robseq/censoring.hpp"
#include "robseq/kernels.hpp"

namespace robseq {

// Per-observation e-factor: clamp(ratio(x)) / denominator, or the constant 1
// when the censoring is degenerate. The denominator is
// E_P0[clamp] + (c_hi - c_lo)*eps for the simple-null factor; composite-null
// factors override it with the sup over the null class.
class EFactor {
 public:
  static EFactor simple(PairPtr pair, double eps);
  static EFactor from_censored(CensoredPair cp);
  static EFactor with_denominator(CensoredPair cp, double denom);

  double evaluate(double x) const;
  double log_evaluate(double x) const;
  bool degenerate() const { return cp_.degenerate; }
  const CensoredPair& censored() const { return cp_; }
  double denominator() const { return denom_; }
  double log_denominator() const { return log_denom_; }

  // sup of E_Q[evaluate] over the TV eps-ball around P0; equals 1 exactly for
  // the simple-null denominator, and is <= 1 when the denominator dominates.
  double worst_case_null_mean() const;

  // Coefficients for the fused stream kernel when the pair is Gaussian:
  // log factor = clamp(a*x + b, lo, hi) + shift.
  struct StreamCoeffs {
    double a, b, lo, hi, shift;
  };
  std::optional<StreamCoeffs> stream_coeffs() const;

  // A point x with clamp(x) = c_hi (one unit past the upper crossing);
  // absent for degenerate factors or non-Gaussian pairs.
  std::optional<double> upper_point() const;

 private:
  explicit EFactor(CensoredPair cp, double denom);
  CensoredPair cp_;
  double denom_ = 1.0;
  double log_denom_ = 0.0;
};

EFactor make_simple_efactor(PairPtr pair, double eps);

}  // namespace robseq
