#include "robseq/evalues.hpp"

#include <cmath>
#include <stdexcept>

namespace robseq {

EFactor::EFactor(CensoredPair cp, double denom)
    : cp_(std::move(cp)), denom_(denom), log_denom_(std::log(denom)) {}

EFactor EFactor::simple(PairPtr pair, double eps) {
  return from_censored(solve_thresholds(std::move(pair), eps));
}

EFactor EFactor::from_censored(CensoredPair cp) {
  if (cp.degenerate) return EFactor(std::move(cp), 1.0);
  const double denom = cp.denom;
  return EFactor(std::move(cp), denom);
}

EFactor EFactor::with_denominator(CensoredPair cp, double denom) {
  if (cp.degenerate) return EFactor(std::move(cp), 1.0);
  if (!(denom > 0.0) || !std::isfinite(denom)) {
    throw std::invalid_argument("EFactor: denominator must be positive finite");
  }
  return EFactor(std::move(cp), denom);
}

double EFactor::evaluate(double x) const {
  if (cp_.degenerate) return 1.0;
  return clamp_ratio(cp_, x) / denom_;
}

double EFactor::log_evaluate(double x) const {
  if (cp_.degenerate) return 0.0;
  return log_clamp_ratio(cp_, x) - log_denom_;
}

double EFactor::worst_case_null_mean() const {
  if (cp_.degenerate) return 1.0;
  return (cp_.expected_clamp_null + (cp_.c_hi - cp_.c_lo) * cp_.eps) / denom_;
}

std::optional<EFactor::StreamCoeffs> EFactor::stream_coeffs() const {
  if (cp_.degenerate) {
    return StreamCoeffs{0.0, 0.0, 0.0, 0.0, 0.0};
  }
  const auto* gp = dynamic_cast<const GaussianPair*>(cp_.pair.get());
  if (gp == nullptr) return std::nullopt;
  return StreamCoeffs{gp->a(), -gp->b(), cp_.log_c_lo, cp_.log_c_hi,
                      -log_denom_};
}

std::optional<double> EFactor::upper_point() const {
  if (cp_.degenerate) return std::nullopt;
  const auto* gp = dynamic_cast<const GaussianPair*>(cp_.pair.get());
  if (gp == nullptr) return std::nullopt;
  const double crossing = gp->crossing_x(cp_.c_hi);
  return gp->a() > 0 ? crossing + 1.0 : crossing - 1.0;
}

EFactor make_simple_efactor(PairPtr pair, double eps) {
  return EFactor::simple(std::move(pair), eps);
}

}  // namespace robseq
