#include <algorithm>
#include <cmath>

#include "robseq/kernels.hpp"
#include "robseq/normal.hpp"

namespace robseq::kernels::detail {
namespace {

void normal_cdf_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = robseq::normal_cdf(x[i]);
}

void vec_exp_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void log_clamp_affine_scalar(const double* x, std::size_t n, double a,
                             double b, double lo, double hi, double shift,
                             double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::fma(a, x[i], b);
    out[i] = std::min(hi, std::max(lo, t)) + shift;
  }
}

void gauss_expected_clamp_scalar(const ExpectedClampParams& p,
                                 const double* theta, double* out,
                                 std::size_t n) {
  // ratio(x) = exp(a*x - b), monotone in x; the clamp partitions the line at
  // the threshold crossings.
  const double xl = (std::log(p.c_lo) + p.b) / p.a;
  const double xu = (std::log(p.c_hi) + p.b) / p.a;
  const double band_lo = std::min(xl, xu);
  const double band_hi = std::max(xl, xu);
  const double half_a2 = 0.5 * p.a * p.a;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = theta[i];
    double p_lower, p_upper;
    if (p.a > 0) {
      p_lower = robseq::normal_cdf(xl - th);
      p_upper = robseq::normal_sf(xu - th);
    } else {
      p_lower = robseq::normal_sf(xl - th);
      p_upper = robseq::normal_cdf(xu - th);
    }
    // exponential tilt: exp(a x - b) phi(x - th) = tilt * phi(x - th - a)
    const double tilt = std::exp(p.a * th - p.b + half_a2);
    const double band = robseq::normal_cdf(band_hi - th - p.a) -
                        robseq::normal_cdf(band_lo - th - p.a);
    out[i] = p.c_lo * p_lower + p.c_hi * p_upper + tilt * band;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{normal_cdf_scalar, vec_exp_scalar,
                                 log_clamp_affine_scalar,
                                 gauss_expected_clamp_scalar};
  return table;
}

}  // namespace robseq::kernels::detail

namespace robseq::kernels {

void normal_cdf(const double* x, double* out, std::size_t n) {
  detail::active_table().normal_cdf(x, out, n);
}
void vec_exp(const double* x, double* out, std::size_t n) {
  detail::active_table().vec_exp(x, out, n);
}
void log_clamp_affine(const double* x, std::size_t n, double a, double b,
                      double lo, double hi, double shift, double* out) {
  detail::active_table().log_clamp_affine(x, n, a, b, lo, hi, shift, out);
}
void gauss_expected_clamp(const ExpectedClampParams& p, const double* theta,
                          double* out, std::size_t n) {
  detail::active_table().gauss_expected_clamp(p, theta, out, n);
}

}  // namespace robseq::kernels
