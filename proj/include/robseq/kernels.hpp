#pragma once

#include <cstddef>
#include <string>

// Batch numeric kernels. Each operation has a scalar reference implementation
// and an AVX2+FMA variant; the active one is picked at runtime from CPU
// capabilities. Set ROBSEQ_KERNELS=scalar (or =avx2) to override.
//
// log_clamp_affine is pure min/max/fma arithmetic and is bit-identical across
// implementations. The transcendental kernels (normal_cdf, vec_exp,
// gauss_expected_clamp) agree to a few ulps; equivalence tests pin the bounds.
namespace robseq::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char* isa_name(Isa isa);

// out[i] = Phi(x[i])
void normal_cdf(const double* x, double* out, std::size_t n);

// out[i] = exp(x[i])
void vec_exp(const double* x, double* out, std::size_t n);

// out[i] = min(hi, max(lo, a*x[i] + b)) + shift
// With (a, b) the log-likelihood-ratio coefficients, (lo, hi) the log clamp
// thresholds and shift = -log(denominator), this emits per-observation
// log e-factors for a censored Gaussian ratio in one pass.
void log_clamp_affine(const double* x, std::size_t n, double a, double b,
                      double lo, double hi, double shift, double* out);

// E over X ~ N(theta[i], 1) of max(c_lo, min(c_hi, exp(a*X - b))), a != 0.
struct ExpectedClampParams {
  double a;
  double b;
  double c_lo;
  double c_hi;
};
void gauss_expected_clamp(const ExpectedClampParams& p, const double* theta,
                          double* out, std::size_t n);

namespace detail {
struct KernelTable {
  void (*normal_cdf)(const double*, double*, std::size_t);
  void (*vec_exp)(const double*, double*, std::size_t);
  void (*log_clamp_affine)(const double*, std::size_t, double, double, double,
                           double, double, double*);
  void (*gauss_expected_clamp)(const ExpectedClampParams&, const double*,
                               double*, std::size_t);
};
const KernelTable& scalar_table();
#if defined(ROBSEQ_HAVE_AVX2_SOURCES)
const KernelTable& avx2_table();
#endif
const KernelTable& active_table();
}  // namespace detail

}  // namespace robseq::kernels
