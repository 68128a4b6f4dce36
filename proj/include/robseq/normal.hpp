#pragma once

#include <cmath>

// Scalar standard-normal helpers. Solver and CDF code paths use these
// directly; the batch kernels in kernels.hpp have their own vector variants.
namespace robseq {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048490);
}

// upper tail P(Z > x), accurate for large x
inline double normal_sf(double x) {
  return 0.5 * std::erfc(x * 0.7071067811865475244008443621048490);
}

inline double normal_pdf(double x) {
  return 0.3989422804014326779399460599343819 * std::exp(-0.5 * x * x);
}

}  // namespace robseq
