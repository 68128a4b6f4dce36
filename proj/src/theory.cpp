#include "robseq/theory.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

namespace robseq::theory {
namespace {

constexpr double kHalfPi = 1.57079632679489661923;

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-10) {
  double error = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, lo, hi, 25, tol, &error);
  if (!std::isfinite(v)) throw std::runtime_error("quadrature failed");
  return v;
}

// E_{q}[log clamp] for a Gaussian pair: the outer clamp regions contribute
// CDF-weighted constants, only the middle band is integrated (log clamp has
// kinks at the crossings).
double expected_log_clamp_gaussian(const GaussianPair& gp,
                                   const CensoredPair& cp,
                                   const DensityModel& q) {
  const double xl = gp.crossing_x(cp.c_lo);
  const double xu = gp.crossing_x(cp.c_hi);
  const double band_lo = std::min(xl, xu);
  const double band_hi = std::max(xl, xu);
  double p_lower, p_upper;
  if (gp.a() > 0) {
    p_lower = q.cdf(xl);
    p_upper = 1.0 - q.cdf(xu);
  } else {
    p_lower = 1.0 - q.cdf(xl);
    p_upper = q.cdf(xu);
  }
  const double band = integrate(
      [&](double x) {
        const double d = q.density(x);
        return d == 0.0 ? 0.0 : (gp.a() * x - gp.b()) * d;
      },
      band_lo, band_hi);
  return cp.log_c_lo * p_lower + cp.log_c_hi * p_upper + band;
}

double expected_log_clamp_generic(const CensoredPair& cp,
                                  const DensityModel& q) {
  return integrate(
      [&](double u) {
        const double c = std::cos(u);
        const double x = std::tan(u);
        const double d = q.density(x);
        if (d == 0.0) return 0.0;
        const double lr = cp.pair->log_ratio(x);
        const double lc = std::min(cp.log_c_hi, std::max(cp.log_c_lo, lr));
        return lc * d / (c * c);
      },
      -kHalfPi, kHalfPi);
}

double expected_log_clamp(const CensoredPair& cp, const DensityModel& q) {
  if (const auto* dp = dynamic_cast<const DiscretePair*>(cp.pair.get())) {
    const auto* dm = dynamic_cast<const DiscreteModel*>(&q);
    if (dm == nullptr || dm->dist().support != dp->null_dist().support) {
      throw std::invalid_argument(
          "expected_log_clamp: discrete pair needs a matching discrete law");
    }
    const auto& r = dp->atom_ratios();
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (dm->dist().probs[i] == 0.0) continue;
      const double clamp = std::max(cp.c_lo, std::min(cp.c_hi, r[i]));
      s += dm->dist().probs[i] * std::log(clamp);
    }
    return s;
  }
  if (const auto* gp = dynamic_cast<const GaussianPair*>(cp.pair.get())) {
    return expected_log_clamp_gaussian(*gp, cp, q);
  }
  return expected_log_clamp_generic(cp, q);
}

}  // namespace

double theoretical_slope(const EFactor& ef, const DensityModel& q_data) {
  if (ef.degenerate()) return 0.0;
  return expected_log_clamp(ef.censored(), q_data) - ef.log_denominator();
}

double kl_censored(const CensoredPair& cp) {
  if (cp.degenerate) return 0.0;
  const double w = 1.0 - cp.eps;
  if (const auto* dp = dynamic_cast<const DiscretePair*>(cp.pair.get())) {
    const auto& r = dp->atom_ratios();
    const auto& p0 = dp->null_dist().probs;
    const auto& p1 = dp->alt_dist().probs;
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      // censored alternative density per atom
      const double q1 =
          r[i] > cp.c_lo ? w * p1[i] : cp.c_lo * w * p0[i];
      if (q1 == 0.0) continue;
      const double clamp = std::max(cp.c_lo, std::min(cp.c_hi, r[i]));
      s += q1 * std::log(clamp);
    }
    return s;
  }
  const auto* gp = dynamic_cast<const GaussianPair*>(cp.pair.get());
  if (gp == nullptr) {
    throw std::invalid_argument("kl_censored: needs a Gaussian or discrete pair");
  }
  // E_{Q1}[log clamp] with q1 = (1-eps) p1 above c_lo and
  // c_lo (1-eps) p0 at or below it
  const double xl = gp->crossing_x(cp.c_lo);
  const double xu = gp->crossing_x(cp.c_hi);
  const double band_lo = std::min(xl, xu);
  const double band_hi = std::max(xl, xu);
  const auto& p0 = *cp.pair->null_model();
  const auto& p1 = *cp.pair->alt_model();
  double p0_lower, p1_upper;
  if (gp->a() > 0) {
    p0_lower = p0.cdf(xl);
    p1_upper = 1.0 - p1.cdf(xu);
  } else {
    p0_lower = 1.0 - p0.cdf(xl);
    p1_upper = p1.cdf(xu);
  }
  const double band = integrate(
      [&](double x) {
        const double d = p1.density(x);
        return d == 0.0 ? 0.0 : (gp->a() * x - gp->b()) * d;
      },
      band_lo, band_hi);
  return w * (cp.c_lo * cp.log_c_lo * p0_lower + band +
              cp.log_c_hi * p1_upper);
}

double growth_lower_bound(const CensoredPair& cp) {
  const double kl = kl_censored(cp);
  return kl - 2.0 * (cp.log_c_hi - cp.log_c_lo) * cp.eps -
         std::log1p(2.0 * (cp.c_hi - cp.c_lo) * cp.eps);
}

double growth_gap_bound(const CensoredPair& cp) {
  const double kl = kl_censored(cp);
  const double eps = cp.eps;
  return kl - 4.0 * eps * std::log((1.0 - eps) / eps) -
         std::log(3.0 - 2.0 * eps * (1.0 - 2.0 * eps) / (1.0 - eps));
}

std::vector<SweepRow> asymptotic_sweep(const SweepScenario& scenario,
                                       const std::vector<double>& eps_grid) {
  for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > eps_grid[i + 1])) {
      throw std::invalid_argument("asymptotic_sweep: eps grid must decrease");
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    SweepRow row{};
    row.eps = eps;
    if (const auto* simple = std::get_if<SimpleSweepScenario>(&scenario)) {
      const auto pair = make_gaussian_location_pair(simple->mu0, simple->mu1);
      const EFactor ef = EFactor::simple(pair, eps);
      row.c_lo = ef.censored().c_lo;
      row.c_hi = ef.censored().c_hi;
      row.r_theoretical =
          theoretical_slope(ef, GaussianModel(simple->mu1, 1.0));
      const double d = simple->mu1 - simple->mu0;
      row.kl_limit = 0.5 * d * d;
    } else {
      const auto& rs = std::get<RiprSweepScenario>(scenario);
      const CompositeNullSpec null_spec(
          ExpFamilySpec::gaussian_location_family(), rs.a, rs.b);
      const EFactor ef = make_ripr_efactor(null_spec, rs.theta1, eps);
      row.c_lo = ef.censored().c_lo;
      row.c_hi = ef.censored().c_hi;
      row.r_theoretical = theoretical_slope(ef, GaussianModel(rs.theta1, 1.0));
      const double d = rs.theta1 - std::clamp(rs.theta1, rs.a, rs.b);
      row.kl_limit = 0.5 * d * d;
    }
    row.c_hi_times_eps = row.c_hi * eps;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "eps,c_lo,c_hi,c_hi_eps,r_theoretical,kl_limit\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.eps, r.c_lo, r.c_hi, r.c_hi_times_eps, r.r_theoretical,
                  r.kl_limit);
    out += buf;
  }
  return out;
}

}  // namespace robseq::theory
