#include "robseq/censoring.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace robseq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kHalfPi = 1.57079632679489661923;

double f_equation(const LikelihoodRatioPair& pair, double c) {
  return pair.ratio_cdf_null(c, /*strict=*/true) +
         (1.0 - pair.ratio_cdf_alt(c, /*strict=*/true)) / c;
}

double g_equation(const LikelihoodRatioPair& pair, double c) {
  return (1.0 - pair.ratio_cdf_alt(c, /*strict=*/false)) +
         c * pair.ratio_cdf_null(c, /*strict=*/false);
}

// Bracketed bisection on log c with relative tolerance 1e-12, cap 300.
// `increasing` states the monotonicity of `fn`.
template <typename Fn>
double bisect_log(Fn&& fn, double target, bool increasing, double lo,
                  double hi, const char* what) {
  double flo = fn(lo);
  double fhi = fn(hi);
  auto below = [&](double v) { return increasing ? v < target : v > target; };
  // expand the bracket geometrically while the signs match
  for (int tries = 0; tries < 80 && !below(flo); ++tries) {
    lo *= 0.125;
    flo = fn(lo);
  }
  for (int tries = 0; tries < 80 && below(fhi); ++tries) {
    hi *= 8.0;
    fhi = fn(hi);
  }
  if (!below(flo) || below(fhi)) {
    std::ostringstream msg;
    msg << what << ": failed to bracket root, f(" << lo << ")=" << flo
        << ", f(" << hi << ")=" << fhi << ", target=" << target;
    throw std::runtime_error(msg.str());
  }
  double tlo = std::log(lo), thi = std::log(hi);
  for (int it = 0; it < 300 && thi - tlo > 1e-12; ++it) {
    const double tmid = 0.5 * (tlo + thi);
    if (below(fn(std::exp(tmid)))) {
      tlo = tmid;
    } else {
      thi = tmid;
    }
  }
  return std::exp(0.5 * (tlo + thi));
}

// expected clamp by quadrature of clamp(ratio(x)) * density(x) over the line
double expected_clamp_quadrature(const CensoredPair& cp,
                                 const DensityModel& model) {
  auto integrand = [&](double u) {
    const double c = std::cos(u);
    const double x = std::tan(u);
    const double d = model.density(x);
    if (d == 0.0) return 0.0;
    const double r = cp.pair->ratio(x);
    const double clamped = std::max(cp.c_lo, std::min(cp.c_hi, r));
    return clamped * d / (c * c);
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          integrand, -kHalfPi, kHalfPi, 25, 1e-10, &error);
  if (!std::isfinite(value)) {
    throw std::runtime_error("expected_clamp: quadrature failed");
  }
  return value;
}

}  // namespace

bool degenerate_without_solving(const LikelihoodRatioPair& pair, double eps,
                                double k) {
  const double target_f = k / (1.0 - eps);
  const double target_g = 1.0 / (1.0 - eps);
  return f_equation(pair, 1.0) < target_f && g_equation(pair, 1.0) < target_g;
}

CensoredPair solve_thresholds(PairPtr pair, double eps) {
  return solve_thresholds(std::move(pair), eps, 0.0);
}

CensoredPair solve_thresholds(PairPtr pair, double eps, double k) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("solve_thresholds: eps must lie in (0, 1)");
  }
  if (k == 0.0) k = pair->null_mass();
  if (!(k > 0.0 && k <= 1.0 + 1e-12)) {
    throw std::invalid_argument("solve_thresholds: k must lie in (0, 1]");
  }
  if (std::abs(k - pair->null_mass()) > 1e-9) {
    throw std::invalid_argument(
        "solve_thresholds: k does not match the null mass of the pair");
  }

  CensoredPair cp;
  cp.pair = std::move(pair);
  cp.eps = eps;
  cp.k = k;

  const double target_f = k / (1.0 - eps);
  const double target_g = 1.0 / (1.0 - eps);
  // initial bracket around the hard bounds k*c_hi <= 1/eps - 1,
  // k*c_lo >= eps/(1-eps)
  const double lo0 = eps / (2.0 * (1.0 - eps) * k);
  const double hi0 = 2.0 * (1.0 / eps - 1.0) / k;

  const auto& pr = *cp.pair;
  cp.c_hi = bisect_log([&](double c) { return f_equation(pr, c); }, target_f,
                       /*increasing=*/false, lo0, hi0, "solve c_hi");
  cp.c_lo = bisect_log([&](double c) { return g_equation(pr, c); }, target_g,
                       /*increasing=*/true, lo0, hi0, "solve c_lo");

  const double res_f = std::abs(f_equation(pr, cp.c_hi) - target_f);
  const double res_g = std::abs(g_equation(pr, cp.c_lo) - target_g);
  if (res_f > 1e-9 || res_g > 1e-9) {
    std::ostringstream msg;
    msg << "solve_thresholds: residuals too large, |f(c_hi)-target|=" << res_f
        << ", |g(c_lo)-target|=" << res_g;
    throw std::runtime_error(msg.str());
  }

  cp.log_c_lo = std::log(cp.c_lo);
  cp.log_c_hi = std::log(cp.c_hi);
  cp.degenerate = !(cp.c_lo < cp.c_hi);
  if (cp.degenerate) {
    cp.expected_clamp_null = kNaN;
    cp.denom = kNaN;
    cp.log_denom = kNaN;
  } else {
    cp.expected_clamp_null = expected_clamp(cp, *cp.pair->null_model());
    cp.denom = cp.expected_clamp_null + (cp.c_hi - cp.c_lo) * eps;
    cp.log_denom = std::log(cp.denom);
  }
  return cp;
}

double clamp_ratio(const CensoredPair& cp, double x) {
  if (cp.degenerate) {
    throw std::logic_error("clamp_ratio: degenerate censored pair");
  }
  const double lr = cp.pair->log_ratio(x);
  if (lr >= cp.log_c_hi) return cp.c_hi;
  if (lr <= cp.log_c_lo) return cp.c_lo;
  return std::exp(lr);
}

double log_clamp_ratio(const CensoredPair& cp, double x) {
  if (cp.degenerate) {
    throw std::logic_error("log_clamp_ratio: degenerate censored pair");
  }
  const double lr = cp.pair->log_ratio(x);
  return std::min(cp.log_c_hi, std::max(cp.log_c_lo, lr));
}

double expected_clamp(const CensoredPair& cp, const DensityModel& model) {
  if (cp.degenerate) {
    throw std::logic_error("expected_clamp: degenerate censored pair");
  }
  if (const auto* gp = dynamic_cast<const GaussianPair*>(cp.pair.get())) {
    if (const auto* gm = dynamic_cast<const GaussianModel*>(&model)) {
      if (gm->sigma() == gp->sigma()) {
        return gp->expected_clamp_under(gm->mu(), cp.c_lo, cp.c_hi);
      }
    }
    if (const auto* mx = dynamic_cast<const MixtureModel*>(&model)) {
      // split by component; Gaussian components stay in closed form
      double total = 0.0;
      bool closed = true;
      for (const auto& [w, m] : mx->components()) {
        if (w == 0.0) continue;
        if (const auto* g = dynamic_cast<const GaussianModel*>(m.get());
            g != nullptr && g->sigma() == gp->sigma()) {
          total += w * gp->expected_clamp_under(g->mu(), cp.c_lo, cp.c_hi);
        } else {
          closed = false;
          break;
        }
      }
      if (closed) return total;
    }
  }
  if (const auto* dp = dynamic_cast<const DiscretePair*>(cp.pair.get())) {
    if (const auto* dm = dynamic_cast<const DiscreteModel*>(&model)) {
      if (dm->dist().support == dp->null_dist().support) {
        const auto& ratios = dp->atom_ratios();
        double s = 0.0;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
          if (dm->dist().probs[i] == 0.0) continue;
          s += dm->dist().probs[i] *
               std::max(cp.c_lo, std::min(cp.c_hi, ratios[i]));
        }
        return s;
      }
      throw std::invalid_argument("expected_clamp: support mismatch");
    }
  }
  return expected_clamp_quadrature(cp, model);
}

std::pair<DiscreteDist, DiscreteDist> censored_discrete_densities(
    const CensoredPair& cp) {
  const auto* dp = dynamic_cast<const DiscretePair*>(cp.pair.get());
  if (dp == nullptr) {
    throw std::invalid_argument(
        "censored densities are available for discrete pairs only");
  }
  if (cp.degenerate) {
    throw std::logic_error("censored_discrete_densities: degenerate pair");
  }
  const auto& d0 = dp->null_dist();
  const auto& d1 = dp->alt_dist();
  const auto& r = dp->atom_ratios();
  const double w = 1.0 - cp.eps;
  std::vector<double> q0(d0.size()), q1(d1.size());
  for (std::size_t i = 0; i < d0.size(); ++i) {
    // strict/non-strict sides exactly as in the normalization equations
    q0[i] = r[i] < cp.c_hi ? w * d0.probs[i] : w * d1.probs[i] / cp.c_hi;
    q1[i] = r[i] > cp.c_lo ? w * d1.probs[i] : cp.c_lo * w * d0.probs[i];
  }
  return {DiscreteDist(d0.support, std::move(q0)),
          DiscreteDist(d1.support, std::move(q1))};
}

std::pair<double, double> check_lfd_membership(const CensoredPair& cp) {
  if (std::abs(cp.k - 1.0) > 1e-9) {
    throw std::invalid_argument("check_lfd_membership: requires k = 1");
  }
  const auto* dp = dynamic_cast<const DiscretePair*>(cp.pair.get());
  if (dp == nullptr) {
    throw std::invalid_argument("check_lfd_membership: discrete pairs only");
  }
  const auto [q0, q1] = censored_discrete_densities(cp);
  return {tv_distance(dp->null_dist(), q0), tv_distance(dp->alt_dist(), q1)};
}

}  // namespace robseq
