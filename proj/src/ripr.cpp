#include "robseq/ripr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "robseq/kernels.hpp"

namespace robseq {
namespace {

constexpr double kGoldenRatio = 0.6180339887498948482045868343656;

// scalar E_{P_theta}[clamp] for a solved censoring
double expected_clamp_at_theta(const CompositeNullSpec& null_spec,
                               const CensoredPair& cp, double theta) {
  if (null_spec.family.gaussian_location) {
    const auto* gp = dynamic_cast<const GaussianPair*>(cp.pair.get());
    if (gp != nullptr) {
      return gp->expected_clamp_under(theta, cp.c_lo, cp.c_hi);
    }
  }
  return expected_clamp(cp, *null_spec.family.make_model(theta));
}

// golden-section maximization on [lo, hi], tolerance in theta
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  double x1 = hi - kGoldenRatio * (hi - lo);
  double x2 = lo + kGoldenRatio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGoldenRatio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGoldenRatio * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ExpFamilySpec ExpFamilySpec::gaussian_location_family(double sigma) {
  ExpFamilySpec spec;
  const double s2 = sigma * sigma;
  spec.suff_stat = [s2](double x) { return x / s2; };
  spec.log_partition = [s2](double theta) { return theta * theta / (2.0 * s2); };
  spec.log_carrier = [sigma](double x) {
    return GaussianModel(0.0, sigma).log_density(x);
  };
  spec.make_model = [sigma](double theta) -> ModelPtr {
    return std::make_shared<GaussianModel>(theta, sigma);
  };
  spec.make_pair = [sigma](double theta0, double theta1) -> PairPtr {
    return make_gaussian_location_pair(theta0, theta1, sigma);
  };
  spec.gaussian_location = true;
  return spec;
}

CompositeNullSpec::CompositeNullSpec(ExpFamilySpec fam, double a_, double b_)
    : family(std::move(fam)), a(a_), b(b_) {
  if (!(a <= b)) {
    throw std::invalid_argument("composite null: requires a <= b");
  }
}

RiprProjection ripr_project(const CompositeNullSpec& null_spec,
                            double theta1) {
  if (theta1 >= null_spec.a && theta1 <= null_spec.b) {
    throw std::invalid_argument(
        "ripr_project: alternative parameter lies inside the null interval");
  }
  RiprProjection proj;
  proj.theta_star = std::clamp(theta1, null_spec.a, null_spec.b);
  proj.k = 1.0;
  proj.model = null_spec.family.make_model(proj.theta_star);
  return proj;
}

SupResult sup_expected_clamp(const CompositeNullSpec& null_spec,
                             const CensoredPair& cp) {
  if (cp.degenerate) {
    throw std::logic_error("sup_expected_clamp: degenerate censored pair");
  }
  const double a = null_spec.a, b = null_spec.b;
  auto eval = [&](double theta) {
    return expected_clamp_at_theta(null_spec, cp, theta);
  };

  if (a == b) return SupResult{eval(a), a};

  constexpr std::size_t kGrid = 129;
  std::vector<double> thetas(kGrid), values(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    thetas[i] = a + (b - a) * static_cast<double>(i) / (kGrid - 1);
  }

  const auto* gp = dynamic_cast<const GaussianPair*>(cp.pair.get());
  if (null_spec.family.gaussian_location && gp != nullptr &&
      gp->sigma() == 1.0) {
    kernels::ExpectedClampParams params{gp->a(), gp->b(), cp.c_lo, cp.c_hi};
    kernels::gauss_expected_clamp(params, thetas.data(), values.data(), kGrid);
  } else {
    for (std::size_t i = 0; i < kGrid; ++i) values[i] = eval(thetas[i]);
  }

  // refine every interior local maximum bracket; the grid guards against
  // missing a mode if the map is not unimodal
  std::vector<double> candidates{a, b};
  for (std::size_t i = 0; i < kGrid; ++i) {
    const bool left_ok = i == 0 || values[i] >= values[i - 1];
    const bool right_ok = i + 1 == kGrid || values[i] >= values[i + 1];
    if (left_ok && right_ok) {
      const double lo = thetas[i == 0 ? 0 : i - 1];
      const double hi = thetas[i + 1 == kGrid ? kGrid - 1 : i + 1];
      candidates.push_back(lo < hi ? golden_max(eval, lo, hi, 1e-10) : thetas[i]);
    }
  }

  SupResult best{-1.0, a};
  for (double theta : candidates) {
    const double v = eval(theta);
    if (v > best.value) best = SupResult{v, theta};
  }
  return best;
}

EFactor make_ripr_efactor(const CompositeNullSpec& null_spec, double theta1,
                          double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("make_ripr_efactor: eps must lie in (0, 1)");
  }
  const RiprProjection proj = ripr_project(null_spec, theta1);
  const PairPtr pair = null_spec.family.make_pair(proj.theta_star, theta1);
  CensoredPair cp = solve_thresholds(pair, eps, proj.k);
  if (cp.degenerate) return EFactor::from_censored(std::move(cp));

  const SupResult sup = sup_expected_clamp(null_spec, cp);
  const double denom = sup.value + (cp.c_hi - cp.c_lo) * eps;
  // the sup ranges over a set containing theta*, so it dominates the
  // simple-null denominator computed against P_theta* alone
  if (denom < cp.denom - 1e-12) {
    throw std::logic_error("make_ripr_efactor: sup denominator fell below the "
                           "simple-null denominator");
  }
  return EFactor::with_denominator(std::move(cp), denom);
}

CombinedState::CombinedState(CompositeNullSpec null_spec_,
                             AlternativeClass alt_class, double eps_,
                             bool enable_cache)
    : null_spec(std::move(null_spec_)),
      estimator(std::move(alt_class)),
      eps(eps_) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("combined: eps must lie in (0, 1)");
  }
  // estimates landing on the shared boundary of the class and the null
  // interval give theta_hat == theta_star and hence a factor of 1
  if (enable_cache) cache.emplace();
}

CombinedRound combined_current_round(const CombinedState& state,
                                     CombinedCache* cache) {
  CombinedRound round;
  const auto theta_hat_opt = state.estimator.current_mu();
  if (!theta_hat_opt) return round;  // burn-in
  const double theta_hat = *theta_hat_opt;
  const double theta_star = std::clamp(theta_hat, state.null_spec.a,
                                       state.null_spec.b);
  round.theta_hat = theta_hat;
  round.theta_star = theta_star;
  if (theta_hat == theta_star) return round;  // estimate inside the null

  if (cache != nullptr && cache->solved_theta_hat &&
      std::abs(theta_hat - *cache->solved_theta_hat) < cache->tolerance) {
    if (cache->round) return *cache->round;
    return round;
  }

  CombinedRound solved = round;
  const PairPtr pair = state.null_spec.family.make_pair(theta_star, theta_hat);
  if (!degenerate_without_solving(*pair, state.eps, 1.0)) {
    CensoredPair cp = solve_thresholds(pair, state.eps);
    if (!cp.degenerate) {
      const SupResult sup = sup_expected_clamp(state.null_spec, cp);
      solved.degenerate = false;
      solved.denom = sup.value + (cp.c_hi - cp.c_lo) * state.eps;
      solved.log_denom = std::log(solved.denom);
      if (solved.denom < cp.denom - 1e-12) {
        throw std::logic_error(
            "combined round: sup denominator fell below the simple-null one");
      }
      solved.cp = std::move(cp);
    }
  }
  if (cache != nullptr) {
    cache->solved_theta_hat = theta_hat;
    cache->round = solved.degenerate ? std::nullopt
                                     : std::optional<CombinedRound>(solved);
  }
  return solved;
}

PluginStepResult combined_step(CombinedState& state, double x_next) {
  CombinedRound round = combined_current_round(
      state, state.cache ? &*state.cache : nullptr);
  PluginStepResult out;
  out.c_lo = std::numeric_limits<double>::quiet_NaN();
  out.c_hi = out.c_lo;
  out.denom = out.c_lo;
  if (!round.degenerate) {
    out.degenerate = false;
    out.log_factor = log_clamp_ratio(round.cp, x_next) - round.log_denom;
    out.factor = std::exp(out.log_factor);
    out.c_lo = round.cp.c_lo;
    out.c_hi = round.cp.c_hi;
    out.denom = round.denom;
  }
  state.estimator.observe(x_next);
  return out;
}

}  // namespace robseq
