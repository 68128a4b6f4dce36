#include "robseq/plugin.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace robseq {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

AlternativeClass AlternativeClass::not_equal(double excluded) {
  AlternativeClass c;
  c.kind_ = Kind::not_equal;
  c.p1_ = excluded;
  c.text_ = "{mu != " + std::to_string(excluded) + "}";
  return c;
}

AlternativeClass AlternativeClass::outside_interval(double a, double b) {
  if (!(a <= b)) {
    throw std::invalid_argument("outside_interval: requires a <= b");
  }
  AlternativeClass c;
  c.kind_ = Kind::outside_interval;
  c.p1_ = a;
  c.p2_ = b;
  c.text_ = "{mu <= " + std::to_string(a) + " or mu >= " + std::to_string(b) + "}";
  return c;
}

bool AlternativeClass::contains(double mu) const {
  switch (kind_) {
    case Kind::not_equal:
      return mu != p1_;
    case Kind::outside_interval:
      return mu <= p1_ || mu >= p2_;
  }
  return false;
}

double AlternativeClass::project(double raw) const {
  switch (kind_) {
    case Kind::not_equal:
      // the closure is the whole line; the excluded point itself is nudged to
      // the + side (a measure-zero event under continuous data)
      return raw == p1_ ? p1_ + 1e-8 : raw;
    case Kind::outside_interval: {
      if (raw <= p1_ || raw >= p2_) return raw;
      const double mid = 0.5 * (p1_ + p2_);
      return raw < mid ? p1_ : p2_;  // ties toward +
    }
  }
  return raw;
}

MedianEstimator::MedianEstimator(AlternativeClass alt_class)
    : class_(std::move(alt_class)) {}

void MedianEstimator::observe(double x) {
  if (low_.empty() || x <= *low_.rbegin()) {
    low_.insert(x);
  } else {
    high_.insert(x);
  }
  rebalance();
}

void MedianEstimator::rebalance() {
  while (low_.size() > high_.size() + 1) {
    const auto it = std::prev(low_.end());
    high_.insert(*it);
    low_.erase(it);
  }
  while (high_.size() > low_.size()) {
    const auto it = high_.begin();
    low_.insert(*it);
    high_.erase(it);
  }
}

std::optional<double> MedianEstimator::raw_median() const {
  if (low_.empty()) return std::nullopt;
  if (low_.size() > high_.size()) return *low_.rbegin();
  return 0.5 * (*low_.rbegin() + *high_.begin());
}

std::optional<double> MedianEstimator::current_mu() const {
  const auto med = raw_median();
  if (!med) return std::nullopt;
  return class_.project(*med);
}

std::optional<GaussianModel> MedianEstimator::current_alt() const {
  const auto mu = current_mu();
  if (!mu) return std::nullopt;
  return GaussianModel(*mu, 1.0);
}

std::optional<CensoredPair> plugin_current_censoring(
    const GaussianModel& null_model, const MedianEstimator& estimator,
    double eps, PluginSolveCache* cache) {
  const auto mu_hat = estimator.current_mu();
  if (!mu_hat) return std::nullopt;
  // an estimate landing exactly on the null center carries no evidence
  if (*mu_hat == null_model.mu()) return std::nullopt;

  if (cache != nullptr && cache->solved_mu &&
      std::abs(*mu_hat - *cache->solved_mu) < cache->tolerance) {
    if (!cache->cp) return std::nullopt;  // cached degenerate
    return cache->cp;
  }

  const auto pair = make_gaussian_location_pair(null_model.mu(), *mu_hat,
                                                null_model.sigma());
  std::optional<CensoredPair> result;
  if (!degenerate_without_solving(*pair, eps, 1.0)) {
    CensoredPair cp = solve_thresholds(pair, eps);
    if (!cp.degenerate) result = std::move(cp);
  }
  if (cache != nullptr) {
    cache->solved_mu = *mu_hat;
    cache->cp = result;
  }
  return result;
}

PluginStepResult plugin_efactor_step(const GaussianModel& null_model,
                                     MedianEstimator& estimator, double eps,
                                     double x_next, PluginSolveCache* cache) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("plugin step: eps must lie in (0, 1)");
  }
  PluginStepResult out;
  out.c_lo = kNaN;
  out.c_hi = kNaN;
  out.denom = kNaN;
  const auto cp = plugin_current_censoring(null_model, estimator, eps, cache);
  if (cp) {
    out.degenerate = false;
    out.log_factor = log_clamp_ratio(*cp, x_next) - cp->log_denom;
    out.factor = std::exp(out.log_factor);
    out.c_lo = cp->c_lo;
    out.c_hi = cp->c_hi;
    out.denom = cp->denom;
  }
  estimator.observe(x_next);
  return out;
}

}  // namespace robseq
