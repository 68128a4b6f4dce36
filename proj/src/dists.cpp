#include "robseq/dists.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "robseq/normal.hpp"

namespace robseq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kInf = std::numeric_limits<double>::infinity();

// adaptive Gauss-Kronrod over the whole line through x = tan(u)
template <typename F>
double integrate_line(F&& f, double tol = 1e-10) {
  auto g = [&](double u) {
    const double c = std::cos(u);
    const double x = std::tan(u);
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (c * c);
  };
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          g, -kHalfPi, kHalfPi, 25, tol, &error);
  if (!(std::isfinite(value))) {
    throw std::runtime_error("quadrature failed to converge");
  }
  return value;
}
}  // namespace

double DensityModel::density(double x) const { return std::exp(log_density(x)); }

// --- Gaussian --------------------------------------------------------------

GaussianModel::GaussianModel(double mu, double sigma)
    : DensityModel("gaussian(mu=" + std::to_string(mu) +
                   ",sigma=" + std::to_string(sigma) + ")"),
      mu_(mu),
      sigma_(sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be > 0");
}

double GaussianModel::log_density(double x) const {
  const double z = (x - mu_) / sigma_;
  return -0.5 * z * z - std::log(sigma_) - kLogSqrt2Pi;
}

double GaussianModel::cdf(double x) const {
  return normal_cdf((x - mu_) / sigma_);
}

double GaussianModel::sample(Rng& rng) const { return rng.normal(mu_, sigma_); }

// --- Cauchy ----------------------------------------------------------------

CauchyModel::CauchyModel(double loc, double scale)
    : DensityModel("cauchy(loc=" + std::to_string(loc) +
                   ",scale=" + std::to_string(scale) + ")"),
      loc_(loc),
      scale_(scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("cauchy: scale must be > 0");
}

double CauchyModel::density(double x) const {
  const double t = (x - loc_) / scale_;
  return 1.0 / (kPi * scale_ * (1.0 + t * t));
}

double CauchyModel::log_density(double x) const {
  const double t = (x - loc_) / scale_;
  return -std::log(kPi * scale_) - std::log1p(t * t);
}

double CauchyModel::cdf(double x) const {
  return 0.5 + std::atan((x - loc_) / scale_) / kPi;
}

double CauchyModel::sample(Rng& rng) const { return rng.cauchy(loc_, scale_); }

// --- Mixture ---------------------------------------------------------------

MixtureModel::MixtureModel(std::vector<std::pair<double, ModelPtr>> components)
    : DensityModel("mixture"), components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("mixture: no components");
  double total = 0.0;
  for (const auto& [w, m] : components_) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    if (m == nullptr) throw std::invalid_argument("mixture: null component");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture: weights must sum to 1");
  }
}

double MixtureModel::density(double x) const {
  double d = 0.0;
  for (const auto& [w, m] : components_) {
    if (w > 0.0) d += w * m->density(x);
  }
  return d;
}

double MixtureModel::log_density(double x) const { return std::log(density(x)); }

double MixtureModel::cdf(double x) const {
  double c = 0.0;
  for (const auto& [w, m] : components_) {
    if (w > 0.0) c += w * m->cdf(x);
  }
  return c;
}

double MixtureModel::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& [w, m] : components_) {
    acc += w;
    if (u < acc) return m->sample(rng);
  }
  return components_.back().second->sample(rng);
}

// --- Discrete ----------------------------------------------------------------

DiscreteDist::DiscreteDist(std::vector<double> support_,
                           std::vector<double> probs_)
    : support(std::move(support_)), probs(std::move(probs_)) {
  if (support.size() != probs.size()) {
    throw std::invalid_argument("discrete: mismatched lengths");
  }
  if (support.empty()) throw std::invalid_argument("discrete: empty support");
  for (std::size_t i = 0; i + 1 < support.size(); ++i) {
    if (!(support[i] < support[i + 1])) {
      throw std::invalid_argument("discrete: support must be strictly increasing");
    }
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("discrete: negative mass");
    total += p;
  }
  if (total > 1.0 + 1e-12) {
    throw std::invalid_argument("discrete: total mass exceeds 1");
  }
}

double DiscreteDist::total_mass() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double tv_distance(const DiscreteDist& a, const DiscreteDist& b) {
  if (a.support != b.support) {
    throw std::invalid_argument("tv_distance: supports differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    s += std::abs(a.probs[i] - b.probs[i]);
  }
  return 0.5 * s;
}

DiscreteModel::DiscreteModel(DiscreteDist dist)
    : DensityModel("discrete(" + std::to_string(dist.size()) + " atoms)"),
      dist_(std::move(dist)) {}

double DiscreteModel::density(double x) const {
  const auto it =
      std::lower_bound(dist_.support.begin(), dist_.support.end(), x);
  if (it != dist_.support.end() && *it == x) {
    return dist_.probs[static_cast<std::size_t>(it - dist_.support.begin())];
  }
  return 0.0;
}

double DiscreteModel::log_density(double x) const { return std::log(density(x)); }

double DiscreteModel::cdf(double x) const {
  double c = 0.0;
  for (std::size_t i = 0; i < dist_.size() && dist_.support[i] <= x; ++i) {
    c += dist_.probs[i];
  }
  return c;
}

double DiscreteModel::total_mass() const { return dist_.total_mass(); }

double DiscreteModel::sample(Rng& rng) const {
  if (std::abs(dist_.total_mass() - 1.0) > 1e-9) {
    throw std::logic_error("discrete: cannot sample a sub-probability model");
  }
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < dist_.size(); ++i) {
    acc += dist_.probs[i];
    if (u < acc) return dist_.support[i];
  }
  return dist_.support.back();
}

// --- Point mass -------------------------------------------------------------

PointMassModel::PointMassModel(double atom)
    : DensityModel("point_mass(" + std::to_string(atom) + ")"), atom_(atom) {}

double PointMassModel::log_density(double) const {
  throw std::logic_error("point mass has no density w.r.t. Lebesgue measure");
}

double PointMassModel::cdf(double x) const { return x >= atom_ ? 1.0 : 0.0; }

double PointMassModel::sample(Rng&) const { return atom_; }

// --- pairs -------------------------------------------------------------------

double LikelihoodRatioPair::ratio(double x) const {
  const double lr = log_ratio(x);
  return std::exp(lr);
}

GaussianPair::GaussianPair(double mu0, double mu1, double sigma)
    : LikelihoodRatioPair(std::make_shared<GaussianModel>(mu0, sigma),
                          std::make_shared<GaussianModel>(mu1, sigma)),
      mu0_(mu0),
      mu1_(mu1),
      sigma_(sigma) {
  if (mu0 == mu1) throw std::invalid_argument("degenerate pair: equal means");
  const double s2 = sigma * sigma;
  a_ = (mu1 - mu0) / s2;
  b_ = (mu1 * mu1 - mu0 * mu0) / (2.0 * s2);
}

double GaussianPair::log_ratio(double x) const { return a_ * x - b_; }

double GaussianPair::crossing_x(double c) const {
  return (std::log(c) + b_) / a_;
}

double GaussianPair::ratio_cdf(double c, double mu) const {
  if (!(c > 0.0)) return 0.0;
  if (c == kInf) return 1.0;
  const double z = (crossing_x(c) - mu) / sigma_;
  return a_ > 0 ? normal_cdf(z) : normal_sf(z);
}

double GaussianPair::cdf_null_impl(double c, bool) const {
  return ratio_cdf(c, mu0_);
}

double GaussianPair::cdf_alt_impl(double c, bool) const {
  return ratio_cdf(c, mu1_);
}

double GaussianPair::expected_ratio_band_null(double c_lo, double c_hi) const {
  if (!(c_hi > 0.0) || c_lo >= c_hi) return 0.0;
  double xa, xb;  // x-interval carrying ratios in (c_lo, c_hi]
  if (a_ > 0) {
    xa = c_lo > 0.0 ? crossing_x(c_lo) : -kInf;
    xb = c_hi < kInf ? crossing_x(c_hi) : kInf;
  } else {
    xa = c_hi < kInf ? crossing_x(c_hi) : -kInf;
    xb = c_lo > 0.0 ? crossing_x(c_lo) : kInf;
  }
  // exp(a x - b) phi((x-mu0)/sigma)/sigma tilts the mean to mu0 + a sigma^2
  const double shift = mu0_ + a_ * sigma_ * sigma_;
  const double za = xa == -kInf ? -kInf : (xa - shift) / sigma_;
  const double zb = xb == kInf ? kInf : (xb - shift) / sigma_;
  const double tilt =
      std::exp(a_ * mu0_ - b_ + 0.5 * a_ * a_ * sigma_ * sigma_);
  const double pa = za == -kInf ? 0.0 : normal_cdf(za);
  const double pb = zb == kInf ? 1.0 : normal_cdf(zb);
  return tilt * (pb - pa);
}

double GaussianPair::expected_clamp_under(double m, double c_lo,
                                          double c_hi) const {
  const double xl = crossing_x(c_lo);
  const double xu = crossing_x(c_hi);
  double p_lower, p_upper;
  if (a_ > 0) {
    p_lower = normal_cdf((xl - m) / sigma_);
    p_upper = normal_sf((xu - m) / sigma_);
  } else {
    p_lower = normal_sf((xl - m) / sigma_);
    p_upper = normal_cdf((xu - m) / sigma_);
  }
  const double shift = m + a_ * sigma_ * sigma_;
  const double lo_x = std::min(xl, xu);
  const double hi_x = std::max(xl, xu);
  const double tilt = std::exp(a_ * m - b_ + 0.5 * a_ * a_ * sigma_ * sigma_);
  const double band = normal_cdf((hi_x - shift) / sigma_) -
                      normal_cdf((lo_x - shift) / sigma_);
  return c_lo * p_lower + c_hi * p_upper + tilt * band;
}

// --- discrete pair -----------------------------------------------------------

DiscretePair::DiscretePair(std::vector<double> support,
                           std::vector<double> probs0,
                           std::vector<double> probs1)
    : LikelihoodRatioPair(nullptr, nullptr) {
  if (support.size() != probs0.size() || support.size() != probs1.size()) {
    throw std::invalid_argument("discrete pair: mismatched lengths");
  }
  DiscreteDist d0(support, std::move(probs0));
  DiscreteDist d1(std::move(support), std::move(probs1));
  if (std::abs(d1.total_mass() - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete pair: alt must be a probability vector");
  }
  ratios_.resize(d0.size());
  for (std::size_t i = 0; i < d0.size(); ++i) {
    if (d0.probs[i] > 0.0) {
      ratios_[i] = d1.probs[i] / d0.probs[i];
    } else {
      ratios_[i] = d1.probs[i] > 0.0 ? kInf : 1.0;
    }
  }
  order_.resize(d0.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t l, std::size_t r) {
    return ratios_[l] < ratios_[r];
  });
  null_ = std::make_shared<DiscreteModel>(std::move(d0));
  alt_ = std::make_shared<DiscreteModel>(std::move(d1));
}

const DiscreteDist& DiscretePair::null_dist() const {
  return static_cast<const DiscreteModel&>(*null_).dist();
}

const DiscreteDist& DiscretePair::alt_dist() const {
  return static_cast<const DiscreteModel&>(*alt_).dist();
}

std::size_t DiscretePair::atom_index(double x) const {
  const auto& sup = null_dist().support;
  const auto it = std::lower_bound(sup.begin(), sup.end(), x);
  if (it == sup.end() || *it != x) {
    throw std::invalid_argument("discrete pair: x is not a support atom");
  }
  return static_cast<std::size_t>(it - sup.begin());
}

double DiscretePair::log_ratio(double x) const {
  return std::log(ratios_[atom_index(x)]);
}

double DiscretePair::cdf_null_impl(double c, bool strict) const {
  const auto& p = null_dist().probs;
  double s = 0.0;
  for (std::size_t i : order_) {
    if (strict ? ratios_[i] < c : ratios_[i] <= c) s += p[i];
    else break;
  }
  return s;
}

double DiscretePair::cdf_alt_impl(double c, bool strict) const {
  const auto& p = alt_dist().probs;
  double s = 0.0;
  for (std::size_t i : order_) {
    if (strict ? ratios_[i] < c : ratios_[i] <= c) s += p[i];
    else break;
  }
  return s;
}

double DiscretePair::expected_ratio_band_null(double c_lo, double c_hi) const {
  const auto& p = null_dist().probs;
  double s = 0.0;
  for (std::size_t i : order_) {
    if (p[i] > 0.0 && ratios_[i] > c_lo && ratios_[i] <= c_hi) {
      s += p[i] * ratios_[i];
    }
  }
  return s;
}

// --- quadrature pair ----------------------------------------------------------

QuadraturePair::QuadraturePair(ModelPtr null_m, ModelPtr alt_m)
    : LikelihoodRatioPair(std::move(null_m), std::move(alt_m)) {}

double QuadraturePair::log_ratio(double x) const {
  return alt_->log_density(x) - null_->log_density(x);
}

double QuadraturePair::cdf_null_impl(double c, bool) const {
  if (!(c > 0.0)) return 0.0;
  const double log_c = std::log(c);
  return integrate_line([&](double x) {
    return log_ratio(x) <= log_c ? null_->density(x) : 0.0;
  });
}

double QuadraturePair::cdf_alt_impl(double c, bool) const {
  if (!(c > 0.0)) return 0.0;
  const double log_c = std::log(c);
  return integrate_line([&](double x) {
    return log_ratio(x) <= log_c ? alt_->density(x) : 0.0;
  });
}

double QuadraturePair::expected_ratio_band_null(double c_lo,
                                                double c_hi) const {
  return integrate_line([&](double x) {
    const double r = ratio(x);
    return (r > c_lo && r <= c_hi) ? r * null_->density(x) : 0.0;
  });
}

// --- factories ------------------------------------------------------------------

PairPtr make_gaussian_location_pair(double mu0, double mu1, double sigma) {
  return std::make_shared<GaussianPair>(mu0, mu1, sigma);
}

PairPtr make_discrete_pair(std::vector<double> support,
                           std::vector<double> probs0,
                           std::vector<double> probs1) {
  return std::make_shared<DiscretePair>(std::move(support), std::move(probs0),
                                        std::move(probs1));
}

ModelPtr make_contaminated_sampler(ModelPtr base, ModelPtr contaminant,
                                   double eps_real) {
  if (!(eps_real >= 0.0 && eps_real < 1.0)) {
    throw std::invalid_argument("eps_real must lie in [0, 1)");
  }
  if (eps_real == 0.0) return base;
  std::vector<std::pair<double, ModelPtr>> comps{
      {1.0 - eps_real, std::move(base)}, {eps_real, std::move(contaminant)}};
  return std::make_shared<MixtureModel>(std::move(comps));
}

}  // namespace robseq
