#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robseq/rng.hpp"

namespace robseq {

// A distribution seen through its density (w.r.t. Lebesgue or counting
// measure), CDF and sampler. Models are immutable after construction and
// safe to share across threads; Rng state is always passed in.
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  virtual double log_density(double x) const = 0;
  virtual double density(double x) const;
  virtual double cdf(double x) const = 0;
  virtual double sample(Rng& rng) const = 0;
  virtual double total_mass() const { return 1.0; }
  const std::string& label() const { return label_; }

 protected:
  explicit DensityModel(std::string label) : label_(std::move(label)) {}
  std::string label_;
};

using ModelPtr = std::shared_ptr<const DensityModel>;

class GaussianModel final : public DensityModel {
 public:
  GaussianModel(double mu, double sigma = 1.0);
  double log_density(double x) const override;
  double cdf(double x) const override;
  double sample(Rng& rng) const override;
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

 private:
  double mu_, sigma_;
};

class CauchyModel final : public DensityModel {
 public:
  CauchyModel(double loc, double scale);
  double log_density(double x) const override;
  double density(double x) const override;
  double cdf(double x) const override;
  double sample(Rng& rng) const override;
  double loc() const { return loc_; }
  double scale() const { return scale_; }

 private:
  double loc_, scale_;
};

class MixtureModel final : public DensityModel {
 public:
  // weights must be nonnegative and sum to 1
  explicit MixtureModel(std::vector<std::pair<double, ModelPtr>> components);
  double log_density(double x) const override;
  double density(double x) const override;
  double cdf(double x) const override;
  double sample(Rng& rng) const override;
  const std::vector<std::pair<double, ModelPtr>>& components() const {
    return components_;
  }

 private:
  std::vector<std::pair<double, ModelPtr>> components_;
};

// Finite-support distribution over strictly increasing atoms. Sub-probability
// vectors (total mass < 1) are allowed; sampling requires mass 1.
struct DiscreteDist {
  std::vector<double> support;
  std::vector<double> probs;

  DiscreteDist() = default;
  DiscreteDist(std::vector<double> support_, std::vector<double> probs_);
  double total_mass() const;
  std::size_t size() const { return support.size(); }
};

double tv_distance(const DiscreteDist& a, const DiscreteDist& b);

class DiscreteModel final : public DensityModel {
 public:
  explicit DiscreteModel(DiscreteDist dist);
  double log_density(double x) const override;
  double density(double x) const override;  // counting measure
  double cdf(double x) const override;
  double sample(Rng& rng) const override;
  double total_mass() const override;
  const DiscreteDist& dist() const { return dist_; }

 private:
  DiscreteDist dist_;
};

// Degenerate distribution at a point. Used by adversaries; it has no density
// w.r.t. Lebesgue measure, so density queries throw.
class PointMassModel final : public DensityModel {
 public:
  explicit PointMassModel(double atom);
  double log_density(double x) const override;
  double cdf(double x) const override;
  double sample(Rng& rng) const override;
  double atom() const { return atom_; }

 private:
  double atom_;
};

// --- likelihood-ratio pairs ---------------------------------------------

// A null/alternative pair sharing a dominating measure, with the ratio
// queries the censoring solver needs. The null may be a sub-probability
// density with mass k <= 1.
class LikelihoodRatioPair {
 public:
  virtual ~LikelihoodRatioPair() = default;
  const ModelPtr& null_model() const { return null_; }
  const ModelPtr& alt_model() const { return alt_; }
  double null_mass() const { return null_->total_mass(); }

  virtual double log_ratio(double x) const = 0;
  double ratio(double x) const;

  // P0[ratio < c] when strict, else P0[ratio <= c]
  double ratio_cdf_null(double c, bool strict = false) const {
    return cdf_null_impl(c, strict);
  }
  double ratio_cdf_alt(double c, bool strict = false) const {
    return cdf_alt_impl(c, strict);
  }
  // E_P0[ratio * 1{c_lo < ratio <= c_hi}]
  virtual double expected_ratio_band_null(double c_lo, double c_hi) const = 0;

 protected:
  LikelihoodRatioPair(ModelPtr null_m, ModelPtr alt_m)
      : null_(std::move(null_m)), alt_(std::move(alt_m)) {}
  virtual double cdf_null_impl(double c, bool strict) const = 0;
  virtual double cdf_alt_impl(double c, bool strict) const = 0;
  ModelPtr null_, alt_;
};

using PairPtr = std::shared_ptr<const LikelihoodRatioPair>;

// N(mu0, sigma) vs N(mu1, sigma): log ratio is a*x - b, everything is in
// closed form through the normal CDF.
class GaussianPair final : public LikelihoodRatioPair {
 public:
  GaussianPair(double mu0, double mu1, double sigma = 1.0);
  double log_ratio(double x) const override;
  double expected_ratio_band_null(double c_lo, double c_hi) const override;

  double mu0() const { return mu0_; }
  double mu1() const { return mu1_; }
  double sigma() const { return sigma_; }
  double a() const { return a_; }
  double b() const { return b_; }
  // x with ratio(x) = c
  double crossing_x(double c) const;
  // E over X ~ N(m, sigma) of the clamped ratio
  double expected_clamp_under(double m, double c_lo, double c_hi) const;

 protected:
  double cdf_null_impl(double c, bool strict) const override;
  double cdf_alt_impl(double c, bool strict) const override;

 private:
  double ratio_cdf(double c, double mu) const;
  double mu0_, mu1_, sigma_, a_, b_;
};

class DiscretePair final : public LikelihoodRatioPair {
 public:
  DiscretePair(std::vector<double> support, std::vector<double> probs0,
               std::vector<double> probs1);
  double log_ratio(double x) const override;
  double expected_ratio_band_null(double c_lo, double c_hi) const override;

  const DiscreteDist& null_dist() const;
  const DiscreteDist& alt_dist() const;
  // per-atom ratio, +inf where p0 = 0 < p1, 1 where both are 0
  const std::vector<double>& atom_ratios() const { return ratios_; }

 protected:
  double cdf_null_impl(double c, bool strict) const override;
  double cdf_alt_impl(double c, bool strict) const override;

 private:
  std::size_t atom_index(double x) const;
  std::vector<double> ratios_;
  // atom indices sorted by ratio
  std::vector<std::size_t> order_;
};

// Fallback for pairs without closed forms: ratio CDFs and band expectations
// by adaptive Gauss-Kronrod quadrature over x = tan(u), abs tolerance 1e-10.
class QuadraturePair final : public LikelihoodRatioPair {
 public:
  QuadraturePair(ModelPtr null_m, ModelPtr alt_m);
  double log_ratio(double x) const override;
  double expected_ratio_band_null(double c_lo, double c_hi) const override;

 protected:
  double cdf_null_impl(double c, bool strict) const override;
  double cdf_alt_impl(double c, bool strict) const override;
};

// --- factory operations ---------------------------------------------------

PairPtr make_gaussian_location_pair(double mu0, double mu1, double sigma = 1.0);
PairPtr make_discrete_pair(std::vector<double> support,
                           std::vector<double> probs0,
                           std::vector<double> probs1);

// Draws from contaminant with probability eps_real, else from base; the
// density is the corresponding mixture.
ModelPtr make_contaminated_sampler(ModelPtr base, ModelPtr contaminant,
                                   double eps_real);

}  // namespace robseq
