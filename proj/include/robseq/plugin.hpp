#pragma once

#include <optional>
#include <set>
#include <string>

#include "robseq/censoring.hpp"
#include "robseq/dists.hpp"

namespace robseq {

// One-dimensional location classes for the alternative. project() returns
// the nearest element of the closure of the set, ties broken toward +inf;
// for {mu != excluded} the excluded point maps to excluded + 1e-8.
class AlternativeClass {
 public:
  static AlternativeClass not_equal(double excluded);
  static AlternativeClass outside_interval(double a, double b);

  double project(double raw) const;
  bool contains(double mu) const;
  const std::string& describe() const { return text_; }

 private:
  enum class Kind { not_equal, outside_interval };
  Kind kind_;
  double p1_ = 0.0, p2_ = 0.0;
  std::string text_;
};

// Exact running median over the observations seen so far (two-multiset
// scheme); even counts average the two central order statistics. current_mu
// is the median projected into the alternative class.
class MedianEstimator {
 public:
  explicit MedianEstimator(AlternativeClass alt_class);

  void observe(double x);
  std::size_t count() const { return low_.size() + high_.size(); }
  std::optional<double> raw_median() const;
  std::optional<double> current_mu() const;
  std::optional<GaussianModel> current_alt() const;
  const AlternativeClass& alt_class() const { return class_; }

 private:
  void rebalance();
  AlternativeClass class_;
  std::multiset<double> low_;   // max half
  std::multiset<double> high_;  // min half
};

struct PluginStepResult {
  double factor = 1.0;
  double log_factor = 0.0;
  bool degenerate = true;
  // diagnostics; NaN when degenerate or before burn-in
  double c_lo = 0.0;
  double c_hi = 0.0;
  double denom = 1.0;
};

// Optional threshold cache: reuse the last solved censoring while the
// estimate has moved less than `tolerance`. Off by default; the reused factor
// is still a valid (predictable) e-factor since it corresponds to an older
// estimate.
struct PluginSolveCache {
  double tolerance = 1e-4;
  std::optional<double> solved_mu;
  std::optional<CensoredPair> cp;
};

// One predictable plug-in round: build the factor from the estimate fitted to
// observations strictly before x_next, then absorb x_next into the estimator.
// Emits 1 before burn-in and on degenerate censorings.
PluginStepResult plugin_efactor_step(const GaussianModel& null_model,
                                     MedianEstimator& estimator, double eps,
                                     double x_next,
                                     PluginSolveCache* cache = nullptr);

// The censoring for the upcoming round (estimate from past data only), or
// nullopt before burn-in / when degenerate. Shared by the step above and by
// adversaries that probe the current thresholds.
std::optional<CensoredPair> plugin_current_censoring(
    const GaussianModel& null_model, const MedianEstimator& estimator,
    double eps, PluginSolveCache* cache = nullptr);

}  // namespace robseq
