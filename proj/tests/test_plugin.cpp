#include <doctest.h>

#include <cmath>
#include <vector>

#include "robseq/evalues.hpp"
#include "robseq/plugin.hpp"
#include "robseq/rng.hpp"

using namespace robseq;

TEST_CASE("alternative class projection") {
  const auto neq = AlternativeClass::not_equal(0.0);
  CHECK(neq.project(0.7) == 0.7);
  CHECK(neq.project(-2.0) == -2.0);
  CHECK(neq.project(0.0) == doctest::Approx(1e-8));

  const auto outside = AlternativeClass::outside_interval(-0.5, 0.5);
  CHECK(outside.project(0.8) == 0.8);
  CHECK(outside.project(-0.8) == -0.8);
  CHECK(outside.project(0.1) == 0.5);
  CHECK(outside.project(-0.1) == -0.5);
  CHECK(outside.project(0.0) == 0.5);  // tie broken toward +
  CHECK(outside.project(0.5) == 0.5);  // idempotent on the boundary
  CHECK(outside.contains(-0.5));
  CHECK(!outside.contains(0.3));
}

TEST_CASE("running median") {
  MedianEstimator est(AlternativeClass::not_equal(0.0));
  CHECK(!est.raw_median().has_value());
  CHECK(!est.current_alt().has_value());

  est.observe(0.2);
  est.observe(5.0);
  est.observe(0.4);
  // the outlier at 5 does not move the median
  CHECK(*est.raw_median() == doctest::Approx(0.4));
  CHECK(est.current_alt()->mu() == doctest::Approx(0.4));

  est.observe(0.0);
  // even count: average of the two central order statistics (0.2, 0.4)
  CHECK(*est.raw_median() == doctest::Approx(0.3));

  MedianEstimator proj(AlternativeClass::outside_interval(-0.5, 0.5));
  proj.observe(0.1);
  CHECK(*proj.current_mu() == 0.5);
  CHECK(proj.current_alt()->mu() == 0.5);
}

TEST_CASE("burn-in emits factor 1 and then feeds the estimator") {
  const GaussianModel null_model(0.0, 1.0);
  MedianEstimator est(AlternativeClass::not_equal(0.0));
  auto step = plugin_efactor_step(null_model, est, 0.05, 1.3);
  CHECK(step.degenerate);
  CHECK(step.factor == 1.0);
  CHECK(est.count() == 1);
  CHECK(*est.raw_median() == doctest::Approx(1.3));
}

TEST_CASE("a converged estimate reproduces the simple e-factor") {
  const GaussianModel null_model(0.0, 1.0);
  MedianEstimator est(AlternativeClass::not_equal(0.0));
  est.observe(1.0);  // median pinned exactly at mu1 = 1

  const EFactor simple =
      make_simple_efactor(make_gaussian_location_pair(0.0, 1.0), 0.05);
  for (double x : {-1.0, 0.3, 2.5}) {
    MedianEstimator fresh(AlternativeClass::not_equal(0.0));
    fresh.observe(1.0);
    const auto step = plugin_efactor_step(null_model, fresh, 0.05, x);
    CHECK(!step.degenerate);
    CHECK(step.factor == doctest::Approx(simple.evaluate(x)).epsilon(1e-12));
  }
}

TEST_CASE("predictability: the factor at n ignores the future") {
  const GaussianModel null_model(0.0, 1.0);
  const std::vector<double> past{0.9, 1.4, 0.7, 1.1};
  const double x_next = 0.55;

  auto run = [&](const std::vector<double>& future) {
    MedianEstimator est(AlternativeClass::not_equal(0.0));
    for (double x : past) est.observe(x);
    const auto step = plugin_efactor_step(null_model, est, 0.05, x_next);
    // feeding the future afterwards must not change the emitted factor
    MedianEstimator replay = est;
    for (double x : future) replay.observe(x);
    return step.factor;
  };
  const double a = run({5.0, -3.0, 0.2});
  const double b = run({0.0, 0.0, 9.9});
  CHECK(a == b);
}

TEST_CASE("threshold convergence along a contaminated run") {
  const GaussianModel null_model(0.0, 1.0);
  const double eps = 0.01;
  const EFactor oracle_factor =
      make_simple_efactor(make_gaussian_location_pair(0.0, 1.0), eps);
  const double c_hi_oracle = oracle_factor.censored().c_hi;

  Rng rng(411);
  MedianEstimator est(AlternativeClass::not_equal(0.0));
  double early_gap = 0.0, late_gap = 0.0;
  const int n = 20000;
  for (int i = 1; i <= n; ++i) {
    const double x = rng.uniform() < eps ? rng.cauchy(-1.0, 10.0)
                                         : rng.normal(1.0, 1.0);
    const auto step = plugin_efactor_step(null_model, est, eps, x);
    if (!step.degenerate) {
      const double gap = std::abs(step.c_hi - c_hi_oracle);
      if (i <= 200) early_gap = std::max(early_gap, gap);
      if (i > n - 1000) late_gap = std::max(late_gap, gap);
    }
  }
  CHECK(late_gap < 0.05 * c_hi_oracle);
  CHECK(late_gap < early_gap);
}

TEST_CASE("solve cache perturbs factors below the estimate tolerance scale") {
  const GaussianModel null_model(0.0, 1.0);
  const double eps = 0.01;
  Rng rng(88);
  std::vector<double> xs(4000);
  for (auto& x : xs) x = rng.normal(1.0, 1.0);

  MedianEstimator exact_est(AlternativeClass::not_equal(0.0));
  MedianEstimator cached_est(AlternativeClass::not_equal(0.0));
  PluginSolveCache cache;
  double max_gap = 0.0;
  for (double x : xs) {
    const auto exact = plugin_efactor_step(null_model, exact_est, eps, x);
    const auto cached =
        plugin_efactor_step(null_model, cached_est, eps, x, &cache);
    if (!exact.degenerate && !cached.degenerate) {
      max_gap = std::max(max_gap,
                         std::abs(exact.log_factor - cached.log_factor));
    }
  }
  CHECK(max_gap < 5e-3);
}

TEST_CASE("estimates at the null center fall back to factor 1") {
  const GaussianModel null_model(1.0, 1.0);
  MedianEstimator est(AlternativeClass::not_equal(0.0));
  est.observe(1.0);  // median == null mean
  const auto step = plugin_efactor_step(null_model, est, 0.05, 0.3);
  CHECK(step.degenerate);
  CHECK(step.factor == 1.0);
}
