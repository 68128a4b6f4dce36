#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "robseq/dists.hpp"
#include "robseq/normal.hpp"

using namespace robseq;

namespace {

// Kolmogorov-Smirnov statistic of sorted samples against a model CDF
double ks_statistic(std::vector<double> samples, const DensityModel& model) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = model.cdf(samples[i]);
    ks = std::max(ks, std::abs((i + 1) / n - f));
    ks = std::max(ks, std::abs(i / n - f));
  }
  return ks;
}

double integrate_line(const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double u) {
        const double c = std::cos(u);
        return f(std::tan(u)) / (c * c);
      },
      -1.5707963267948966, 1.5707963267948966, 20, 1e-9);
}

}  // namespace

TEST_CASE("gaussian pair closed forms") {
  const auto pair = make_gaussian_location_pair(0.0, 1.0);

  SUBCASE("ratio at the symmetric midpoint is exactly 1") {
    CHECK(pair->ratio(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pair->ratio(2.0) == doctest::Approx(std::exp(1.5)).epsilon(1e-14));
  }

  SUBCASE("ratio cdf under the null at c=1 is Phi(1/2)") {
    CHECK(std::abs(pair->ratio_cdf_null(1.0) - 0.6914624612740131) < 1e-12);
    // independent region check: P0[ratio <= 1] integrates phi over x <= 1/2
    const double quad =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            [](double x) { return normal_pdf(x); }, -40.0, 0.5, 15, 1e-12);
    CHECK(std::abs(pair->ratio_cdf_null(1.0) - quad) < 1e-8);
  }

  SUBCASE("full-line band expectation is the total ratio mass 1") {
    const double full = pair->expected_ratio_band_null(
        0.0, std::numeric_limits<double>::infinity());
    CHECK(full == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("band expectation against quadrature") {
    const double band = pair->expected_ratio_band_null(0.7, 1.9);
    const double quad = integrate_line([&](double x) {
      const double r = std::exp(x - 0.5);
      return (r > 0.7 && r <= 1.9) ? r * normal_pdf(x) : 0.0;
    });
    // the indicator integrand limits adaptive quadrature accuracy here
    CHECK(band == doctest::Approx(quad).epsilon(1e-6));
  }

  SUBCASE("alt cdf matches quadrature at 1e-8") {
    const double cdf = pair->ratio_cdf_alt(1.7);
    const double x_c = std::log(1.7) + 0.5;
    const double quad =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            [](double x) { return normal_pdf(x - 1.0); }, -40.0, x_c, 15,
            1e-12);
    CHECK(cdf == doctest::Approx(quad).epsilon(1e-8));
  }

  SUBCASE("negative drift pair flips the monotonicity") {
    const auto down = make_gaussian_location_pair(1.0, 0.0);
    // ratio is decreasing in x; cdf at c=1 is P0[x >= 1/2]
    CHECK(std::abs(down->ratio_cdf_null(1.0) - normal_sf(-0.5)) < 1e-12);
  }

  SUBCASE("equal means are rejected") {
    CHECK_THROWS_WITH_AS(make_gaussian_location_pair(0.3, 0.3),
                         doctest::Contains("degenerate pair"),
                         std::invalid_argument);
  }
}

TEST_CASE("discrete pair basics") {
  const std::vector<double> support{0.0, 1.0};
  const auto pair = make_discrete_pair(support, {0.5, 0.5}, {0.25, 0.75});

  SUBCASE("atom ratios by direct division") {
    CHECK(pair->ratio(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pair->ratio(1.0) == doctest::Approx(1.5).epsilon(1e-15));
  }

  SUBCASE("ratio cdf counts only the low atom at c=1") {
    CHECK(pair->ratio_cdf_null(1.0) == doctest::Approx(0.5));
    CHECK(pair->ratio_cdf_null(0.5) == doctest::Approx(0.5));
    CHECK(pair->ratio_cdf_null(0.5, /*strict=*/true) == doctest::Approx(0.0));
  }

  SUBCASE("identical vectors give unit ratio everywhere") {
    const auto same = make_discrete_pair(support, {0.5, 0.5}, {0.5, 0.5});
    CHECK(same->ratio(0.0) == 1.0);
    CHECK(same->ratio(1.0) == 1.0);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(make_discrete_pair({0.0}, {1.0}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_discrete_pair(support, {0.5, 0.5}, {-0.25, 1.25}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_discrete_pair({1.0, 0.0}, {0.5, 0.5}, {0.5, 0.5}),
                    std::invalid_argument);
  }
}

TEST_CASE("contaminated sampler") {
  const auto base = std::make_shared<GaussianModel>(1.0, 1.0);
  const auto contaminant = std::make_shared<CauchyModel>(-1.0, 10.0);

  SUBCASE("eps 0 returns the base distribution") {
    const auto model = make_contaminated_sampler(base, contaminant, 0.0);
    Rng rng(7);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = model->sample(rng);
    CHECK(ks_statistic(std::move(xs), *base) < 0.015);
  }

  SUBCASE("density is the mixture density") {
    const auto model = make_contaminated_sampler(base, contaminant, 0.01);
    for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
      const double expect =
          0.99 * base->density(x) + 0.01 * contaminant->density(x);
      CHECK(model->density(x) == doctest::Approx(expect).epsilon(1e-14));
    }
  }

  SUBCASE("mixture density integrates to 1") {
    const auto model = make_contaminated_sampler(base, contaminant, 0.01);
    const double total = integrate_line([&](double x) { return model->density(x); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("eps outside [0,1) is rejected") {
    CHECK_THROWS_AS(make_contaminated_sampler(base, contaminant, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_contaminated_sampler(base, contaminant, -0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("sampler/density consistency via Kolmogorov-Smirnov") {
  Rng rng(20240517);
  const std::size_t n = 100000;

  const GaussianModel gauss(0.0, 1.0);
  const CauchyModel cauchy(-1.0, 10.0);
  const auto mixture = make_contaminated_sampler(
      std::make_shared<GaussianModel>(0.0, 1.0),
      std::make_shared<CauchyModel>(-1.0, 10.0), 0.1);
  const DiscreteModel discrete(
      DiscreteDist({-1.0, 0.0, 2.0}, {0.2, 0.5, 0.3}));

  auto check_model = [&](const DensityModel& m) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = m.sample(rng);
    CHECK(ks_statistic(std::move(xs), m) < 0.01);
  };
  check_model(gauss);
  check_model(cauchy);
  check_model(*mixture);
  // atoms make the continuous KS statistic meaningless; compare frequencies
  {
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = discrete.sample(rng);
      for (std::size_t a = 0; a < 3; ++a) {
        if (x == discrete.dist().support[a]) ++counts[a];
      }
    }
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(std::abs(static_cast<double>(counts[a]) / n -
                     discrete.dist().probs[a]) < 0.01);
    }
  }
}

TEST_CASE("discrete dist validation and point mass") {
  CHECK_THROWS_AS(DiscreteDist({0.0, 1.0}, {0.6, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteDist({0.0, 0.0}, {0.5, 0.5}), std::invalid_argument);
  const DiscreteDist sub({0.0, 1.0}, {0.4, 0.4});
  CHECK(sub.total_mass() == doctest::Approx(0.8));

  const PointMassModel atom(2.5);
  Rng rng(1);
  CHECK(atom.sample(rng) == 2.5);
  CHECK(atom.cdf(2.4) == 0.0);
  CHECK(atom.cdf(2.5) == 1.0);
  CHECK_THROWS_AS(atom.density(2.5), std::logic_error);
}

TEST_CASE("quadrature pair agrees with gaussian closed forms") {
  const auto closed = make_gaussian_location_pair(0.0, 1.0);
  const QuadraturePair quad(std::make_shared<GaussianModel>(0.0, 1.0),
                            std::make_shared<GaussianModel>(1.0, 1.0));
  for (double c : {0.5, 1.0, 2.0}) {
    CHECK(quad.ratio_cdf_null(c) ==
          doctest::Approx(closed->ratio_cdf_null(c)).epsilon(1e-7));
  }
  CHECK(quad.expected_ratio_band_null(0.8, 1.6) ==
        doctest::Approx(closed->expected_ratio_band_null(0.8, 1.6))
            .epsilon(1e-7));
}
