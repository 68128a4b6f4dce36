#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "robseq/adversary.hpp"
#include "robseq/evalues.hpp"
#include "robseq/oracle.hpp"

using namespace robseq;

namespace {

double ks_against(std::vector<double> xs, const DensityModel& model) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = model.cdf(xs[i]);
    ks = std::max(ks, std::abs((i + 1) / n - f));
    ks = std::max(ks, std::abs(i / n - f));
  }
  return ks;
}

}  // namespace

TEST_CASE("iid mixture adversary") {
  const auto p0 = std::make_shared<GaussianModel>(0.0, 1.0);
  const auto h = std::make_shared<CauchyModel>(-1.0, 10.0);

  SUBCASE("eps 0 reduces to pure p0 sampling") {
    auto adv = iid_mixture_adversary(p0, h, 0.0);
    Rng rng(2);
    std::vector<double> xs(30000);
    AdversaryContext ctx;
    for (auto& x : xs) x = adv->next_observation(rng, ctx);
    CHECK(ks_against(std::move(xs), *p0) < 0.012);
  }

  SUBCASE("conditional law is constant over n and inside the model") {
    auto adv = iid_mixture_adversary(p0, h, 0.01);
    AdversaryContext early{1, 0.0, std::nullopt};
    AdversaryContext late{100000, 3.0, std::nullopt};
    const auto d1 = adv->decomposition(early);
    const auto d2 = adv->decomposition(late);
    CHECK(d1.eps == d2.eps);
    CHECK(d1.base == d2.base);
    // pointwise certificate on a grid: density >= (1-eps) * p0
    const auto mixture = make_contaminated_sampler(p0, h, 0.01);
    for (double x = -8.0; x <= 8.0; x += 0.25) {
      CHECK(mixture->density(x) >= 0.99 * p0->density(x) - 1e-300);
    }
  }
}

TEST_CASE("worst-case adaptive adversary maximizes the conditional mean") {
  const auto p0 = std::make_shared<GaussianModel>(0.0, 1.0);
  const double eps = 0.05;
  const EFactor ef = make_simple_efactor(make_gaussian_location_pair(0, 1), eps);
  const auto x_plus = ef.upper_point();
  REQUIRE(x_plus.has_value());

  SUBCASE("the frozen point sits at the upper clamp") {
    CHECK(ef.evaluate(*x_plus) ==
          doctest::Approx(ef.censored().c_hi / ef.denominator()));
  }

  SUBCASE("conditional mean stays at most 1 and the mixture attains it") {
    // analytic conditional mean of the factor under (1-eps) P0 + eps delta
    const auto& cp = ef.censored();
    const double mean =
        ((1.0 - eps) * cp.expected_clamp_null + eps * cp.c_hi) /
        ef.denominator();
    CHECK(mean <= 1.0 + 1e-12);

    // oracle confirmation on a discretized instance
    const int atoms = 1601;
    std::vector<double> support(atoms), probs(atoms), payoff(atoms);
    double total = 0.0;
    for (int i = 0; i < atoms; ++i) {
      support[i] = -8.0 + 16.0 * i / (atoms - 1);
      probs[i] = std::exp(-0.5 * support[i] * support[i]);
      total += probs[i];
    }
    for (int i = 0; i < atoms; ++i) {
      probs[i] /= total;
      payoff[i] = ef.evaluate(support[i]);
    }
    const auto [q, value] =
        oracle::tv_ball_maximize({DiscreteDist(support, probs), eps, payoff});
    // the slack covers the Riemann discretization of the member
    CHECK(value <= 1.0 + 5e-4);
  }

  SUBCASE("frozen and context modes emit the advertised decomposition") {
    auto frozen = worst_case_adaptive_adversary(p0, eps, x_plus);
    AdversaryContext ctx{1, 0.0, std::nullopt};
    const auto d = frozen->decomposition(ctx);
    CHECK(d.contaminant_atom == x_plus);

    auto dynamic = worst_case_adaptive_adversary(p0, eps, std::nullopt);
    AdversaryContext with_point{3, 0.0, 4.2};
    CHECK(dynamic->decomposition(with_point).contaminant_atom ==
          doctest::Approx(4.2));
    // no point available: pure p0
    CHECK(dynamic->decomposition(ctx).eps == 0.0);
    Rng rng(5);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = dynamic->next_observation(rng, ctx);
    CHECK(ks_against(std::move(xs), *p0) < 0.015);
  }

  SUBCASE("eps 0 reduces to pure p0") {
    auto adv = worst_case_adaptive_adversary(p0, 0.0, x_plus);
    Rng rng(6);
    AdversaryContext ctx{1, 0.0, x_plus};
    std::vector<double> xs(20000);
    for (auto& x : xs) x = adv->next_observation(rng, ctx);
    CHECK(ks_against(std::move(xs), *p0) < 0.015);
  }
}

TEST_CASE("delayed attack adversary") {
  const auto p0 = std::make_shared<GaussianModel>(0.0, 1.0);
  const auto h = std::make_shared<CauchyModel>(-1.0, 10.0);

  SUBCASE("never switches when switch_n is effectively infinite") {
    auto adv = delayed_attack_adversary(p0, 0.3, UINT64_MAX, h);
    Rng rng(7);
    std::vector<double> xs(30000);
    for (std::uint64_t n = 1; n <= xs.size(); ++n) {
      AdversaryContext ctx{n, -0.1, std::nullopt};  // wealth below 1 throughout
      xs[n - 1] = adv->next_observation(rng, ctx);
    }
    CHECK(ks_against(std::move(xs), *p0) < 0.012);
  }

  SUBCASE("switch_n = 1 behaves like the iid mixture from the start") {
    auto adv = delayed_attack_adversary(p0, 0.4, 1, h);
    AdversaryContext ctx{1, 0.0, std::nullopt};
    const auto d = adv->decomposition(ctx);
    CHECK(d.eps == 0.4);
    const auto mixture = make_contaminated_sampler(p0, h, 0.4);
    Rng rng(8);
    std::vector<double> xs(30000);
    for (std::uint64_t n = 1; n <= xs.size(); ++n) {
      AdversaryContext c{n, 0.0, std::nullopt};
      xs[n - 1] = adv->next_observation(rng, c);
    }
    CHECK(ks_against(std::move(xs), *mixture) < 0.012);
  }

  SUBCASE("wealth crossing 1 triggers the attack permanently") {
    auto adv = delayed_attack_adversary(p0, 0.5, 1000, h);
    Rng rng(9);
    AdversaryContext quiet{1, -0.5, std::nullopt};
    CHECK(adv->decomposition(quiet).eps == 0.0);
    AdversaryContext rich{2, 0.7, std::nullopt};
    (void)adv->next_observation(rng, rich);
    // attack latched even after the wealth falls back
    CHECK(adv->decomposition(quiet).eps == 0.5);
  }
}
