#include <doctest.h>

#include <cmath>

#include "robseq/config.hpp"
#include "robseq/experiments.hpp"

using namespace robseq;
using namespace robseq::experiments;

TEST_CASE("method and scenario name round trips") {
  CHECK(method_from_name("robust_simple") == Method::robust_simple);
  CHECK(method_from_name("nonrobust_ripr") == Method::nonrobust_ripr);
  CHECK(!method_from_name("bogus").has_value());
  CHECK(scenario_from_name("growth_vs_separation") ==
        Scenario::growth_vs_separation);
  CHECK(!scenario_from_name("bogus").has_value());
  CHECK(method_is_robust(Method::robust_combined));
  CHECK(!method_is_robust(Method::nonrobust_sprt));
}

TEST_CASE("identical config and seed give bit-identical CSV") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::simple_null_sanity;
  cfg.horizon = 400;
  cfg.replications = 3;
  cfg.seed = 99;
  const auto t1 = run_experiment(cfg);
  const auto t2 = run_experiment(cfg);
  CHECK(trace_csv(t1) == trace_csv(t2));
  CHECK(t1.stream_checksums == t2.stream_checksums);

  cfg.seed = 100;
  const auto t3 = run_experiment(cfg);
  CHECK(trace_csv(t1) != trace_csv(t3));
}

TEST_CASE("trace table shape and clipping") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::simple_null_sanity;
  cfg.horizon = 250;
  cfg.replications = 2;
  cfg.seed = 4;
  const auto table = run_experiment(cfg);
  REQUIRE(!table.series.empty());
  // checkpoints: 1..100 then every 100, horizon appended
  CHECK(table.checkpoints.front() == 1);
  CHECK(table.checkpoints.back() == 250);
  for (const auto& series : table.series) {
    CHECK(series.mean_log_wealth.size() == table.checkpoints.size());
    for (double v : series.mean_log_wealth) CHECK(v >= -745.0);
  }
  const auto csv = trace_csv(table);
  CHECK(csv.rfind("method,n,mean_log_wealth,stderr_log_wealth\n", 0) == 0);
}

TEST_CASE("slope summaries are exact on a constant-factor trace") {
  TraceTable table;
  table.checkpoints = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100,
                       110, 120, 130, 140, 150, 160, 170, 180, 190, 200};
  TraceTable::Series series;
  series.method = "synthetic";
  series.rep_log_wealth.resize(table.checkpoints.size());
  for (std::size_t cp = 0; cp < table.checkpoints.size(); ++cp) {
    series.rep_log_wealth[cp] = {0.25 * table.checkpoints[cp],
                                 0.25 * table.checkpoints[cp]};
  }
  table.series.push_back(series);
  const auto slopes = summarize_slopes(table, 1.0);
  REQUIRE(slopes.size() == 1);
  CHECK(slopes[0].slope == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(slopes[0].stderr_slope == 0.0);

  CHECK_THROWS_AS(summarize_slopes(table, 0.01), std::invalid_argument);
}

TEST_CASE("scenario smoke runs produce the advertised series") {
  for (Scenario s : {Scenario::simple_null_sanity, Scenario::growth_vs_eps_simple,
                     Scenario::no_contamination, Scenario::growth_vs_separation,
                     Scenario::composite_null_sanity,
                     Scenario::growth_vs_eps_composite,
                     Scenario::no_contamination_composite}) {
    ExperimentConfig cfg;
    cfg.scenario = s;
    cfg.horizon = 120;
    cfg.replications = 2;
    cfg.eps_values = {0.1, 0.01};
    cfg.mu_values = {0.5, 1.0};
    cfg.seed = 11;
    const auto table = run_experiment(cfg);
    CHECK(!table.series.empty());
    CHECK(!table.stream_checksums.empty());
  }
}

TEST_CASE("unknown methods in config are rejected") {
  CHECK_THROWS_AS(config::parse_string("[simple_null_sanity]\n"
                                       "methods = [\"nope\"]\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("[bogus_scenario]\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("[simple_null_sanity]\n"
                                       "mystery = 3\n"),
                  config::ConfigError);
  CHECK_THROWS_AS(config::parse_string("horizon = 10\n"),
                  config::ConfigError);
}

TEST_CASE("config parsing applies keys") {
  const auto configs = config::parse_string(
      "# growth experiment\n"
      "[growth_vs_eps_simple]\n"
      "eps_values = [0.1, 0.01]   # contamination grid\n"
      "horizon = 5000\n"
      "replications = 4\n"
      "seed = 77\n"
      "methods = [\"robust_simple\", \"nonrobust_sprt\"]\n"
      "\n"
      "[no_contamination]\n"
      "mu1 = 0.75\n");
  REQUIRE(configs.size() == 2);
  CHECK(configs[0].scenario == Scenario::growth_vs_eps_simple);
  CHECK(configs[0].eps_values == std::vector<double>{0.1, 0.01});
  CHECK(configs[0].horizon == 5000);
  CHECK(configs[0].replications == 4);
  CHECK(configs[0].seed == 77);
  REQUIRE(configs[0].methods.size() == 2);
  CHECK(configs[0].methods[0] == Method::robust_simple);
  CHECK(configs[1].scenario == Scenario::no_contamination);
  CHECK(configs[1].mu1 == 0.75);
}

TEST_CASE("validity harness smoke: iid contamination stays level-alpha") {
  ValidityCellConfig cell;
  cell.name = "smoke";
  cell.method.method = Method::robust_simple;
  cell.method.eps = 0.01;
  cell.adversary = AdversaryKind::iid_mixture;
  cell.null_member = std::make_shared<GaussianModel>(0.0, 1.0);
  cell.contaminant = std::make_shared<CauchyModel>(-1.0, 10.0);
  cell.adversary_eps = 0.01;
  cell.alpha = 0.05;
  cell.horizon = 1500;
  cell.replications = 300;
  cell.seed = 51;
  const auto result = run_validity_cell(cell);
  CHECK(result.replications == 300);
  // 0.05 + 3 sigma margin at 300 replications
  CHECK(result.fraction() <= 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 300.0));
}

TEST_CASE("wealth mean under the adaptive worst case stays near 1") {
  // supermartingale mean check at fixed checkpoints, for the fixed-threshold
  // factor and the plug-in whose thresholds move
  auto run_mean_check = [](Method m, std::uint32_t reps, std::uint64_t horizon,
                           std::uint64_t seed) {
    std::vector<std::uint64_t> cps{10, 100, horizon};
    std::vector<std::vector<double>> wealth(cps.size(),
                                            std::vector<double>(reps, 0.0));
    parallel_for(reps, [&](std::uint32_t rep) {
      Rng rng = Rng::for_replication(seed, rep);
      MethodSetup setup;
      setup.method = m;
      setup.eps = 0.02;
      auto method = make_method(setup);
      const bool adaptive = method->adaptive_thresholds();
      auto adversary = worst_case_adaptive_adversary(
          std::make_shared<GaussianModel>(0.0, 1.0), 0.02,
          adaptive ? std::nullopt : method->upper_point());
      double log_wealth = 0.0;
      for (std::uint64_t n = 1; n <= horizon; ++n) {
        AdversaryContext ctx{n, log_wealth,
                             adaptive ? method->upper_point() : std::nullopt};
        log_wealth += method->log_step(adversary->next_observation(rng, ctx));
        for (std::size_t c = 0; c < cps.size(); ++c) {
          if (n == cps[c]) wealth[c][rep] = std::exp(log_wealth);
        }
      }
    });
    for (const auto& v : wealth) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= v.size();
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= (v.size() - 1.0);
      const double se = std::sqrt(var / v.size());
      CHECK(mean <= 1.0 + 3.0 * se);
    }
  };
  run_mean_check(Method::robust_simple, 2000, 1000, 4242);
  run_mean_check(Method::robust_plugin, 500, 600, 4243);
}
