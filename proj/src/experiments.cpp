#include "robseq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace robseq::experiments {
namespace {

constexpr double kLogWealthFloor = -745.0;  // double-precision floor of log
constexpr double kCauchyLoc = -1.0;
constexpr double kCauchyScale = 10.0;

const char* kMethodNames[] = {
    "robust_simple",  "robust_plugin",    "robust_ripr",   "robust_combined",
    "nonrobust_sprt", "nonrobust_plugin", "nonrobust_ripr"};

const char* kScenarioNames[] = {"simple_null_sanity",
                                "growth_vs_eps_simple",
                                "no_contamination",
                                "growth_vs_separation",
                                "composite_null_sanity",
                                "growth_vs_eps_composite",
                                "no_contamination_composite"};

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::uint64_t fnv1a(const double* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[i], sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

// --- method implementations ---------------------------------------------------

class FixedFactorMethod final : public SequentialMethod {
 public:
  FixedFactorMethod(std::string label, EFactor ef)
      : SequentialMethod(std::move(label)),
        ef_(std::move(ef)),
        coeffs_(ef_.stream_coeffs()),
        up_(ef_.upper_point()) {}

  double log_step(double x) override {
    if (coeffs_) {
      const double t = std::fma(coeffs_->a, x, coeffs_->b);
      return std::min(coeffs_->hi, std::max(coeffs_->lo, t)) + coeffs_->shift;
    }
    return ef_.log_evaluate(x);
  }

  std::optional<double> upper_point() override { return up_; }
  const EFactor& factor() const { return ef_; }

 private:
  EFactor ef_;
  std::optional<EFactor::StreamCoeffs> coeffs_;
  std::optional<double> up_;
};

class LogRatioMethod final : public SequentialMethod {
 public:
  LogRatioMethod(std::string label, PairPtr pair)
      : SequentialMethod(std::move(label)), pair_(std::move(pair)) {}

  double log_step(double x) override { return pair_->log_ratio(x); }

 private:
  PairPtr pair_;
};

class RobustPluginMethod final : public SequentialMethod {
 public:
  RobustPluginMethod(GaussianModel null_model, AlternativeClass alt_class,
                     double eps, bool enable_cache)
      : SequentialMethod("robust_plugin"),
        null_(null_model),
        eps_(eps),
        estimator_(std::move(alt_class)) {
    if (enable_cache) cache_.emplace();
  }

  double log_step(double x) override {
    prepare();
    double lf = 0.0;
    if (cp_) lf = log_clamp_ratio(*cp_, x) - cp_->log_denom;
    estimator_.observe(x);
    return lf;
  }

  std::optional<double> upper_point() override {
    prepare();
    if (!cp_) return std::nullopt;
    const auto& gp = static_cast<const GaussianPair&>(*cp_->pair);
    const double crossing = gp.crossing_x(cp_->c_hi);
    return gp.a() > 0 ? crossing + 1.0 : crossing - 1.0;
  }

  bool adaptive_thresholds() const override { return true; }

 private:
  void prepare() {
    if (prepared_at_ == estimator_.count()) return;
    cp_ = plugin_current_censoring(null_, estimator_, eps_,
                                   cache_ ? &*cache_ : nullptr);
    prepared_at_ = estimator_.count();
  }

  GaussianModel null_;
  double eps_;
  MedianEstimator estimator_;
  std::optional<PluginSolveCache> cache_;
  std::optional<CensoredPair> cp_;
  std::size_t prepared_at_ = static_cast<std::size_t>(-1);
};

class NonrobustPluginMethod final : public SequentialMethod {
 public:
  NonrobustPluginMethod(GaussianModel null_model, AlternativeClass alt_class)
      : SequentialMethod("nonrobust_plugin"),
        null_(null_model),
        estimator_(std::move(alt_class)) {}

  double log_step(double x) override {
    double lf = 0.0;
    if (const auto mu = estimator_.current_mu();
        mu && *mu != null_.mu()) {
      const double s2 = null_.sigma() * null_.sigma();
      const double a = (*mu - null_.mu()) / s2;
      const double b = (*mu * *mu - null_.mu() * null_.mu()) / (2.0 * s2);
      lf = a * x - b;
    }
    estimator_.observe(x);
    return lf;
  }

 private:
  GaussianModel null_;
  MedianEstimator estimator_;
};

class RobustCombinedMethod final : public SequentialMethod {
 public:
  RobustCombinedMethod(CompositeNullSpec null_spec, AlternativeClass alt_class,
                       double eps, bool enable_cache)
      : SequentialMethod("robust_combined"),
        state_(std::move(null_spec), std::move(alt_class), eps, enable_cache) {
  }

  double log_step(double x) override {
    prepare();
    double lf = 0.0;
    if (current_) lf = current_->log_evaluate(x);
    state_.estimator.observe(x);
    return lf;
  }

  std::optional<double> upper_point() override {
    prepare();
    if (!current_) return std::nullopt;
    return current_->upper_point();
  }

  bool adaptive_thresholds() const override { return true; }

 private:
  void prepare() {
    if (prepared_at_ == state_.estimator.count()) return;
    const CombinedRound round = combined_current_round(
        state_, state_.cache ? &*state_.cache : nullptr);
    if (round.degenerate) {
      current_.reset();
    } else {
      current_ = EFactor::with_denominator(round.cp, round.denom);
    }
    prepared_at_ = state_.estimator.count();
  }

  CombinedState state_;
  std::optional<EFactor> current_;
  std::size_t prepared_at_ = static_cast<std::size_t>(-1);
};

}  // namespace

const char* method_name(Method m) { return kMethodNames[static_cast<int>(m)]; }

std::optional<Method> method_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kMethodNames[i]) return static_cast<Method>(i);
  }
  return std::nullopt;
}

bool method_is_robust(Method m) {
  return m == Method::robust_simple || m == Method::robust_plugin ||
         m == Method::robust_ripr || m == Method::robust_combined;
}

bool method_is_composite_null(Method m) {
  return m == Method::robust_ripr || m == Method::robust_combined ||
         m == Method::nonrobust_ripr;
}

const char* scenario_name(Scenario s) {
  return kScenarioNames[static_cast<int>(s)];
}

std::optional<Scenario> scenario_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    if (name == kScenarioNames[i]) return static_cast<Scenario>(i);
  }
  return std::nullopt;
}

MethodPtr make_method(const MethodSetup& setup) {
  switch (setup.method) {
    case Method::robust_simple: {
      PairPtr pair = setup.custom_pair
                         ? *setup.custom_pair
                         : make_gaussian_location_pair(setup.mu0, setup.mu1,
                                                       setup.sigma);
      return std::make_unique<FixedFactorMethod>(
          "robust_simple", EFactor::simple(std::move(pair), setup.eps));
    }
    case Method::robust_plugin: {
      const AlternativeClass cls =
          setup.alt_class ? *setup.alt_class
                          : AlternativeClass::not_equal(setup.mu0);
      return std::make_unique<RobustPluginMethod>(
          GaussianModel(setup.mu0, setup.sigma), cls, setup.eps,
          setup.enable_cache);
    }
    case Method::robust_ripr: {
      const CompositeNullSpec null_spec(
          ExpFamilySpec::gaussian_location_family(setup.sigma), setup.null_a,
          setup.null_b);
      return std::make_unique<FixedFactorMethod>(
          "robust_ripr", make_ripr_efactor(null_spec, setup.mu1, setup.eps));
    }
    case Method::robust_combined: {
      CompositeNullSpec null_spec(
          ExpFamilySpec::gaussian_location_family(setup.sigma), setup.null_a,
          setup.null_b);
      const AlternativeClass cls =
          setup.alt_class
              ? *setup.alt_class
              : AlternativeClass::outside_interval(setup.null_a, setup.null_b);
      return std::make_unique<RobustCombinedMethod>(
          std::move(null_spec), cls, setup.eps, setup.enable_cache);
    }
    case Method::nonrobust_sprt: {
      PairPtr pair = setup.custom_pair
                         ? *setup.custom_pair
                         : make_gaussian_location_pair(setup.mu0, setup.mu1,
                                                       setup.sigma);
      return std::make_unique<LogRatioMethod>("nonrobust_sprt",
                                              std::move(pair));
    }
    case Method::nonrobust_plugin: {
      const AlternativeClass cls =
          setup.alt_class ? *setup.alt_class
                          : AlternativeClass::not_equal(setup.mu0);
      return std::make_unique<NonrobustPluginMethod>(
          GaussianModel(setup.mu0, setup.sigma), cls);
    }
    case Method::nonrobust_ripr: {
      if (setup.mu1 >= setup.null_a && setup.mu1 <= setup.null_b) {
        throw std::invalid_argument(
            "nonrobust_ripr: alternative mean lies inside the null interval");
      }
      const double theta_star =
          std::clamp(setup.mu1, setup.null_a, setup.null_b);
      return std::make_unique<LogRatioMethod>(
          "nonrobust_ripr",
          make_gaussian_location_pair(theta_star, setup.mu1, setup.sigma));
    }
  }
  throw std::invalid_argument("unknown method");
}

void parallel_for(std::uint32_t count,
                  const std::function<void(std::uint32_t)>& body) {
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         std::max(1u, count));
  if (workers <= 1 || count <= 1) {
    for (std::uint32_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const std::uint32_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct SubRun {
  std::string suffix;   // "@eps=0.1" / "@mu=0.25" / ""
  double eps_a = 0.01;  // algorithm contamination budget
  double eps_r = 0.01;  // true contamination fraction
  double data_mu = 0.0;
  double method_mu1 = 1.0;  // simple-alternative mean for this sub-run
  // (method, series label)
  std::vector<std::pair<Method, std::string>> methods;
};

std::vector<double> default_eps_grid() { return {0.1, 0.01, 0.001}; }
std::vector<double> default_mu_grid() { return {0.25, 0.5, 0.75, 1.0}; }

std::vector<SubRun> plan_subruns(const ExperimentConfig& cfg) {
  std::vector<SubRun> subruns;
  auto methods_or_default = [&](std::vector<Method> defaults) {
    return cfg.methods.empty() ? defaults : cfg.methods;
  };
  auto label = [](Method m, const std::string& suffix) {
    return std::pair<Method, std::string>(m, method_name(m) + suffix);
  };

  switch (cfg.scenario) {
    case Scenario::simple_null_sanity: {
      SubRun run;
      run.eps_a = cfg.eps_algorithm;
      run.eps_r = cfg.eps_real;
      run.data_mu = cfg.mu0;
      run.method_mu1 = cfg.mu1;
      for (Method m : methods_or_default(
               {Method::robust_simple, Method::robust_plugin,
                Method::nonrobust_sprt, Method::nonrobust_plugin})) {
        run.methods.push_back(label(m, ""));
      }
      subruns.push_back(std::move(run));
      break;
    }
    case Scenario::composite_null_sanity: {
      SubRun run;
      run.eps_a = cfg.eps_algorithm;
      run.eps_r = cfg.eps_real;
      run.data_mu = cfg.mu0;
      run.method_mu1 = cfg.mu1;
      for (Method m : methods_or_default({Method::robust_ripr,
                                          Method::robust_combined,
                                          Method::nonrobust_ripr})) {
        run.methods.push_back(label(m, ""));
      }
      subruns.push_back(std::move(run));
      break;
    }
    case Scenario::growth_vs_eps_simple:
    case Scenario::growth_vs_eps_composite: {
      const bool composite = cfg.scenario == Scenario::growth_vs_eps_composite;
      const auto grid =
          cfg.eps_values.empty() ? default_eps_grid() : cfg.eps_values;
      for (double eps : grid) {
        SubRun run;
        run.suffix = "@eps=" + format_value(eps);
        run.eps_a = eps;
        run.eps_r = eps;
        run.data_mu = cfg.mu1;
        run.method_mu1 = cfg.mu1;
        const auto defaults =
            composite
                ? std::vector<Method>{Method::robust_ripr,
                                      Method::robust_combined,
                                      Method::nonrobust_ripr}
                : std::vector<Method>{Method::robust_simple,
                                      Method::robust_plugin,
                                      Method::nonrobust_sprt,
                                      Method::nonrobust_plugin};
        for (Method m : methods_or_default(defaults)) {
          run.methods.push_back(label(m, run.suffix));
        }
        subruns.push_back(std::move(run));
      }
      break;
    }
    case Scenario::no_contamination:
    case Scenario::no_contamination_composite: {
      const bool composite =
          cfg.scenario == Scenario::no_contamination_composite;
      const auto grid =
          cfg.eps_values.empty() ? default_eps_grid() : cfg.eps_values;
      bool first = true;
      for (double eps : grid) {
        SubRun run;
        run.suffix = "@eps=" + format_value(eps);
        run.eps_a = eps;
        run.eps_r = 0.0;
        run.data_mu = cfg.mu1;
        run.method_mu1 = cfg.mu1;
        const auto robust =
            composite ? std::vector<Method>{Method::robust_ripr,
                                            Method::robust_combined}
                      : std::vector<Method>{Method::robust_simple,
                                            Method::robust_plugin};
        for (Method m : methods_or_default(robust)) {
          if (method_is_robust(m)) {
            run.methods.push_back(label(m, run.suffix));
          } else if (first) {
            run.methods.push_back(label(m, ""));
          }
        }
        // the clean-data stream is identical across eps values, so the
        // non-robust baselines run once
        if (cfg.methods.empty() && first) {
          if (composite) {
            run.methods.push_back(label(Method::nonrobust_ripr, ""));
          } else {
            run.methods.push_back(label(Method::nonrobust_sprt, ""));
            run.methods.push_back(label(Method::nonrobust_plugin, ""));
          }
        }
        first = false;
        subruns.push_back(std::move(run));
      }
      break;
    }
    case Scenario::growth_vs_separation: {
      const auto grid =
          cfg.mu_values.empty() ? default_mu_grid() : cfg.mu_values;
      for (double mu : grid) {
        SubRun run;
        run.suffix = "@mu=" + format_value(mu);
        run.eps_a = cfg.eps_algorithm;
        run.eps_r = cfg.eps_real;
        run.data_mu = mu;
        run.method_mu1 = mu;
        for (Method m : methods_or_default(
                 {Method::robust_simple, Method::robust_plugin})) {
          run.methods.push_back(label(m, run.suffix));
        }
        subruns.push_back(std::move(run));
      }
      break;
    }
  }
  return subruns;
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t n = 1; n <= std::min<std::uint64_t>(100, horizon); ++n) {
    cps.push_back(n);
  }
  for (std::uint64_t n = 200; n <= horizon; n += 100) cps.push_back(n);
  if (cps.back() != horizon) cps.push_back(horizon);
  return cps;
}

}  // namespace

TraceTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) {
    throw std::invalid_argument("run_experiment: replications must be >= 1");
  }
  if (cfg.horizon < 1) {
    throw std::invalid_argument("run_experiment: horizon must be >= 1");
  }
  const auto subruns = plan_subruns(cfg);
  const auto cps = checkpoint_grid(cfg.horizon);
  const std::uint32_t reps = cfg.replications;

  // flattened series setups
  struct SeriesSetup {
    std::size_t subrun;
    MethodSetup setup;
    std::string label;
  };
  std::vector<SeriesSetup> series_setups;
  for (std::size_t s = 0; s < subruns.size(); ++s) {
    for (const auto& [m, lbl] : subruns[s].methods) {
      MethodSetup setup;
      setup.method = m;
      setup.eps = subruns[s].eps_a;
      setup.mu0 = cfg.mu0;
      setup.mu1 = subruns[s].method_mu1;
      setup.null_a = cfg.null_a;
      setup.null_b = cfg.null_b;
      series_setups.push_back({s, setup, lbl});
    }
  }

  TraceTable table;
  table.checkpoints = cps;
  table.series.resize(series_setups.size());
  for (std::size_t i = 0; i < series_setups.size(); ++i) {
    table.series[i].method = series_setups[i].label;
    table.series[i].rep_log_wealth.assign(cps.size(),
                                          std::vector<double>(reps, 0.0));
  }
  table.stream_checksums.assign(subruns.size() * reps, 0);

  parallel_for(reps, [&](std::uint32_t rep) {
    Rng rng = Rng::for_replication(cfg.seed, rep);
    // common random numbers shared across sub-runs: one (uniform, normal,
    // cauchy) triple per step
    std::vector<double> u(cfg.horizon), z(cfg.horizon), c(cfg.horizon);
    for (std::uint64_t i = 0; i < cfg.horizon; ++i) {
      u[i] = rng.uniform();
      z[i] = rng.normal();
      c[i] = rng.cauchy(0.0, 1.0);
    }
    std::vector<double> x(cfg.horizon);
    for (std::size_t s = 0; s < subruns.size(); ++s) {
      const auto& run = subruns[s];
      for (std::uint64_t i = 0; i < cfg.horizon; ++i) {
        x[i] = u[i] < run.eps_r ? kCauchyLoc + kCauchyScale * c[i]
                                : run.data_mu + z[i];
      }
      table.stream_checksums[s * reps + rep] = fnv1a(x.data(), x.size());
      for (std::size_t si = 0; si < series_setups.size(); ++si) {
        if (series_setups[si].subrun != s) continue;
        MethodPtr method = make_method(series_setups[si].setup);
        const std::uint64_t consumed_checksum = fnv1a(x.data(), x.size());
        if (consumed_checksum != table.stream_checksums[s * reps + rep]) {
          throw std::logic_error("paired-stream discipline violated");
        }
        double log_wealth = 0.0;
        std::size_t cp_idx = 0;
        for (std::uint64_t n = 1; n <= cfg.horizon; ++n) {
          log_wealth += method->log_step(x[n - 1]);
          if (cp_idx < cps.size() && cps[cp_idx] == n) {
            table.series[si].rep_log_wealth[cp_idx][rep] =
                std::max(log_wealth, kLogWealthFloor);
            ++cp_idx;
          }
        }
      }
    }
  });

  for (auto& series : table.series) {
    series.mean_log_wealth.resize(cps.size());
    series.stderr_log_wealth.resize(cps.size());
    for (std::size_t cp = 0; cp < cps.size(); ++cp) {
      const auto& v = series.rep_log_wealth[cp];
      double mean = 0.0;
      for (double val : v) mean += val;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double val : v) var += (val - mean) * (val - mean);
      var = v.size() > 1 ? var / (static_cast<double>(v.size()) - 1.0) : 0.0;
      series.mean_log_wealth[cp] = mean;
      series.stderr_log_wealth[cp] =
          std::sqrt(var / static_cast<double>(v.size()));
    }
  }
  return table;
}

std::vector<SlopeSummary> summarize_slopes(const TraceTable& table,
                                           double window_fraction) {
  if (table.checkpoints.empty()) {
    throw std::invalid_argument("summarize_slopes: empty table");
  }
  const double max_n = static_cast<double>(table.checkpoints.back());
  const double start = max_n * (1.0 - window_fraction);
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < table.checkpoints.size(); ++i) {
    if (static_cast<double>(table.checkpoints[i]) >= start) window.push_back(i);
  }
  if (window.size() < 10) {
    throw std::invalid_argument("summarize_slopes: window too short");
  }

  std::vector<SlopeSummary> out;
  for (const auto& series : table.series) {
    const std::size_t reps = series.rep_log_wealth.front().size();
    std::vector<double> slopes(reps, 0.0);
    double nbar = 0.0;
    for (std::size_t i : window) {
      nbar += static_cast<double>(table.checkpoints[i]);
    }
    nbar /= static_cast<double>(window.size());
    for (std::size_t r = 0; r < reps; ++r) {
      double sxy = 0.0, sxx = 0.0, ybar = 0.0;
      for (std::size_t i : window) ybar += series.rep_log_wealth[i][r];
      ybar /= static_cast<double>(window.size());
      for (std::size_t i : window) {
        const double dx = static_cast<double>(table.checkpoints[i]) - nbar;
        sxy += dx * (series.rep_log_wealth[i][r] - ybar);
        sxx += dx * dx;
      }
      slopes[r] = sxy / sxx;
    }
    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var = reps > 1 ? var / (static_cast<double>(reps) - 1.0) : 0.0;
    out.push_back(SlopeSummary{series.method, mean,
                               std::sqrt(var / static_cast<double>(reps))});
  }
  return out;
}

std::string trace_csv(const TraceTable& table) {
  std::string out = "method,n,mean_log_wealth,stderr_log_wealth\n";
  char buf[256];
  for (const auto& series : table.series) {
    for (std::size_t cp = 0; cp < table.checkpoints.size(); ++cp) {
      std::snprintf(buf, sizeof(buf), "%s,%" PRIu64 ",%.17g,%.17g\n",
                    series.method.c_str(), table.checkpoints[cp],
                    series.mean_log_wealth[cp], series.stderr_log_wealth[cp]);
      out += buf;
    }
  }
  return out;
}

std::string summary_csv(const std::vector<SlopeSummary>& slopes) {
  std::string out = "method,slope,stderr\n";
  char buf[256];
  for (const auto& s : slopes) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", s.method.c_str(),
                  s.slope, s.stderr_slope);
    out += buf;
  }
  return out;
}

namespace {

struct ParsedLabel {
  std::string base;
  std::optional<double> param;
};

ParsedLabel parse_label(const std::string& label) {
  const auto at = label.find('@');
  if (at == std::string::npos) return {label, std::nullopt};
  const auto eq = label.find('=', at);
  return {label.substr(0, at), std::stod(label.substr(eq + 1))};
}

}  // namespace

QualitativeVerdict evaluate_expectations(const ExperimentConfig& cfg,
                                         const TraceTable& table) {
  std::ostringstream msg;
  bool pass = true;

  switch (cfg.scenario) {
    case Scenario::simple_null_sanity:
    case Scenario::composite_null_sanity: {
      for (const auto& series : table.series) {
        const auto parsed = parse_label(series.method);
        const auto m = method_from_name(parsed.base);
        const double peak = *std::max_element(series.mean_log_wealth.begin(),
                                              series.mean_log_wealth.end());
        if (m && method_is_robust(*m)) {
          if (peak > 0.5) {
            pass = false;
            msg << series.method << " mean log-wealth peak " << peak
                << " exceeds 0.5; ";
          }
        } else {
          const double trough = *std::min_element(
              series.mean_log_wealth.begin(), series.mean_log_wealth.end());
          if (peak - trough < 2.0) {
            pass = false;
            msg << series.method << " trace unexpectedly flat; ";
          }
        }
      }
      break;
    }
    case Scenario::growth_vs_eps_simple:
    case Scenario::growth_vs_eps_composite: {
      const auto slopes = summarize_slopes(table);
      std::map<std::string, std::vector<std::pair<double, double>>> by_method;
      for (const auto& s : slopes) {
        const auto parsed = parse_label(s.method);
        const auto m = method_from_name(parsed.base);
        if (m && method_is_robust(*m) && parsed.param) {
          by_method[parsed.base].emplace_back(*parsed.param, s.slope);
        }
      }
      for (auto& [base, pts] : by_method) {
        std::sort(pts.begin(), pts.end());  // ascending eps
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          if (!(pts[i].second > pts[i + 1].second)) {
            pass = false;
            msg << base << " slope not strictly decreasing in eps ("
                << pts[i].second << " at eps=" << pts[i].first << " vs "
                << pts[i + 1].second << " at eps=" << pts[i + 1].first
                << "); ";
          }
        }
      }
      break;
    }
    case Scenario::no_contamination:
    case Scenario::no_contamination_composite: {
      const auto slopes = summarize_slopes(table);
      auto slope_of = [&](const std::string& label) -> std::optional<double> {
        for (const auto& s : slopes) {
          if (s.method == label) return s.slope;
        }
        return std::nullopt;
      };
      const auto grid =
          cfg.eps_values.empty() ? default_eps_grid() : cfg.eps_values;
      const double eps_min = *std::min_element(grid.begin(), grid.end());
      const std::string suffix = "@eps=" + format_value(eps_min);
      const std::vector<std::pair<std::string, std::string>> pairs =
          cfg.scenario == Scenario::no_contamination
              ? std::vector<std::pair<std::string, std::string>>{
                    {"robust_simple", "nonrobust_sprt"},
                    {"robust_plugin", "nonrobust_plugin"}}
              : std::vector<std::pair<std::string, std::string>>{
                    {"robust_ripr", "nonrobust_ripr"},
                    {"robust_combined", "nonrobust_ripr"}};
      for (const auto& [robust, baseline] : pairs) {
        const auto rs = slope_of(robust + suffix);
        const auto bs = slope_of(baseline);
        if (!rs || !bs) continue;
        if (std::abs(*rs - *bs) > 0.05 * std::abs(*bs)) {
          pass = false;
          msg << robust << " slope " << *rs << " deviates more than 5% from "
              << baseline << " slope " << *bs << "; ";
        }
      }
      break;
    }
    case Scenario::growth_vs_separation: {
      const auto slopes = summarize_slopes(table);
      std::map<std::string, std::vector<std::pair<double, double>>> by_method;
      std::map<double, std::map<std::string, double>> by_mu;
      for (const auto& s : slopes) {
        const auto parsed = parse_label(s.method);
        if (!parsed.param) continue;
        by_method[parsed.base].emplace_back(*parsed.param, s.slope);
        by_mu[*parsed.param][parsed.base] = s.slope;
      }
      for (auto& [base, pts] : by_method) {
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          if (!(pts[i].second < pts[i + 1].second)) {
            pass = false;
            msg << base << " slope not strictly increasing in mu; ";
          }
        }
      }
      for (const auto& [mu, m] : by_mu) {
        const auto oracle = m.find("robust_simple");
        const auto plugin = m.find("robust_plugin");
        if (oracle != m.end() && plugin != m.end() &&
            std::abs(oracle->second - plugin->second) > 0.01) {
          pass = false;
          msg << "plug-in/oracle slope gap "
              << std::abs(oracle->second - plugin->second) << " at mu=" << mu
              << " exceeds 0.01; ";
        }
      }
      break;
    }
  }
  QualitativeVerdict verdict;
  verdict.pass = pass;
  verdict.message = pass ? "expectations met" : msg.str();
  return verdict;
}

const char* adversary_kind_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::iid_mixture:
      return "iid_mixture";
    case AdversaryKind::worst_case_adaptive:
      return "worst_case_adaptive";
    case AdversaryKind::delayed_attack:
      return "delayed_attack";
  }
  return "?";
}

ValidityResult run_validity_cell(const ValidityCellConfig& cfg) {
  if (cfg.null_member == nullptr) {
    throw std::invalid_argument("validity cell: null_member required");
  }
  std::vector<std::uint8_t> crossed(cfg.replications, 0);
  parallel_for(cfg.replications, [&](std::uint32_t rep) {
    Rng rng = Rng::for_replication(cfg.seed, rep);
    MethodPtr method = make_method(cfg.method);
    AdversaryPtr adversary;
    bool dynamic_point = false;
    switch (cfg.adversary) {
      case AdversaryKind::iid_mixture:
        adversary = iid_mixture_adversary(cfg.null_member, cfg.contaminant,
                                          cfg.adversary_eps);
        break;
      case AdversaryKind::worst_case_adaptive: {
        std::optional<double> frozen;
        if (!method->adaptive_thresholds()) {
          frozen = method->upper_point();
        } else {
          dynamic_point = true;
        }
        adversary = worst_case_adaptive_adversary(cfg.null_member,
                                                  cfg.adversary_eps, frozen);
        break;
      }
      case AdversaryKind::delayed_attack:
        adversary = delayed_attack_adversary(cfg.null_member,
                                             cfg.adversary_eps, cfg.switch_n,
                                             cfg.contaminant);
        break;
    }
    EProcessState state =
        make_eprocess(cfg.alpha, EProcessState::TraceMode::none);
    for (std::uint64_t n = 1; n <= cfg.horizon; ++n) {
      AdversaryContext ctx;
      ctx.next_n = n;
      ctx.log_wealth = state.log_wealth;
      if (dynamic_point) ctx.upper_point = method->upper_point();
      const double x = adversary->next_observation(rng, ctx);
      update_log(state, method->log_step(x));
      if (state.stopped_at) {
        crossed[rep] = 1;
        break;
      }
    }
  });
  ValidityResult result;
  result.replications = cfg.replications;
  for (const auto c : crossed) result.crossings += c;
  return result;
}

}  // namespace robseq::experiments
