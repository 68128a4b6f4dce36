#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robseq/adversary.hpp"
#include "robseq/eprocess.hpp"
#include "robseq/evalues.hpp"
#include "robseq/plugin.hpp"
#include "robseq/ripr.hpp"

namespace robseq::experiments {

enum class Method {
  robust_simple,
  robust_plugin,
  robust_ripr,
  robust_combined,
  nonrobust_sprt,
  nonrobust_plugin,
  nonrobust_ripr,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);
bool method_is_robust(Method m);
bool method_is_composite_null(Method m);

enum class Scenario {
  simple_null_sanity,
  growth_vs_eps_simple,
  no_contamination,
  growth_vs_separation,
  composite_null_sanity,
  growth_vs_eps_composite,
  no_contamination_composite,
};

const char* scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);

// --- sequential method instances -------------------------------------------

// A test process consuming one observation at a time. upper_point() exposes a
// point at the current upper clamp before the observation is seen, so
// adaptive adversaries can probe the factor they are playing against.
class SequentialMethod {
 public:
  virtual ~SequentialMethod() = default;
  virtual double log_step(double x) = 0;
  virtual std::optional<double> upper_point() { return std::nullopt; }
  // true when the clamp thresholds move with the estimate (plug-in style)
  virtual bool adaptive_thresholds() const { return false; }
  const std::string& label() const { return label_; }

 protected:
  explicit SequentialMethod(std::string label) : label_(std::move(label)) {}
  std::string label_;
};

using MethodPtr = std::unique_ptr<SequentialMethod>;

struct MethodSetup {
  Method method = Method::robust_simple;
  double eps = 0.01;
  double mu0 = 0.0;     // simple null center
  double mu1 = 1.0;     // simple alternative mean
  double sigma = 1.0;
  double null_a = -0.5;  // composite null interval
  double null_b = 0.5;
  std::optional<AlternativeClass> alt_class;  // plugin/combined
  std::optional<PairPtr> custom_pair;         // robust_simple/nonrobust_sprt
  bool enable_cache = false;
};

MethodPtr make_method(const MethodSetup& setup);

// --- experiment runner -------------------------------------------------------

struct ExperimentConfig {
  Scenario scenario = Scenario::simple_null_sanity;
  double eps_algorithm = 0.01;
  double eps_real = 0.01;
  std::vector<double> eps_values;  // growth_vs_eps_* / no_contamination sweeps
  std::vector<double> mu_values;   // growth_vs_separation sweep
  std::uint64_t horizon = 10000;
  std::uint32_t replications = 10;
  std::uint64_t seed = 20240101;
  double alpha = 0.05;
  std::vector<Method> methods;  // empty -> scenario defaults
  double mu0 = 0.0;
  double mu1 = 1.0;
  double null_a = -0.5;
  double null_b = 0.5;
};

struct TraceTable {
  std::vector<std::uint64_t> checkpoints;
  struct Series {
    std::string method;
    std::vector<double> mean_log_wealth;
    std::vector<double> stderr_log_wealth;
    // per-checkpoint per-replication log-wealth (checkpoint-major)
    std::vector<std::vector<double>> rep_log_wealth;
  };
  std::vector<Series> series;
  // one checksum per (sub-run, replication): every method within a
  // replication consumed the same observation stream
  std::vector<std::uint64_t> stream_checksums;
};

// For each replication, one data stream per sub-run is drawn and shared
// across every requested method (paired comparison); replications run on a
// worker pool and merge deterministically by index.
TraceTable run_experiment(const ExperimentConfig& cfg);

struct SlopeSummary {
  std::string method;
  double slope = 0.0;
  double stderr_slope = 0.0;
};

// Least-squares slope of log-wealth vs n over the last `window_fraction` of
// the checkpoint grid; the standard error comes from the replication spread.
std::vector<SlopeSummary> summarize_slopes(const TraceTable& table,
                                           double window_fraction = 0.5);

std::string trace_csv(const TraceTable& table);
std::string summary_csv(const std::vector<SlopeSummary>& slopes);

struct QualitativeVerdict {
  bool pass = false;
  std::string message;
};

// The scenario's built-in qualitative expectation (orderings / flatness /
// closeness), evaluated on a finished run.
QualitativeVerdict evaluate_expectations(const ExperimentConfig& cfg,
                                         const TraceTable& table);

// --- validity harness ----------------------------------------------------------

enum class AdversaryKind { iid_mixture, worst_case_adaptive, delayed_attack };

const char* adversary_kind_name(AdversaryKind k);

struct ValidityCellConfig {
  std::string name;
  MethodSetup method;
  AdversaryKind adversary = AdversaryKind::iid_mixture;
  ModelPtr null_member;   // the null-class member the adversary plays around
  ModelPtr contaminant;   // iid_mixture / delayed_attack
  std::uint64_t switch_n = 50;
  double adversary_eps = 0.01;
  double alpha = 0.05;
  std::uint64_t horizon = 10000;
  std::uint32_t replications = 2000;
  std::uint64_t seed = 7;
};

struct ValidityResult {
  std::uint32_t crossings = 0;
  std::uint32_t replications = 0;
  double fraction() const {
    return replications == 0
               ? 0.0
               : static_cast<double>(crossings) / replications;
  }
};

// Fraction of replications whose wealth ever reaches 1/alpha by the horizon.
ValidityResult run_validity_cell(const ValidityCellConfig& cfg);

// Simple deterministic worker pool over replication indices.
void parallel_for(std::uint32_t count,
                  const std::function<void(std::uint32_t)>& body);

}  // namespace robseq::experiments
