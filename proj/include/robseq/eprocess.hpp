#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace robseq {

// Wealth process state. Wealth accumulates in log space; M_0 = 1. The Ville
// stopping rule fires at the first n with M_n >= 1/alpha; updates continue
// after stopping (stopped_at only records the first crossing).
struct EProcessState {
  enum class TraceMode { none, checkpoints, full };

  std::uint64_t n = 0;
  double log_wealth = 0.0;
  double max_log_wealth = 0.0;
  double alpha = 0.05;
  double log_threshold = 0.0;  // log(1/alpha)
  std::optional<std::uint64_t> stopped_at;
  TraceMode trace_mode = TraceMode::checkpoints;
  // (n, log_wealth); checkpoint mode keeps powers of two
  std::vector<std::pair<std::uint64_t, double>> trace;
};

EProcessState make_eprocess(
    double alpha,
    EProcessState::TraceMode mode = EProcessState::TraceMode::checkpoints);

void update(EProcessState& state, double efactor_value);
void update_log(EProcessState& state, double log_efactor_value);

// min(1, 1 / max_{k <= n} M_k); nonincreasing along any trajectory
double anytime_p_value(const EProcessState& state);

// log M_n / n
double growth_slope(const EProcessState& state);

double wealth(const EProcessState& state);

}  // namespace robseq
