#include "robseq/eprocess.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace robseq {
namespace {
bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

EProcessState make_eprocess(double alpha, EProcessState::TraceMode mode) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  EProcessState state;
  state.alpha = alpha;
  state.log_threshold = -std::log(alpha);
  state.trace_mode = mode;
  return state;
}

void update(EProcessState& state, double efactor_value) {
  if (efactor_value < 0.0 || std::isnan(efactor_value)) {
    throw std::invalid_argument("e-factor value must be nonnegative");
  }
  update_log(state, std::log(efactor_value));
}

void update_log(EProcessState& state, double log_efactor_value) {
  if (std::isnan(log_efactor_value)) {
    throw std::invalid_argument("log e-factor value must not be NaN");
  }
  // wealth absorbs at 0: once -inf, it stays there
  if (state.log_wealth != -std::numeric_limits<double>::infinity()) {
    state.log_wealth += log_efactor_value;
  }
  state.n += 1;
  if (state.log_wealth > state.max_log_wealth) {
    state.max_log_wealth = state.log_wealth;
  }
  if (!state.stopped_at && state.log_wealth >= state.log_threshold) {
    state.stopped_at = state.n;
  }
  switch (state.trace_mode) {
    case EProcessState::TraceMode::none:
      break;
    case EProcessState::TraceMode::checkpoints:
      if (is_power_of_two(state.n)) {
        state.trace.emplace_back(state.n, state.log_wealth);
      }
      break;
    case EProcessState::TraceMode::full:
      state.trace.emplace_back(state.n, state.log_wealth);
      break;
  }
}

double anytime_p_value(const EProcessState& state) {
  return std::min(1.0, std::exp(-state.max_log_wealth));
}

double growth_slope(const EProcessState& state) {
  if (state.trace.empty()) {
    throw std::logic_error("growth_slope: no retained trace");
  }
  if (state.n < 2) {
    throw std::logic_error("growth_slope: need at least two updates");
  }
  return state.log_wealth / static_cast<double>(state.n);
}

double wealth(const EProcessState& state) { return std::exp(state.log_wealth); }

}  // namespace robseq
