#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "robseq/experiments.hpp"

// Experiment config files: one [section] per scenario, key = value lines,
// '#' comments, arrays in brackets, strings quoted. Example:
//
//   [growth_vs_eps_simple]
//   eps_values = [0.1, 0.01, 0.001]
//   horizon = 10000
//   replications = 10
//   seed = 20240517
//   methods = ["robust_simple", "robust_plugin"]
//
// Unknown sections and keys are errors.
namespace robseq::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<experiments::ExperimentConfig> parse_string(
    const std::string& text);
std::vector<experiments::ExperimentConfig> parse_file(const std::string& path);

}  // namespace robseq::config
