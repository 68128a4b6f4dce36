#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "robseq/dists.hpp"

namespace robseq {

// What a strategy may read before emitting the next observation: the step
// index, the monitored process's wealth, and (for factors with moving
// thresholds) a point at the current upper clamp.
struct AdversaryContext {
  std::uint64_t next_n = 1;
  double log_wealth = 0.0;
  std::optional<double> upper_point;
};

// Null-side data generator whose conditional law at every step is a mixture
// (1-eps) * P0' + eps * H with P0' in the null class, hence inside the
// contamination model. Strategies hold per-trajectory state and are never
// shared across replications.
class AdversaryStrategy {
 public:
  virtual ~AdversaryStrategy() = default;
  virtual double next_observation(Rng& rng, const AdversaryContext& ctx) = 0;
  const std::string& label() const { return label_; }

  // Membership certificate: the mixture decomposition of the conditional law
  // at this step. contaminant_atom is set for point-mass contamination.
  struct Decomposition {
    ModelPtr base;
    double eps = 0.0;
    ModelPtr contaminant;               // null when the strategy is pure base
    std::optional<double> contaminant_atom;
  };
  virtual Decomposition decomposition(const AdversaryContext& ctx) const = 0;

 protected:
  explicit AdversaryStrategy(std::string label) : label_(std::move(label)) {}
  std::string label_;
};

using AdversaryPtr = std::unique_ptr<AdversaryStrategy>;

// History-independent contamination: every step draws from
// (1-eps) * p0 + eps * contaminant.
AdversaryPtr iid_mixture_adversary(ModelPtr p0, ModelPtr contaminant,
                                   double eps);

// Adaptive worst case: (1-eps) * p0 + eps * point mass at the clamp's upper
// region, which maximizes the conditional mean of the target e-factor over
// the mixture contamination model. For fixed-threshold factors the point is
// frozen at construction; pass nullopt to re-read ctx.upper_point each step
// (plug-in style factors whose thresholds move).
AdversaryPtr worst_case_adaptive_adversary(ModelPtr p0, double eps,
                                           std::optional<double> frozen_point);

// Pure p0 until the monitored wealth first exceeds 1 or n reaches switch_n,
// then the iid mixture. Exercises history dependence.
AdversaryPtr delayed_attack_adversary(ModelPtr p0, double eps,
                                      std::uint64_t switch_n,
                                      ModelPtr contaminant);

}  // namespace robseq
