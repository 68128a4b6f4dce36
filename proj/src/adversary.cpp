#include "robseq/adversary.hpp"

#include <stdexcept>

namespace robseq {
namespace {

class IidMixtureAdversary final : public AdversaryStrategy {
 public:
  IidMixtureAdversary(ModelPtr p0, ModelPtr contaminant, double eps)
      : AdversaryStrategy("iid_mixture"),
        p0_(std::move(p0)),
        contaminant_(std::move(contaminant)),
        eps_(eps) {}

  double next_observation(Rng& rng, const AdversaryContext&) override {
    if (eps_ > 0.0 && rng.uniform() < eps_) return contaminant_->sample(rng);
    return p0_->sample(rng);
  }

  Decomposition decomposition(const AdversaryContext&) const override {
    return {p0_, eps_, contaminant_, std::nullopt};
  }

 private:
  ModelPtr p0_;
  ModelPtr contaminant_;
  double eps_;
};

class WorstCaseAdaptiveAdversary final : public AdversaryStrategy {
 public:
  WorstCaseAdaptiveAdversary(ModelPtr p0, double eps,
                             std::optional<double> frozen_point)
      : AdversaryStrategy("worst_case_adaptive"),
        p0_(std::move(p0)),
        eps_(eps),
        frozen_point_(frozen_point) {}

  double next_observation(Rng& rng, const AdversaryContext& ctx) override {
    const auto point = frozen_point_ ? frozen_point_ : ctx.upper_point;
    if (point && eps_ > 0.0 && rng.uniform() < eps_) return *point;
    return p0_->sample(rng);
  }

  Decomposition decomposition(const AdversaryContext& ctx) const override {
    const auto point = frozen_point_ ? frozen_point_ : ctx.upper_point;
    if (!point) return {p0_, 0.0, nullptr, std::nullopt};
    return {p0_, eps_, std::make_shared<PointMassModel>(*point), *point};
  }

 private:
  ModelPtr p0_;
  double eps_;
  std::optional<double> frozen_point_;
};

class DelayedAttackAdversary final : public AdversaryStrategy {
 public:
  DelayedAttackAdversary(ModelPtr p0, double eps, std::uint64_t switch_n,
                         ModelPtr contaminant)
      : AdversaryStrategy("delayed_attack"),
        p0_(std::move(p0)),
        contaminant_(std::move(contaminant)),
        eps_(eps),
        switch_n_(switch_n) {}

  double next_observation(Rng& rng, const AdversaryContext& ctx) override {
    if (!attacking_ && (ctx.log_wealth > 0.0 || ctx.next_n >= switch_n_)) {
      attacking_ = true;
    }
    if (attacking_ && eps_ > 0.0 && rng.uniform() < eps_) {
      return contaminant_->sample(rng);
    }
    return p0_->sample(rng);
  }

  Decomposition decomposition(const AdversaryContext& ctx) const override {
    const bool active =
        attacking_ || ctx.log_wealth > 0.0 || ctx.next_n >= switch_n_;
    if (!active) return {p0_, 0.0, nullptr, std::nullopt};
    return {p0_, eps_, contaminant_, std::nullopt};
  }

 private:
  ModelPtr p0_;
  ModelPtr contaminant_;
  double eps_;
  std::uint64_t switch_n_;
  bool attacking_ = false;
};

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("adversary: eps must lie in [0, 1)");
  }
}

}  // namespace

AdversaryPtr iid_mixture_adversary(ModelPtr p0, ModelPtr contaminant,
                                   double eps) {
  check_eps(eps);
  return std::make_unique<IidMixtureAdversary>(std::move(p0),
                                               std::move(contaminant), eps);
}

AdversaryPtr worst_case_adaptive_adversary(
    ModelPtr p0, double eps, std::optional<double> frozen_point) {
  check_eps(eps);
  return std::make_unique<WorstCaseAdaptiveAdversary>(std::move(p0), eps,
                                                      frozen_point);
}

AdversaryPtr delayed_attack_adversary(ModelPtr p0, double eps,
                                      std::uint64_t switch_n,
                                      ModelPtr contaminant) {
  check_eps(eps);
  if (switch_n < 1) {
    throw std::invalid_argument("delayed_attack: switch_n must be >= 1");
  }
  return std::make_unique<DelayedAttackAdversary>(
      std::move(p0), eps, switch_n, std::move(contaminant));
}

}  // namespace robseq
