#include "robseq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace robseq::oracle {
namespace {

std::vector<std::size_t> order_by(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace

std::pair<DiscreteDist, double> tv_ball_maximize(const TVBallInstance& inst) {
  const auto& p = inst.base.probs;
  const auto& pay = inst.payoff;
  if (p.size() != pay.size()) {
    throw std::invalid_argument("tv_ball_maximize: size mismatch");
  }
  if (std::abs(inst.base.total_mass() - 1.0) > 1e-9) {
    throw std::invalid_argument("tv_ball_maximize: base must be a probability vector");
  }
  if (!(inst.eps >= 0.0)) {
    throw std::invalid_argument("tv_ball_maximize: eps must be >= 0");
  }

  const auto idx = order_by(pay);
  const std::size_t top = idx.back();
  std::vector<double> q = p;
  double budget = inst.eps;
  for (std::size_t i : idx) {
    if (i == top || budget <= 0.0) break;
    if (pay[i] >= pay[top]) break;  // nothing to gain
    const double take = std::min(budget, q[i]);
    q[i] -= take;
    q[top] += take;
    budget -= take;
  }
  double value = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) value += q[i] * pay[i];
  return {DiscreteDist(inst.base.support, std::move(q)), value};
}

CertifyReport certify_efactor(const PairPtr& pair, double eps) {
  const auto* dp = dynamic_cast<const DiscretePair*>(pair.get());
  if (dp == nullptr) {
    throw std::invalid_argument("certify_efactor: discrete pairs only");
  }
  const EFactor ef = EFactor::simple(pair, eps);
  if (ef.degenerate()) {
    throw std::invalid_argument("certify_efactor: pair is degenerate at this eps");
  }
  const auto& cp = ef.censored();
  const auto& support = dp->null_dist().support;

  CertifyReport report;
  std::vector<double> payoff(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    payoff[i] = ef.evaluate(support[i]);
  }
  TVBallInstance inst{dp->null_dist(), eps, payoff};
  auto [q_star, value] = tv_ball_maximize(inst);
  report.max_mean = value;
  report.maximizer = std::move(q_star);

  const auto [tv0, tv1] = check_lfd_membership(cp);
  report.tv_null = tv0;
  report.tv_alt = tv1;

  double lower_mass = 0.0;
  const auto& ratios = dp->atom_ratios();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] <= cp.c_lo) lower_mass += dp->null_dist().probs[i];
  }
  report.lower_region_saturated = lower_mass >= eps - 1e-12;

  std::ostringstream msg;
  report.ok = true;
  if (report.max_mean > 1.0 + 1e-9) {
    report.ok = false;
    msg << "worst-case mean " << report.max_mean << " exceeds 1; ";
  }
  if (tv0 > eps + 1e-9 || tv1 > eps + 1e-9) {
    report.ok = false;
    msg << "censored density left the TV ball (" << tv0 << ", " << tv1
        << "); ";
  }
  if (report.lower_region_saturated &&
      std::abs(report.max_mean - 1.0) > 1e-9) {
    report.ok = false;
    msg << "saturated lower region but max mean " << report.max_mean
        << " != 1; ";
  }
  report.message = report.ok ? "certified" : msg.str();
  return report;
}

double exact_growth_rate(const PairPtr& pair, double eps,
                         const DiscreteDist& q_data, bool* outside_ball) {
  const auto* dp = dynamic_cast<const DiscretePair*>(pair.get());
  if (dp == nullptr) {
    throw std::invalid_argument("exact_growth_rate: discrete pairs only");
  }
  const CensoredPair cp = solve_thresholds(pair, eps);
  if (cp.degenerate) {
    throw std::invalid_argument("exact_growth_rate: degenerate pair");
  }
  if (outside_ball != nullptr) {
    *outside_ball = tv_distance(q_data, dp->alt_dist()) > eps + 1e-12;
  }
  const auto& ratios = dp->atom_ratios();
  double acc = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (q_data.probs[i] == 0.0) continue;
    const double clamp = std::max(cp.c_lo, std::min(cp.c_hi, ratios[i]));
    acc += q_data.probs[i] * std::log(clamp);
  }
  return acc - cp.log_denom;
}

// --- exact-fraction mode -----------------------------------------------------

ExactCensoring solve_thresholds_exact(const std::vector<Rat>& probs0,
                                      const std::vector<Rat>& probs1, Rat eps,
                                      Rat k) {
  const std::size_t n = probs0.size();
  if (n == 0 || probs1.size() != n) {
    throw std::invalid_argument("exact solve: mismatched lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(probs0[i] > Rat(0)) || probs1[i] < Rat(0)) {
      throw std::invalid_argument("exact solve: requires positive null masses");
    }
  }
  if (!(eps > Rat(0) && eps < Rat(1))) {
    throw std::invalid_argument("exact solve: eps must lie in (0, 1)");
  }

  std::vector<Rat> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = probs1[i] / probs0[i];
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });

  const Rat one(1);
  const Rat target_f = k / (one - eps);
  const Rat target_g = one / (one - eps);

  // distinct ratio values ascending
  std::vector<Rat> values;
  for (std::size_t i : idx) {
    if (values.empty() || ratio[i] != values.back()) values.push_back(ratio[i]);
  }

  // f(c) = P0[r < c] + P1[r >= c]/c on (v_{j-1}, v_j]: closed form per segment
  auto mass_below = [&](const std::vector<Rat>& probs, const Rat& v,
                        bool strict) {
    Rat s(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (strict ? ratio[i] < v : ratio[i] <= v) s += probs[i];
    }
    return s;
  };

  ExactCensoring out;
  bool found_hi = false;
  for (std::size_t j = 0; j < values.size() && !found_hi; ++j) {
    const Rat& v = values[j];
    const Rat a = mass_below(probs0, v, /*strict=*/true);
    const Rat b = one - mass_below(probs1, v, /*strict=*/true);  // P1[r >= v]
    if (b == Rat(0)) continue;
    // candidate solves a + b/c = target on (prev, v]
    if (target_f > a) {
      const Rat c = b / (target_f - a);
      const bool above_prev = j == 0 ? c > Rat(0) : c > values[j - 1];
      if (above_prev && c <= v) {
        out.c_hi = c;
        found_hi = true;
      }
    }
  }
  if (!found_hi) {
    throw std::runtime_error("exact solve: no solution for c_hi");
  }

  // g(c) = P1[r > c] + c * P0[r <= c] on [v_j, v_{j+1})
  bool found_lo = false;
  for (std::size_t j = 0; j < values.size() && !found_lo; ++j) {
    const Rat& v = values[j];
    const Rat p0le = mass_below(probs0, v, /*strict=*/false);
    const Rat p1gt = one - mass_below(probs1, v, /*strict=*/false);
    if (p0le == Rat(0)) continue;
    if (target_g >= p1gt) {
      const Rat c = (target_g - p1gt) / p0le;
      const bool below_next =
          j + 1 == values.size() ? true : c < values[j + 1];
      if (c >= v && below_next) {
        out.c_lo = c;
        found_lo = true;
      }
    }
  }
  if (!found_lo) {
    throw std::runtime_error("exact solve: no solution for c_lo");
  }

  out.degenerate = out.c_lo >= out.c_hi;
  if (out.degenerate) return out;

  out.clamp.resize(n);
  out.expected_clamp_null = Rat(0);
  for (std::size_t i = 0; i < n; ++i) {
    Rat c = ratio[i];
    if (c < out.c_lo) c = out.c_lo;
    if (c > out.c_hi) c = out.c_hi;
    out.clamp[i] = c;
    out.expected_clamp_null += probs0[i] * c;
  }
  out.denom = out.expected_clamp_null + (out.c_hi - out.c_lo) * eps;
  out.factor.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.factor[i] = out.clamp[i] / out.denom;
  return out;
}

PairPtr random_discrete_pair(Rng& rng, std::size_t min_atoms,
                             std::size_t max_atoms) {
  // rejection-sample pairs that stay non-degenerate up to contamination 0.1
  // (the thresholds move monotonically in eps, so smaller radii are covered)
  for (int attempt = 0; attempt < 256; ++attempt) {
    const std::size_t n =
        min_atoms + static_cast<std::size_t>(rng.next_u64() %
                                             (max_atoms - min_atoms + 1));
    std::vector<double> support(n), p0(n), p1(n);
    auto draw = [&](std::vector<double>& probs) {
      double total = 0.0;
      for (auto& p : probs) {
        p = 0.05 + 0.95 * rng.uniform();
        total += p;
      }
      for (auto& p : probs) p /= total;
    };
    for (std::size_t i = 0; i < n; ++i) support[i] = static_cast<double>(i);
    draw(p0);
    draw(p1);
    auto pair =
        make_discrete_pair(std::move(support), std::move(p0), std::move(p1));
    if (!solve_thresholds(pair, 0.1).degenerate) return pair;
  }
  throw std::runtime_error("random_discrete_pair: rejection cap reached");
}

Rat tv_ball_maximize_exact(const std::vector<Rat>& base, Rat eps,
                           const std::vector<Rat>& payoff) {
  const std::size_t n = base.size();
  if (payoff.size() != n) {
    throw std::invalid_argument("exact maximize: size mismatch");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return payoff[a] < payoff[b];
  });
  const std::size_t top = idx.back();
  std::vector<Rat> q = base;
  Rat budget = eps;
  for (std::size_t i : idx) {
    if (i == top || budget <= Rat(0)) break;
    if (payoff[i] >= payoff[top]) break;
    const Rat take = budget < q[i] ? budget : q[i];
    q[i] -= take;
    q[top] += take;
    budget -= take;
  }
  Rat value(0);
  for (std::size_t i = 0; i < n; ++i) value += q[i] * payoff[i];
  return value;
}

}  // namespace robseq::oracle
