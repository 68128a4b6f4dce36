#pragma once

#include <optional>
#include <vector>

#include "robseq/censoring.hpp"
#include "robseq/dists.hpp"
#include "robseq/evalues.hpp"
#include "robseq/rational.hpp"

// Exact brute-force verification on finite sample spaces: maximization over
// total-variation balls, e-value certification, and exact growth rates.
namespace robseq::oracle {

struct TVBallInstance {
  DiscreteDist base;  // probability vector
  double eps = 0.0;
  std::vector<double> payoff;
};

// Maximize sum q_i * payoff_i over probability vectors q with
// (1/2) * sum |q_i - p_i| <= eps. The objective is linear in q, so the
// optimum moves mass onto a single highest-payoff atom; taking that mass
// from the lowest-payoff atoms first can only increase the objective
// (exchanging a unit of mass from a lower-payoff source is never worse).
std::pair<DiscreteDist, double> tv_ball_maximize(const TVBallInstance& inst);

struct CertifyReport {
  bool ok = false;
  double max_mean = 0.0;          // oracle-maximized E_Q[factor]
  DiscreteDist maximizer;         // the attaining Q
  double tv_null = 0.0;           // D_TV(P0, Q0)
  double tv_alt = 0.0;            // D_TV(P1, Q1)
  bool lower_region_saturated = false;  // P0 mass at the lower clamp >= eps
  std::string message;
};

// Builds the simple e-factor for a discrete pair and certifies that its
// worst-case mean over the TV ball around P0 is at most 1 (+1e-9), that the
// censored densities stay within eps of the idealized models, and that the
// maximum is exactly 1 whenever P0 carries at least eps of mass on the lower
// clamp region.
CertifyReport certify_efactor(const PairPtr& pair, double eps);

// sum_i q_i log(clamp_i) - log(denominator): the exact growth rate of the
// simple e-process when the data law is q_data. If outside_ball is non-null
// it is set when D_TV(q_data, P1) > eps.
double exact_growth_rate(const PairPtr& pair, double eps,
                         const DiscreteDist& q_data,
                         bool* outside_ball = nullptr);

// --- exact-fraction mode -----------------------------------------------------

struct ExactCensoring {
  Rat c_lo, c_hi;
  bool degenerate = false;
  std::vector<Rat> clamp;        // clamped ratio per atom
  Rat expected_clamp_null;       // E_P0[clamp]
  Rat denom;                     // expected_clamp_null + (c_hi - c_lo)*eps
  std::vector<Rat> factor;       // clamp / denom
};

// Exact threshold solve on a finite support with rational probabilities;
// requires strictly positive null masses. Segment-by-segment closed form of
// the same monotone normalization equations the float path bisects.
ExactCensoring solve_thresholds_exact(const std::vector<Rat>& probs0,
                                      const std::vector<Rat>& probs1, Rat eps,
                                      Rat k = Rat(1));

// Worst-case TV-ball mean of the exact e-factor around probs0 (greedy
// transport in exact arithmetic).
Rat tv_ball_maximize_exact(const std::vector<Rat>& base, Rat eps,
                           const std::vector<Rat>& payoff);

// Seeded random pair on min_atoms..max_atoms atoms with per-atom masses
// bounded away from zero; the substrate for certification sweeps.
PairPtr random_discrete_pair(Rng& rng, std::size_t min_atoms = 4,
                             std::size_t max_atoms = 8);

}  // namespace robseq::oracle
