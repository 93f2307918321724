#pragma once

#include "kpt/hybrid.hpp"
#include "kpt/stats.hpp"

namespace kpt {

// Sampling and search budgets. Zero means "derive the default": tau becomes
// 1/(4m) and estimation_samples the Hoeffding count that resolves tau/2 at
// the requested confidence.
struct ReductionBudgets {
  long estimation_samples = 0;
  int advice_candidates = 40;
  long advantage_samples = 4000;
  double tau = 0;
  double confidence = 0.99;

  double tau_for(int m) const { return tau > 0 ? tau : 1.0 / (4.0 * m); }
  long samples_for(int m) const {
    if (estimation_samples > 0) return estimation_samples;
    return hoeffding_samples(tau_for(m) / 2.0, 1.0 - confidence);
  }
};

struct Classification {
  int bit = 0;
  bool coin = false;  // the bit came from the fallback coin
};

// A circuit with one open input: feed it an element, get a side guess.
// `failed` marks the degenerate case where construction fell back to the
// coin; classify still works and is exactly unbiased then.
struct Distinguisher {
  std::string kind = "coin";  // "gap", "path" or "coin"
  bool failed = false;
  std::string note;
  int challenge_position = -1;
  int queried_round = 1;
  std::function<Classification(const BitString&, Rng&)> classify;
};

struct RoundReport {
  int round = 0;
  int lo = 0;
  int hi = 0;
  int i_star = -1;
  double gamma = 0;
  std::string action;  // "gap", "skip", "halve-lower", "halve-upper",
                       // "halve-upper-deferred", "proceed"
  std::optional<GapHit> gap;
  int candidates_tried = 0;
  double accepted_freq = 0;  // conditional answer mass of the accepted block
};

struct AdvantageEstimate {
  long samples = 0;
  long successes = 0;
  long coin_uses = 0;
  double success_rate = 0;
  double failure_rate = 0;  // fraction of classifications that fell to the coin
  Interval ci;              // Wilson, 99% two-sided
};

struct ReductionResult {
  int k = 0;
  int m = 0;
  std::vector<RoundReport> rounds;
  Distinguisher distinguisher;
  bool aborted = false;
  std::string abort_reason;
  int padding_blocks = 0;
  // For a path distinguisher: the final layout, every position fixed except
  // the challenge. For a gap or an abort: the universe at the time it fired.
  HybridUniverse final_universe;
  std::vector<Counterexample> final_history;
};

// True when the fixed positions alone refute a proposal of `answer`.
bool advice_refutable(const HybridUniverse&, int answer);

// Builds the refuting counterexample from the fixed positions, z slot
// preferred. Throws when advice_refutable would say no.
Counterexample advice_refutation(const HybridUniverse&, int answer,
                                 int witness_len);

struct AdviceSearch {
  bool found = false;
  std::map<int, FixedPosition> block;
  int candidates_tried = 0;
  double accepted_freq = 0;
  double threshold = 0;
};

// Draws candidate blocks for positions block_lo..block_hi from `side` and
// accepts the first whose conditional frequency of `answer` over the
// shrunken universe stays above 1/(2m) minus the Hoeffding radius at 1%.
AdviceSearch search_advice_block(const NpPairInstance&, const HybridUniverse&,
                                 const StudentStrategy&, const RoundContext&,
                                 int answer, int block_lo, int block_hi,
                                 Side side, const ReductionBudgets&,
                                 uint64_t seed, int workers = 1);

struct GapBuild {
  Distinguisher d;
  int candidates_tried = 0;
  double best_gap = 0;  // signed freq(answer | challenge in U) - freq(.. in V)
};

// Turns an adjacent-row disagreement into a distinguisher: searches for a
// frozen context in which the answer frequency still swings by at least
// tau/2 between U and V challenges at position gap.t+1.
GapBuild build_gap_distinguisher(const NpPairInstance&, const HybridUniverse&,
                                 const StudentStrategy&, const RoundContext&,
                                 int answer, const GapHit&,
                                 const ReductionBudgets&, uint64_t seed,
                                 int workers = 1);

// The whole pipeline: estimation rounds with gap checks and universe
// halving, then either a gap distinguisher or the final path distinguisher.
// Requires student.k == k and m = 3 * 2^(k-1).
ReductionResult kpt_reduce(const NpPairInstance&, const StudentStrategy&,
                           const ReductionBudgets&, uint64_t seed,
                           int workers = 1);

// Plays the distinguisher against fresh samples: each trial draws a side by
// fair coin, an element of that side, and scores the guess. Streams are
// derived per trial, so the result is worker-count independent.
AdvantageEstimate measure_advantage(const NpPairInstance&, const Distinguisher&,
                                    long samples, uint64_t seed,
                                    int workers = 1);

}  // namespace kpt
