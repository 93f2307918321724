#pragma once

#include <map>
#include <optional>

#include "kpt/game.hpp"

namespace kpt {

// A partially fixed tuple universe. Positions outside the active range
// [lo,hi] are pinned to advice elements; positions inside are sampled around
// a boundary index. Row i (lo <= i < hi) draws positions lo..i from U and
// i+1..hi from V, so position lo is always a U slot and hi always a V slot.
struct HybridUniverse {
  int m = 0;
  int lo = 1;
  int hi = 0;
  std::map<int, FixedPosition> fixed;  // 1-based, exactly the positions outside [lo,hi]

  int active_size() const { return hi - lo + 1; }
  bool is_fixed(int pos) const { return fixed.count(pos) != 0; }
  std::vector<int> boundaries() const;  // lo..hi-1
};

// One full m-tuple: sampled positions carry the witness they were drawn
// with, fixed positions carry the stored advice witness.
struct HybridTuple {
  std::vector<BitString> xs;  // position p at index p-1
  std::vector<Witness> ws;
  std::vector<Side> sides;
};

HybridTuple sample_hybrid(const NpPairInstance&, const HybridUniverse&,
                          int boundary, Rng&);

// A history slot whose falsifying witness is not fixed yet: the z slot of
// that counterexample must be filled with the witness of whatever element
// the current sample put at `position`. Such entries only ever point at
// positions that are V-sampled in every enumerated row.
struct DeferredSlot {
  int history_index = -1;
  int position = -1;
};

// Where the reduction stands when it queries the Student.
struct RoundContext {
  ProofToken token;
  std::vector<Counterexample> history;
  std::vector<DeferredSlot> deferred;
  int round = 1;
};

// Answer frequencies per hybrid row. Answers 0..m are real proposals; the
// extra bucket m+1 collects budget-exhausted answers and is excluded from
// gamma and i_star.
struct FrequencyTable {
  int m = 0;
  int lo = 0;
  int hi = 0;
  long samples_per_row = 0;
  std::vector<std::vector<long>> counts;  // [row][answer], row r holds boundary lo+r

  double gamma = 0;  // largest answer mass under the uniform row mixture
  int i_star = -1;   // its answer index, ties to the lowest

  int rows() const { return hi - lo; }
  int num_answers() const { return m + 2; }
  double freq(int boundary, int answer) const;
  void finalize();
};

// Monte Carlo table: samples_per_row draws per boundary. Every sample runs
// on its own stream derived from (seed, boundary, sample index), so the
// result is independent of the worker count.
FrequencyTable estimate_frequency_table(const NpPairInstance&,
                                        const HybridUniverse&,
                                        const StudentStrategy&,
                                        const RoundContext&,
                                        long samples_per_row, uint64_t seed,
                                        int workers = 1);

// Exact table by enumerating the side-list product over active positions.
// Only meaningful for strategies that ignore their stream; requires equal
// side sizes (so rows share one weight), no deferred slots, and a product
// of at most 2^24 tuples per row.
FrequencyTable exact_frequency_table(const NpPairInstance&,
                                     const HybridUniverse&,
                                     const StudentStrategy&,
                                     const RoundContext&, int workers = 1);

struct GapHit {
  int t = -1;          // rows t and t+1 disagree
  int direction = 0;   // +1 when the frequency rises with t, -1 when it falls
  double magnitude = 0;
};

// Smallest t in lo..hi-2 with |freq(t+1,answer) - freq(t,answer)| >= tau.
std::optional<GapHit> find_adjacent_gap(const FrequencyTable&, int answer,
                                        double tau);

}  // namespace kpt
