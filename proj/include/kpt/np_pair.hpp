#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpt/bitstring.hpp"
#include "kpt/rng.hpp"

namespace kpt {

enum class Side { U, V };

inline const char* side_name(Side s) { return s == Side::U ? "U" : "V"; }
inline Side other_side(Side s) { return s == Side::U ? Side::V : Side::U; }

struct DrawnSample {
  BitString x;
  Side side;
  Witness w;
};

enum class PairKind { perm_table, easy_msb, overlap_fixture };

// A disjoint pair of NP sets over {0,1}^n with polynomial witnesses, plus
// the input distribution the experiments draw challenges from. Verifiers
// are plain predicates so table-backed and formulaic pairs share one type.
struct NpPairInstance {
  int n = 0;
  int witness_len = 0;
  std::string pair_id;
  PairKind kind = PairKind::easy_msb;
  std::function<bool(const BitString&, const Witness&)> verify_u;
  std::function<bool(const BitString&, const Witness&)> verify_v;
  std::function<DrawnSample(Rng&)> sample_d;
  std::shared_ptr<const std::vector<uint32_t>> table;  // perm pairs only
  int hard_bit_index = 0;

  bool verify(Side s, const BitString& x, const Witness& w) const {
    return s == Side::U ? verify_u(x, w) : verify_v(x, w);
  }
};

struct PermPairConfig {
  int n = 10;
  uint64_t perm_seed = 0;
  int hard_bit_index = 0;
};

// U = { pi(s) : s has the hard bit set }, V = the complement image; the
// witness for either side is the seed s itself. The permutation table is
// drawn by Fisher-Yates from a dedicated stream seeded by perm_seed.
NpPairInstance make_perm_pair(const PermPairConfig& cfg);
NpPairInstance make_perm_pair_from_table(int n, std::vector<uint32_t> table,
                                         int hard_bit_index,
                                         std::string pair_id);

// U = strings with msb 1, V = msb 0; a string witnesses itself. Membership
// is syntactically readable, which makes this the transparent control pair.
NpPairInstance make_easy_pair(int n);

// Deliberately broken control whose sides overlap; used to show the
// hypothesis checks actually fire.
NpPairInstance make_overlap_fixture(int n);

// Smallest witness accepted by the side's verifier, scanning from 0.
// Refuses witness_len > 24.
std::optional<Witness> find_witness(const NpPairInstance&, const BitString& x,
                                    Side side);

// Rejection-samples the input distribution until the requested side comes
// up. Throws after one million rejections.
std::pair<BitString, Witness> sample_side(const NpPairInstance&, Side, Rng&);

struct SideLists {
  std::vector<BitString> u, v;
};

// Exhaustive side membership via witness scans; n <= 12.
SideLists exact_side_lists(const NpPairInstance&);

struct PairCheckResult {
  long u_size = 0;
  long v_size = 0;
  long coverage = 0;  // strings with at least one side
  long disjointness_violations = 0;
  bool exactly_uniform = false;  // input marginal provably uniform
};

// Scans every x in {0,1}^n for witnesses on both sides; n <= 12.
PairCheckResult check_pair_exhaustive(const NpPairInstance&);

}  // namespace kpt
