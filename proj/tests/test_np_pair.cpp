#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "kpt/np_pair.hpp"
#include "kpt/stats.hpp"

using namespace kpt;

TEST_CASE("bitstring basics") {
  BitString b = BitString::make(0b1011, 4);
  CHECK(b.bit(0));
  CHECK(b.bit(1));
  CHECK_FALSE(b.bit(2));
  CHECK(b.msb());
  CHECK(b.parity());  // three set bits
  CHECK(b.value() == 0b1011u);
  CHECK(b.hex() == "b");
  CHECK(BitString::make(0x2a5, 10).hex() == "2a5");
  // make masks excess value bits
  CHECK(BitString::make(0xff, 4).value() == 0xfu);
  auto back = BitString::from_hex("2a5", 10);
  REQUIRE(back.has_value());
  CHECK(*back == BitString::make(0x2a5, 10));
  CHECK_FALSE(BitString::from_hex("zz", 8).has_value());
}

TEST_CASE("perm pair: permutation gives every x exactly one witness") {
  NpPairInstance pair = make_perm_pair({.n = 6, .perm_seed = 42});
  const uint32_t space = 1u << 6;
  for (uint32_t v = 0; v < space; ++v) {
    const BitString x = BitString::make(v, 6);
    int owners = 0;
    for (uint32_t w = 0; w < space; ++w) {
      const Witness wit = BitString::make(w, 6);
      owners += pair.verify_u(x, wit) ? 1 : 0;
      owners += pair.verify_v(x, wit) ? 1 : 0;
    }
    CHECK(owners == 1);
  }
}

TEST_CASE("perm pair: hypothesis checks pass and sides split evenly") {
  NpPairInstance pair = make_perm_pair({.n = 8, .perm_seed = 1});
  PairCheckResult r = check_pair_exhaustive(pair);
  CHECK(r.u_size == 128);
  CHECK(r.v_size == 128);
  CHECK(r.coverage == 256);
  CHECK(r.disjointness_violations == 0);
  CHECK(r.exactly_uniform);
}

TEST_CASE("perm pair: witness tag bit matches the side") {
  NpPairInstance pair = make_perm_pair({.n = 5, .perm_seed = 3, .hard_bit_index = 2});
  for (uint32_t v = 0; v < 32; ++v) {
    const BitString x = BitString::make(v, 5);
    auto wu = find_witness(pair, x, Side::U);
    auto wv = find_witness(pair, x, Side::V);
    CHECK(wu.has_value() != wv.has_value());
    if (wu) CHECK(wu->bit(2));
    if (wv) CHECK_FALSE(wv->bit(2));
  }
}

TEST_CASE("perm pair is a deterministic function of its seed") {
  NpPairInstance a = make_perm_pair({.n = 7, .perm_seed = 9});
  NpPairInstance b = make_perm_pair({.n = 7, .perm_seed = 9});
  NpPairInstance c = make_perm_pair({.n = 7, .perm_seed = 10});
  CHECK(a.pair_id == b.pair_id);
  CHECK(*a.table == *b.table);
  CHECK(a.pair_id != c.pair_id);
  CHECK(*a.table != *c.table);
}

TEST_CASE("easy pair: msb split with self-witnessing") {
  NpPairInstance pair = make_easy_pair(8);
  PairCheckResult r = check_pair_exhaustive(pair);
  CHECK(r.u_size == 128);
  CHECK(r.v_size == 128);
  CHECK(r.disjointness_violations == 0);
  const BitString hi = BitString::make(0x80, 8);
  const BitString lo = BitString::make(0x01, 8);
  CHECK(find_witness(pair, hi, Side::U) == hi);
  CHECK_FALSE(find_witness(pair, hi, Side::V).has_value());
  CHECK(find_witness(pair, lo, Side::V) == lo);
}

TEST_CASE("overlap fixture trips the disjointness check") {
  NpPairInstance pair = make_overlap_fixture(6);
  PairCheckResult r = check_pair_exhaustive(pair);
  // msb set and lsb clear: a quarter of the space sits on both sides
  CHECK(r.disjointness_violations == 16);
  CHECK(r.coverage == 64 - 16);  // msb 0 and lsb 1 strings are on one side too
  CHECK(r.u_size == 32);
  CHECK(r.v_size == 32);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_perm_pair({.n = 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_perm_pair({.n = 21}), std::invalid_argument);
  CHECK_THROWS_AS(make_perm_pair({.n = 5, .perm_seed = 0, .hard_bit_index = 5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_easy_pair(1), std::invalid_argument);
  std::vector<uint32_t> short_table(7);
  CHECK_THROWS_AS(make_perm_pair_from_table(3, short_table, 0, "bad"),
                  std::invalid_argument);
}

TEST_CASE("sampled elements verify and cover their side uniformly") {
  NpPairInstance pair = make_perm_pair({.n = 7, .perm_seed = 4});
  Rng rng(derive_seed(11, "sampling-test"));
  SideLists lists = exact_side_lists(pair);
  REQUIRE(lists.u.size() == 64);

  std::map<uint32_t, long> hits;
  const long draws = 12800;
  for (long i = 0; i < draws; ++i) {
    auto [x, w] = sample_side(pair, Side::U, rng);
    CHECK(pair.verify_u(x, w));
    ++hits[x.value()];
  }
  // chi-square over the 64 U elements
  const double expect = static_cast<double>(draws) / 64;
  double chi2 = 0;
  for (const auto& u : lists.u) {
    const double d = static_cast<double>(hits[u.value()]) - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < chi2_critical_upper(63));
}

TEST_CASE("sample_side gives up on an empty side") {
  NpPairInstance pair = make_easy_pair(6);
  // poison the distribution so V never comes up
  pair.sample_d = [orig = pair.sample_d](Rng& rng) {
    DrawnSample d = orig(rng);
    d.side = Side::U;
    return d;
  };
  Rng rng(1);
  CHECK_THROWS_AS(sample_side(pair, Side::V, rng), std::runtime_error);
}

TEST_CASE("find_witness returns the smallest accepted witness") {
  NpPairInstance pair = make_easy_pair(5);
  // easy pair: the only witness is the string itself, so smallest == unique
  const BitString x = BitString::make(0x1f, 5);
  CHECK(find_witness(pair, x, Side::U) == x);
  NpPairInstance broken = make_overlap_fixture(5);
  // overlap fixture V accepts any witness equal to x with lsb clear; x=10
  const BitString even = BitString::make(0x0a, 5);
  auto w = find_witness(broken, even, Side::V);
  REQUIRE(w.has_value());
  CHECK(broken.verify_v(even, *w));
}
