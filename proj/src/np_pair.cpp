#include "kpt/np_pair.hpp"

#include <stdexcept>

namespace kpt {

namespace {

void require_n(int n) {
  if (n < 3 || n > 20) {
    throw std::invalid_argument("pair width n must be in [3, 20]");
  }
}

}  // namespace

NpPairInstance make_perm_pair_from_table(int n, std::vector<uint32_t> table,
                                         int hard_bit_index,
                                         std::string pair_id) {
  require_n(n);
  const size_t size = size_t{1} << n;
  if (table.size() != size) {
    throw std::invalid_argument("permutation table size must be 2^n");
  }
  if (hard_bit_index < 0 || hard_bit_index >= n) {
    throw std::invalid_argument("hard bit index out of range");
  }
  auto shared = std::make_shared<const std::vector<uint32_t>>(std::move(table));

  NpPairInstance pair;
  pair.n = n;
  pair.witness_len = n;
  pair.pair_id = std::move(pair_id);
  pair.kind = PairKind::perm_table;
  pair.table = shared;
  pair.hard_bit_index = hard_bit_index;
  const int hb = hard_bit_index;
  pair.verify_u = [shared, hb](const BitString& x, const Witness& s) {
    return (*shared)[s.value()] == x.value() && s.bit(hb);
  };
  pair.verify_v = [shared, hb](const BitString& x, const Witness& s) {
    return (*shared)[s.value()] == x.value() && !s.bit(hb);
  };
  const int width = n;
  pair.sample_d = [shared, hb, width](Rng& rng) {
    const uint32_t s = rng.below(uint32_t{1} << width);
    DrawnSample d;
    d.w = BitString::make(s, width);
    d.x = BitString::make((*shared)[s], width);
    d.side = d.w.bit(hb) ? Side::U : Side::V;
    return d;
  };
  return pair;
}

NpPairInstance make_perm_pair(const PermPairConfig& cfg) {
  require_n(cfg.n);
  const uint32_t size = uint32_t{1} << cfg.n;
  std::vector<uint32_t> table(size);
  for (uint32_t i = 0; i < size; ++i) table[i] = i;
  Rng rng(derive_seed(cfg.perm_seed, "perm-table"));
  for (uint32_t i = size - 1; i > 0; --i) {
    const uint32_t j = rng.below(i + 1);
    std::swap(table[i], table[j]);
  }
  std::string id = "perm-n" + std::to_string(cfg.n) + "-s" +
                   std::to_string(cfg.perm_seed) + "-b" +
                   std::to_string(cfg.hard_bit_index);
  return make_perm_pair_from_table(cfg.n, std::move(table),
                                   cfg.hard_bit_index, std::move(id));
}

NpPairInstance make_easy_pair(int n) {
  require_n(n);
  NpPairInstance pair;
  pair.n = n;
  pair.witness_len = n;
  pair.pair_id = "easy-n" + std::to_string(n);
  pair.kind = PairKind::easy_msb;
  pair.verify_u = [](const BitString& x, const Witness& w) {
    return x.msb() && w == x;
  };
  pair.verify_v = [](const BitString& x, const Witness& w) {
    return !x.msb() && w == x;
  };
  const int width = n;
  pair.sample_d = [width](Rng& rng) {
    const uint32_t v = rng.below(uint32_t{1} << width);
    DrawnSample d;
    d.x = BitString::make(v, width);
    d.w = d.x;
    d.side = d.x.msb() ? Side::U : Side::V;
    return d;
  };
  return pair;
}

NpPairInstance make_overlap_fixture(int n) {
  require_n(n);
  // U = msb 1, V = lsb 0: strings like 10...0 sit on both sides.
  NpPairInstance pair;
  pair.n = n;
  pair.witness_len = n;
  pair.pair_id = "overlap-fixture-n" + std::to_string(n);
  pair.kind = PairKind::overlap_fixture;
  pair.verify_u = [](const BitString& x, const Witness& w) {
    return x.msb() && w == x;
  };
  pair.verify_v = [](const BitString& x, const Witness& w) {
    return !x.bit(0) && w == x;
  };
  const int width = n;
  pair.sample_d = [width](Rng& rng) {
    const uint32_t v = rng.below(uint32_t{1} << width);
    DrawnSample d;
    d.x = BitString::make(v, width);
    d.w = d.x;
    d.side = d.x.msb() ? Side::U : Side::V;
    return d;
  };
  return pair;
}

std::optional<Witness> find_witness(const NpPairInstance& pair,
                                    const BitString& x, Side side) {
  if (pair.witness_len > 24) {
    throw std::invalid_argument("witness enumeration limited to 24 bits");
  }
  const uint32_t space = uint32_t{1} << pair.witness_len;
  for (uint32_t w = 0; w < space; ++w) {
    const Witness cand = BitString::make(w, pair.witness_len);
    if (pair.verify(side, x, cand)) return cand;
  }
  return std::nullopt;
}

std::pair<BitString, Witness> sample_side(const NpPairInstance& pair,
                                          Side side, Rng& rng) {
  for (long tries = 0; tries < 1'000'000; ++tries) {
    const DrawnSample d = pair.sample_d(rng);
    if (d.side == side) return {d.x, d.w};
  }
  throw std::runtime_error(std::string("side ") + side_name(side) +
                           " not hit after 1e6 draws; side looks empty");
}

SideLists exact_side_lists(const NpPairInstance& pair) {
  if (pair.n > 12) {
    throw std::invalid_argument("exact side lists limited to n <= 12");
  }
  SideLists lists;
  const uint32_t space = uint32_t{1} << pair.n;
  for (uint32_t v = 0; v < space; ++v) {
    const BitString x = BitString::make(v, pair.n);
    if (find_witness(pair, x, Side::U)) lists.u.push_back(x);
    if (find_witness(pair, x, Side::V)) lists.v.push_back(x);
  }
  return lists;
}

PairCheckResult check_pair_exhaustive(const NpPairInstance& pair) {
  if (pair.n > 12) {
    throw std::invalid_argument("exhaustive pair check limited to n <= 12");
  }
  PairCheckResult r;
  const uint32_t space = uint32_t{1} << pair.n;
  for (uint32_t v = 0; v < space; ++v) {
    const BitString x = BitString::make(v, pair.n);
    const bool in_u = find_witness(pair, x, Side::U).has_value();
    const bool in_v = find_witness(pair, x, Side::V).has_value();
    r.u_size += in_u;
    r.v_size += in_v;
    r.coverage += (in_u || in_v);
    r.disjointness_violations += (in_u && in_v);
  }
  // The input marginal is exactly uniform when the sampler is a bijection
  // of a uniform draw. For table pairs that is the permutation property;
  // the formulaic pairs emit the drawn string unchanged.
  if (pair.kind == PairKind::perm_table) {
    std::vector<uint8_t> seen(space, 0);
    bool bijective = true;
    for (uint32_t s = 0; s < space; ++s) {
      const uint32_t img = (*pair.table)[s];
      if (img >= space || seen[img]) {
        bijective = false;
        break;
      }
      seen[img] = 1;
    }
    r.exactly_uniform = bijective;
  } else {
    r.exactly_uniform = true;
  }
  return r;
}

}  // namespace kpt
