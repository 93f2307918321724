#include "kpt/hybrid.hpp"

#include <cmath>
#include <stdexcept>

#include "kpt/parallel.hpp"

namespace kpt {

std::vector<int> HybridUniverse::boundaries() const {
  std::vector<int> out;
  for (int i = lo; i < hi; ++i) out.push_back(i);
  return out;
}

namespace {

void require_universe(const NpPairInstance& pair, const HybridUniverse& uni) {
  if (uni.m < 2) throw std::invalid_argument("universe needs m >= 2");
  if (uni.lo < 1 || uni.hi > uni.m || uni.lo >= uni.hi)
    throw std::invalid_argument("active range must satisfy 1 <= lo < hi <= m");
  for (int p = 1; p <= uni.m; ++p) {
    bool active = p >= uni.lo && p <= uni.hi;
    if (active == uni.is_fixed(p))
      throw std::invalid_argument(
          "fixed positions must be exactly the complement of the active range");
  }
  for (const auto& [pos, fp] : uni.fixed) {
    if (fp.element.len != pair.n || fp.witness.len != pair.witness_len)
      throw std::invalid_argument("fixed position has wrong widths");
  }
}

int16_t answer_bucket(const StudentAnswer& a, int m) {
  if (a.budget_exhausted) return static_cast<int16_t>(m + 1);
  if (a.index < 0 || a.index > m)
    throw std::logic_error("strategy proposed an index outside 0..m");
  return static_cast<int16_t>(a.index);
}

FrequencyTable table_shell(const HybridUniverse& uni, long samples_per_row) {
  FrequencyTable t;
  t.m = uni.m;
  t.lo = uni.lo;
  t.hi = uni.hi;
  t.samples_per_row = samples_per_row;
  t.counts.assign(t.rows(), std::vector<long>(t.num_answers(), 0));
  return t;
}

void tally(FrequencyTable& t, const std::vector<int16_t>& buckets,
           long samples_per_row) {
  for (long idx = 0; idx < static_cast<long>(buckets.size()); ++idx)
    ++t.counts[idx / samples_per_row][buckets[idx]];
  t.finalize();
}

}  // namespace

HybridTuple sample_hybrid(const NpPairInstance& pair,
                          const HybridUniverse& uni, int boundary, Rng& rng) {
  if (boundary < uni.lo || boundary >= uni.hi)
    throw std::invalid_argument("boundary must lie in lo..hi-1");
  HybridTuple t;
  t.xs.resize(uni.m);
  t.ws.resize(uni.m);
  t.sides.resize(uni.m);
  for (int p = 1; p <= uni.m; ++p) {
    if (auto it = uni.fixed.find(p); it != uni.fixed.end()) {
      t.xs[p - 1] = it->second.element;
      t.ws[p - 1] = it->second.witness;
      t.sides[p - 1] = it->second.side;
      continue;
    }
    Side side = p <= boundary ? Side::U : Side::V;
    auto [x, w] = sample_side(pair, side, rng);
    t.xs[p - 1] = x;
    t.ws[p - 1] = w;
    t.sides[p - 1] = side;
  }
  return t;
}

double FrequencyTable::freq(int boundary, int answer) const {
  return static_cast<double>(counts.at(boundary - lo).at(answer)) /
         static_cast<double>(samples_per_row);
}

void FrequencyTable::finalize() {
  std::vector<long> mass(m + 1, 0);
  for (const auto& row : counts)
    for (int a = 0; a <= m; ++a) mass[a] += row[a];
  i_star = 0;
  for (int a = 1; a <= m; ++a)
    if (mass[a] > mass[i_star]) i_star = a;
  gamma = static_cast<double>(mass[i_star]) /
          (static_cast<double>(samples_per_row) * rows());
}

FrequencyTable estimate_frequency_table(const NpPairInstance& pair,
                                        const HybridUniverse& uni,
                                        const StudentStrategy& student,
                                        const RoundContext& rctx,
                                        long samples_per_row, uint64_t seed,
                                        int workers) {
  require_universe(pair, uni);
  if (uni.m != rctx.token.m) throw std::invalid_argument("token/universe m mismatch");
  if (samples_per_row < 1) throw std::invalid_argument("need samples_per_row >= 1");
  for (const auto& d : rctx.deferred)
    if (d.history_index < 0 ||
        d.history_index >= static_cast<int>(rctx.history.size()) ||
        d.position < 1 || d.position > uni.m)
      throw std::invalid_argument("deferred slot out of range");

  FrequencyTable t = table_shell(uni, samples_per_row);
  std::vector<int16_t> buckets(static_cast<size_t>(t.rows()) * samples_per_row);
  parallel_for(static_cast<long>(buckets.size()), workers, [&](long idx) {
    int boundary = uni.lo + static_cast<int>(idx / samples_per_row);
    uint64_t sample = static_cast<uint64_t>(idx % samples_per_row);
    Rng rng(derive_seed(derive_seed(seed, static_cast<uint64_t>(boundary)), sample));
    HybridTuple tup = sample_hybrid(pair, uni, boundary, rng);
    auto history = rctx.history;
    for (const auto& d : rctx.deferred) {
      if (tup.sides[d.position - 1] != Side::V)
        throw std::logic_error("deferred slot points at a non-V position");
      history[d.history_index].assignment.z = tup.ws[d.position - 1];
    }
    StudentContext ctx{rctx.round, tup.xs, rctx.token, history, rng};
    buckets[idx] = answer_bucket(student.answer(ctx), uni.m);
  });
  tally(t, buckets, samples_per_row);
  return t;
}

FrequencyTable exact_frequency_table(const NpPairInstance& pair,
                                     const HybridUniverse& uni,
                                     const StudentStrategy& student,
                                     const RoundContext& rctx, int workers) {
  require_universe(pair, uni);
  if (uni.m != rctx.token.m) throw std::invalid_argument("token/universe m mismatch");
  if (!rctx.deferred.empty())
    throw std::invalid_argument("exact tables do not support deferred slots");

  SideLists lists = exact_side_lists(pair);
  if (lists.u.empty() || lists.v.empty())
    throw std::invalid_argument("a side is empty");
  if (lists.u.size() != lists.v.size())
    throw std::invalid_argument("exact tables need equally sized sides");

  const long base = static_cast<long>(lists.u.size());
  long total = 1;
  for (int p = uni.lo; p <= uni.hi; ++p) {
    if (total > (1L << 24) / base)
      throw std::invalid_argument("active product too large to enumerate");
    total *= base;
  }
  long flat = static_cast<long>(uni.hi - uni.lo) * total;
  if (flat > (1L << 24))
    throw std::invalid_argument("active product too large to enumerate");

  const uint64_t stream_base = derive_seed(0, "exact-table");
  FrequencyTable t = table_shell(uni, total);
  std::vector<int16_t> buckets(flat);
  parallel_for(flat, workers, [&](long idx) {
    int boundary = uni.lo + static_cast<int>(idx / total);
    long combo = idx % total;
    std::vector<BitString> xs(uni.m);
    for (const auto& [pos, fp] : uni.fixed) xs[pos - 1] = fp.element;
    long rest = combo;
    for (int p = uni.hi; p >= uni.lo; --p) {
      long digit = rest % base;
      rest /= base;
      xs[p - 1] = (p <= boundary ? lists.u : lists.v)[digit];
    }
    Rng rng(derive_seed(stream_base, static_cast<uint64_t>(idx)));
    StudentContext ctx{rctx.round, xs, rctx.token, rctx.history, rng};
    buckets[idx] = answer_bucket(student.answer(ctx), uni.m);
  });
  tally(t, buckets, total);
  return t;
}

std::optional<GapHit> find_adjacent_gap(const FrequencyTable& t, int answer,
                                        double tau) {
  for (int boundary = t.lo; boundary + 1 < t.hi; ++boundary) {
    double a = t.freq(boundary, answer);
    double b = t.freq(boundary + 1, answer);
    if (std::abs(b - a) >= tau)
      return GapHit{boundary, b > a ? 1 : -1, std::abs(b - a)};
  }
  return std::nullopt;
}

}  // namespace kpt
