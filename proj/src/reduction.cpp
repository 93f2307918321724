#include "kpt/reduction.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "kpt/parallel.hpp"

namespace kpt {

namespace {

std::optional<Side> fixed_side(const HybridUniverse& uni, int pos) {
  if (pos < 1 || pos > uni.m) return std::nullopt;
  auto it = uni.fixed.find(pos);
  if (it == uni.fixed.end()) return std::nullopt;
  return it->second.side;
}

Classification coin_flip(Rng& rng) { return {rng.coin() ? 1 : 0, true}; }

Distinguisher coin_distinguisher(std::string kind, std::string note) {
  Distinguisher d;
  d.kind = std::move(kind);
  d.failed = true;
  d.note = std::move(note);
  d.classify = [](const BitString&, Rng& rng) { return coin_flip(rng); };
  return d;
}

}  // namespace

bool advice_refutable(const HybridUniverse& uni, int answer) {
  if (answer < 0 || answer > uni.m) return false;
  if (answer == 0) return fixed_side(uni, 1) == Side::U;
  if (answer == uni.m) return fixed_side(uni, uni.m) == Side::V;
  return fixed_side(uni, answer) == Side::V ||
         fixed_side(uni, answer + 1) == Side::U;
}

Counterexample advice_refutation(const HybridUniverse& uni, int answer,
                                 int witness_len) {
  const Witness filler = BitString::make(0, witness_len);
  Counterexample cx;
  cx.disjunct = answer;
  cx.assignment.z = filler;
  cx.assignment.y = filler;
  if (answer > 0 && fixed_side(uni, answer) == Side::V) {
    cx.assignment.z = uni.fixed.at(answer).witness;
    return cx;
  }
  if (answer < uni.m && fixed_side(uni, answer + 1) == Side::U) {
    cx.assignment.y = uni.fixed.at(answer + 1).witness;
    return cx;
  }
  throw std::logic_error("no stored witness refutes this answer");
}

AdviceSearch search_advice_block(const NpPairInstance& pair,
                                 const HybridUniverse& uni,
                                 const StudentStrategy& student,
                                 const RoundContext& rctx, int answer,
                                 int block_lo, int block_hi, Side side,
                                 const ReductionBudgets& budgets, uint64_t seed,
                                 int workers) {
  if (block_lo < uni.lo || block_hi > uni.hi || block_lo > block_hi)
    throw std::invalid_argument("block must sit inside the active range");
  HybridUniverse shrunk = uni;
  if (side == Side::U) {
    if (block_lo != uni.lo)
      throw std::invalid_argument("a U block must start at lo");
    shrunk.lo = block_hi + 1;
  } else {
    if (block_hi != uni.hi)
      throw std::invalid_argument("a V block must end at hi");
    shrunk.hi = block_lo - 1;
  }
  if (shrunk.lo >= shrunk.hi)
    throw std::invalid_argument("block leaves no boundary to sample");

  const long per_row = budgets.samples_for(uni.m);
  const long rows = shrunk.hi - shrunk.lo;
  AdviceSearch out;
  out.threshold =
      1.0 / (2.0 * uni.m) - hoeffding_radius(per_row * rows, 0.01);
  const uint64_t cand_base = derive_seed(seed, "candidates");
  const uint64_t table_base = derive_seed(seed, "tables");

  for (int cand = 0; cand < budgets.advice_candidates; ++cand) {
    ++out.candidates_tried;
    Rng rng(derive_seed(cand_base, static_cast<uint64_t>(cand)));
    HybridUniverse trial = shrunk;
    std::map<int, FixedPosition> block;
    for (int p = block_lo; p <= block_hi; ++p) {
      auto [x, w] = sample_side(pair, side, rng);
      block[p] = FixedPosition{x, w, side};
      trial.fixed[p] = block[p];
    }
    FrequencyTable t = estimate_frequency_table(
        pair, trial, student, rctx, per_row,
        derive_seed(table_base, static_cast<uint64_t>(cand)), workers);
    long mass = 0;
    for (const auto& row : t.counts) mass += row[answer];
    const double freq =
        static_cast<double>(mass) / (static_cast<double>(per_row) * rows);
    if (freq >= out.threshold) {
      out.found = true;
      out.block = std::move(block);
      out.accepted_freq = freq;
      return out;
    }
  }
  return out;
}

GapBuild build_gap_distinguisher(const NpPairInstance& pair,
                                 const HybridUniverse& uni,
                                 const StudentStrategy& student,
                                 const RoundContext& rctx, int answer,
                                 const GapHit& gap,
                                 const ReductionBudgets& budgets, uint64_t seed,
                                 int workers) {
  const int cpos = gap.t + 1;
  GapBuild out;

  // A deferred witness must come from the sampled element at its position;
  // the challenge slot has no witness to give. Cannot happen while deferred
  // slots only ever point at the top of the active range, but the coin is
  // the honest fallback if that invariant ever moves.
  for (const auto& d : rctx.deferred)
    if (d.position == cpos) {
      out.d = coin_distinguisher(
          "gap", "deferred witness collides with the challenge slot");
      out.d.challenge_position = cpos;
      out.d.queried_round = rctx.round;
      return out;
    }

  const double need = budgets.tau_for(uni.m) / 2.0;
  const long per_side = budgets.samples_for(uni.m);
  const uint64_t ctx_base = derive_seed(seed, "contexts");
  const uint64_t est_base = derive_seed(seed, "estimates");

  std::vector<BitString> accepted_xs;
  std::vector<Counterexample> accepted_hist;
  double accepted_g = 0;
  bool accepted = false;
  double best_abs = -1;

  for (int cand = 0; cand < budgets.advice_candidates && !accepted; ++cand) {
    ++out.candidates_tried;
    Rng rng(derive_seed(ctx_base, static_cast<uint64_t>(cand)));
    HybridTuple tup = sample_hybrid(pair, uni, gap.t, rng);
    std::vector<Counterexample> hist = rctx.history;
    for (const auto& d : rctx.deferred) {
      if (tup.sides[d.position - 1] != Side::V)
        throw std::logic_error("deferred slot points at a non-V position");
      hist[d.history_index].assignment.z = tup.ws[d.position - 1];
    }

    const uint64_t cand_base = derive_seed(est_base, static_cast<uint64_t>(cand));
    std::vector<uint8_t> hits(2 * per_side);
    parallel_for(2 * per_side, workers, [&](long i) {
      Side side = i < per_side ? Side::U : Side::V;
      Rng srng(derive_seed(cand_base, static_cast<uint64_t>(i)));
      auto [x, w] = sample_side(pair, side, srng);
      (void)w;
      std::vector<BitString> xs = tup.xs;
      xs[cpos - 1] = x;
      StudentContext sc{rctx.round, xs, rctx.token, hist, srng};
      StudentAnswer a = student.answer(sc);
      hits[i] = !a.budget_exhausted && a.index == answer;
    });
    long u_hits = 0, v_hits = 0;
    for (long i = 0; i < per_side; ++i) u_hits += hits[i];
    for (long i = per_side; i < 2 * per_side; ++i) v_hits += hits[i];
    const double g = (static_cast<double>(u_hits) - static_cast<double>(v_hits)) /
                     static_cast<double>(per_side);
    if (std::abs(g) > best_abs) {
      best_abs = std::abs(g);
      out.best_gap = g;
    }
    if (std::abs(g) >= need) {
      accepted = true;
      accepted_xs = tup.xs;
      accepted_hist = std::move(hist);
      accepted_g = g;
    }
  }

  if (!accepted) {
    out.d = coin_distinguisher("gap", "no frozen context preserved the gap");
    out.d.challenge_position = cpos;
    out.d.queried_round = rctx.round;
    return out;
  }

  out.d.kind = "gap";
  out.d.challenge_position = cpos;
  out.d.queried_round = rctx.round;
  const bool positive = accepted_g > 0;
  out.d.classify = [xs_template = std::move(accepted_xs),
                    history = std::move(accepted_hist), token = rctx.token,
                    stud = student, round = rctx.round, answer, positive,
                    hole = cpos - 1](const BitString& x, Rng& rng) {
    std::vector<BitString> xs = xs_template;
    xs[hole] = x;
    StudentContext sc{round, xs, token, history, rng};
    StudentAnswer a = stud.answer(sc);
    const bool hit = !a.budget_exhausted && a.index == answer;
    return Classification{hit == positive ? 1 : 0, false};
  };
  return out;
}

ReductionResult kpt_reduce(const NpPairInstance& pair,
                           const StudentStrategy& student,
                           const ReductionBudgets& budgets, uint64_t seed,
                           int workers) {
  const int k = student.k;
  if (k < 1 || k > 6) throw std::invalid_argument("k must be in 1..6");
  const int m = 3 << (k - 1);

  ReductionResult res;
  res.k = k;
  res.m = m;

  HybridUniverse uni;
  uni.m = m;
  uni.lo = 1;
  uni.hi = m;
  RoundContext rctx;
  rctx.token = make_token(pair, m);

  const double tau = budgets.tau_for(m);
  const long per_row = budgets.samples_for(m);
  const uint64_t table_base = derive_seed(seed, "round-tables");

  const int est_rounds = std::max(1, k - 1);
  for (int r = 1; r <= est_rounds; ++r) {
    rctx.round = r;
    FrequencyTable table = estimate_frequency_table(
        pair, uni, student, rctx, per_row,
        derive_seed(table_base, static_cast<uint64_t>(r)), workers);

    RoundReport rep;
    rep.round = r;
    rep.lo = uni.lo;
    rep.hi = uni.hi;
    rep.i_star = table.i_star;
    rep.gamma = table.gamma;

    if (auto gap = find_adjacent_gap(table, table.i_star, tau)) {
      rep.action = "gap";
      rep.gap = gap;
      GapBuild gb = build_gap_distinguisher(
          pair, uni, student, rctx, table.i_star, *gap, budgets,
          derive_seed(derive_seed(seed, "gap"), static_cast<uint64_t>(r)),
          workers);
      rep.candidates_tried = gb.candidates_tried;
      res.rounds.push_back(rep);
      res.distinguisher = std::move(gb.d);
      res.final_universe = uni;
      res.final_history = rctx.history;
      return res;
    }

    if (k == 1) {
      // Single-round strategies have nothing to halve; the one table was
      // only there for the gap check.
      rep.action = "proceed";
      res.rounds.push_back(rep);
      break;
    }

    const int i_star = table.i_star;
    if (advice_refutable(uni, i_star)) {
      rctx.history.push_back(advice_refutation(uni, i_star, pair.witness_len));
      rep.action = "skip";
      res.rounds.push_back(rep);
      continue;
    }

    // Everything below lo is fixed U and everything above hi fixed V, so an
    // unrefuted answer can only lean on the active range.
    if (i_star < uni.lo - 1 || i_star > uni.hi)
      throw std::logic_error("unrefutable answer outside the active band");

    const int size = uni.active_size();
    if (size < 6 || size % 2 != 0)
      throw std::logic_error("halving round with a degenerate active range");
    const int mid = uni.lo + size / 2;
    const uint64_t round_seed =
        derive_seed(derive_seed(seed, "advice"), static_cast<uint64_t>(r));

    if (i_star <= mid - 2) {
      // The refuting slot i_star+1 lands in the lower half: pin it with U
      // elements and keep playing above.
      AdviceSearch s = search_advice_block(pair, uni, student, rctx, i_star,
                                           uni.lo, mid - 1, Side::U, budgets,
                                           round_seed, workers);
      rep.candidates_tried = s.candidates_tried;
      rep.accepted_freq = s.accepted_freq;
      if (!s.found) {
        rep.action = "abort";
        res.rounds.push_back(rep);
        res.aborted = true;
        res.abort_reason = "advice search exhausted";
        res.distinguisher = coin_distinguisher("coin", res.abort_reason);
        res.final_universe = uni;
        res.final_history = rctx.history;
        return res;
      }
      for (const auto& [p, fp] : s.block) uni.fixed[p] = fp;
      uni.lo = mid;
      rctx.history.push_back(advice_refutation(uni, i_star, pair.witness_len));
      rep.action = "halve-lower";
    } else {
      // Upper halves are pinned with V elements. For i_star >= mid the V
      // witness at i_star itself refutes; the straddle answer mid-1 is
      // refuted by whatever V element later sits at position mid-1, which
      // stays the top of the active range until the end, so the witness is
      // deferred and patched per sample.
      const bool straddle = i_star == mid - 1;
      AdviceSearch s = search_advice_block(pair, uni, student, rctx, i_star,
                                           mid, uni.hi, Side::V, budgets,
                                           round_seed, workers);
      rep.candidates_tried = s.candidates_tried;
      rep.accepted_freq = s.accepted_freq;
      if (!s.found) {
        rep.action = "abort";
        res.rounds.push_back(rep);
        res.aborted = true;
        res.abort_reason = "advice search exhausted";
        res.distinguisher = coin_distinguisher("coin", res.abort_reason);
        res.final_universe = uni;
        res.final_history = rctx.history;
        return res;
      }
      for (const auto& [p, fp] : s.block) uni.fixed[p] = fp;
      uni.hi = mid - 1;
      if (straddle) {
        Counterexample cx;
        cx.disjunct = i_star;
        cx.assignment.z = BitString::make(0, pair.witness_len);
        cx.assignment.y = BitString::make(0, pair.witness_len);
        rctx.history.push_back(cx);
        rctx.deferred.push_back(
            {static_cast<int>(rctx.history.size()) - 1, mid - 1});
        rep.action = "halve-upper-deferred";
      } else {
        rctx.history.push_back(
            advice_refutation(uni, i_star, pair.witness_len));
        rep.action = "halve-upper";
      }
    }
    res.rounds.push_back(rep);
  }

  // Skipped rounds leave the range too wide: pad with forced U blocks until
  // exactly one boundary of slack remains around the challenge.
  Rng pad_rng(derive_seed(seed, "padding"));
  while (uni.active_size() > 3) {
    const int size = uni.active_size();
    if (size % 2 != 0) throw std::logic_error("active size drifted odd");
    const int mid = uni.lo + size / 2;
    for (int p = uni.lo; p < mid; ++p) {
      auto [x, w] = sample_side(pair, Side::U, pad_rng);
      uni.fixed[p] = FixedPosition{x, w, Side::U};
    }
    uni.lo = mid;
    ++res.padding_blocks;
  }

  // Anchor the outer active slots; the middle one is the challenge.
  const int c = uni.lo + 1;
  Rng anchor_rng(derive_seed(seed, "anchors"));
  {
    auto [x, w] = sample_side(pair, Side::U, anchor_rng);
    uni.fixed[uni.lo] = FixedPosition{x, w, Side::U};
  }
  {
    auto [x, w] = sample_side(pair, Side::V, anchor_rng);
    uni.fixed[uni.hi] = FixedPosition{x, w, Side::V};
  }
  uni.lo = c;
  uni.hi = c;

  for (const auto& d : rctx.deferred) {
    const FixedPosition& fp = uni.fixed.at(d.position);
    if (fp.side != Side::V)
      throw std::logic_error("deferred slot resolved to a U position");
    rctx.history[d.history_index].assignment.z = fp.witness;
  }

  // Below the challenge everything is U, above everything V. The only
  // proposals the stored witnesses cannot refute are c-1 (valid exactly when
  // the challenge has no U witness) and c (valid exactly when it has no V
  // witness), so those two answers are the side guesses and anything else
  // falls to the coin.
  std::vector<BitString> xs_template(m);
  for (const auto& [p, fp] : uni.fixed) xs_template[p - 1] = fp.element;

  res.distinguisher.kind = "path";
  res.distinguisher.challenge_position = c;
  res.distinguisher.queried_round = k;
  res.distinguisher.classify =
      [xs_template = std::move(xs_template), history = rctx.history,
       token = rctx.token, stud = student, round = k,
       c](const BitString& x, Rng& rng) {
        std::vector<BitString> xs = xs_template;
        xs[c - 1] = x;
        StudentContext sc{round, xs, token, history, rng};
        StudentAnswer a = stud.answer(sc);
        if (!a.budget_exhausted) {
          if (a.index == c - 1) return Classification{0, false};
          if (a.index == c) return Classification{1, false};
        }
        return coin_flip(rng);
      };
  res.final_universe = uni;
  res.final_history = rctx.history;
  return res;
}

AdvantageEstimate measure_advantage(const NpPairInstance& pair,
                                    const Distinguisher& d, long samples,
                                    uint64_t seed, int workers) {
  if (samples < 100) throw std::invalid_argument("need at least 100 samples");
  if (!d.classify) throw std::invalid_argument("distinguisher has no classifier");
  std::vector<uint8_t> ok(samples), coin(samples);
  const uint64_t base = derive_seed(seed, "trials");
  parallel_for(samples, workers, [&](long i) {
    Rng rng(derive_seed(base, static_cast<uint64_t>(i)));
    const Side side = rng.coin() ? Side::U : Side::V;
    auto [x, w] = sample_side(pair, side, rng);
    (void)w;
    const Classification c = d.classify(x, rng);
    ok[i] = (c.bit == 1) == (side == Side::U) ? 1 : 0;
    coin[i] = c.coin ? 1 : 0;
  });
  AdvantageEstimate e;
  e.samples = samples;
  for (long i = 0; i < samples; ++i) {
    e.successes += ok[i];
    e.coin_uses += coin[i];
  }
  e.success_rate = static_cast<double>(e.successes) / static_cast<double>(samples);
  e.failure_rate = static_cast<double>(e.coin_uses) / static_cast<double>(samples);
  e.ci = wilson_interval(e.successes, samples);
  return e;
}

}  // namespace kpt
