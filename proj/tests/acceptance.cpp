// End-to-end acceptance gate. Each numbered check prints exactly one
// [PASS]/[FAIL] line; the exit code is the number of failures. Argument 1
// is the path to the kptlab binary (used by the determinism check).
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kpt/commands.hpp"
#include "kpt/students.hpp"

using namespace kpt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and budgets.
constexpr double kPairCheckMaxSecs = 1.0;
constexpr double kValidityMaxSecs = 30.0;
constexpr double kGapBranchMaxSecs = 10.0;
constexpr double kSearchBranchMaxSecs = 60.0;
constexpr double kGapSuccessFloor = 0.95;
constexpr long kGapSamples = 2000;
constexpr long kNullSamples = 10000;
constexpr double kNullSlack = 0.015;
constexpr long kSampledRows = 5000;
constexpr double kSigmas = 4.0;

int failures = 0;

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int num, bool ok, const std::string& what, double secs) {
  std::printf("[%s] %d. %s (%.2fs)\n", ok ? "PASS" : "FAIL", num, what.c_str(),
              secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class Fn>
void criterion(int num, const std::string& what, Fn&& fn) {
  const auto t0 = Clock::now();
  bool ok = false;
  std::string note = what;
  try {
    ok = fn(note);
  } catch (const std::exception& e) {
    note = what + ": threw " + e.what();
  }
  report(num, ok, note, secs_since(t0));
}

// Does the stored counterexample falsify the proposed disjunct? Read off
// the pair predicates directly; the encoded blocks agree with them (checked
// exhaustively by criterion 9 and the unit suite).
bool refutes(const NpPairInstance& pair, int m, const std::vector<BitString>& xs,
             const Counterexample& cx) {
  const DisjunctAssignment& a = cx.assignment;
  if (cx.disjunct == 0) return pair.verify_u(xs[0], a.y);
  if (cx.disjunct == m) return pair.verify_v(xs[m - 1], a.z);
  return pair.verify_v(xs[cx.disjunct - 1], a.z) ||
         pair.verify_u(xs[cx.disjunct], a.y);
}

// Unit propagation over the defining (size >= 2) clauses; false = conflict.
bool propagate_defining(const std::vector<Clause>& clauses,
                        std::vector<int8_t>& val) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& cl : clauses) {
      if (cl.size < 2) continue;
      int unassigned = -1;
      bool sat = false;
      for (int i = 0; i < cl.size && !sat; ++i) {
        const Lit l = cl.lit[i];
        const int8_t v = val[lit_var(l)];
        if (v == -1) {
          if (unassigned >= 0) {
            unassigned = -2;
          } else {
            unassigned = i;
          }
        } else if ((v == 1) == lit_sign(l)) {
          sat = true;
        }
      }
      if (sat || unassigned == -2) continue;
      if (unassigned == -1) return false;
      const Lit l = cl.lit[unassigned];
      val[lit_var(l)] = lit_sign(l) ? 1 : 0;
      changed = true;
    }
  }
  return true;
}

// CNF projection onto the inputs equals the circuit's accepting set, with
// the auxiliaries forced to the canonical gate values.
bool projection_matches(const Circuit& c, Polarity pol) {
  const CnfFormula f = tseitin(c, pol);
  const bool target = pol == Polarity::AsIs;
  std::vector<uint8_t> nodes;
  for (uint32_t x = 0; x < (1u << c.num_x); ++x) {
    for (uint32_t w = 0; w < (1u << c.num_w); ++w) {
      std::vector<int8_t> val(f.num_vars, -1);
      for (int b = 0; b < c.num_x; ++b) val[b] = (x >> b) & 1;
      for (int b = 0; b < c.num_w; ++b) val[c.num_x + b] = (w >> b) & 1;
      const bool consistent = propagate_defining(f.clauses, val);
      if (!consistent) return false;  // defining clauses never conflict
      c.eval_nodes(x, w, nodes);
      for (int v = 0; v < f.num_vars; ++v) {
        if (val[v] == -1) return false;  // propagation must be total
        const auto role = f.var_roles.at(v);
        if (role.kind == VarKind::Aux &&
            val[v] != nodes[c.num_inputs() + role.bit])
          return false;
      }
      // With auxiliaries canonical, the formula holds iff the circuit
      // meets the encoded polarity.
      bool all_sat = true;
      for (const Clause& cl : f.clauses) {
        bool sat = false;
        for (int i = 0; i < cl.size; ++i)
          sat = sat || ((val[lit_var(cl.lit[i])] == 1) == lit_sign(cl.lit[i]));
        all_sat = all_sat && sat;
      }
      if (all_sat != (c.eval(x, w) == target)) return false;
    }
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string kptlab_bin = argc > 1 ? argv[1] : "";

  criterion(1, "pair hypotheses", [](std::string& note) {
    const auto t0 = Clock::now();
    const NpPairInstance pair = make_perm_pair({.n = 10});
    const PairCheckResult r = check_pair_exhaustive(pair);
    const double dt = secs_since(t0);
    const bool ok = r.disjointness_violations == 0 && r.coverage == 1024 &&
                    r.u_size == 512 && r.v_size == 512 && r.exactly_uniform &&
                    dt < kPairCheckMaxSecs;
    note = "pair hypotheses: n=10 exhaustive, violations=" +
           std::to_string(r.disjointness_violations) +
           ", coverage=" + std::to_string(r.coverage) + "/1024, uniform=" +
           (r.exactly_uniform ? "yes" : "no");
    return ok;
  });

  criterion(2, "disjunction validity", [](std::string& note) {
    bool ok = true;
    long scanned = 0;
    for (const int m : {2, 3}) {
      const DisjunctionInstance inst =
          build_disjunction(make_perm_pair({.n = 3}), m);
      const ValidityResult v = check_validity(inst);
      ok = ok && v.valid;
      scanned += v.x_assignments_scanned;
    }
    for (const int m : {2, 3, 4}) {
      const DisjunctionInstance inst =
          build_disjunction(make_easy_pair(3), m);
      const ValidityResult v = check_validity(inst);
      ok = ok && v.valid;
      scanned += v.x_assignments_scanned;
    }
    // Corrupted fixtures: removing the last disjunct breaks the chain.
    int counterexamples = 0;
    for (const auto& [pair, m] :
         {std::pair{make_perm_pair({.n = 3}), 3}, {make_easy_pair(3), 4}}) {
      DisjunctionInstance inst = build_disjunction(pair, m);
      drop_disjunct(inst, m);
      const ValidityResult v = check_validity(inst);
      if (v.valid || !v.counterexample) {
        ok = false;
        continue;
      }
      ++counterexamples;
      for (size_t b = 0; b < inst.disjuncts.size(); ++b)
        ok = ok && !eval_disjunct(inst, inst.disjuncts[b].index,
                                  v.counterexample->xs,
                                  v.counterexample->assignments[b]);
    }
    ok = ok && counterexamples == 2;
    note = "disjunction validity: 5 intact instances valid, " +
           std::to_string(scanned) + " assignments scanned, " +
           std::to_string(counterexamples) + "/2 corrupted refuted";
    return ok;
  });

  criterion(3, "game soundness", [](std::string& note) {
    const NpPairInstance pair = make_perm_pair({.n = 10});
    const int m = 6;
    const ProofToken token = make_token(pair, m);
    const HybridUniverse uni{.m = m, .lo = 1, .hi = m, .fixed = {}};

    const auto play = [&](const StudentStrategy& s, uint64_t base, long games,
                          long& wins, long& cxs, bool& sound) {
      for (long g = 0; g < games; ++g) {
        Rng xrng(derive_seed(base, static_cast<uint64_t>(2 * g)));
        const int boundary = 1 + static_cast<int>(xrng.below(m - 1));
        const std::vector<BitString> xs =
            sample_hybrid(pair, uni, boundary, xrng).xs;
        const Teacher teacher = [&](int p) {
          return honest_teacher(pair, m, xs, p);
        };
        const Transcript t = run_game(
            s, teacher, token, xs, derive_seed(base, static_cast<uint64_t>(2 * g + 1)));
        wins += t.student_wins ? 1 : 0;
        for (const RoundOutcome& r : t.rounds)
          if (r.cx) {
            ++cxs;
            sound = sound && refutes(pair, m, xs, *r.cx);
          }
      }
    };

    long omni_wins = 0, omni_cxs = 0;
    bool sound = true;
    play(omniscient_student(pair), derive_seed(3, "omniscient"), 1000,
         omni_wins, omni_cxs, sound);

    long const_wins = 0, const_cxs = 0;
    play(constant_student(0, 2), derive_seed(3, "constant"), 1000, const_wins,
         const_cxs, sound);

    const bool ok = omni_wins == 1000 && const_wins == 0 && sound &&
                    const_cxs == 2000;
    note = "game soundness: omniscient " + std::to_string(omni_wins) +
           "/1000, constant(0) " + std::to_string(const_wins) + "/1000, " +
           std::to_string(omni_cxs + const_cxs) +
           " counterexamples all falsify";
    return ok;
  });

  criterion(4, "answer dichotomy", [](std::string& note) {
    const NpPairInstance pair = make_perm_pair({.n = 6});
    const int m = 3;
    const HybridUniverse uni{.m = m, .lo = 1, .hi = m, .fixed = {}};
    RoundContext rctx;
    rctx.token = make_token(pair, m);
    rctx.round = 1;
    const StudentStrategy omni = omniscient_student(pair);

    const FrequencyTable exact =
        exact_frequency_table(pair, uni, omni, rctx, 1);
    bool diagonal = exact.samples_per_row == 32768 && exact.i_star == 1;
    for (int b = uni.lo; b < uni.hi; ++b)
      for (int a = 0; a <= m; ++a)
        diagonal = diagonal && exact.freq(b, a) == (a == b ? 1.0 : 0.0);

    const double tau = 1.0 / 12.0;
    const auto low = find_adjacent_gap(exact, exact.i_star, tau);
    const auto high = find_adjacent_gap(exact, exact.i_star + 1, tau);
    const bool gaps = low && low->t == 1 && low->direction == -1 &&
                      high && high->t == 1 && high->direction == 1;

    const FrequencyTable sampled = estimate_frequency_table(
        pair, uni, omni, rctx, kSampledRows, derive_seed(4, "sampled"), 1);
    bool close = true;
    for (int b = uni.lo; b < uni.hi; ++b)
      for (int a = 0; a <= m; ++a) {
        const double tol =
            kSigmas * binomial_sigma(exact.freq(b, a), kSampledRows);
        close = close &&
                std::abs(sampled.freq(b, a) - exact.freq(b, a)) <= tol;
      }

    note = std::string("answer dichotomy: exact table ") +
           (diagonal ? "diagonal" : "NOT diagonal") + ", gaps at answers " +
           std::to_string(exact.i_star) + "," +
           std::to_string(exact.i_star + 1) + (gaps ? " fire" : " missing") +
           ", sampled N=5000 within 4 sigma";
    return diagonal && gaps && close;
  });

  criterion(5, "gap-branch distinguisher", [](std::string& note) {
    const auto t0 = Clock::now();
    const NpPairInstance pair = make_perm_pair({.n = 10});
    const ReductionBudgets budgets;
    const ReductionResult rr = kpt_reduce(pair, omniscient_student(pair),
                                          budgets, derive_seed(5, "acc"), 1);
    const bool shape = !rr.aborted && rr.m == 3 && rr.rounds.size() == 1 &&
                       rr.rounds.back().action == "gap" &&
                       rr.distinguisher.kind == "gap" &&
                       !rr.distinguisher.failed;
    AdvantageEstimate adv;
    if (shape)
      adv = measure_advantage(pair, rr.distinguisher, kGapSamples,
                              derive_seed(5, "adv"), 1);
    const double dt = secs_since(t0);
    note = "gap-branch distinguisher: success " + fmt(adv.success_rate) +
           " >= " + fmt(kGapSuccessFloor) + " at N=" +
           std::to_string(kGapSamples);
    return shape && adv.success_rate >= kGapSuccessFloor &&
           dt < kGapBranchMaxSecs;
  });

  criterion(6, "search-branch distinguisher", [](std::string& note) {
    const auto t0 = Clock::now();
    const NpPairInstance pair = make_perm_pair({.n = 10});
    const ReductionBudgets budgets;
    const ReductionResult rr =
        kpt_reduce(pair, two_round_student(pair, 1), budgets,
                   derive_seed(6, "acc"), 1);
    const bool shape = !rr.aborted && rr.m == 6 && !rr.distinguisher.failed;
    AdvantageEstimate adv;
    if (shape)
      adv = measure_advantage(pair, rr.distinguisher, kNullSamples,
                              derive_seed(6, "adv"), 1);
    const double dt = secs_since(t0);
    const double floor = 0.5 + 1.0 / 24.0;
    note = "search-branch distinguisher: success " + fmt(adv.success_rate) +
           " >= " + fmt(floor) + ", 99% CI [" + fmt(adv.ci.low) + ", " +
           fmt(adv.ci.high) + "] excludes 0.5";
    return shape && adv.success_rate >= floor && adv.ci.low > 0.5 &&
           dt < kSearchBranchMaxSecs;
  });

  criterion(7, "null and ceiling controls", [](std::string& note) {
    const NpPairInstance pair = make_perm_pair({.n = 10});
    const ReductionBudgets budgets;

    const ReductionResult rnd = kpt_reduce(pair, random_student(1), budgets,
                                           derive_seed(7, "rand"), 1);
    const AdvantageEstimate rnd_adv =
        !rnd.aborted && rnd.distinguisher.classify
            ? measure_advantage(pair, rnd.distinguisher, kNullSamples,
                                derive_seed(7, "rand-adv"), 1)
            : AdvantageEstimate{};
    const bool rnd_null = std::abs(rnd_adv.success_rate - 0.5) <= kNullSlack;

    Distinguisher coin;
    coin.classify = [](const BitString&, Rng& rng) {
      return Classification{rng.coin() ? 1 : 0, true};
    };
    const AdvantageEstimate coin_adv = measure_advantage(
        pair, coin, kNullSamples, derive_seed(7, "coin-adv"), 1);
    const bool coin_null =
        std::abs(coin_adv.success_rate - 0.5) <= kNullSlack &&
        coin_adv.failure_rate == 1.0;

    const NpPairInstance easy = make_easy_pair(10);
    const ReductionResult top = kpt_reduce(easy, msb_student(1), budgets,
                                           derive_seed(7, "easy"), 1);
    const AdvantageEstimate top_adv =
        !top.aborted && top.distinguisher.classify
            ? measure_advantage(easy, top.distinguisher, kNullSamples,
                                derive_seed(7, "easy-adv"), 1)
            : AdvantageEstimate{};
    const bool ceiling = top_adv.success_rate == 1.0;

    note = "null and ceiling controls: random " + fmt(rnd_adv.success_rate) +
           ", coin " + fmt(coin_adv.success_rate) + " (both 0.5 +- " +
           fmt(kNullSlack) + "), easy-pair reader " +
           fmt(top_adv.success_rate);
    return rnd_null && coin_null && ceiling;
  });

  criterion(8, "report determinism", [&](std::string& note) {
    if (kptlab_bin.empty()) {
      note = "report determinism: no kptlab binary path given";
      return false;
    }
    const fs::path dir =
        fs::temp_directory_path() /
        ("kptlab-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string common =
        " reduce --set pair=perm --set n=6 --set student=two_round"
        " --set probe=1 --set k=2 --set estimation_samples=250"
        " --set advantage_samples=300 --set seed=11 --out ";
    const fs::path r1 = dir / "r1.json";
    const fs::path r2 = dir / "r2.json";
    const fs::path r3 = dir / "r3.json";
    bool ok = true;
    for (const auto& [path, workers] :
         {std::pair{r1, 1}, {r2, 1}, {r3, 8}}) {
      const std::string cmd = kptlab_bin + common + path.string() +
                              " --workers " + std::to_string(workers) +
                              " >/dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      ok = ok && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    }
    const std::string b1 = slurp(r1), b2 = slurp(r2), b3 = slurp(r3);
    ok = ok && !b1.empty() && b1 == b2 && b1 == b3;
    fs::remove_all(dir);
    note = std::string("report determinism: repeat run ") +
           (b1 == b2 && !b1.empty() ? "identical" : "DIFFERS") +
           ", workers 1 vs 8 " + (b1 == b3 && !b1.empty() ? "identical" : "DIFFERS");
    return ok;
  });

  criterion(9, "encoding oracles", [](std::string& note) {
    bool projections = true;
    for (const NpPairInstance& pair :
         {make_perm_pair({.n = 6}), make_easy_pair(6)})
      for (const Side side : {Side::U, Side::V})
        for (const Polarity pol : {Polarity::AsIs, Polarity::Negated})
          projections =
              projections && projection_matches(verifier_circuit(pair, side), pol);

    const DisjunctionInstance inst = build_disjunction(make_easy_pair(4), 3);
    const fs::path dir =
        fs::temp_directory_path() /
        ("kptlab-dimacs-" + std::to_string(::getpid()));
    const DimacsExport ex = export_dimacs(inst, dir);
    bool roundtrip = ex.files.size() == inst.disjuncts.size();
    for (size_t b = 0; roundtrip && b < ex.files.size(); ++b) {
      const CnfFormula back = read_dimacs(ex.files[b]);
      const CnfFormula& orig = inst.disjuncts[b].cnf;
      roundtrip = back.num_vars == inst.num_vars &&
                  back.clauses == orig.clauses;
      // Role comments must cover exactly the used variables and agree
      // with the instance-global variable map.
      std::set<int> used;
      for (const Clause& cl : orig.clauses)
        for (int i = 0; i < cl.size; ++i) used.insert(lit_var(cl.lit[i]));
      roundtrip = roundtrip && back.var_roles.size() == used.size();
      for (const auto& [var, role] : back.var_roles)
        roundtrip = roundtrip && used.count(var) == 1 &&
                    role == inst.var_map[var];
    }
    fs::remove_all(dir);
    note = std::string("encoding oracles: projections ") +
           (projections ? "match" : "MISMATCH") + " on 8 verifier circuits, " +
           "dimacs round-trip " + (roundtrip ? "exact" : "BROKEN");
    return projections && roundtrip;
  });

  if (failures == 0) std::printf("all 9 criteria passed\n");
  return failures;
}
