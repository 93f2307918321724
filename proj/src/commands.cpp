#include "kpt/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kpt/parallel.hpp"
#include "kpt/students.hpp"

namespace kpt {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr const char* kVersion = "0.1.0";

// No resolved worker count in here: reports must come out byte-identical
// for one config no matter how many threads did the sampling. The config
// echo still shows the workers key when the experiment pinned it.
ordered_json envelope(const char* command, const ExperimentConfig& cfg) {
  ordered_json j;
  j["schema"] = "kptlab-report/1";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config_json(cfg);
  j["config_hash"] = hex64(config_hash(cfg));
  return j;
}

ReductionBudgets budgets_from(const ExperimentConfig& cfg) {
  ReductionBudgets b;
  b.estimation_samples = cfg.estimation_samples;
  b.advice_candidates = cfg.advice_candidates;
  b.advantage_samples = cfg.advantage_samples;
  b.tau = cfg.tau;
  b.confidence = cfg.confidence;
  return b;
}

ordered_json gap_json(const std::optional<GapHit>& gap) {
  if (!gap) return nullptr;
  ordered_json g;
  g["t"] = gap->t;
  g["direction"] = gap->direction;
  g["magnitude"] = gap->magnitude;
  return g;
}

ordered_json table_json(const FrequencyTable& t) {
  ordered_json rows = ordered_json::array();
  for (int b = t.lo; b < t.hi; ++b) {
    ordered_json row;
    row["boundary"] = b;
    row["counts"] = t.counts[b - t.lo];
    ordered_json freqs = ordered_json::array();
    for (int a = 0; a < t.num_answers(); ++a) freqs.push_back(t.freq(b, a));
    row["freqs"] = freqs;
    rows.push_back(row);
  }
  ordered_json j;
  j["samples_per_row"] = t.samples_per_row;
  j["rows"] = rows;
  j["gamma"] = t.gamma;
  j["i_star"] = t.i_star;
  return j;
}

ordered_json advantage_json(const AdvantageEstimate& e) {
  ordered_json j;
  j["samples"] = e.samples;
  j["successes"] = e.successes;
  j["success_rate"] = e.success_rate;
  j["failure_rate"] = e.failure_rate;
  j["ci_low"] = e.ci.low;
  j["ci_high"] = e.ci.high;
  return j;
}

}  // namespace

int resolve_workers(int flag_value, const ExperimentConfig& cfg) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("KPTLAB_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (cfg.workers > 0) return cfg.workers;
  return 1;
}

NpPairInstance pair_from_config(const ExperimentConfig& cfg) {
  try {
    if (cfg.pair == "perm") {
      PermPairConfig pc;
      pc.n = cfg.n;
      pc.perm_seed = cfg.perm_seed;
      pc.hard_bit_index = cfg.hard_bit;
      return make_perm_pair(pc);
    }
    if (cfg.pair == "easy") return make_easy_pair(cfg.n);
    return make_overlap_fixture(cfg.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

StudentStrategy student_from_config(const ExperimentConfig& cfg,
                                    const NpPairInstance& pair) {
  if (cfg.k < 1) throw ConfigError("k must be at least 1");
  if (cfg.student == "omniscient") return omniscient_student(pair);
  if (cfg.student == "two_round") return two_round_student(pair, cfg.probe);
  if (cfg.student == "constant")
    return constant_student(cfg.constant_index, cfg.k);
  if (cfg.student == "random") return random_student(cfg.k);
  if (cfg.student == "msb") return msb_student(cfg.k);
  if (cfg.student == "parity") return parity_student(pair, cfg.k);
  throw ConfigError("unknown student: " + cfg.student);
}

CommandResult cmd_check_pair(const ExperimentConfig& cfg,
                             const RunOptions& opt) {
  if (cfg.n > 12)
    throw ConfigError("check-pair scans every input; n must be <= 12");
  auto t0 = Clock::now();
  NpPairInstance pair = pair_from_config(cfg);
  PairCheckResult r = check_pair_exhaustive(pair);
  const long space = 1L << cfg.n;
  const bool ok = r.coverage == space && r.disjointness_violations == 0;

  ordered_json rep = envelope("check-pair", cfg);
  ordered_json res;
  res["pair_id"] = pair.pair_id;
  res["n"] = pair.n;
  res["witness_len"] = pair.witness_len;
  res["u_size"] = r.u_size;
  res["v_size"] = r.v_size;
  res["coverage"] = r.coverage;
  res["input_space"] = space;
  res["disjointness_violations"] = r.disjointness_violations;
  res["exactly_uniform"] = r.exactly_uniform;
  res["ok"] = ok;
  rep["results"] = res;
  if (opt.timings) rep["timings"] = {{"total_ms", ms_since(t0)}};
  return {rep, ok ? 0 : 1};
}

CommandResult cmd_validity(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto t0 = Clock::now();
  NpPairInstance pair = pair_from_config(cfg);
  DisjunctionInstance inst = build_disjunction(pair, cfg.m);
  if (opt.drop >= 0) drop_disjunct(inst, opt.drop);

  ordered_json rep = envelope("validity", cfg);
  ordered_json res;
  res["pair_id"] = inst.pair_id;
  res["n"] = inst.n;
  res["m"] = inst.m;
  res["num_vars"] = inst.num_vars;
  long clauses = 0;
  for (const auto& d : inst.disjuncts) clauses += static_cast<long>(d.cnf.clauses.size());
  res["num_clauses"] = clauses;
  res["dropped"] = opt.drop >= 0 ? ordered_json(opt.drop) : ordered_json(nullptr);

  if (!opt.dimacs_dir.empty()) {
    DimacsExport ex = export_dimacs(inst, opt.dimacs_dir);
    res["dimacs"] = {{"manifest", ex.manifest}, {"files", ex.files}};
  }

  ValidityResult v = check_validity(inst, opt.workers);
  res["valid"] = v.valid;
  res["x_assignments_scanned"] = v.x_assignments_scanned;
  if (v.counterexample) {
    ordered_json cx;
    ordered_json xs = ordered_json::array();
    for (const auto& x : v.counterexample->xs) xs.push_back(x.hex());
    cx["xs"] = xs;
    ordered_json falsifiers = ordered_json::array();
    for (size_t b = 0; b < inst.disjuncts.size(); ++b) {
      ordered_json f;
      f["disjunct"] = inst.disjuncts[b].index;
      f["z"] = v.counterexample->assignments[b].z.hex();
      f["y"] = v.counterexample->assignments[b].y.hex();
      falsifiers.push_back(f);
    }
    cx["falsifiers"] = falsifiers;
    res["counterexample"] = cx;
  } else {
    res["counterexample"] = nullptr;
  }
  rep["results"] = res;
  if (opt.timings) rep["timings"] = {{"total_ms", ms_since(t0)}};
  return {rep, v.valid ? 0 : 1};
}

CommandResult cmd_play(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto t0 = Clock::now();
  NpPairInstance pair = pair_from_config(cfg);
  if (cfg.m < 2) throw ConfigError("m must be at least 2");
  if (cfg.games < 1) throw ConfigError("games must be at least 1");
  StudentStrategy student = student_from_config(cfg, pair);
  ProofToken token = make_token(pair, cfg.m);

  // Inputs are uniform hybrid points: a boundary drawn from 1..m-1, then a
  // W_boundary[m] tuple, so exactly one disjunct is valid per game.
  HybridUniverse uni;
  uni.m = cfg.m;
  uni.lo = 1;
  uni.hi = cfg.m;

  const long games = cfg.games;
  std::vector<Transcript> ts(games);
  const uint64_t base = derive_seed(cfg.seed, "games");
  parallel_for(games, opt.workers, [&](long g) {
    Rng xrng(derive_seed(base, static_cast<uint64_t>(2 * g)));
    const int boundary = 1 + static_cast<int>(xrng.below(cfg.m - 1));
    const std::vector<BitString> xs =
        sample_hybrid(pair, uni, boundary, xrng).xs;
    Teacher teacher = [&pair, &cfg, xs](int proposed) {
      return honest_teacher(pair, cfg.m, xs, proposed);
    };
    ts[g] = run_game(student, teacher, token, xs,
                     derive_seed(base, static_cast<uint64_t>(2 * g + 1)));
  });

  long wins = 0, exhausted = 0;
  for (const auto& t : ts) {
    wins += t.student_wins ? 1 : 0;
    exhausted += t.budget_exhausted ? 1 : 0;
  }
  Interval ci = wilson_interval(wins, games);

  ordered_json rep = envelope("play", cfg);
  ordered_json res;
  res["pair_id"] = pair.pair_id;
  res["n"] = pair.n;
  res["m"] = cfg.m;
  res["student"] = student.name;
  res["k"] = student.k;
  res["games"] = games;
  res["wins"] = wins;
  res["losses"] = games - wins;
  res["win_rate"] = static_cast<double>(wins) / static_cast<double>(games);
  res["ci_low"] = ci.low;
  res["ci_high"] = ci.high;
  res["budget_exhausted_games"] = exhausted;
  ordered_json sample = ordered_json::array();
  for (long g = 0; g < std::min<long>(games, 10); ++g)
    sample.push_back(transcript_json(ts[g], pair.n, pair.witness_len));
  res["transcripts"] = sample;
  rep["results"] = res;
  if (opt.timings) rep["timings"] = {{"total_ms", ms_since(t0)}};
  return {rep, 0};
}

CommandResult cmd_claim2(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto t0 = Clock::now();
  NpPairInstance pair = pair_from_config(cfg);
  if (cfg.m < 2) throw ConfigError("m must be at least 2");
  StudentStrategy student = student_from_config(cfg, pair);
  ReductionBudgets budgets = budgets_from(cfg);
  const double tau = budgets.tau_for(cfg.m);

  HybridUniverse uni;
  uni.m = cfg.m;
  uni.lo = 1;
  uni.hi = cfg.m;
  RoundContext rctx;
  rctx.token = make_token(pair, cfg.m);
  rctx.round = 1;

  FrequencyTable table =
      opt.exact
          ? exact_frequency_table(pair, uni, student, rctx, opt.workers)
          : estimate_frequency_table(pair, uni, student, rctx,
                                     budgets.samples_for(cfg.m),
                                     derive_seed(cfg.seed, "table"),
                                     opt.workers);

  ordered_json rep = envelope("claim2", cfg);
  ordered_json res;
  res["pair_id"] = pair.pair_id;
  res["n"] = pair.n;
  res["m"] = cfg.m;
  res["student"] = student.name;
  res["mode"] = opt.exact ? "exact" : "sampled";
  res["tau"] = tau;
  res["table"] = table_json(table);
  ordered_json star = ordered_json::array();
  for (int b = table.lo; b < table.hi; ++b)
    star.push_back(table.freq(b, table.i_star));
  res["i_star_freqs"] = star;
  ordered_json gaps = ordered_json::array();
  for (int b = table.lo; b + 1 < table.hi; ++b) {
    const double diff =
        table.freq(b + 1, table.i_star) - table.freq(b, table.i_star);
    if (std::abs(diff) >= tau)
      gaps.push_back(gap_json(GapHit{b, diff > 0 ? 1 : -1, std::abs(diff)}));
  }
  res["gaps"] = gaps;
  rep["results"] = res;
  if (opt.timings) rep["timings"] = {{"total_ms", ms_since(t0)}};
  return {rep, 0};
}

CommandResult cmd_reduce(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto t0 = Clock::now();
  NpPairInstance pair = pair_from_config(cfg);
  StudentStrategy student = student_from_config(cfg, pair);
  ReductionBudgets budgets = budgets_from(cfg);

  ReductionResult rr = kpt_reduce(pair, student, budgets,
                                  derive_seed(cfg.seed, "reduce"), opt.workers);
  const double build_ms = ms_since(t0);

  auto t1 = Clock::now();
  std::optional<AdvantageEstimate> adv;
  if (!rr.aborted && rr.distinguisher.classify)
    adv = measure_advantage(pair, rr.distinguisher, cfg.advantage_samples,
                            derive_seed(cfg.seed, "advantage"), opt.workers);

  ordered_json rep = envelope("reduce", cfg);
  ordered_json res;
  res["pair_id"] = pair.pair_id;
  res["n"] = pair.n;
  res["student"] = student.name;
  res["k"] = rr.k;
  res["m"] = rr.m;
  res["tau"] = budgets.tau_for(rr.m);
  res["estimation_samples"] = budgets.samples_for(rr.m);
  res["advice_candidates"] = budgets.advice_candidates;

  ordered_json rounds = ordered_json::array();
  for (const auto& r : rr.rounds) {
    ordered_json j;
    j["round"] = r.round;
    j["lo"] = r.lo;
    j["hi"] = r.hi;
    j["i_star"] = r.i_star;
    j["gamma"] = r.gamma;
    j["action"] = r.action;
    j["gap"] = gap_json(r.gap);
    j["candidates_tried"] = r.candidates_tried;
    j["accepted_freq"] = r.accepted_freq;
    rounds.push_back(j);
  }
  res["rounds"] = rounds;
  res["padding_blocks"] = rr.padding_blocks;
  res["aborted"] = rr.aborted;
  res["abort_reason"] = rr.abort_reason;

  ordered_json d;
  d["kind"] = rr.distinguisher.kind;
  d["failed"] = rr.distinguisher.failed;
  d["note"] = rr.distinguisher.note;
  d["challenge_position"] = rr.distinguisher.challenge_position;
  d["queried_round"] = rr.distinguisher.queried_round;
  res["distinguisher"] = d;

  ordered_json layout = ordered_json::array();
  for (const auto& [pos, fp] : rr.final_universe.fixed) {
    ordered_json f;
    f["position"] = pos;
    f["side"] = side_name(fp.side);
    f["element"] = fp.element.hex();
    if (opt.emit_witnesses) f["witness"] = fp.witness.hex();
    layout.push_back(f);
  }
  res["layout"] = layout;

  ordered_json hist = ordered_json::array();
  for (const auto& cx : rr.final_history) {
    ordered_json h;
    h["disjunct"] = cx.disjunct;
    if (opt.emit_witnesses) {
      h["z"] = cx.assignment.z.hex();
      h["y"] = cx.assignment.y.hex();
    }
    hist.push_back(h);
  }
  res["history"] = hist;
  res["advantage"] = adv ? advantage_json(*adv) : ordered_json(nullptr);
  rep["results"] = res;
  if (opt.timings)
    rep["timings"] = {{"build_ms", build_ms}, {"advantage_ms", ms_since(t1)}};

  int code = 0;
  if (rr.aborted)
    code = 2;
  else if (rr.distinguisher.failed)
    code = 1;
  return {rep, code};
}

void write_report(const nlohmann::ordered_json& report,
                  const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report: " + tmp.string());
    out << report.dump(2) << '\n';
  }
  fs::rename(tmp, target);
}

}  // namespace kpt
