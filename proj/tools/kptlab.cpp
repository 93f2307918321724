#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpt/commands.hpp"

namespace {

struct CliState {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  std::string out;
  int workers = 0;
  kpt::RunOptions opt;
};

void add_common(CLI::App* cmd, CliState& st) {
  cmd->add_option("--config", st.config_path, "key=value config file");
  cmd->add_option("--set", st.overrides,
                  "override one config key (key=value, repeatable)");
  cmd->add_option("--seed", st.seed, "master seed, wins over the config");
  cmd->add_option("--out", st.out, "write the JSON report here "
                                   "(default: stdout)");
  cmd->add_option("--workers", st.workers, "worker threads");
  cmd->add_flag("--timings", st.opt.timings,
                "include wall-clock times in the report");
}

int run(CliState& st,
        kpt::CommandResult (*fn)(const kpt::ExperimentConfig&,
                                 const kpt::RunOptions&)) {
  kpt::ExperimentConfig cfg = kpt::load_config(st.config_path, st.overrides);
  if (st.seed) cfg.seed = *st.seed;
  st.opt.workers = kpt::resolve_workers(st.workers, cfg);
  kpt::CommandResult r = fn(cfg, st.opt);
  if (st.out.empty())
    std::cout << r.report.dump(2) << '\n';
  else
    kpt::write_report(r.report, st.out);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Student-Teacher interpolation game laboratory"};
  app.require_subcommand(1);

  CliState st;

  CLI::App* check = app.add_subcommand(
      "check-pair", "exhaustively audit the configured pair");
  add_common(check, st);

  CLI::App* validity = app.add_subcommand(
      "validity", "prove or refute the induction disjunction by brute force");
  add_common(validity, st);
  validity->add_option("--drop", st.opt.drop,
                       "delete this disjunct first (corruption probe)");
  validity->add_option("--dimacs-dir", st.opt.dimacs_dir,
                       "export per-disjunct DIMACS files here");

  CLI::App* play = app.add_subcommand(
      "play", "run Student vs Teacher games over sampled assignments");
  add_common(play, st);
  play->add_flag("--emit-witnesses", st.opt.emit_witnesses,
                 "include witnesses in transcripts");

  CLI::App* claim2 = app.add_subcommand(
      "claim2", "answer frequency table over the hybrid rows, plus gap scan");
  add_common(claim2, st);
  claim2->add_flag("--exact", st.opt.exact,
                   "enumerate the side-list product instead of sampling");

  CLI::App* reduce = app.add_subcommand(
      "reduce", "turn the configured strategy into a distinguisher and "
                "measure its advantage");
  add_common(reduce, st);
  reduce->add_flag("--emit-witnesses", st.opt.emit_witnesses,
                   "include stored witnesses in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run(st, kpt::cmd_check_pair);
    if (validity->parsed()) return run(st, kpt::cmd_validity);
    if (play->parsed()) return run(st, kpt::cmd_play);
    if (claim2->parsed()) return run(st, kpt::cmd_claim2);
    return run(st, kpt::cmd_reduce);
  } catch (const kpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
