#pragma once

#include "kpt/config.hpp"
#include "kpt/reduction.hpp"

namespace kpt {

struct RunOptions {
  int workers = 1;
  bool emit_witnesses = false;  // include stored witnesses in reports
  bool timings = false;         // adds wall-clock section; reports stop being
                                // reproducible byte for byte
  bool exact = false;           // claim2: enumerate instead of sampling
  int drop = -1;                // validity: delete this disjunct first
  std::string dimacs_dir;      // validity: export clause files here
};

// Precedence: explicit flag, then KPTLAB_WORKERS, then the config key.
int resolve_workers(int flag_value, const ExperimentConfig&);

NpPairInstance pair_from_config(const ExperimentConfig&);
StudentStrategy student_from_config(const ExperimentConfig&,
                                    const NpPairInstance&);

struct CommandResult {
  nlohmann::ordered_json report;
  int exit_code = 0;
};

// Exit codes: 0 fine, 1 a checked property failed, 2 the reduction gave up
// in the advice search, 3 bad configuration.
CommandResult cmd_check_pair(const ExperimentConfig&, const RunOptions&);
CommandResult cmd_validity(const ExperimentConfig&, const RunOptions&);
CommandResult cmd_play(const ExperimentConfig&, const RunOptions&);
CommandResult cmd_claim2(const ExperimentConfig&, const RunOptions&);
CommandResult cmd_reduce(const ExperimentConfig&, const RunOptions&);

// Writes to a temp sibling, then renames over the target, so readers never
// see a torn report.
void write_report(const nlohmann::ordered_json&, const std::string& path);

}  // namespace kpt
