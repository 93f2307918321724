#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpt/disjunction.hpp"

namespace kpt {

// What the Student is told about the instance: sizes and a layout hash,
// never the witnesses. Strategies that want more must earn it from the
// x assignment and the counterexample history.
struct ProofToken {
  std::string pair_id;
  int n = 0;
  int m = 0;
  uint64_t fingerprint = 0;
};

ProofToken make_token(const NpPairInstance&, int m);

struct Counterexample {
  int disjunct = -1;
  DisjunctAssignment assignment;
};

struct StudentContext {
  int round = 1;  // 1-based
  const std::vector<BitString>& xs;
  const ProofToken& token;
  const std::vector<Counterexample>& history;
  Rng& rng;  // per-game stream; randomized strategies draw only from this
};

struct StudentAnswer {
  int index = -1;
  bool budget_exhausted = false;
};

// A k-round strategy. answer() must be a deterministic function of the
// context (including the rng stream state), and self-reports when its step
// budget runs out; the engine then scores the game as a loss.
struct StudentStrategy {
  std::string name;
  int k = 1;
  uint64_t step_budget = 10'000'000;
  std::function<StudentAnswer(const StudentContext&)> answer;
};

struct TeacherReply {
  enum class Kind { Accept, Refute, NoAnswer } kind = Kind::NoAnswer;
  Counterexample cx;
};

using Teacher = std::function<TeacherReply(int proposed)>;

// The sound adversary: accepts a proposal iff the disjunct holds under
// every witness assignment, which reduces to witness (non-)existence at
// the positions the disjunct reads. Falsifying witnesses come from
// find_witness scans, so ties resolve to the smallest; when both the z and
// the y slot of a middle disjunct can falsify, the z slot wins. Any fixed
// deterministic rule is an admissible adversary; this is the one shipped.
TeacherReply honest_teacher(const NpPairInstance&, int m,
                            const std::vector<BitString>& xs, int proposed);

// A position known to the teacher in advance: the element sitting at that
// x slot together with a verifying witness.
struct FixedPosition {
  BitString element;
  Witness witness;
  Side side = Side::U;
};

struct AdviceMap {
  std::map<int, FixedPosition> positions;  // 1-based x positions
};

// Answers only from stored witnesses: a proposal is refuted iff some stored
// witness falsifies it, otherwise the teacher has no answer. Never inspects
// the actual x assignment; callers keep it honest by fixing those positions.
TeacherReply advice_teacher(const AdviceMap&, int m, int proposed);

struct RoundOutcome {
  int proposed = -1;
  TeacherReply::Kind reply = TeacherReply::Kind::NoAnswer;
  std::optional<Counterexample> cx;
};

struct Transcript {
  uint64_t game_seed = 0;
  std::vector<BitString> xs;
  std::vector<RoundOutcome> rounds;
  bool student_wins = false;
  bool budget_exhausted = false;
};

// Plays up to strategy.k rounds. Acceptance (or a teacher with no answer)
// ends the game in the Student's favor; running out of rounds or of step
// budget loses it.
Transcript run_game(const StudentStrategy&, const Teacher&, const ProofToken&,
                    const std::vector<BitString>& xs, uint64_t game_seed);

nlohmann::ordered_json transcript_json(const Transcript&, int n,
                                       int witness_len);

}  // namespace kpt
