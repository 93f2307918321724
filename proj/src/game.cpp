#include "kpt/game.hpp"

#include <stdexcept>

namespace kpt {

ProofToken make_token(const NpPairInstance& pair, int m) {
  ProofToken t;
  t.pair_id = pair.pair_id;
  t.n = pair.n;
  t.m = m;
  t.fingerprint = layout_fingerprint(pair.pair_id, pair.n, m, pair.witness_len);
  return t;
}

TeacherReply honest_teacher(const NpPairInstance& pair, int m,
                            const std::vector<BitString>& xs, int proposed) {
  if (static_cast<int>(xs.size()) != m) {
    throw std::invalid_argument("x assignment must have m entries");
  }
  if (proposed < 0 || proposed > m) {
    throw std::invalid_argument("proposed disjunct out of range");
  }
  const int wl = pair.witness_len;
  const Witness zero = BitString::make(0, wl);

  auto refute = [&](int disjunct, std::optional<Witness> z,
                    std::optional<Witness> y) {
    TeacherReply r;
    r.kind = TeacherReply::Kind::Refute;
    r.cx.disjunct = disjunct;
    r.cx.assignment.z = z.value_or(zero);
    r.cx.assignment.y = y.value_or(zero);
    return r;
  };

  if (proposed == 0) {
    if (auto y = find_witness(pair, xs[0], Side::U)) {
      return refute(0, std::nullopt, y);
    }
  } else if (proposed == m) {
    if (auto z = find_witness(pair, xs[m - 1], Side::V)) {
      return refute(m, z, std::nullopt);
    }
  } else {
    if (auto z = find_witness(pair, xs[proposed - 1], Side::V)) {
      return refute(proposed, z, std::nullopt);
    }
    if (auto y = find_witness(pair, xs[proposed], Side::U)) {
      return refute(proposed, std::nullopt, y);
    }
  }
  TeacherReply r;
  r.kind = TeacherReply::Kind::Accept;
  return r;
}

TeacherReply advice_teacher(const AdviceMap& advice, int m, int proposed) {
  if (proposed < 0 || proposed > m) {
    throw std::invalid_argument("proposed disjunct out of range");
  }
  const auto stored = [&](int pos, Side side) -> const FixedPosition* {
    auto it = advice.positions.find(pos);
    if (it == advice.positions.end() || it->second.side != side) {
      return nullptr;
    }
    return &it->second;
  };

  TeacherReply r;
  const int wl_guess = [&] {
    // Witness width for the zero filler; any stored entry carries it.
    for (const auto& [pos, fp] : advice.positions) {
      (void)pos;
      return static_cast<int>(fp.witness.len);
    }
    return 0;
  }();
  const Witness zero = BitString::make(0, wl_guess);

  auto refute = [&](int disjunct, const FixedPosition* z_src,
                    const FixedPosition* y_src) {
    r.kind = TeacherReply::Kind::Refute;
    r.cx.disjunct = disjunct;
    r.cx.assignment.z = z_src ? z_src->witness : zero;
    r.cx.assignment.y = y_src ? y_src->witness : zero;
    return r;
  };

  if (proposed == 0) {
    if (const auto* u = stored(1, Side::U)) return refute(0, nullptr, u);
  } else if (proposed == m) {
    if (const auto* v = stored(m, Side::V)) return refute(m, v, nullptr);
  } else {
    if (const auto* v = stored(proposed, Side::V)) {
      return refute(proposed, v, nullptr);
    }
    if (const auto* u = stored(proposed + 1, Side::U)) {
      return refute(proposed, nullptr, u);
    }
  }
  r.kind = TeacherReply::Kind::NoAnswer;
  return r;
}

Transcript run_game(const StudentStrategy& student, const Teacher& teacher,
                    const ProofToken& token, const std::vector<BitString>& xs,
                    uint64_t game_seed) {
  Transcript t;
  t.game_seed = game_seed;
  t.xs = xs;
  Rng rng(game_seed);
  std::vector<Counterexample> history;

  for (int round = 1; round <= student.k; ++round) {
    const StudentAnswer ans =
        student.answer({round, xs, token, history, rng});
    if (ans.budget_exhausted) {
      t.budget_exhausted = true;
      t.student_wins = false;
      return t;
    }
    const TeacherReply reply = teacher(ans.index);
    RoundOutcome outcome;
    outcome.proposed = ans.index;
    outcome.reply = reply.kind;
    if (reply.kind == TeacherReply::Kind::Refute) outcome.cx = reply.cx;
    t.rounds.push_back(outcome);
    if (reply.kind != TeacherReply::Kind::Refute) {
      // Accept, or an advice teacher out of answers: Student stands.
      t.student_wins = true;
      return t;
    }
    history.push_back(reply.cx);
  }
  t.student_wins = false;
  return t;
}

nlohmann::ordered_json transcript_json(const Transcript& t, int /*n*/,
                                       int /*witness_len*/) {
  nlohmann::ordered_json j;
  j["seed"] = t.game_seed;
  auto xs = nlohmann::ordered_json::array();
  for (const auto& x : t.xs) xs.push_back(x.hex());
  j["x"] = std::move(xs);
  auto rounds = nlohmann::ordered_json::array();
  for (const auto& r : t.rounds) {
    nlohmann::ordered_json jr;
    jr["proposed"] = r.proposed;
    switch (r.reply) {
      case TeacherReply::Kind::Accept:
        jr["reply"] = "accept";
        break;
      case TeacherReply::Kind::Refute:
        jr["reply"] = "refute";
        break;
      case TeacherReply::Kind::NoAnswer:
        jr["reply"] = "no-answer";
        break;
    }
    if (r.cx) {
      jr["cx"] = {{"disjunct", r.cx->disjunct},
                  {"z", r.cx->assignment.z.hex()},
                  {"y", r.cx->assignment.y.hex()}};
    }
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);
  j["verdict"] = t.student_wins ? "student-wins" : "student-loses";
  if (t.budget_exhausted) j["budget_exhausted"] = true;
  return j;
}

}  // namespace kpt
