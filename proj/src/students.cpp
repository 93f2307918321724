#include "kpt/students.hpp"

#include <memory>
#include <stdexcept>

namespace kpt {

int boundary_answer(const std::vector<BitString>& xs,
                    const std::function<bool(const BitString&)>& in_u) {
  int lead = 0;
  while (lead < static_cast<int>(xs.size()) && in_u(xs[lead])) ++lead;
  return lead;
}

namespace {

// Brute-force membership with honest step accounting: each query scans the
// whole witness space, so it is charged 2^witness_len steps against the
// per-answer budget. Exceeding the budget poisons the answer.
struct ChargedOracle {
  const NpPairInstance& pair;
  uint64_t budget;
  uint64_t used = 0;
  bool exhausted = false;

  bool in_u(const BitString& x) {
    used += uint64_t{1} << pair.witness_len;
    if (used > budget) {
      exhausted = true;
      return false;
    }
    return find_witness(pair, x, Side::U).has_value();
  }
};

StudentAnswer charged_boundary(const NpPairInstance& pair,
                               const StudentContext& ctx, uint64_t budget) {
  ChargedOracle oracle{pair, budget};
  int idx = boundary_answer(ctx.xs,
                            [&](const BitString& x) { return oracle.in_u(x); });
  if (oracle.exhausted) return {0, true};
  return {idx, false};
}

void require_index(int index) {
  if (index < 0) throw std::invalid_argument("disjunct index is negative");
}

}  // namespace

StudentStrategy omniscient_student(const NpPairInstance& pair) {
  StudentStrategy s;
  s.name = "omniscient";
  s.k = 1;
  NpPairInstance copy = pair;
  s.answer = [copy, budget = s.step_budget](const StudentContext& ctx) {
    return charged_boundary(copy, ctx, budget);
  };
  return s;
}

StudentStrategy two_round_student(const NpPairInstance& pair, int probe) {
  require_index(probe);
  StudentStrategy s;
  s.name = "two_round(" + std::to_string(probe) + ")";
  s.k = 2;
  NpPairInstance copy = pair;
  s.answer = [copy, probe,
              budget = s.step_budget](const StudentContext& ctx) -> StudentAnswer {
    if (ctx.round == 1) return {probe, false};
    return charged_boundary(copy, ctx, budget);
  };
  return s;
}

StudentStrategy constant_student(int index, int k) {
  require_index(index);
  StudentStrategy s;
  s.name = "constant(" + std::to_string(index) + ")";
  s.k = k;
  s.answer = [index](const StudentContext&) { return StudentAnswer{index, false}; };
  return s;
}

StudentStrategy random_student(int k) {
  StudentStrategy s;
  s.name = "random";
  s.k = k;
  s.answer = [](const StudentContext& ctx) {
    return StudentAnswer{static_cast<int>(ctx.rng.below(ctx.token.m + 1)), false};
  };
  return s;
}

StudentStrategy msb_student(int k) {
  StudentStrategy s;
  s.name = "msb";
  s.k = k;
  s.answer = [](const StudentContext& ctx) {
    int idx = boundary_answer(ctx.xs, [](const BitString& x) { return x.msb(); });
    return StudentAnswer{idx, false};
  };
  return s;
}

StudentStrategy parity_student(const NpPairInstance& pair, int k) {
  StudentStrategy s;
  s.name = "parity";
  s.k = k;
  NpPairInstance copy = pair;
  s.answer = [copy,
              budget = s.step_budget](const StudentContext& ctx) -> StudentAnswer {
    if (ctx.xs.front().parity()) return {0, false};
    return charged_boundary(copy, ctx, budget);
  };
  return s;
}

}  // namespace kpt
