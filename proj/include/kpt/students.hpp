#pragma once

#include "kpt/game.hpp"

namespace kpt {

// Number of leading positions of xs that belong to U under the given
// membership test. This is the index of a valid disjunct whenever the pair
// covers {0,1}^n: 0 when x_1 is outside U, m when everything is inside.
int boundary_answer(const std::vector<BitString>& xs,
                    const std::function<bool(const BitString&)>& in_u);

// One round, brute-force membership: always names a valid disjunct.
StudentStrategy omniscient_student(const NpPairInstance&);

// Two rounds: a fixed probe first, the true boundary second.
StudentStrategy two_round_student(const NpPairInstance&, int probe);

StudentStrategy constant_student(int index, int k = 1);

// Uniform over 0..m each round, drawn from the per-game stream.
StudentStrategy random_student(int k = 1);

// Reads the boundary off the msb of each position; the correct oracle for
// the easy pair, a syntactic guess elsewhere.
StudentStrategy msb_student(int k = 1);

// Plays the boundary only when x_1 has even parity, else proposes 0. Its
// answer distribution depends on the concrete advice elements, which makes
// it the stock adversarial case for the advice search.
StudentStrategy parity_student(const NpPairInstance&, int k = 1);

}  // namespace kpt
