#pragma once

#include <cstdint>
#include <vector>

#include "kpt/np_pair.hpp"

namespace kpt {

enum class GateOp : uint8_t { And, Or, Not };

// Node references: 0..num_inputs-1 are inputs (x block first, then the
// witness block), num_inputs+g is gate g. Gates are stored in topological
// order by construction.
struct Gate {
  GateOp op;
  int32_t a = -1;
  int32_t b = -1;  // unused for Not
};

struct Circuit {
  int num_x = 0;
  int num_w = 0;
  std::vector<Gate> gates;
  int32_t output = -1;

  int num_inputs() const { return num_x + num_w; }
  int num_nodes() const {
    return num_inputs() + static_cast<int>(gates.size());
  }

  // Bottom-up evaluation; the gate values are exactly the canonical
  // completion the CNF translation's auxiliary variables take.
  void eval_nodes(uint32_t x_bits, uint32_t w_bits,
                  std::vector<uint8_t>& values) const;
  bool eval(uint32_t x_bits, uint32_t w_bits) const;
};

// Builds the side's verifier as a circuit over (x, witness). Table-backed
// pairs compile the permutation through a multiplexer tree over the seed
// bits and are refused above n = 10; formulaic pairs stay linear-size.
Circuit verifier_circuit(const NpPairInstance&, Side);

}  // namespace kpt
