#include "kpt/circuit.hpp"

#include <stdexcept>
#include <unordered_map>

namespace kpt {

void Circuit::eval_nodes(uint32_t x_bits, uint32_t w_bits,
                         std::vector<uint8_t>& values) const {
  values.resize(static_cast<size_t>(num_nodes()));
  for (int i = 0; i < num_x; ++i) values[i] = (x_bits >> i) & 1u;
  for (int i = 0; i < num_w; ++i) values[num_x + i] = (w_bits >> i) & 1u;
  const int base = num_inputs();
  for (size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    const uint8_t a = values[gate.a];
    switch (gate.op) {
      case GateOp::And:
        values[base + g] = a & values[gate.b];
        break;
      case GateOp::Or:
        values[base + g] = a | values[gate.b];
        break;
      case GateOp::Not:
        values[base + g] = a ^ 1u;
        break;
    }
  }
}

bool Circuit::eval(uint32_t x_bits, uint32_t w_bits) const {
  std::vector<uint8_t> values;
  eval_nodes(x_bits, w_bits, values);
  return values[output] != 0;
}

namespace {

// Gate-level builder with constant folding. Values are node refs or the
// constant sentinels; folding keeps constants out of the gate list, so the
// multiplexer leaves (table bits) never materialize as nodes.
class Builder {
 public:
  static constexpr int32_t kFalse = -2;
  static constexpr int32_t kTrue = -3;

  explicit Builder(int num_x, int num_w) {
    c_.num_x = num_x;
    c_.num_w = num_w;
  }

  int32_t x(int i) const { return i; }
  int32_t w(int i) const { return c_.num_x + i; }

  int32_t mk_not(int32_t a) {
    if (a == kFalse) return kTrue;
    if (a == kTrue) return kFalse;
    auto it = not_memo_.find(a);
    if (it != not_memo_.end()) return it->second;
    const int32_t node = add(GateOp::Not, a, -1);
    not_memo_.emplace(a, node);
    return node;
  }

  int32_t mk_and(int32_t a, int32_t b) {
    if (a == kFalse || b == kFalse) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue) return a;
    if (a == b) return a;
    return add(GateOp::And, a, b);
  }

  int32_t mk_or(int32_t a, int32_t b) {
    if (a == kTrue || b == kTrue) return kTrue;
    if (a == kFalse) return b;
    if (b == kFalse) return a;
    if (a == b) return a;
    return add(GateOp::Or, a, b);
  }

  int32_t mk_xnor(int32_t a, int32_t b) {
    return mk_or(mk_and(a, b), mk_and(mk_not(a), mk_not(b)));
  }

  int32_t mk_mux(int32_t sel, int32_t hi, int32_t lo) {
    if (hi == lo) return hi;
    if (hi == kTrue && lo == kFalse) return sel;
    if (hi == kFalse && lo == kTrue) return mk_not(sel);
    return mk_or(mk_and(sel, hi), mk_and(mk_not(sel), lo));
  }

  Circuit finish(int32_t out) {
    if (out == kFalse || out == kTrue) {
      throw std::logic_error("verifier circuit folded to a constant");
    }
    c_.output = out;
    return std::move(c_);
  }

 private:
  int32_t add(GateOp op, int32_t a, int32_t b) {
    c_.gates.push_back({op, a, b});
    return c_.num_inputs() + static_cast<int32_t>(c_.gates.size()) - 1;
  }

  Circuit c_;
  std::unordered_map<int32_t, int32_t> not_memo_;
};

int32_t equality_block(Builder& b, int n) {
  int32_t acc = Builder::kTrue;
  for (int i = 0; i < n; ++i) acc = b.mk_and(acc, b.mk_xnor(b.x(i), b.w(i)));
  return acc;
}

// Selects bit `bit` of table[w] with a mux tree over the witness bits.
int32_t mux_table_bit(Builder& b, const std::vector<uint32_t>& table, int n,
                      int bit, int level, uint32_t prefix) {
  if (level == 0) {
    return ((table[prefix] >> bit) & 1u) ? Builder::kTrue : Builder::kFalse;
  }
  // Selector is the top remaining witness bit; prefix holds the bits above.
  const int sel_bit = level - 1;
  const int32_t lo =
      mux_table_bit(b, table, n, bit, level - 1, prefix);
  const int32_t hi =
      mux_table_bit(b, table, n, bit, level - 1,
                    prefix | (uint32_t{1} << sel_bit));
  return b.mk_mux(b.w(sel_bit), hi, lo);
}

Circuit table_verifier(const NpPairInstance& pair, Side side) {
  if (pair.n > 10) {
    throw std::invalid_argument(
        "table-backed verifier circuits limited to n <= 10");
  }
  const int n = pair.n;
  Builder b(n, n);
  int32_t match = Builder::kTrue;
  for (int bit = 0; bit < n; ++bit) {
    const int32_t img = mux_table_bit(b, *pair.table, n, bit, n, 0);
    match = b.mk_and(match, b.mk_xnor(img, b.x(bit)));
  }
  const int32_t hb = b.w(pair.hard_bit_index);
  const int32_t tag = side == Side::U ? hb : b.mk_not(hb);
  return b.finish(b.mk_and(match, tag));
}

Circuit easy_verifier(const NpPairInstance& pair, Side side, bool v_is_lsb0) {
  const int n = pair.n;
  Builder b(n, n);
  const int32_t eq = equality_block(b, n);
  int32_t tag;
  if (side == Side::U) {
    tag = b.x(n - 1);
  } else if (v_is_lsb0) {
    tag = b.mk_not(b.x(0));  // the overlap fixture's V reads the lsb
  } else {
    tag = b.mk_not(b.x(n - 1));
  }
  return b.finish(b.mk_and(eq, tag));
}

}  // namespace

Circuit verifier_circuit(const NpPairInstance& pair, Side side) {
  switch (pair.kind) {
    case PairKind::perm_table:
      return table_verifier(pair, side);
    case PairKind::easy_msb:
      return easy_verifier(pair, side, false);
    case PairKind::overlap_fixture:
      return easy_verifier(pair, side, true);
  }
  throw std::logic_error("unknown pair kind");
}

}  // namespace kpt
