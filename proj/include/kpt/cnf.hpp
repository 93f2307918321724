#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kpt/circuit.hpp"

namespace kpt {

enum class VarKind : uint8_t { XBit, WitnessBit, Aux };

struct VarRole {
  VarKind kind = VarKind::Aux;
  int16_t tuple = 0;  // x: position; witness: tuple index of y_i / z_i
  int16_t bit = 0;    // bit index within the tuple, or gate index for aux
  char wz = '-';      // 'y' or 'z' for witness bits
  friend bool operator==(const VarRole&, const VarRole&) = default;
};

// DIMACS-style literal: +-(var+1) for 0-based variable ids.
using Lit = int32_t;

inline int lit_var(Lit l) { return (l > 0 ? l : -l) - 1; }
inline bool lit_sign(Lit l) { return l > 0; }
inline Lit mk_lit(int var, bool positive) {
  return positive ? var + 1 : -(var + 1);
}

struct Clause {
  std::array<Lit, 3> lit{0, 0, 0};
  uint8_t size = 0;
  friend bool operator==(const Clause&, const Clause&) = default;
};

inline Clause clause1(Lit a) { return {{a, 0, 0}, 1}; }
inline Clause clause2(Lit a, Lit b) { return {{a, b, 0}, 2}; }
inline Clause clause3(Lit a, Lit b, Lit c) { return {{a, b, c}, 3}; }

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;
  std::map<int, VarRole> var_roles;  // covers every variable in use
};

enum class Polarity { AsIs, Negated };

// Gate-by-gate translation: every gate gets an auxiliary variable and its
// defining clauses (3 for And/Or, 2 for Not), then one unit clause pins the
// output to the requested polarity. Given any input assignment the defining
// clauses admit exactly one auxiliary completion: the gate values.
CnfFormula tseitin(const Circuit&, Polarity polarity);

// Same translation, but writing into an existing variable space. x_ids and
// w_ids map circuit inputs to global variable ids; auxiliaries are
// allocated from next_var upwards and recorded in roles with the given
// tuple index. Returns the clause list over global ids.
std::vector<Clause> tseitin_into(const Circuit&, Polarity polarity,
                                 const std::vector<int>& x_ids,
                                 const std::vector<int>& w_ids, int& next_var,
                                 std::map<int, VarRole>& roles,
                                 int aux_tuple);

void write_dimacs(const CnfFormula&, const std::filesystem::path& file,
                  const std::vector<std::string>& header_comments = {});
CnfFormula read_dimacs(const std::filesystem::path& file);

}  // namespace kpt
