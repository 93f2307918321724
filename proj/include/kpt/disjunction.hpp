#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kpt/cnf.hpp"

namespace kpt {

// Witness assignment for one disjunct. Disjunct 0 reads only y (= y_1),
// disjunct m only z (= z_m), the middle disjuncts read z_i and y_{i+1}.
struct DisjunctAssignment {
  Witness z;
  Witness y;
};

// One verifier compiled into the instance: the circuit plus the global
// variable ids its inputs are wired to. aux_base is the first auxiliary id;
// gate g's auxiliary is aux_base + g.
struct SubCircuit {
  Circuit circuit;
  int position = 0;  // which x_i it reads, 1-based
  char wz = '-';     // which witness tuple kind it consumes
  int tuple = 0;     // witness tuple index
  std::vector<int> x_ids;
  std::vector<int> w_ids;
  int aux_base = 0;
};

struct DisjunctBlock {
  int index = 0;
  CnfFormula cnf;  // clauses over the instance-global variable space
  std::optional<SubCircuit> v_part;  // encodes "z_i is no V-witness of x_i"
  std::optional<SubCircuit> u_part;  // encodes "y_j is no U-witness of x_j"
};

// The m+1 disjunct blocks of the induction chain over a pair: block 0 says
// x_1 has no U-witness, block i in 1..m-1 says the chain breaks nowhere at
// step i, block m says x_m has no V-witness. Apart from the x blocks, which
// adjacent disjuncts share by design, the blocks are variable-disjoint.
struct DisjunctionInstance {
  int m = 0;
  int n = 0;
  int witness_len = 0;
  std::string pair_id;
  int num_vars = 0;
  std::vector<std::vector<int>> x_ids;  // [pos-1] -> the n ids of x_pos
  std::vector<DisjunctBlock> disjuncts;
  std::vector<VarRole> var_map;  // indexed by global variable id

  uint64_t fingerprint() const;
};

// Stable layout hash; computable without building circuits, and equal to
// DisjunctionInstance::fingerprint() of the built instance.
uint64_t layout_fingerprint(const std::string& pair_id, int n, int m,
                            int witness_len);

DisjunctionInstance build_disjunction(const NpPairInstance&, int m);

// Truth value of one disjunct under the canonical (gate-valued) completion
// of its auxiliary variables.
bool eval_disjunct(const DisjunctionInstance&, int index,
                   const std::vector<BitString>& xs,
                   const DisjunctAssignment&);

// Same value read off the block's CNF: completes auxiliaries canonically
// and checks every clause. Agrees with eval_disjunct by construction; kept
// callable so tests can cross-check the two routes.
bool block_cnf_satisfied(const DisjunctionInstance&, int index,
                         const std::vector<BitString>& xs,
                         const DisjunctAssignment&);

struct ValidityCounterexample {
  std::vector<BitString> xs;
  // One falsifying assignment per stored block, in block order.
  std::vector<DisjunctAssignment> assignments;
};

struct ValidityResult {
  bool valid = false;
  std::optional<ValidityCounterexample> counterexample;
  long x_assignments_scanned = 0;
};

// Exhaustive tautology check. Because the blocks' witness tuples are
// disjoint, the disjunction is falsifiable iff some x assignment makes
// every block independently falsifiable, so the scan is over x assignments
// with per-block witness searches, all through the encoded blocks.
// Refuses instances with n*m > 24. The scan over the top x block is
// parallelizable; the lexicographically first counterexample wins.
ValidityResult check_validity(const DisjunctionInstance&, int workers = 1);

// Removes one disjunct; used to manufacture non-valid fixtures.
void drop_disjunct(DisjunctionInstance&, int index);

struct DimacsExport {
  std::vector<std::string> files;  // one per disjunct, in block order
  std::string manifest;            // json manifest path
};

// One DIMACS file per disjunct plus a manifest naming the files and the
// shared x-variable layout. Variable ids are the instance-global ids
// (1-based in the files); role comment lines make the import lossless.
DimacsExport export_dimacs(const DisjunctionInstance&,
                           const std::filesystem::path& dir);

}  // namespace kpt
