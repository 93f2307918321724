#include "kpt/disjunction.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "kpt/parallel.hpp"

namespace kpt {

uint64_t layout_fingerprint(const std::string& pair_id, int n, int m,
                            int witness_len) {
  uint64_t h = fnv1a(pair_id);
  h = fnv1a_u64(static_cast<uint64_t>(n), h);
  h = fnv1a_u64(static_cast<uint64_t>(m), h);
  h = fnv1a_u64(static_cast<uint64_t>(witness_len), h);
  return h;
}

uint64_t DisjunctionInstance::fingerprint() const {
  return layout_fingerprint(pair_id, n, m, witness_len);
}

namespace {

std::vector<int> alloc_vars(int& next_var, int count) {
  std::vector<int> ids(count);
  for (int i = 0; i < count; ++i) ids[i] = next_var++;
  return ids;
}

}  // namespace

DisjunctionInstance build_disjunction(const NpPairInstance& pair, int m) {
  if (m < 2) throw std::invalid_argument("chain length m must be >= 2");

  DisjunctionInstance inst;
  inst.m = m;
  inst.n = pair.n;
  inst.witness_len = pair.witness_len;
  inst.pair_id = pair.pair_id;

  const Circuit u_circ = verifier_circuit(pair, Side::U);
  const Circuit v_circ = verifier_circuit(pair, Side::V);

  std::map<int, VarRole> roles;
  int next_var = 0;

  inst.x_ids.resize(m);
  for (int pos = 1; pos <= m; ++pos) {
    inst.x_ids[pos - 1] = alloc_vars(next_var, pair.n);
    for (int b = 0; b < pair.n; ++b) {
      roles.emplace(inst.x_ids[pos - 1][b],
                    VarRole{VarKind::XBit, static_cast<int16_t>(pos),
                            static_cast<int16_t>(b), '-'});
    }
  }

  auto add_part = [&](DisjunctBlock& block, const Circuit& circ, int position,
                      char wz, int tuple) {
    SubCircuit part;
    part.circuit = circ;
    part.position = position;
    part.wz = wz;
    part.tuple = tuple;
    part.x_ids = inst.x_ids[position - 1];
    part.w_ids = alloc_vars(next_var, pair.witness_len);
    for (int b = 0; b < pair.witness_len; ++b) {
      roles.emplace(part.w_ids[b],
                    VarRole{VarKind::WitnessBit, static_cast<int16_t>(tuple),
                            static_cast<int16_t>(b), wz});
    }
    part.aux_base = next_var;
    auto clauses = tseitin_into(circ, Polarity::Negated, part.x_ids,
                                part.w_ids, next_var, roles, block.index);
    block.cnf.clauses.insert(block.cnf.clauses.end(), clauses.begin(),
                             clauses.end());
    return part;
  };

  inst.disjuncts.resize(static_cast<size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    DisjunctBlock& block = inst.disjuncts[i];
    block.index = i;
    if (i >= 1) block.v_part = add_part(block, v_circ, i, 'z', i);
    if (i <= m - 1) block.u_part = add_part(block, u_circ, i + 1, 'y', i + 1);
  }

  inst.num_vars = next_var;
  for (auto& block : inst.disjuncts) block.cnf.num_vars = next_var;
  inst.var_map.resize(static_cast<size_t>(next_var));
  for (const auto& [var, role] : roles) inst.var_map[var] = role;
  return inst;
}

bool eval_disjunct(const DisjunctionInstance& inst, int index,
                   const std::vector<BitString>& xs,
                   const DisjunctAssignment& assign) {
  const DisjunctBlock* block = nullptr;
  for (const auto& b : inst.disjuncts) {
    if (b.index == index) block = &b;
  }
  if (block == nullptr) throw std::invalid_argument("no such disjunct");
  if (static_cast<int>(xs.size()) != inst.m) {
    throw std::invalid_argument("x assignment must have m entries");
  }
  bool value = true;
  if (block->v_part) {
    const auto& p = *block->v_part;
    value = value &&
            !p.circuit.eval(xs[p.position - 1].value(), assign.z.value());
  }
  if (block->u_part) {
    const auto& p = *block->u_part;
    value = value &&
            !p.circuit.eval(xs[p.position - 1].value(), assign.y.value());
  }
  return value;
}

bool block_cnf_satisfied(const DisjunctionInstance& inst, int index,
                         const std::vector<BitString>& xs,
                         const DisjunctAssignment& assign) {
  const DisjunctBlock* block = nullptr;
  for (const auto& b : inst.disjuncts) {
    if (b.index == index) block = &b;
  }
  if (block == nullptr) throw std::invalid_argument("no such disjunct");

  // Assemble the block's variable values: inputs from the assignment, every
  // auxiliary from its gate value.
  std::vector<uint8_t> value(static_cast<size_t>(inst.num_vars), 0);
  for (int pos = 1; pos <= inst.m; ++pos) {
    for (int b = 0; b < inst.n; ++b) {
      value[inst.x_ids[pos - 1][b]] = xs[pos - 1].bit(b);
    }
  }
  std::vector<uint8_t> nodes;
  auto fill_part = [&](const SubCircuit& p, const Witness& w) {
    for (int b = 0; b < inst.witness_len; ++b) value[p.w_ids[b]] = w.bit(b);
    p.circuit.eval_nodes(xs[p.position - 1].value(), w.value(), nodes);
    const int base = p.circuit.num_inputs();
    for (size_t g = 0; g < p.circuit.gates.size(); ++g) {
      value[p.aux_base + static_cast<int>(g)] = nodes[base + g];
    }
  };
  if (block->v_part) fill_part(*block->v_part, assign.z);
  if (block->u_part) fill_part(*block->u_part, assign.y);

  for (const Clause& cl : block->cnf.clauses) {
    bool sat = false;
    for (int i = 0; i < cl.size; ++i) {
      const Lit l = cl.lit[i];
      if ((value[lit_var(l)] != 0) == lit_sign(l)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

namespace {

// Smallest witness making the circuit accept (x, w), through the encoded
// circuit itself. nullopt when the circuit rejects every witness.
std::optional<uint32_t> first_accepting(const Circuit& c, uint32_t x,
                                        int witness_len) {
  const uint32_t space = uint32_t{1} << witness_len;
  for (uint32_t w = 0; w < space; ++w) {
    if (c.eval(x, w)) return w;
  }
  return std::nullopt;
}

struct FalsifierTables {
  // Indexed by x value: smallest accepted witness per side, or -1.
  std::vector<int64_t> u_first, v_first;
};

// A middle block fails under (z, y) iff z V-witnesses x_a or y U-witnesses
// x_b. The z-major lexicographically smallest falsifier therefore is
// (0,0) if V accepts (x_a, 0); else (0, u_first) if x_b has a U-witness;
// else (v_first, 0) if x_a has a V-witness; else none.
std::optional<DisjunctAssignment> middle_falsifier(const FalsifierTables& t,
                                                   uint32_t xa, uint32_t xb,
                                                   int wl) {
  const int64_t v0 = t.v_first[xa];
  const int64_t u0 = t.u_first[xb];
  if (v0 == 0) return DisjunctAssignment{BitString::make(0, wl),
                                         BitString::make(0, wl)};
  if (u0 >= 0)
    return DisjunctAssignment{BitString::make(0, wl),
                              BitString::make(static_cast<uint32_t>(u0), wl)};
  if (v0 >= 0)
    return DisjunctAssignment{BitString::make(static_cast<uint32_t>(v0), wl),
                              BitString::make(0, wl)};
  return std::nullopt;
}

}  // namespace

ValidityResult check_validity(const DisjunctionInstance& inst, int workers) {
  const long space_bits = static_cast<long>(inst.n) * inst.m;
  if (space_bits > 24) {
    throw std::invalid_argument(
        "validity scan limited to instances with n*m <= 24");
  }
  if (inst.disjuncts.empty()) throw std::invalid_argument("empty instance");

  // Representative circuits; every block compiles the same two verifiers.
  const Circuit* u_circ = nullptr;
  const Circuit* v_circ = nullptr;
  for (const auto& b : inst.disjuncts) {
    if (b.u_part && !u_circ) u_circ = &b.u_part->circuit;
    if (b.v_part && !v_circ) v_circ = &b.v_part->circuit;
  }

  const uint32_t x_space = uint32_t{1} << inst.n;
  const int wl = inst.witness_len;
  FalsifierTables tables;
  tables.u_first.assign(x_space, -1);
  tables.v_first.assign(x_space, -1);
  for (uint32_t x = 0; x < x_space; ++x) {
    if (u_circ) {
      if (auto w = first_accepting(*u_circ, x, wl)) tables.u_first[x] = *w;
    }
    if (v_circ) {
      if (auto w = first_accepting(*v_circ, x, wl)) tables.v_first[x] = *w;
    }
  }

  // One slot per x_1 value; workers scan disjoint prefixes and the lowest
  // hit wins, which keeps the result independent of scheduling.
  const int m = inst.m;
  const uint64_t per_prefix = uint64_t{1} << (inst.n * (m - 1));
  std::vector<std::optional<ValidityCounterexample>> hits(x_space);

  parallel_for(static_cast<long>(x_space), workers, [&](long prefix) {
    const uint32_t x1 = static_cast<uint32_t>(prefix);
    std::vector<BitString> xs(static_cast<size_t>(m));
    xs[0] = BitString::make(x1, inst.n);
    for (uint64_t rest = 0; rest < per_prefix; ++rest) {
      // rest packs x_2..x_m with x_m in the low bits: enumeration order is
      // lexicographic on (x_1, ..., x_m).
      for (int pos = 2; pos <= m; ++pos) {
        const int shift = inst.n * (m - pos);
        xs[pos - 1] = BitString::make(
            static_cast<uint32_t>(rest >> shift) & (x_space - 1), inst.n);
      }
      std::vector<DisjunctAssignment> falsifiers;
      falsifiers.reserve(inst.disjuncts.size());
      bool all_falsifiable = true;
      for (const auto& block : inst.disjuncts) {
        std::optional<DisjunctAssignment> f;
        if (block.v_part && block.u_part) {
          f = middle_falsifier(tables, xs[block.v_part->position - 1].value(),
                               xs[block.u_part->position - 1].value(), wl);
        } else if (block.u_part) {
          const int64_t u0 = tables.u_first[xs[block.u_part->position - 1].value()];
          if (u0 >= 0) {
            f = DisjunctAssignment{BitString::make(0, wl),
                                   BitString::make(static_cast<uint32_t>(u0), wl)};
          }
        } else if (block.v_part) {
          const int64_t v0 = tables.v_first[xs[block.v_part->position - 1].value()];
          if (v0 >= 0) {
            f = DisjunctAssignment{BitString::make(static_cast<uint32_t>(v0), wl),
                                   BitString::make(0, wl)};
          }
        }
        if (!f) {
          all_falsifiable = false;
          break;
        }
        falsifiers.push_back(*f);
      }
      if (all_falsifiable) {
        hits[prefix] = ValidityCounterexample{xs, std::move(falsifiers)};
        return;
      }
    }
  });

  ValidityResult result;
  result.x_assignments_scanned = static_cast<long>(uint64_t{1} << space_bits);
  for (auto& h : hits) {
    if (h) {
      result.valid = false;
      result.counterexample = std::move(*h);
      return result;
    }
  }
  result.valid = true;
  return result;
}

void drop_disjunct(DisjunctionInstance& inst, int index) {
  for (auto it = inst.disjuncts.begin(); it != inst.disjuncts.end(); ++it) {
    if (it->index == index) {
      inst.disjuncts.erase(it);
      return;
    }
  }
  throw std::invalid_argument("no such disjunct to drop");
}

DimacsExport export_dimacs(const DisjunctionInstance& inst,
                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  DimacsExport out;
  nlohmann::ordered_json manifest;
  manifest["schema"] = "kptlab-dimacs/1";
  manifest["pair_id"] = inst.pair_id;
  manifest["n"] = inst.n;
  manifest["m"] = inst.m;
  manifest["num_vars"] = inst.num_vars;
  nlohmann::ordered_json shared;
  for (int pos = 1; pos <= inst.m; ++pos) {
    nlohmann::ordered_json ids = nlohmann::ordered_json::array();
    for (int id : inst.x_ids[pos - 1]) ids.push_back(id + 1);
    shared["x" + std::to_string(pos)] = std::move(ids);
  }
  manifest["shared_x_vars"] = std::move(shared);

  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& block : inst.disjuncts) {
    const std::string name = "disjunct_" + std::to_string(block.index) + ".cnf";
    const auto path = dir / name;

    CnfFormula f = block.cnf;
    std::set<int> used;
    for (const Clause& cl : f.clauses) {
      for (int i = 0; i < cl.size; ++i) used.insert(lit_var(cl.lit[i]));
    }
    for (int var : used) f.var_roles.emplace(var, inst.var_map[var]);

    std::vector<std::string> comments;
    comments.push_back("kptlab disjunct " + std::to_string(block.index) +
                       " of 0.." + std::to_string(inst.m) + " pair=" +
                       inst.pair_id + " n=" + std::to_string(inst.n) +
                       " m=" + std::to_string(inst.m));
    write_dimacs(f, path, comments);
    files.push_back(name);
    out.files.push_back(path.string());
  }
  manifest["files"] = std::move(files);

  const auto manifest_path = dir / "manifest.json";
  std::ofstream mf(manifest_path);
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("manifest write failed");
  out.manifest = manifest_path.string();
  return out;
}

}  // namespace kpt
