#include "kpt/cnf.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kpt {

namespace {

const char* kind_tag(VarKind k) {
  switch (k) {
    case VarKind::XBit:
      return "x";
    case VarKind::WitnessBit:
      return "w";
    case VarKind::Aux:
      return "aux";
  }
  return "?";
}

VarKind tag_kind(const std::string& s) {
  if (s == "x") return VarKind::XBit;
  if (s == "w") return VarKind::WitnessBit;
  if (s == "aux") return VarKind::Aux;
  throw std::runtime_error("unknown variable role tag: " + s);
}

}  // namespace

std::vector<Clause> tseitin_into(const Circuit& c, Polarity polarity,
                                 const std::vector<int>& x_ids,
                                 const std::vector<int>& w_ids, int& next_var,
                                 std::map<int, VarRole>& roles,
                                 int aux_tuple) {
  if (static_cast<int>(x_ids.size()) != c.num_x ||
      static_cast<int>(w_ids.size()) != c.num_w) {
    throw std::invalid_argument("input id map does not match circuit arity");
  }
  const int base = c.num_inputs();
  std::vector<int> gate_var(c.gates.size());
  for (size_t g = 0; g < c.gates.size(); ++g) {
    gate_var[g] = next_var++;
    roles.emplace(gate_var[g],
                  VarRole{VarKind::Aux, static_cast<int16_t>(aux_tuple),
                          static_cast<int16_t>(g), '-'});
  }
  auto node_lit = [&](int32_t node) -> Lit {
    if (node < c.num_x) return mk_lit(x_ids[node], true);
    if (node < base) return mk_lit(w_ids[node - c.num_x], true);
    return mk_lit(gate_var[node - base], true);
  };

  std::vector<Clause> out;
  out.reserve(3 * c.gates.size() + 1);
  for (size_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    const Lit gv = mk_lit(gate_var[g], true);
    const Lit a = node_lit(gate.a);
    switch (gate.op) {
      case GateOp::And: {
        const Lit b = node_lit(gate.b);
        out.push_back(clause2(-gv, a));
        out.push_back(clause2(-gv, b));
        out.push_back(clause3(gv, -a, -b));
        break;
      }
      case GateOp::Or: {
        const Lit b = node_lit(gate.b);
        out.push_back(clause2(gv, -a));
        out.push_back(clause2(gv, -b));
        out.push_back(clause3(-gv, a, b));
        break;
      }
      case GateOp::Not:
        out.push_back(clause2(gv, a));
        out.push_back(clause2(-gv, -a));
        break;
    }
  }
  const Lit out_lit = node_lit(c.output);
  out.push_back(clause1(polarity == Polarity::AsIs ? out_lit : -out_lit));
  return out;
}

CnfFormula tseitin(const Circuit& c, Polarity polarity) {
  CnfFormula f;
  std::vector<int> x_ids(c.num_x), w_ids(c.num_w);
  for (int i = 0; i < c.num_x; ++i) {
    x_ids[i] = i;
    f.var_roles.emplace(i, VarRole{VarKind::XBit, 0,
                                   static_cast<int16_t>(i), '-'});
  }
  for (int i = 0; i < c.num_w; ++i) {
    w_ids[i] = c.num_x + i;
    f.var_roles.emplace(c.num_x + i, VarRole{VarKind::WitnessBit, 0,
                                             static_cast<int16_t>(i), 'y'});
  }
  int next_var = c.num_inputs();
  f.clauses =
      tseitin_into(c, polarity, x_ids, w_ids, next_var, f.var_roles, 0);
  f.num_vars = next_var;
  return f;
}

void write_dimacs(const CnfFormula& f, const std::filesystem::path& file,
                  const std::vector<std::string>& header_comments) {
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + file.string());
  }
  for (const auto& line : header_comments) out << "c " << line << "\n";
  for (const auto& [var, role] : f.var_roles) {
    out << "c var " << var + 1 << ' ' << kind_tag(role.kind) << ' '
        << role.tuple << ' ' << role.bit << ' ' << role.wz << "\n";
  }
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << "\n";
  for (const Clause& cl : f.clauses) {
    for (int i = 0; i < cl.size; ++i) out << cl.lit[i] << ' ';
    out << "0\n";
  }
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

CnfFormula read_dimacs(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  CnfFormula f;
  long expected_clauses = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      std::istringstream is(line);
      std::string c, tag;
      is >> c >> tag;
      if (tag == "var") {
        long var1;
        std::string kind;
        int tuple, bit;
        char wz;
        if (is >> var1 >> kind >> tuple >> bit >> wz) {
          f.var_roles.emplace(
              static_cast<int>(var1 - 1),
              VarRole{tag_kind(kind), static_cast<int16_t>(tuple),
                      static_cast<int16_t>(bit), wz});
        }
      }
      continue;
    }
    if (line[0] == 'p') {
      std::istringstream is(line);
      std::string p, cnf;
      is >> p >> cnf >> f.num_vars >> expected_clauses;
      continue;
    }
    std::istringstream is(line);
    Clause cl;
    Lit l;
    while (is >> l) {
      if (l == 0) break;
      if (cl.size >= 3) throw std::runtime_error("clause wider than 3");
      cl.lit[cl.size++] = l;
    }
    if (cl.size > 0) f.clauses.push_back(cl);
  }
  if (expected_clauses >= 0 &&
      expected_clauses != static_cast<long>(f.clauses.size())) {
    throw std::runtime_error("clause count mismatch in " + file.string());
  }
  return f;
}

}  // namespace kpt
