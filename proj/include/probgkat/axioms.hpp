#pragma once

// The equational and quasi-equational axiom schemas. instantiate_axiom turns
// an axiom id plus metavariable bindings into a concrete equation (and its
// premises, for the conditional rules), enforcing side conditions on exact
// rationals. Metavariable sorts are fixed by name: e f g h are expressions,
// b c are tests, r s are probabilities, v is an output.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "probgkat/semantics.hpp"
#include "probgkat/syntax.hpp"

namespace probgkat {

enum class AxiomId {
  G1, G2, G3, G4,
  D,
  P1, P2, P3, P4,
  S1, S2, S3, S4, S5, S6, S7, S8,
  L1, L2, L3, L4, L5, L6,
  F1, F2,
  DF1, DF2, DF3, DF4, DF5, DF6, DF7, DF8, DF9, DF10, DF11, DF12,
  BA,  // Boolean-algebra reasoning on tests (special-cased by the checker)
  UA,  // uniqueness of solutions (special-cased by the checker)
};

inline const std::vector<std::pair<AxiomId, const char*>>& axiom_name_table() {
  static const std::vector<std::pair<AxiomId, const char*>> table = {
      {AxiomId::G1, "G1"},   {AxiomId::G2, "G2"},   {AxiomId::G3, "G3"},
      {AxiomId::G4, "G4"},   {AxiomId::D, "D"},     {AxiomId::P1, "P1"},
      {AxiomId::P2, "P2"},   {AxiomId::P3, "P3"},   {AxiomId::P4, "P4"},
      {AxiomId::S1, "S1"},   {AxiomId::S2, "S2"},   {AxiomId::S3, "S3"},
      {AxiomId::S4, "S4"},   {AxiomId::S5, "S5"},   {AxiomId::S6, "S6"},
      {AxiomId::S7, "S7"},   {AxiomId::S8, "S8"},   {AxiomId::L1, "L1"},
      {AxiomId::L2, "L2"},   {AxiomId::L3, "L3"},   {AxiomId::L4, "L4"},
      {AxiomId::L5, "L5"},   {AxiomId::L6, "L6"},   {AxiomId::F1, "F1"},
      {AxiomId::F2, "F2"},   {AxiomId::DF1, "DF1"}, {AxiomId::DF2, "DF2"},
      {AxiomId::DF3, "DF3"}, {AxiomId::DF4, "DF4"}, {AxiomId::DF5, "DF5"},
      {AxiomId::DF6, "DF6"}, {AxiomId::DF7, "DF7"}, {AxiomId::DF8, "DF8"},
      {AxiomId::DF9, "DF9"}, {AxiomId::DF10, "DF10"},
      {AxiomId::DF11, "DF11"}, {AxiomId::DF12, "DF12"},
      {AxiomId::BA, "BA"},   {AxiomId::UA, "UA"},
  };
  return table;
}

inline std::string axiom_name(AxiomId id) {
  for (const auto& [i, n] : axiom_name_table())
    if (i == id) return n;
  return "?";
}

inline std::optional<AxiomId> axiom_from_name(const std::string& name) {
  for (const auto& [i, n] : axiom_name_table())
    if (name == n) return i;
  return std::nullopt;
}

// The schematic equations (everything except BA and UA).
inline std::vector<AxiomId> schematic_axioms() {
  std::vector<AxiomId> out;
  for (const auto& [i, n] : axiom_name_table()) {
    (void)n;
    if (i != AxiomId::BA && i != AxiomId::UA) out.push_back(i);
  }
  return out;
}

// The unconditional ones among them.
inline bool is_equational(AxiomId id) {
  return id != AxiomId::L5 && id != AxiomId::L6 && id != AxiomId::F1 &&
         id != AxiomId::F2 && id != AxiomId::BA && id != AxiomId::UA;
}

struct Bindings {
  std::map<std::string, ExprPtr> exprs;
  std::map<std::string, TestPtr> tests;
  std::map<std::string, Rat> rats;
  std::map<std::string, int> outputs;
};

struct AxiomInstance {
  ExprPtr lhs, rhs;
  // Equations that must be established before the conclusion may be used.
  std::vector<std::pair<ExprPtr, ExprPtr>> premises;
};

inline AxiomInstance instantiate_axiom(const Alphabet& alph, AxiomId id,
                                       const Bindings& bs,
                                       unsigned max_tests = kDefaultMaxTests) {
  std::set<std::string> used;
  auto fail = [&](const std::string& msg) -> AxiomInstance {
    throw std::invalid_argument(axiom_name(id) + ": " + msg);
  };
  auto ge = [&](const char* name) {
    used.insert(name);
    auto it = bs.exprs.find(name);
    if (it == bs.exprs.end())
      fail(std::string("missing expression binding '") + name + "'");
    return it->second;
  };
  auto gt = [&](const char* name) {
    used.insert(name);
    auto it = bs.tests.find(name);
    if (it == bs.tests.end())
      fail(std::string("missing test binding '") + name + "'");
    return it->second;
  };
  auto gr = [&](const char* name) {
    used.insert(name);
    auto it = bs.rats.find(name);
    if (it == bs.rats.end())
      fail(std::string("missing probability binding '") + name + "'");
    if (!is_probability(it->second))
      fail(std::string("binding '") + name + "' = " +
           rat_to_string(it->second) + " is not in [0,1]");
    return it->second;
  };
  auto gv = [&](const char* name) {
    used.insert(name);
    auto it = bs.outputs.find(name);
    if (it == bs.outputs.end())
      fail(std::string("missing output binding '") + name + "'");
    return it->second;
  };

  AxiomInstance inst;
  switch (id) {
    case AxiomId::G1: {
      ExprPtr e = ge("e");
      inst = {e_gch(e, gt("b"), e), e, {}};
      break;
    }
    case AxiomId::G2: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b");
      inst = {e_gch(e, b, f), e_gch(e_seq(e_test(b), e), b, f), {}};
      break;
    }
    case AxiomId::G3: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b");
      inst = {e_gch(e, b, f), e_gch(f, t_not(b), e), {}};
      break;
    }
    case AxiomId::G4: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_gch(e_gch(e, b, f), c, g),
              e_gch(e, t_and(b, c), e_gch(f, c, g)),
              {}};
      break;
    }
    case AxiomId::D: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b");
      Rat r = gr("r");
      inst = {e_pch(e, r, e_gch(f, b, g)),
              e_gch(e_pch(e, r, f), b, e_pch(e, r, g)),
              {}};
      break;
    }
    case AxiomId::P1: {
      ExprPtr e = ge("e");
      inst = {e_pch(e, gr("r"), e), e, {}};
      break;
    }
    case AxiomId::P2: {
      ExprPtr e = ge("e"), f = ge("f");
      inst = {e_pch(e, Rat(1), f), e, {}};
      break;
    }
    case AxiomId::P3: {
      ExprPtr e = ge("e"), f = ge("f");
      Rat r = gr("r");
      inst = {e_pch(e, r, f), e_pch(f, 1 - r, e), {}};
      break;
    }
    case AxiomId::P4: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      Rat r = gr("r"), s = gr("s");
      if (r * s == 1) fail("requires r*s != 1 (denominator would vanish)");
      inst = {e_pch(e_pch(e, r, f), s, g),
              e_pch(e, r * s, e_pch(f, (1 - r) * s / (1 - r * s), g)),
              {}};
      break;
    }
    case AxiomId::S1: {
      ExprPtr e = ge("e");
      inst = {e_seq(e_one(), e), e, {}};
      break;
    }
    case AxiomId::S2: {
      ExprPtr e = ge("e");
      inst = {e_seq(e, e_one()), e, {}};
      break;
    }
    case AxiomId::S3: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      inst = {e_seq(e_seq(e, f), g), e_seq(e, e_seq(f, g)), {}};
      break;
    }
    case AxiomId::S4: {
      ExprPtr e = ge("e");
      inst = {e_seq(e_zero(), e), e_zero(), {}};
      break;
    }
    case AxiomId::S5: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b");
      inst = {e_seq(e_gch(e, b, f), g),
              e_gch(e_seq(e, g), b, e_seq(f, g)),
              {}};
      break;
    }
    case AxiomId::S6: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      Rat r = gr("r");
      inst = {e_seq(e_pch(e, r, f), g),
              e_pch(e_seq(e, g), r, e_seq(f, g)),
              {}};
      break;
    }
    case AxiomId::S7: {
      ExprPtr e = ge("e");
      int v = gv("v");
      inst = {e_seq(e_ret(v), e), e_ret(v), {}};
      break;
    }
    case AxiomId::S8: {
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_seq(e_test(b), e_test(c)), e_test(t_and(b, c)), {}};
      break;
    }
    case AxiomId::L1: {
      ExprPtr e = ge("e");
      TestPtr b = gt("b");
      inst = {e_gloop(e, b), e_gch(e_seq(e, e_gloop(e, b)), b, e_one()), {}};
      break;
    }
    case AxiomId::L2: {
      ExprPtr e = ge("e");
      Rat r = gr("r");
      inst = {e_ploop(e, r), e_pch(e_seq(e, e_ploop(e, r)), r, e_one()), {}};
      break;
    }
    case AxiomId::L3: {
      ExprPtr e = ge("e");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_gloop(e_gch(e, c, e_one()), b),
              e_gloop(e_seq(e_test(c), e), b),
              {}};
      break;
    }
    case AxiomId::L4: {
      ExprPtr e = ge("e");
      inst = {e_gloop(e, t_one()), e_ploop(e, Rat(1)), {}};
      break;
    }
    case AxiomId::L5: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b"), c = gt("c");
      Rat s = gr("s");
      if (s == 0) fail("requires s > 0");
      ExprPtr loop = e_gloop(e, b);
      inst = {e_seq(e_test(c), loop),
              e_seq(e_test(c), e_gch(e_seq(f, loop), b, e_one())),
              {{e, e_gch(e_pch(f, s, e_one()), c, g)}}};
      break;
    }
    case AxiomId::L6: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr c = gt("c");
      Rat r = gr("r"), s = gr("s");
      Rat den = 1 - r * (1 - s);
      if (den == 0) fail("requires 1 - r*(1-s) != 0 (denominator would vanish)");
      ExprPtr loop = e_ploop(e, r);
      inst = {e_seq(e_test(c), loop),
              e_seq(e_test(c), e_pch(e_seq(f, loop), r * s / den, e_one())),
              {{e, e_gch(e_pch(f, s, e_one()), c, g)}}};
      break;
    }
    case AxiomId::F1: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b");
      if (!terminates_nowhere(alph, e, max_tests))
        fail("requires the loop body to have termination probability 0 at "
             "every atom");
      inst = {g,
              e_seq(e_gloop(e, b), f),
              {{g, e_gch(e_seq(e, g), b, f)}}};
      break;
    }
    case AxiomId::F2: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      Rat r = gr("r");
      if (!terminates_nowhere(alph, e, max_tests))
        fail("requires the loop body to have termination probability 0 at "
             "every atom");
      inst = {g,
              e_seq(e_ploop(e, r), f),
              {{g, e_pch(e_seq(e, g), r, f)}}};
      break;
    }
    case AxiomId::DF1: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_gch(e, b, e_gch(f, c, g)),
              e_gch(e_gch(e, b, f), t_or(b, c), g),
              {}};
      break;
    }
    case AxiomId::DF2: {
      ExprPtr e = ge("e");
      TestPtr b = gt("b");
      inst = {e_gch(e, b, e_zero()), e_seq(e_test(b), e), {}};
      break;
    }
    case AxiomId::DF3: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b");
      inst = {e_seq(e_test(b), e_gch(e, b, f)), e_seq(e_test(b), e), {}};
      break;
    }
    case AxiomId::DF4: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_gch(e_gch(e, b, f), c, g),
              e_gch(e_gch(e, t_and(b, c), f), c, g),
              {}};
      break;
    }
    case AxiomId::DF5: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g"), h = ge("h");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_gch(e_gch(e, b, f), c, e_gch(g, b, h)),
              e_gch(e_gch(e, c, g), b, e_gch(f, c, h)),
              {}};
      break;
    }
    case AxiomId::DF6: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_seq(e_test(b), e_gch(e, c, f)),
              e_gch(e_seq(e_test(b), e), c, e_seq(e_test(b), f)),
              {}};
      break;
    }
    case AxiomId::DF7: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b"), c = gt("c");
      inst = {e_seq(e_test(b), e_gch(e, c, f)),
              e_seq(e_test(b), e_gch(e_seq(e_test(b), e), c, f)),
              {}};
      break;
    }
    case AxiomId::DF8: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      TestPtr b = gt("b");
      Rat r = gr("r");
      inst = {e_pch(e_gch(e, b, f), r, g),
              e_gch(e_pch(e, r, g), b, e_pch(f, r, g)),
              {}};
      break;
    }
    case AxiomId::DF9: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g"), h = ge("h");
      TestPtr b = gt("b");
      Rat r = gr("r");
      inst = {e_pch(e_gch(e, b, f), r, e_gch(g, b, h)),
              e_gch(e_pch(e, r, g), b, e_pch(f, r, h)),
              {}};
      break;
    }
    case AxiomId::DF10: {
      ExprPtr e = ge("e"), f = ge("f");
      TestPtr b = gt("b");
      Rat r = gr("r");
      inst = {e_seq(e_test(b), e_pch(e, r, f)),
              e_pch(e_seq(e_test(b), e), r, e_seq(e_test(b), f)),
              {}};
      break;
    }
    case AxiomId::DF11: {
      ExprPtr e = ge("e"), f = ge("f"), g = ge("g");
      Rat r = gr("r"), s = gr("s");
      Rat den = 1 - (1 - r) * (1 - s);
      if (den == 0)
        fail("requires (1-r)*(1-s) != 1 (denominator would vanish)");
      inst = {e_pch(e, r, e_pch(f, s, g)),
              e_pch(e_pch(e, r / den, f), den, g),
              {}};
      break;
    }
    case AxiomId::DF12: {
      ExprPtr e = ge("e"), f = ge("f");
      inst = {e_gch(e, t_one(), f), e, {}};
      break;
    }
    case AxiomId::BA:
    case AxiomId::UA:
      fail("not a schematic axiom; handled directly by the proof checker");
  }

  // Reject stray bindings: they usually indicate a typo in a proof script.
  for (const auto& m : bs.exprs)
    if (!used.count(m.first)) fail("unused binding '" + m.first + "'");
  for (const auto& m : bs.tests)
    if (!used.count(m.first)) fail("unused binding '" + m.first + "'");
  for (const auto& m : bs.rats)
    if (!used.count(m.first)) fail("unused binding '" + m.first + "'");
  for (const auto& m : bs.outputs)
    if (!used.count(m.first)) fail("unused binding '" + m.first + "'");
  return inst;
}

}  // namespace probgkat
