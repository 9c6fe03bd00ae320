#pragma once

// Checking equational proof scripts. A script is a sequence of numbered
// equations, each justified by an axiom instantiation, equivalence-relation
// reasoning (refl/sym/trans), congruence in a one-hole context, Boolean
// reasoning on tests, or uniqueness of solutions for a declared system.
// Verification is strict: a line is accepted only if its two sides are
// exactly the instantiated schema (structural equality, no normalisation).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "probgkat/axioms.hpp"
#include "probgkat/equivalence.hpp"
#include "probgkat/systems.hpp"

namespace probgkat {

struct Justification {
  enum class Kind { Axiom, Refl, Sym, Trans, Cong, Ba, Ua };
  Kind kind = Kind::Refl;
  AxiomId axiom = AxiomId::G1;  // Axiom
  std::vector<int> refs;        // Sym/Cong: 1, Trans: 2, Axiom: one per
                                // premise, Ua: two per indeterminate
  Bindings bindings;            // Axiom
  ExprPtr context;              // Cong: expression with exactly one hole
  std::string system;           // Ua
};

struct ProofLine {
  int number = 0;
  ExprPtr lhs, rhs;
  Justification just;
};

struct ProofScript {
  Alphabet alphabet;
  std::map<std::string, SalomaaSystem> systems;
  std::vector<ProofLine> lines;
};

struct ProofOutcome {
  bool ok = false;
  int failing_line = -1;  // line number of the first rejected line
  std::string message;
  int lines_checked = 0;
};

inline int count_holes(const ExprPtr& e) {
  switch (e->k) {
    case EKind::Hole:
      return 1;
    case EKind::Test:
    case EKind::Act:
    case EKind::Ret:
      return 0;
    case EKind::Gch:
    case EKind::Pch:
    case EKind::Seq:
      return count_holes(e->a) + count_holes(e->b);
    case EKind::Gloop:
    case EKind::Ploop:
      return count_holes(e->a);
  }
  return 0;
}

// Replaces the hole of a one-hole context.
inline ExprPtr plug(const ExprPtr& ctx, const ExprPtr& filler) {
  switch (ctx->k) {
    case EKind::Hole:
      return filler;
    case EKind::Test:
    case EKind::Act:
    case EKind::Ret:
      return ctx;
    case EKind::Gch:
      return e_gch(plug(ctx->a, filler), ctx->test, plug(ctx->b, filler));
    case EKind::Pch:
      return e_pch(plug(ctx->a, filler), ctx->prob, plug(ctx->b, filler));
    case EKind::Seq:
      return e_seq(plug(ctx->a, filler), plug(ctx->b, filler));
    case EKind::Gloop:
      return e_gloop(plug(ctx->a, filler), ctx->test);
    case EKind::Ploop:
      return e_ploop(plug(ctx->a, filler), ctx->prob);
  }
  throw std::logic_error("unreachable expression kind");
}

// Equal up to swapping Boolean-equivalent tests (in test position and in
// guards); everything else must coincide exactly.
inline bool ba_equal(const Alphabet& alph, const ExprPtr& x, const ExprPtr& y,
                     unsigned max_tests = kDefaultMaxTests) {
  if (x->k != y->k) return false;
  switch (x->k) {
    case EKind::Test:
      return bool_equiv(alph, x->test, y->test, max_tests);
    case EKind::Act:
    case EKind::Ret:
      return x->sym == y->sym;
    case EKind::Gch:
      return bool_equiv(alph, x->test, y->test, max_tests) &&
             ba_equal(alph, x->a, y->a, max_tests) &&
             ba_equal(alph, x->b, y->b, max_tests);
    case EKind::Pch:
      return x->prob == y->prob && ba_equal(alph, x->a, y->a, max_tests) &&
             ba_equal(alph, x->b, y->b, max_tests);
    case EKind::Seq:
      return ba_equal(alph, x->a, y->a, max_tests) &&
             ba_equal(alph, x->b, y->b, max_tests);
    case EKind::Gloop:
      return bool_equiv(alph, x->test, y->test, max_tests) &&
             ba_equal(alph, x->a, y->a, max_tests);
    case EKind::Ploop:
      return x->prob == y->prob && ba_equal(alph, x->a, y->a, max_tests);
    case EKind::Hole:
      return true;
  }
  return false;
}

struct ProofOptions {
  // Additionally decide bisimilarity of the two sides of every accepted
  // line; a failure flags the line (safety net for the axiom engine).
  bool cross_check = false;
  unsigned max_tests = kDefaultMaxTests;
};

inline ProofOutcome check_proof(const ProofScript& script,
                                const ProofOptions& opts = {}) {
  ProofOutcome out;
  const auto& lines = script.lines;
  auto reject = [&](int number, const std::string& msg) {
    out.ok = false;
    out.failing_line = number;
    out.message = msg;
    return out;
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const ProofLine& ln = lines[i];
    if (ln.number != static_cast<int>(i) + 1)
      return reject(ln.number, "lines must be numbered consecutively from 1");
    auto ref = [&](int n) -> const ProofLine& {
      if (n < 1 || n >= ln.number)
        throw std::invalid_argument("reference to line " + std::to_string(n) +
                                    " is out of range");
      return lines[n - 1];
    };
    try {
      switch (ln.just.kind) {
        case Justification::Kind::Refl:
          if (!expr_eq(ln.lhs, ln.rhs))
            return reject(ln.number, "refl requires both sides to be equal");
          break;
        case Justification::Kind::Sym: {
          if (ln.just.refs.size() != 1)
            return reject(ln.number, "sym takes exactly one line reference");
          const ProofLine& p = ref(ln.just.refs[0]);
          if (!expr_eq(ln.lhs, p.rhs) || !expr_eq(ln.rhs, p.lhs))
            return reject(ln.number,
                          "sym: this line is not the cited line reversed");
          break;
        }
        case Justification::Kind::Trans: {
          if (ln.just.refs.size() != 2)
            return reject(ln.number, "trans takes exactly two line references");
          const ProofLine& p = ref(ln.just.refs[0]);
          const ProofLine& q = ref(ln.just.refs[1]);
          if (!expr_eq(p.rhs, q.lhs))
            return reject(ln.number,
                          "trans: cited lines do not share a middle term");
          if (!expr_eq(ln.lhs, p.lhs) || !expr_eq(ln.rhs, q.rhs))
            return reject(ln.number,
                          "trans: sides do not match the cited lines");
          break;
        }
        case Justification::Kind::Cong: {
          if (ln.just.refs.size() != 1)
            return reject(ln.number, "cong takes exactly one line reference");
          if (!ln.just.context || count_holes(ln.just.context) != 1)
            return reject(ln.number,
                          "cong context must contain exactly one hole");
          const ProofLine& p = ref(ln.just.refs[0]);
          if (!expr_eq(ln.lhs, plug(ln.just.context, p.lhs)) ||
              !expr_eq(ln.rhs, plug(ln.just.context, p.rhs)))
            return reject(
                ln.number,
                "cong: sides are not the context filled with the cited line");
          break;
        }
        case Justification::Kind::Ba:
          if (!ba_equal(script.alphabet, ln.lhs, ln.rhs, opts.max_tests))
            return reject(ln.number,
                          "ba: sides differ beyond Boolean-equivalent tests");
          break;
        case Justification::Kind::Axiom: {
          AxiomInstance inst;
          try {
            inst = instantiate_axiom(script.alphabet, ln.just.axiom,
                                     ln.just.bindings, opts.max_tests);
          } catch (const std::invalid_argument& ex) {
            return reject(ln.number, ex.what());
          }
          if (ln.just.refs.size() != inst.premises.size())
            return reject(ln.number,
                          axiom_name(ln.just.axiom) + " needs " +
                              std::to_string(inst.premises.size()) +
                              " premise line(s), got " +
                              std::to_string(ln.just.refs.size()));
          for (std::size_t k = 0; k < inst.premises.size(); ++k) {
            const ProofLine& p = ref(ln.just.refs[k]);
            if (!expr_eq(p.lhs, inst.premises[k].first) ||
                !expr_eq(p.rhs, inst.premises[k].second))
              return reject(ln.number,
                            "premise line " +
                                std::to_string(ln.just.refs[k]) +
                                " does not match the required equation");
          }
          if (!expr_eq(ln.lhs, inst.lhs) || !expr_eq(ln.rhs, inst.rhs))
            return reject(ln.number,
                          "sides are not this instance of " +
                              axiom_name(ln.just.axiom));
          break;
        }
        case Justification::Kind::Ua: {
          auto it = script.systems.find(ln.just.system);
          if (it == script.systems.end())
            return reject(ln.number, "unknown system '" + ln.just.system + "'");
          const SalomaaSystem& sys = it->second;
          std::size_t n = sys.vars.size();
          if (!is_salomaa(sys, opts.max_tests))
            return reject(ln.number,
                          "system '" + ln.just.system +
                              "' does not satisfy the productivity condition");
          if (ln.just.refs.size() != 2 * n)
            return reject(ln.number,
                          "ua needs " + std::to_string(2 * n) +
                              " line references (two solutions, one line per "
                              "indeterminate)");
          auto read_solution = [&](std::size_t base) {
            std::vector<ExprPtr> h;
            for (std::size_t k = 0; k < n; ++k)
              h.push_back(ref(ln.just.refs[base + k]).lhs);
            for (std::size_t k = 0; k < n; ++k) {
              ExprPtr expected = substitute(h, sys.rhs[k]);
              if (!expr_eq(ref(ln.just.refs[base + k]).rhs, expected))
                throw std::invalid_argument(
                    "cited line " + std::to_string(ln.just.refs[base + k]) +
                    " does not prove the equation for " + sys.vars[k]);
            }
            return h;
          };
          std::vector<ExprPtr> h = read_solution(0), k2 = read_solution(n);
          bool matched = false;
          for (std::size_t j = 0; j < n && !matched; ++j)
            matched = expr_eq(ln.lhs, h[j]) && expr_eq(ln.rhs, k2[j]);
          if (!matched)
            return reject(ln.number,
                          "sides are not corresponding components of the two "
                          "cited solutions");
          break;
        }
      }
      if (opts.cross_check) {
        if (!bisim_exprs(script.alphabet, ln.lhs, ln.rhs, opts.max_tests)
                 .bisimilar)
          return reject(ln.number,
                        "cross-check: the two sides are not bisimilar");
      }
    } catch (const std::invalid_argument& ex) {
      return reject(ln.number, ex.what());
    }
    ++out.lines_checked;
  }
  out.ok = true;
  return out;
}

}  // namespace probgkat
