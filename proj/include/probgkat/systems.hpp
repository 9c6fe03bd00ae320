#pragma once

// Finite systems of behavioural equations over indeterminates x1..xn.
// Right-hand sides are guarded/probabilistic combinations of closed
// expressions and action-prefixed indeterminates g . x; guarded choices may
// not occur strictly below probabilistic ones (except inside closed
// subterms, which are kept as opaque leaves).

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "probgkat/equivalence.hpp"
#include "probgkat/semantics.hpp"
#include "probgkat/syntax.hpp"

namespace probgkat {

enum class SKind : std::uint8_t { Closed, Prefixed, PChoice, GChoice };

struct SysTerm;
using SysPtr = std::shared_ptr<const SysTerm>;

struct SysTerm {
  SKind k;
  ExprPtr closed;  // Closed: the expression; Prefixed: the prefix
  int var = -1;    // Prefixed: indeterminate index
  TestPtr guard;   // GChoice
  Rat prob;        // PChoice
  SysPtr a, b;
};

inline SysPtr s_closed(ExprPtr e) {
  return std::make_shared<const SysTerm>(
      SysTerm{SKind::Closed, std::move(e), -1, nullptr, Rat(0), nullptr,
              nullptr});
}
inline SysPtr s_prefixed(ExprPtr g, int var) {
  if (var < 0) throw std::invalid_argument("bad indeterminate index");
  return std::make_shared<const SysTerm>(
      SysTerm{SKind::Prefixed, std::move(g), var, nullptr, Rat(0), nullptr,
              nullptr});
}
inline SysPtr s_pch(SysPtr a, const Rat& r, SysPtr b) {
  if (!is_probability(r))
    throw std::invalid_argument("probability out of range: " +
                                rat_to_string(r));
  if (a->k == SKind::GChoice || b->k == SKind::GChoice)
    throw std::invalid_argument(
        "guarded choice under probabilistic choice in a system right-hand "
        "side");
  return std::make_shared<const SysTerm>(
      SysTerm{SKind::PChoice, nullptr, -1, nullptr, r, std::move(a),
              std::move(b)});
}
inline SysPtr s_gch(SysPtr a, TestPtr guard, SysPtr b) {
  return std::make_shared<const SysTerm>(
      SysTerm{SKind::GChoice, nullptr, -1, std::move(guard), Rat(0),
              std::move(a), std::move(b)});
}

inline bool systerm_eq(const SysPtr& x, const SysPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->k != y->k) return false;
  switch (x->k) {
    case SKind::Closed:
      return expr_eq(x->closed, y->closed);
    case SKind::Prefixed:
      return x->var == y->var && expr_eq(x->closed, y->closed);
    case SKind::PChoice:
      return x->prob == y->prob && systerm_eq(x->a, y->a) &&
             systerm_eq(x->b, y->b);
    case SKind::GChoice:
      return test_eq(x->guard, y->guard) && systerm_eq(x->a, y->a) &&
             systerm_eq(x->b, y->b);
  }
  return false;
}

struct SalomaaSystem {
  Alphabet alphabet;
  std::vector<std::string> vars;
  std::vector<SysPtr> rhs;

  int find_var(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == name) return static_cast<int>(i);
    return -1;
  }
};

// The productivity condition: every prefix of an indeterminate must have
// termination probability 0 at every atom, so unfolding always makes
// progress.
inline bool is_salomaa(const SalomaaSystem& sys,
                       unsigned max_tests = kDefaultMaxTests) {
  std::vector<SysPtr> todo = sys.rhs;
  while (!todo.empty()) {
    SysPtr t = todo.back();
    todo.pop_back();
    switch (t->k) {
      case SKind::Closed:
        break;
      case SKind::Prefixed:
        if (!terminates_nowhere(sys.alphabet, t->closed, max_tests)) return false;
        break;
      case SKind::PChoice:
      case SKind::GChoice:
        todo.push_back(t->a);
        todo.push_back(t->b);
        break;
    }
  }
  return true;
}

// Applies the substitution x_i := h[i], turning a right-hand side into a
// closed expression (prefixes become sequencing).
inline ExprPtr substitute(const std::vector<ExprPtr>& h, const SysPtr& t) {
  switch (t->k) {
    case SKind::Closed:
      return t->closed;
    case SKind::Prefixed:
      if (t->var >= static_cast<int>(h.size()))
        throw std::invalid_argument("substitute: indeterminate out of range");
      return e_seq(t->closed, h[t->var]);
    case SKind::PChoice:
      return e_pch(substitute(h, t->a), t->prob, substitute(h, t->b));
    case SKind::GChoice:
      return e_gch(substitute(h, t->a), t->guard, substitute(h, t->b));
  }
  throw std::logic_error("unreachable system term kind");
}

// The induced map on candidate solution vectors: each component becomes its
// right-hand side with the candidates substituted in.
inline std::vector<ExprPtr> tau_bar(const SalomaaSystem& sys,
                                    const std::vector<ExprPtr>& h) {
  if (h.size() != sys.rhs.size())
    throw std::invalid_argument("tau_bar: wrong vector length");
  std::vector<ExprPtr> out;
  out.reserve(sys.rhs.size());
  for (const auto& t : sys.rhs) out.push_back(substitute(h, t));
  return out;
}

// ---------------------------------------------------------------------------
// Reading a system off an automaton
//
// Each state becomes an indeterminate whose right-hand side combines the
// one-step behaviours: a guarded sum over atoms of convex combinations over
// the support. Convex combinations list step outcomes first (by action, then
// target), then returns, accept and reject — the order in which such systems
// are conventionally displayed. All unrollings are provably equivalent.

namespace detail {

inline SysPtr sys_outcome_term(const Outcome<int>& o) {
  switch (o.k) {
    case OKind::Reject: return s_closed(e_zero());
    case OKind::Accept: return s_closed(e_one());
    case OKind::Ret: return s_closed(e_ret(o.sym));
    case OKind::Step: return s_prefixed(e_act(o.sym), o.target);
  }
  throw std::logic_error("unreachable outcome kind");
}

inline SysPtr sys_convex_unroll(std::vector<std::pair<Rat, SysPtr>> items) {
  if (items.empty())
    throw std::logic_error("sys_convex_unroll: empty support");
  if (items.size() == 1) return items[0].second;
  Rat head = items[0].first;
  std::vector<std::pair<Rat, SysPtr>> tail;
  for (std::size_t i = 1; i < items.size(); ++i)
    tail.emplace_back(items[i].first / (1 - head), items[i].second);
  return s_pch(items[0].second, head, sys_convex_unroll(std::move(tail)));
}

}  // namespace detail

inline SalomaaSystem system_of_automaton(const Automaton& aut) {
  SalomaaSystem sys;
  sys.alphabet = aut.alphabet;
  for (std::size_t q = 0; q < aut.num_states(); ++q)
    sys.vars.push_back("x" + std::to_string(q));
  for (std::size_t q = 0; q < aut.num_states(); ++q) {
    std::vector<SysPtr> bodies;
    for (std::size_t a = 0; a < aut.num_atoms(); ++a) {
      const Dist<int>& d = aut.trans[q][a];
      std::vector<std::pair<Rat, SysPtr>> items;
      // Steps first (canonical entry order already sorts them by action and
      // target), then returns, accept, reject.
      for (const auto& [o, p] : d.entries)
        if (o.k == OKind::Step)
          items.emplace_back(p, detail::sys_outcome_term(o));
      for (auto kind : {OKind::Ret, OKind::Accept, OKind::Reject})
        for (const auto& [o, p] : d.entries)
          if (o.k == kind) items.emplace_back(p, detail::sys_outcome_term(o));
      bodies.push_back(detail::sys_convex_unroll(std::move(items)));
    }
    if (bodies.size() == 1) {
      sys.rhs.push_back(bodies[0]);
    } else {
      SysPtr acc = s_closed(e_zero());
      for (std::size_t i = bodies.size(); i-- > 0;)
        acc = s_gch(bodies[i],
                    atom_char_test(aut.alphabet, Atom{std::uint32_t(i)}), acc);
      sys.rhs.push_back(acc);
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Solution checking

struct SolutionCheck {
  bool ok = false;
  std::vector<bool> per_var;  // h(x) bisimilar to rhs[x] after substitution
};

// h solves the system when each h(x) is bisimilar to its right-hand side
// with h substituted in.
inline SolutionCheck check_solution(const SalomaaSystem& sys,
                                    const std::vector<ExprPtr>& h,
                                    unsigned max_tests = kDefaultMaxTests) {
  if (h.size() != sys.rhs.size())
    throw std::invalid_argument("check_solution: wrong vector length");
  SolutionCheck res;
  res.ok = true;
  for (std::size_t i = 0; i < sys.rhs.size(); ++i) {
    bool good =
        bisim_exprs(sys.alphabet, h[i], substitute(h, sys.rhs[i]), max_tests)
            .bisimilar;
    res.per_var.push_back(good);
    res.ok = res.ok && good;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Printing (round-trips through the parser)

namespace detail {

// Shares precedence levels with expressions: probabilistic choice 0, guarded
// choice 1, prefixing at sequencing level 2.
inline void print_systerm_into(const Alphabet& alph,
                               const std::vector<std::string>& vars,
                               const SysPtr& t, int level, std::string& out) {
  auto paren = [&](int mine, auto&& body) {
    if (mine < level) out += "(";
    body();
    if (mine < level) out += ")";
  };
  switch (t->k) {
    case SKind::Closed:
      print_expr_into(alph, t->closed, level, out);
      break;
    case SKind::Prefixed:
      paren(2, [&] {
        print_expr_into(alph, t->closed, 3, out);
        out += " . ";
        out += vars[t->var];
      });
      break;
    case SKind::PChoice:
      paren(0, [&] {
        print_systerm_into(alph, vars, t->a, 1, out);
        out += " +{" + rat_to_string(t->prob) + "} ";
        print_systerm_into(alph, vars, t->b, 0, out);
      });
      break;
    case SKind::GChoice:
      paren(1, [&] {
        print_systerm_into(alph, vars, t->a, 2, out);
        out += " +[";
        print_test_into(alph, t->guard, 0, out);
        out += "] ";
        print_systerm_into(alph, vars, t->b, 1, out);
      });
      break;
  }
}

}  // namespace detail

inline std::string print_systerm(const Alphabet& alph,
                                 const std::vector<std::string>& vars,
                                 const SysPtr& t) {
  std::string out;
  detail::print_systerm_into(alph, vars, t, 0, out);
  return out;
}

}  // namespace probgkat
