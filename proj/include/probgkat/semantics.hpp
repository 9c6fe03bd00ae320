#pragma once

// Operational semantics: the syntactic derivative of an expression at an
// atom, the termination probability, size bounds, automaton construction by
// exploration, automaton merging, and the canonical one-step normal form.

#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "probgkat/dist.hpp"
#include "probgkat/syntax.hpp"

namespace probgkat {

Dist<ExprPtr> derivative(const Alphabet& alph, const ExprPtr& e, Atom a);

// Behaviour of "run d, then f on acceptance": acceptance mass is replaced by
// the derivative of f at the same atom, step continuations are sequenced
// with f, rejection and returns pass through.
inline Dist<ExprPtr> seq_adjust(const Alphabet& alph, const Dist<ExprPtr>& d,
                                Atom a, const ExprPtr& f) {
  DistBuilder<ExprPtr> b;
  for (const auto& [o, p] : d.entries) {
    switch (o.k) {
      case OKind::Accept:
        b.add_scaled(derivative(alph, f, a), p);
        break;
      case OKind::Step:
        b.add(o_step(o.sym, e_seq(o.target, f)), p);
        break;
      default:
        b.add(o, p);
    }
  }
  return std::move(b).build();
}

inline Dist<ExprPtr> derivative(const Alphabet& alph, const ExprPtr& e,
                                Atom a) {
  switch (e->k) {
    case EKind::Test:
      return entails(alph, a, e->test) ? dirac(o_accept<ExprPtr>())
                                       : dirac(o_reject<ExprPtr>());
    case EKind::Act:
      return dirac(o_step(e->sym, e_one()));
    case EKind::Ret:
      return dirac(o_ret<ExprPtr>(e->sym));
    case EKind::Gch:
      return entails(alph, a, e->test) ? derivative(alph, e->a, a)
                                       : derivative(alph, e->b, a);
    case EKind::Pch:
      return convex(e->prob, derivative(alph, e->a, a),
                    derivative(alph, e->b, a));
    case EKind::Seq:
      return seq_adjust(alph, derivative(alph, e->a, a), a, e->b);
    case EKind::Gloop: {
      if (!entails(alph, a, e->test)) return dirac(o_accept<ExprPtr>());
      Dist<ExprPtr> d = derivative(alph, e->a, a);
      Rat s = d.prob_of(o_accept<ExprPtr>());
      // The body accepts surely: the loop re-enters forever, i.e. diverges.
      if (s == 1) return dirac(o_reject<ExprPtr>());
      DistBuilder<ExprPtr> b;
      Rat scale = Rat(1) / (1 - s);
      for (const auto& [o, p] : d.entries) {
        if (o.k == OKind::Accept) continue;
        if (o.k == OKind::Step)
          b.add(o_step(o.sym, e_seq(o.target, e)), p * scale);
        else
          b.add(o, p * scale);
      }
      return std::move(b).build();
    }
    case EKind::Ploop: {
      Dist<ExprPtr> d = derivative(alph, e->a, a);
      Rat s = d.prob_of(o_accept<ExprPtr>());
      const Rat& r = e->prob;
      // Certain re-entry into a surely-accepting body: divergence.
      if (r == 1 && s == 1) return dirac(o_reject<ExprPtr>());
      Rat den = 1 - r * s;
      DistBuilder<ExprPtr> b;
      b.add(o_accept<ExprPtr>(), (1 - r) / den);
      for (const auto& [o, p] : d.entries) {
        if (o.k == OKind::Accept) continue;
        if (o.k == OKind::Step)
          b.add(o_step(o.sym, e_seq(o.target, e)), r * p / den);
        else
          b.add(o, r * p / den);
      }
      return std::move(b).build();
    }
    case EKind::Hole:
      break;
  }
  throw std::logic_error("hole outside a congruence context");
}

// Termination (immediate acceptance) probability, by its own structural
// recursion. Provably coincides with derivative(...).prob_of(accept); the
// two are computed by independent routes and cross-checked in the tests.
inline Rat termination(const Alphabet& alph, const ExprPtr& e, Atom a) {
  switch (e->k) {
    case EKind::Test:
      return entails(alph, a, e->test) ? Rat(1) : Rat(0);
    case EKind::Act:
    case EKind::Ret:
      return Rat(0);
    case EKind::Gch:
      return entails(alph, a, e->test) ? termination(alph, e->a, a)
                                       : termination(alph, e->b, a);
    case EKind::Pch:
      return e->prob * termination(alph, e->a, a) +
             (1 - e->prob) * termination(alph, e->b, a);
    case EKind::Seq:
      return termination(alph, e->a, a) * termination(alph, e->b, a);
    case EKind::Gloop:
      // The loop accepts immediately exactly when the guard fails.
      return entails(alph, a, e->test) ? Rat(0) : Rat(1);
    case EKind::Ploop: {
      Rat s = termination(alph, e->a, a);
      if (e->prob == 1 && s == 1) return Rat(0);
      return (1 - e->prob) / (1 - e->prob * s);
    }
    case EKind::Hole:
      break;
  }
  throw std::logic_error("hole outside a congruence context");
}

inline bool terminates_nowhere(const Alphabet& alph, const ExprPtr& e,
                             unsigned max_tests = kDefaultMaxTests) {
  for (Atom a : enumerate_atoms(alph, max_tests))
    if (termination(alph, e, a) != 0) return false;
  return true;
}

// Upper bound on the number of reachable states of the expression's
// automaton: tests and returns count 1, actions 2, compositions add, loops
// keep their body's bound.
inline Int size_bound(const ExprPtr& e) {
  switch (e->k) {
    case EKind::Test:
    case EKind::Ret:
      return 1;
    case EKind::Act:
      return 2;
    case EKind::Gch:
    case EKind::Pch:
    case EKind::Seq:
      return size_bound(e->a) + size_bound(e->b);
    case EKind::Gloop:
    case EKind::Ploop:
      return size_bound(e->a);
    case EKind::Hole:
      throw std::logic_error("hole outside a congruence context");
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Automata

// A finite-state probabilistic automaton; transitions are total on
// states × atoms. Descriptors are printable state names (for automata built
// from expressions, the expression itself).
struct Automaton {
  Alphabet alphabet;
  std::vector<std::string> state_descr;
  std::vector<std::vector<Dist<int>>> trans;  // [state][atom index]

  std::size_t num_states() const { return state_descr.size(); }
  std::uint32_t num_atoms() const {
    return std::uint32_t{1} << alphabet.tests.size();
  }

  void validate() const {
    alphabet.validate();
    if (trans.size() != state_descr.size())
      throw std::logic_error("automaton: transition table size mismatch");
    for (const auto& row : trans) {
      if (row.size() != num_atoms())
        throw std::logic_error("automaton: transitions not total on atoms");
      for (const auto& d : row)
        for (const auto& [o, p] : d.entries) {
          (void)p;
          if (o.k == OKind::Step &&
              (o.target < 0 ||
               o.target >= static_cast<int>(state_descr.size())))
            throw std::logic_error("automaton: dangling step target");
          if (o.k == OKind::Step &&
              (o.sym < 0 || o.sym >= static_cast<int>(alphabet.actions.size())))
            throw std::logic_error("automaton: unknown action");
          if (o.k == OKind::Ret &&
              (o.sym < 0 || o.sym >= static_cast<int>(alphabet.outputs.size())))
            throw std::logic_error("automaton: unknown output");
        }
    }
  }
};

// Hash-consed bijection between expressions and dense state ids, in order of
// first interning.
class StateTable {
 public:
  // Returns the id, interning the expression on first sight.
  int intern(const ExprPtr& e) {
    auto it = ids_.find(e);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(exprs_.size());
    ids_.emplace(e, id);
    exprs_.push_back(e);
    return id;
  }

  int lookup(const ExprPtr& e) const {
    auto it = ids_.find(e);
    return it == ids_.end() ? -1 : it->second;
  }

  const ExprPtr& expr_of(int id) const { return exprs_.at(id); }
  std::size_t size() const { return exprs_.size(); }
  const std::vector<ExprPtr>& exprs() const { return exprs_; }

 private:
  struct Hash {
    std::size_t operator()(const ExprPtr& e) const { return e->hash; }
  };
  struct Eq {
    bool operator()(const ExprPtr& x, const ExprPtr& y) const {
      return expr_eq(x, y);
    }
  };
  std::unordered_map<ExprPtr, int, Hash, Eq> ids_;
  std::vector<ExprPtr> exprs_;
};

// Explores the derivatives of e breadth-first. State 0 is e itself; newly
// reached expressions get ids in discovery order.
inline Automaton build_automaton(const Alphabet& alph, const ExprPtr& e,
                                 unsigned max_tests = kDefaultMaxTests) {
  std::vector<Atom> atoms = enumerate_atoms(alph, max_tests);
  Automaton aut;
  aut.alphabet = alph;
  StateTable table;
  std::deque<int> todo;
  todo.push_back(table.intern(e));
  while (!todo.empty()) {
    int id = todo.front();
    todo.pop_front();
    if (static_cast<int>(aut.trans.size()) <= id) aut.trans.resize(id + 1);
    ExprPtr state = table.expr_of(id);
    std::vector<Dist<int>> row;
    row.reserve(atoms.size());
    for (Atom a : atoms) {
      Dist<ExprPtr> d = derivative(alph, state, a);
      row.push_back(map_targets<int>(d, [&](const ExprPtr& target) {
        std::size_t before = table.size();
        int tid = table.intern(target);
        if (table.size() > before) todo.push_back(tid);
        return tid;
      }));
    }
    aut.trans[id] = std::move(row);
  }
  for (std::size_t i = 0; i < table.size(); ++i)
    aut.state_descr.push_back(print_expr(alph, table.expr_of(i)));
  return aut;
}

struct MergeResult {
  Automaton automaton;
  // New ids of the second automaton's states; the first automaton's states
  // keep their ids.
  std::vector<int> map2;
};

// Disjoint union that shares states with identical descriptors. Shared
// states must agree on their (remapped) transitions; a mismatch means the
// descriptors were not faithful names and is reported as an error.
inline MergeResult merge_automata(const Automaton& a1, const Automaton& a2) {
  if (!(a1.alphabet == a2.alphabet))
    throw std::invalid_argument("merge_automata: alphabets differ");
  MergeResult res;
  res.automaton = a1;
  std::unordered_map<std::string, int> by_descr;
  for (std::size_t i = 0; i < a1.state_descr.size(); ++i)
    by_descr.emplace(a1.state_descr[i], static_cast<int>(i));
  res.map2.resize(a2.num_states(), -1);
  for (std::size_t i = 0; i < a2.num_states(); ++i) {
    auto it = by_descr.find(a2.state_descr[i]);
    if (it != by_descr.end()) {
      res.map2[i] = it->second;
    } else {
      res.map2[i] = static_cast<int>(res.automaton.state_descr.size());
      res.automaton.state_descr.push_back(a2.state_descr[i]);
      res.automaton.trans.emplace_back();
    }
  }
  for (std::size_t i = 0; i < a2.num_states(); ++i) {
    std::vector<Dist<int>> row;
    row.reserve(a2.trans[i].size());
    for (const auto& d : a2.trans[i])
      row.push_back(
          map_targets<int>(d, [&](int t) { return res.map2[t]; }));
    int id = res.map2[i];
    if (static_cast<std::size_t>(id) < a1.num_states()) {
      if (!(res.automaton.trans[id] == row))
        throw std::logic_error(
            "merge_automata: descriptor '" + a2.state_descr[i] +
            "' names states with different transitions");
    } else {
      res.automaton.trans[id] = std::move(row);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// One-step normal form
//
// expand(e) rebuilds e from its derivatives: a guarded sum over all atoms of
// convex combinations of the one-step behaviours. The result is bisimilar to
// e (and provably equivalent to it).

namespace detail {

inline ExprPtr outcome_expr(const Outcome<ExprPtr>& o) {
  switch (o.k) {
    case OKind::Reject: return e_zero();
    case OKind::Accept: return e_one();
    case OKind::Ret: return e_ret(o.sym);
    case OKind::Step: return e_seq(e_act(o.sym), o.target);
  }
  throw std::logic_error("unreachable outcome kind");
}

// Right-nested convex combination of (weight, expression) pairs whose
// weights sum to 1; a singleton list is the expression itself.
inline ExprPtr convex_unroll(const std::vector<std::pair<Rat, ExprPtr>>& items,
                             std::size_t from = 0) {
  if (items.empty()) throw std::logic_error("convex_unroll: empty support");
  if (from + 1 == items.size()) return items[from].second;
  // Renormalise the tail so its weights again sum to 1.
  Rat head = items[from].first;
  std::vector<std::pair<Rat, ExprPtr>> tail;
  for (std::size_t i = from + 1; i < items.size(); ++i)
    tail.emplace_back(items[i].first / (1 - head), items[i].second);
  return e_pch(items[from].second, head, convex_unroll(tail));
}

// Right-nested guarded sum over all atoms, one body per atom in enumeration
// order. With a single atom the sum collapses to its body; otherwise the
// nesting ends in a trailing 0.
inline ExprPtr guarded_sum(const Alphabet& alph,
                           const std::vector<ExprPtr>& bodies) {
  if (bodies.size() == 1) return bodies[0];
  ExprPtr acc = e_zero();
  for (std::size_t i = bodies.size(); i-- > 0;)
    acc = e_gch(bodies[i], atom_char_test(alph, Atom{std::uint32_t(i)}), acc);
  return acc;
}

}  // namespace detail

inline ExprPtr expand(const Alphabet& alph, const ExprPtr& e,
                      unsigned max_tests = kDefaultMaxTests) {
  std::vector<ExprPtr> bodies;
  for (Atom a : enumerate_atoms(alph, max_tests)) {
    Dist<ExprPtr> d = derivative(alph, e, a);
    std::vector<std::pair<Rat, ExprPtr>> items;
    for (const auto& [o, p] : d.entries)
      items.emplace_back(p, detail::outcome_expr(o));
    bodies.push_back(detail::convex_unroll(items));
  }
  return detail::guarded_sum(alph, bodies);
}

}  // namespace probgkat
