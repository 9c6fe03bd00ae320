#pragma once

// Abstract syntax: alphabets, Boolean tests, program expressions, atoms.
//
// Tests and expressions are immutable DAG nodes behind shared_ptr<const ...>
// with precomputed structural hashes, so copies are cheap and equality /
// ordering are structural.

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "probgkat/rat.hpp"

namespace probgkat {

// ---------------------------------------------------------------------------
// Alphabet

inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s)
    if (!alpha(c) && !digit(c)) return false;
  return true;
}

inline bool is_reserved_word(const std::string& s) {
  return s == "tests" || s == "actions" || s == "outputs" || s == "ret" ||
         s == "system" || s == "by";
}

// Declared primitive tests, actions and outputs. Every identifier belongs to
// exactly one sort; lookups return indices into the declaration order.
struct Alphabet {
  std::vector<std::string> tests;
  std::vector<std::string> actions;
  std::vector<std::string> outputs;

  int find_test(const std::string& s) const { return find(tests, s); }
  int find_action(const std::string& s) const { return find(actions, s); }
  int find_output(const std::string& s) const { return find(outputs, s); }

  void validate() const {
    std::vector<std::string> all;
    for (const auto* v : {&tests, &actions, &outputs})
      for (const auto& s : *v) {
        if (!is_identifier(s) || is_reserved_word(s))
          throw std::invalid_argument("bad identifier '" + s + "'");
        for (const auto& seen : all)
          if (seen == s)
            throw std::invalid_argument("identifier '" + s +
                                        "' declared more than once");
        all.push_back(s);
      }
  }

  bool operator==(const Alphabet& o) const {
    return tests == o.tests && actions == o.actions && outputs == o.outputs;
  }

 private:
  static int find(const std::vector<std::string>& v, const std::string& s) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == s) return static_cast<int>(i);
    return -1;
  }
};

// ---------------------------------------------------------------------------
// Boolean tests

enum class TKind : std::uint8_t { Zero, One, Var, Not, And, Or };

struct Test;
using TestPtr = std::shared_ptr<const Test>;

struct Test {
  TKind k;
  int var = -1;      // Var: index into Alphabet::tests
  TestPtr a, b;      // Not: a; And/Or: a, b
  std::size_t hash = 0;
};

inline std::size_t test_hash(const TestPtr& t) { return t ? t->hash : 0; }

inline TestPtr mk_test(Test n) {
  std::size_t h = static_cast<std::size_t>(n.k) * 0x9E3779B97F4A7C15ull;
  boost::hash_combine(h, n.var);
  boost::hash_combine(h, test_hash(n.a));
  boost::hash_combine(h, test_hash(n.b));
  n.hash = h;
  return std::make_shared<const Test>(std::move(n));
}

inline TestPtr t_zero() {
  static const TestPtr t = mk_test({TKind::Zero, -1, nullptr, nullptr, 0});
  return t;
}
inline TestPtr t_one() {
  static const TestPtr t = mk_test({TKind::One, -1, nullptr, nullptr, 0});
  return t;
}
inline TestPtr t_var(int i) {
  assert(i >= 0);
  return mk_test({TKind::Var, i, nullptr, nullptr, 0});
}
inline TestPtr t_not(TestPtr a) {
  return mk_test({TKind::Not, -1, std::move(a), nullptr, 0});
}
inline TestPtr t_and(TestPtr a, TestPtr b) {
  return mk_test({TKind::And, -1, std::move(a), std::move(b), 0});
}
inline TestPtr t_or(TestPtr a, TestPtr b) {
  return mk_test({TKind::Or, -1, std::move(a), std::move(b), 0});
}

inline int test_cmp(const TestPtr& x, const TestPtr& y) {
  if (x.get() == y.get()) return 0;
  if (x->k != y->k) return x->k < y->k ? -1 : 1;
  switch (x->k) {
    case TKind::Zero:
    case TKind::One:
      return 0;
    case TKind::Var:
      return x->var < y->var ? -1 : (x->var > y->var ? 1 : 0);
    case TKind::Not:
      return test_cmp(x->a, y->a);
    case TKind::And:
    case TKind::Or:
      if (int c = test_cmp(x->a, y->a)) return c;
      return test_cmp(x->b, y->b);
  }
  return 0;
}

inline bool test_eq(const TestPtr& x, const TestPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->hash != y->hash) return false;
  return test_cmp(x, y) == 0;
}

// ---------------------------------------------------------------------------
// Atoms
//
// An atom is a total truth assignment to the declared tests. Atoms are kept
// as plain indices: with n tests, atom i assigns test j the bit at position
// n-1-j of i, so that index order is lexicographic in declaration order with
// false before true (atom 0 is all-false).

struct Atom {
  std::uint32_t idx = 0;
  bool operator==(const Atom&) const = default;
};

inline constexpr unsigned kDefaultMaxTests = 16;

inline std::uint32_t atom_count(const Alphabet& alph,
                                unsigned max_tests = kDefaultMaxTests) {
  if (alph.tests.size() > max_tests)
    throw std::length_error("too many tests: " +
                            std::to_string(alph.tests.size()) + " > " +
                            std::to_string(max_tests));
  return std::uint32_t{1} << alph.tests.size();
}

inline std::vector<Atom> enumerate_atoms(const Alphabet& alph,
                                         unsigned max_tests = kDefaultMaxTests) {
  std::uint32_t n = atom_count(alph, max_tests);
  std::vector<Atom> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(Atom{i});
  return out;
}

inline bool atom_test_value(const Alphabet& alph, Atom a, int test_index) {
  int n = static_cast<int>(alph.tests.size());
  assert(test_index >= 0 && test_index < n);
  return (a.idx >> (n - 1 - test_index)) & 1u;
}

// Comma-separated set of the tests an atom makes true, in declaration order;
// the all-false atom renders as the empty string.
inline std::string atom_to_string(const Alphabet& alph, Atom a) {
  std::string s;
  for (std::size_t j = 0; j < alph.tests.size(); ++j)
    if (atom_test_value(alph, a, static_cast<int>(j))) {
      if (!s.empty()) s += ",";
      s += alph.tests[j];
    }
  return s;
}

// Inverse of atom_to_string; also accepts "-" for the all-false atom.
inline Atom atom_from_string(const Alphabet& alph, const std::string& s) {
  Atom a{0};
  if (s.empty() || s == "-") return a;
  int n = static_cast<int>(alph.tests.size());
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string name =
        s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    int j = alph.find_test(name);
    if (j < 0)
      throw std::invalid_argument("unknown test '" + name + "' in atom '" + s +
                                  "'");
    a.idx |= std::uint32_t{1} << (n - 1 - j);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return a;
}

inline bool eval_test(const Alphabet& alph, const TestPtr& t, Atom a) {
  switch (t->k) {
    case TKind::Zero: return false;
    case TKind::One: return true;
    case TKind::Var: return atom_test_value(alph, a, t->var);
    case TKind::Not: return !eval_test(alph, t->a, a);
    case TKind::And: return eval_test(alph, t->a, a) && eval_test(alph, t->b, a);
    case TKind::Or: return eval_test(alph, t->a, a) || eval_test(alph, t->b, a);
  }
  return false;
}

// atom <= test in the Boolean algebra of tests.
inline bool entails(const Alphabet& alph, Atom a, const TestPtr& t) {
  return eval_test(alph, t, a);
}

inline bool bool_equiv(const Alphabet& alph, const TestPtr& x, const TestPtr& y,
                       unsigned max_tests = kDefaultMaxTests) {
  for (Atom a : enumerate_atoms(alph, max_tests))
    if (eval_test(alph, x, a) != eval_test(alph, y, a)) return false;
  return true;
}

// The conjunction of literals characterising an atom (left-nested, tests in
// declaration order). With no tests declared this is 1.
inline TestPtr atom_char_test(const Alphabet& alph, Atom a) {
  TestPtr acc;
  for (std::size_t j = 0; j < alph.tests.size(); ++j) {
    int ji = static_cast<int>(j);
    TestPtr lit = atom_test_value(alph, a, ji) ? t_var(ji) : t_not(t_var(ji));
    acc = acc ? t_and(acc, lit) : lit;
  }
  return acc ? acc : t_one();
}

// ---------------------------------------------------------------------------
// Program expressions

enum class EKind : std::uint8_t {
  Test,   // embedded Boolean test
  Act,    // action symbol
  Ret,    // return an output value
  Gch,    // guarded choice  a +[test] b
  Pch,    // probabilistic choice  a +{prob} b
  Seq,    // sequencing  a ; b
  Gloop,  // guarded loop  a*[test]
  Ploop,  // probabilistic loop  a*{prob}
  Hole,   // "_": placeholder in congruence contexts, not a program form
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  EKind k;
  TestPtr test;  // Test: the test; Gch/Gloop: the guard
  int sym = -1;  // Act: action index; Ret: output index
  Rat prob;      // Pch/Ploop
  ExprPtr a, b;  // operands (Gloop/Ploop use a only)
  std::size_t hash = 0;
};

inline std::size_t expr_hash(const ExprPtr& e) { return e ? e->hash : 0; }

inline ExprPtr mk_expr(Expr n) {
  std::size_t h = static_cast<std::size_t>(n.k) * 0xC2B2AE3D27D4EB4Full;
  boost::hash_combine(h, test_hash(n.test));
  boost::hash_combine(h, n.sym);
  boost::hash_combine(h, hash_rat(n.prob));
  boost::hash_combine(h, expr_hash(n.a));
  boost::hash_combine(h, expr_hash(n.b));
  n.hash = h;
  return std::make_shared<const Expr>(std::move(n));
}

inline ExprPtr e_test(TestPtr t) {
  return mk_expr({EKind::Test, std::move(t), -1, Rat(0), nullptr, nullptr, 0});
}
inline ExprPtr e_zero() { return e_test(t_zero()); }
inline ExprPtr e_one() { return e_test(t_one()); }
inline ExprPtr e_act(int action) {
  assert(action >= 0);
  return mk_expr({EKind::Act, nullptr, action, Rat(0), nullptr, nullptr, 0});
}
inline ExprPtr e_ret(int output) {
  assert(output >= 0);
  return mk_expr({EKind::Ret, nullptr, output, Rat(0), nullptr, nullptr, 0});
}
inline ExprPtr e_gch(ExprPtr a, TestPtr guard, ExprPtr b) {
  return mk_expr({EKind::Gch, std::move(guard), -1, Rat(0), std::move(a),
                  std::move(b), 0});
}
inline ExprPtr e_pch(ExprPtr a, const Rat& r, ExprPtr b) {
  if (!is_probability(r))
    throw std::invalid_argument("probability out of range: " + rat_to_string(r));
  return mk_expr({EKind::Pch, nullptr, -1, r, std::move(a), std::move(b), 0});
}
inline ExprPtr e_seq(ExprPtr a, ExprPtr b) {
  return mk_expr(
      {EKind::Seq, nullptr, -1, Rat(0), std::move(a), std::move(b), 0});
}
inline ExprPtr e_gloop(ExprPtr body, TestPtr guard) {
  return mk_expr({EKind::Gloop, std::move(guard), -1, Rat(0), std::move(body),
                  nullptr, 0});
}
inline ExprPtr e_ploop(ExprPtr body, const Rat& r) {
  if (!is_probability(r))
    throw std::invalid_argument("probability out of range: " + rat_to_string(r));
  return mk_expr({EKind::Ploop, nullptr, -1, r, std::move(body), nullptr, 0});
}
inline ExprPtr e_hole() {
  static const ExprPtr h =
      mk_expr({EKind::Hole, nullptr, -1, Rat(0), nullptr, nullptr, 0});
  return h;
}

inline int rat_cmp(const Rat& x, const Rat& y) {
  return x < y ? -1 : (x > y ? 1 : 0);
}

inline int expr_cmp(const ExprPtr& x, const ExprPtr& y) {
  if (x.get() == y.get()) return 0;
  if (x->k != y->k) return x->k < y->k ? -1 : 1;
  switch (x->k) {
    case EKind::Test:
      return test_cmp(x->test, y->test);
    case EKind::Act:
    case EKind::Ret:
      return x->sym < y->sym ? -1 : (x->sym > y->sym ? 1 : 0);
    case EKind::Gch:
      if (int c = test_cmp(x->test, y->test)) return c;
      if (int c = expr_cmp(x->a, y->a)) return c;
      return expr_cmp(x->b, y->b);
    case EKind::Pch:
      if (int c = rat_cmp(x->prob, y->prob)) return c;
      if (int c = expr_cmp(x->a, y->a)) return c;
      return expr_cmp(x->b, y->b);
    case EKind::Seq:
      if (int c = expr_cmp(x->a, y->a)) return c;
      return expr_cmp(x->b, y->b);
    case EKind::Gloop:
      if (int c = test_cmp(x->test, y->test)) return c;
      return expr_cmp(x->a, y->a);
    case EKind::Ploop:
      if (int c = rat_cmp(x->prob, y->prob)) return c;
      return expr_cmp(x->a, y->a);
    case EKind::Hole:
      return 0;
  }
  return 0;
}

inline bool expr_eq(const ExprPtr& x, const ExprPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->hash != y->hash) return false;
  return expr_cmp(x, y) == 0;
}

inline int expr_size(const ExprPtr& e) {
  switch (e->k) {
    case EKind::Test:
    case EKind::Act:
    case EKind::Ret:
    case EKind::Hole:
      return 1;
    case EKind::Gch:
    case EKind::Pch:
    case EKind::Seq:
      return 1 + expr_size(e->a) + expr_size(e->b);
    case EKind::Gloop:
    case EKind::Ploop:
      return 1 + expr_size(e->a);
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Printing
//
// Output re-parses to the identical AST. Precedence, loosest to tightest:
// probabilistic choice < guarded choice < sequencing < loop postfixes; the
// choices and sequencing associate to the right, so right nesting needs no
// parentheses. Compound tests in expression position print as "[ test ]".

namespace detail {

// Test precedence levels: Or = 0, And = 1, Not = 2, atom = 3 (left-assoc).
inline void print_test_into(const Alphabet& alph, const TestPtr& t, int level,
                            std::string& out) {
  auto paren = [&](int mine, auto&& body) {
    if (mine < level) out += "(";
    body();
    if (mine < level) out += ")";
  };
  switch (t->k) {
    case TKind::Zero: out += "0"; break;
    case TKind::One: out += "1"; break;
    case TKind::Var: out += alph.tests[t->var]; break;
    case TKind::Not:
      out += "~";
      print_test_into(alph, t->a, 2, out);
      break;
    case TKind::And:
      paren(1, [&] {
        print_test_into(alph, t->a, 1, out);
        out += " & ";
        print_test_into(alph, t->b, 2, out);
      });
      break;
    case TKind::Or:
      paren(0, [&] {
        print_test_into(alph, t->a, 0, out);
        out += " | ";
        print_test_into(alph, t->b, 1, out);
      });
      break;
  }
}

// Expression precedence levels: Pch = 0, Gch = 1, Seq = 2, loops = 3,
// primary = 4.
inline void print_expr_into(const Alphabet& alph, const ExprPtr& e, int level,
                            std::string& out) {
  auto paren = [&](int mine, auto&& body) {
    if (mine < level) out += "(";
    body();
    if (mine < level) out += ")";
  };
  switch (e->k) {
    case EKind::Test:
      if (e->test->k == TKind::Zero) out += "0";
      else if (e->test->k == TKind::One) out += "1";
      else if (e->test->k == TKind::Var) out += alph.tests[e->test->var];
      else {
        out += "[";
        print_test_into(alph, e->test, 0, out);
        out += "]";
      }
      break;
    case EKind::Act: out += alph.actions[e->sym]; break;
    case EKind::Ret:
      out += "ret ";
      out += alph.outputs[e->sym];
      break;
    case EKind::Pch:
      paren(0, [&] {
        print_expr_into(alph, e->a, 1, out);
        out += " +{" + rat_to_string(e->prob) + "} ";
        print_expr_into(alph, e->b, 0, out);
      });
      break;
    case EKind::Gch:
      paren(1, [&] {
        print_expr_into(alph, e->a, 2, out);
        out += " +[";
        print_test_into(alph, e->test, 0, out);
        out += "] ";
        print_expr_into(alph, e->b, 1, out);
      });
      break;
    case EKind::Seq:
      paren(2, [&] {
        print_expr_into(alph, e->a, 3, out);
        out += " ; ";
        print_expr_into(alph, e->b, 2, out);
      });
      break;
    case EKind::Gloop:
      // Loop postfixes chain, so a loop body that is itself a loop needs no
      // parentheses.
      paren(3, [&] {
        print_expr_into(alph, e->a, 3, out);
        out += "*[";
        print_test_into(alph, e->test, 0, out);
        out += "]";
      });
      break;
    case EKind::Ploop:
      paren(3, [&] {
        print_expr_into(alph, e->a, 3, out);
        out += "*{" + rat_to_string(e->prob) + "}";
      });
      break;
    case EKind::Hole:
      out += "_";
      break;
  }
}

}  // namespace detail

inline std::string print_test(const Alphabet& alph, const TestPtr& t) {
  std::string out;
  detail::print_test_into(alph, t, 0, out);
  return out;
}

inline std::string print_expr(const Alphabet& alph, const ExprPtr& e) {
  std::string out;
  detail::print_expr_into(alph, e, 0, out);
  return out;
}

// A parsed program: declarations plus the main expression.
struct Program {
  Alphabet alphabet;
  ExprPtr expr;
};

// Comparator hook used by Dist<ExprPtr> (see dist.hpp).
inline int target_compare(const ExprPtr& x, const ExprPtr& y) {
  return expr_cmp(x, y);
}

// ---------------------------------------------------------------------------
// Re-indexing between alphabets (for comparing separately declared programs)

// The combined alphabet of two programs: they must declare the same set of
// tests (the first program's order is kept); actions and outputs are
// unioned, with the second program's extras appended.
inline Alphabet union_alphabet(const Alphabet& a1, const Alphabet& a2) {
  for (const auto& t : a2.tests)
    if (a1.find_test(t) < 0)
      throw std::invalid_argument("programs declare different tests: '" + t +
                                  "' is missing from the first");
  for (const auto& t : a1.tests)
    if (a2.find_test(t) < 0)
      throw std::invalid_argument("programs declare different tests: '" + t +
                                  "' is missing from the second");
  Alphabet u = a1;
  for (const auto& p : a2.actions)
    if (u.find_action(p) < 0) u.actions.push_back(p);
  for (const auto& v : a2.outputs)
    if (u.find_output(v) < 0) u.outputs.push_back(v);
  u.validate();
  return u;
}

inline TestPtr remap_test(const Alphabet& from, const Alphabet& to,
                          const TestPtr& t) {
  switch (t->k) {
    case TKind::Zero:
    case TKind::One:
      return t;
    case TKind::Var: {
      int j = to.find_test(from.tests[t->var]);
      if (j < 0) throw std::invalid_argument("test missing from alphabet");
      return t_var(j);
    }
    case TKind::Not:
      return t_not(remap_test(from, to, t->a));
    case TKind::And:
      return t_and(remap_test(from, to, t->a), remap_test(from, to, t->b));
    case TKind::Or:
      return t_or(remap_test(from, to, t->a), remap_test(from, to, t->b));
  }
  throw std::logic_error("unreachable test kind");
}

inline ExprPtr remap_expr(const Alphabet& from, const Alphabet& to,
                          const ExprPtr& e) {
  switch (e->k) {
    case EKind::Test:
      return e_test(remap_test(from, to, e->test));
    case EKind::Act: {
      int j = to.find_action(from.actions[e->sym]);
      if (j < 0) throw std::invalid_argument("action missing from alphabet");
      return e_act(j);
    }
    case EKind::Ret: {
      int j = to.find_output(from.outputs[e->sym]);
      if (j < 0) throw std::invalid_argument("output missing from alphabet");
      return e_ret(j);
    }
    case EKind::Gch:
      return e_gch(remap_expr(from, to, e->a), remap_test(from, to, e->test),
                   remap_expr(from, to, e->b));
    case EKind::Pch:
      return e_pch(remap_expr(from, to, e->a), e->prob,
                   remap_expr(from, to, e->b));
    case EKind::Seq:
      return e_seq(remap_expr(from, to, e->a), remap_expr(from, to, e->b));
    case EKind::Gloop:
      return e_gloop(remap_expr(from, to, e->a),
                     remap_test(from, to, e->test));
    case EKind::Ploop:
      return e_ploop(remap_expr(from, to, e->a), e->prob);
    case EKind::Hole:
      return e;
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace probgkat
