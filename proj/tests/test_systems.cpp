// Systems of behavioural equations: term construction and its sort
// restriction, the productivity condition, substitution, reading a system
// off an automaton, printing, solution checking, and the contraction
// property of substitution on the behavioural distance.

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "probgkat/parser.hpp"
#include "probgkat/systems.hpp"
#include "support/gen.hpp"

using namespace probgkat;

namespace {

// Automaton over atoms {~t, t}, actions {p, q}, output v:
//   state 0 at ~t: ½ return v, ½ step q to state 1
//   state 0 at  t: ½ step p to state 0, ½ step q to state 1
//   state 1: accepts surely at both atoms
Automaton two_state_example() {
  Alphabet al;
  al.tests = {"t"};
  al.actions = {"p", "q"};
  al.outputs = {"v"};
  al.validate();
  Automaton aut;
  aut.alphabet = al;
  aut.state_descr = {"x1", "x2"};
  DistBuilder<int> b0a;
  b0a.add(o_ret<int>(0), Rat(1, 2));
  b0a.add(o_step(1, 1), Rat(1, 2));
  DistBuilder<int> b0b;
  b0b.add(o_step(0, 0), Rat(1, 2));
  b0b.add(o_step(1, 1), Rat(1, 2));
  aut.trans.push_back({std::move(b0a).build(), std::move(b0b).build()});
  aut.trans.push_back({dirac(o_accept<int>()), dirac(o_accept<int>())});
  aut.validate();
  return aut;
}

constexpr const char* kSystemText =
    "tests t;\n"
    "actions p, q;\n"
    "outputs v;\n"
    "system s {\n"
    "  x1 = (q . x2 +{1/2} ret v) +[~t] ((p . x1 +{1/2} q . x2) +[t] 0)\n"
    "  x2 = 1 +[~t] (1 +[t] 0)\n"
    "}\n";

constexpr const char* kSolutionText =
    "tests t;\n"
    "actions p, q;\n"
    "outputs v;\n"
    "x1 = (p +[t] ret v)*{1/2} ; q\n"
    "x2 = 1\n";

std::vector<ExprPtr> solution_vector(const SalomaaSystem& sys,
                                     const SolutionMap& sol) {
  std::vector<ExprPtr> h;
  for (const auto& v : sys.vars) {
    int i = sol.find(v);
    REQUIRE(i >= 0);
    h.push_back(sol.exprs[i]);
  }
  return h;
}

}  // namespace

TEST_CASE("probabilistic system terms may not contain guarded choices") {
  Alphabet a = gen::small_alphabet(1, 1, 1);
  SysPtr g = s_gch(s_closed(e_one()), t_var(0), s_closed(e_zero()));
  CHECK_THROWS_AS(s_pch(g, Rat(1, 2), s_closed(e_one())),
                  std::invalid_argument);
  CHECK_THROWS_AS(s_pch(s_closed(e_one()), Rat(1, 2), g),
                  std::invalid_argument);
  // A guarded choice hidden inside a closed leaf is fine: the leaf is opaque.
  SysPtr closed_g = s_closed(e_gch(e_one(), t_var(0), e_zero()));
  CHECK_NOTHROW(s_pch(closed_g, Rat(1, 2), s_closed(e_one())));
  CHECK_THROWS_AS(s_pch(closed_g, Rat(3, 2), s_closed(e_one())),
                  std::invalid_argument);
  CHECK_THROWS_AS(s_prefixed(e_act(0), -1), std::invalid_argument);
}

TEST_CASE("reading the system off the two-state automaton") {
  Automaton aut = two_state_example();
  SalomaaSystem sys = system_of_automaton(aut);
  REQUIRE(sys.vars == std::vector<std::string>{"x0", "x1"});
  REQUIRE(sys.rhs.size() == 2);

  TestPtr not_t = t_not(t_var(0)), tt = t_var(0);
  // x0 = (q.x1 +{1/2} ret v) +[~t] ((p.x0 +{1/2} q.x1) +[t] 0)
  SysPtr want0 = s_gch(
      s_pch(s_prefixed(e_act(1), 1), Rat(1, 2), s_closed(e_ret(0))), not_t,
      s_gch(s_pch(s_prefixed(e_act(0), 0), Rat(1, 2), s_prefixed(e_act(1), 1)),
            tt, s_closed(e_zero())));
  CHECK(systerm_eq(sys.rhs[0], want0));
  // x1 = 1 +[~t] (1 +[t] 0)
  SysPtr want1 = s_gch(s_closed(e_one()), not_t,
                       s_gch(s_closed(e_one()), tt, s_closed(e_zero())));
  CHECK(systerm_eq(sys.rhs[1], want1));
  CHECK(is_salomaa(sys));
}

TEST_CASE("system terms print and parse back unchanged") {
  Automaton aut = two_state_example();
  SalomaaSystem sys = system_of_automaton(aut);
  std::string text =
      "tests t;\nactions p, q;\noutputs v;\nsystem s {\n";
  for (std::size_t i = 0; i < sys.vars.size(); ++i)
    text += "  " + sys.vars[i] + " = " +
            print_systerm(sys.alphabet, sys.vars, sys.rhs[i]) + "\n";
  text += "}\n";
  SalomaaSystem back = parse_system_file(text);
  REQUIRE(back.vars == sys.vars);
  for (std::size_t i = 0; i < sys.rhs.size(); ++i)
    CHECK(systerm_eq(back.rhs[i], sys.rhs[i]));
}

TEST_CASE("the productivity condition inspects prefixes only") {
  Alphabet a = gen::small_alphabet(1, 1, 1);
  SalomaaSystem sys;
  sys.alphabet = a;
  sys.vars = {"x0"};
  sys.rhs = {s_prefixed(e_act(0), 0)};
  CHECK(is_salomaa(sys));

  // A prefix that can terminate breaks the condition...
  sys.rhs = {s_prefixed(e_one(), 0)};
  CHECK_FALSE(is_salomaa(sys));
  // ...even if it terminates only under some atoms.
  sys.rhs = {s_prefixed(e_test(t_var(0)), 0)};
  CHECK_FALSE(is_salomaa(sys));
  // Inside probabilistic/guarded structure the prefixes are still found.
  sys.rhs = {s_pch(s_closed(e_one()), Rat(1, 2), s_prefixed(e_one(), 0))};
  CHECK_FALSE(is_salomaa(sys));
  // Closed components terminating is fine.
  sys.rhs = {s_closed(e_one())};
  CHECK(is_salomaa(sys));
}

TEST_CASE("substitution turns right-hand sides into closed expressions") {
  Alphabet a = gen::small_alphabet(1, 2, 1);
  std::vector<ExprPtr> h = {e_ret(0), e_one()};
  CHECK(expr_eq(substitute(h, s_closed(e_act(0))), e_act(0)));
  CHECK(expr_eq(substitute(h, s_prefixed(e_act(1), 0)),
                e_seq(e_act(1), e_ret(0))));
  SysPtr t = s_gch(s_pch(s_prefixed(e_act(0), 1), Rat(1, 3), s_closed(e_zero())),
                   t_var(0), s_closed(e_one()));
  CHECK(expr_eq(substitute(h, t),
                e_gch(e_pch(e_seq(e_act(0), e_one()), Rat(1, 3), e_zero()),
                      t_var(0), e_one())));
  CHECK_THROWS_AS(substitute({e_one()}, s_prefixed(e_act(0), 3)),
                  std::invalid_argument);
}

TEST_CASE("the induced map substitutes componentwise") {
  Automaton aut = two_state_example();
  SalomaaSystem sys = system_of_automaton(aut);
  std::vector<ExprPtr> h = {e_ret(0), e_one()};
  std::vector<ExprPtr> out = tau_bar(sys, h);
  REQUIRE(out.size() == 2);
  CHECK(expr_eq(out[0], substitute(h, sys.rhs[0])));
  CHECK(expr_eq(out[1], substitute(h, sys.rhs[1])));
  CHECK_THROWS_AS(tau_bar(sys, {e_one()}), std::invalid_argument);
}

TEST_CASE("the bundled loop solution solves the bundled system") {
  SalomaaSystem sys = parse_system_file(kSystemText);
  REQUIRE(is_salomaa(sys));
  SolutionMap sol = parse_solution_file(kSolutionText);
  REQUIRE(sys.alphabet == sol.alphabet);
  std::vector<ExprPtr> h = solution_vector(sys, sol);
  SolutionCheck res = check_solution(sys, h);
  CHECK(res.ok);
  REQUIRE(res.per_var.size() == 2);
  CHECK(res.per_var[0]);
  CHECK(res.per_var[1]);
}

TEST_CASE("a wrong candidate is rejected at its component") {
  SalomaaSystem sys = parse_system_file(kSystemText);
  std::vector<ExprPtr> h = {e_one(), e_one()};  // x1 = 1 does not solve
  SolutionCheck res = check_solution(sys, h);
  CHECK_FALSE(res.ok);
  CHECK_FALSE(res.per_var[0]);
  CHECK(res.per_var[1]);
  CHECK_THROWS_AS(check_solution(sys, {e_one()}), std::invalid_argument);
}

TEST_CASE("the exact solution is the loop read back from the automaton") {
  // The system induced by an expression's automaton is solved by the
  // expressions at its states.
  Alphabet a = gen::small_alphabet(1, 2, 1);
  gen::Rng rng(0x50111u);
  for (int i = 0; i < 20; ++i) {
    ExprPtr e = gen::random_expr(rng, a, 1 + rng.below(6));
    Automaton aut = build_automaton(a, e);
    SalomaaSystem sys = system_of_automaton(aut);
    // Recover the state expressions from the descriptors.
    std::vector<ExprPtr> h;
    for (const auto& d : aut.state_descr)
      h.push_back(parse_expr_text(a, d));
    CHECK(check_solution(sys, h).ok);
  }
}

TEST_CASE("substitution halves the behavioural distance") {
  gen::Rng rng(0x11b5c41u);
  Alphabet a = gen::small_alphabet(1, 2, 1);
  for (int i = 0; i < 20; ++i) {
    int nvars = 1 + static_cast<int>(rng.below(2));
    SalomaaSystem sys = gen::random_salomaa(rng, a, nvars);
    REQUIRE(is_salomaa(sys));
    std::vector<ExprPtr> e, f;
    for (int v = 0; v < nvars; ++v) {
      e.push_back(gen::random_expr(rng, a, 1 + rng.below(4)));
      f.push_back(gen::random_expr(rng, a, 1 + rng.below(4)));
    }
    Rat din(0), dout(0);
    for (int v = 0; v < nvars; ++v)
      din = std::max(din, pseudometric_exprs(a, e[v], f[v]));
    std::vector<ExprPtr> te = tau_bar(sys, e), tf = tau_bar(sys, f);
    for (int v = 0; v < nvars; ++v)
      dout = std::max(dout, pseudometric_exprs(a, te[v], tf[v]));
    CHECK(dout <= din / 2);
  }
}
