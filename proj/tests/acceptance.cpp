// End-to-end acceptance checks. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits nonzero if any criterion fails. All
// numeric tolerances are pinned here as exact rationals or second budgets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <probgkat/probgkat.hpp>

#include "support/gen.hpp"

using namespace probgkat;

namespace {

// -------- harness ---------------------------------------------------------

int g_failures = 0;

void report(int idx, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << idx << ". " << what << "\n";
  if (!ok) ++g_failures;
}

template <class Fn>
void criterion(int idx, const std::string& what, Fn&& fn) {
  bool ok = false;
  std::string label = what;
  try {
    ok = fn(label);
  } catch (const std::exception& e) {
    ok = false;
    label += std::string(" [exception: ") + e.what() + "]";
  }
  report(idx, ok, label);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example_path(const std::string& name) {
  return (std::filesystem::path(PROBGKAT_EXAMPLES_DIR) / name).string();
}

Rat abs_diff(const Rat& a, const Rat& b) { return a > b ? a - b : b - a; }

// -------- fixtures --------------------------------------------------------

const char* kDirectDie = "ret d1 +{1/3} (ret d2 +{1/2} ret d3)";
const char* kCoinDie =
    "((ret d1 +{1/2} ret d2) +{1/2} (ret d3 +{1/2} 1))*[1]";

Alphabet die_alphabet() {
  Alphabet a;
  a.outputs = {"d1", "d2", "d3"};
  a.validate();
  return a;
}

// A linear automaton: at one atom each state flips a fair coin between
// stepping forward and accepting, at the other a biased coin between
// stepping forward and rejecting. Distinct tags keep merged copies apart.
Automaton chain_automaton(const Alphabet& a, int n, const std::string& tag) {
  Automaton aut;
  aut.alphabet = a;
  for (int i = 0; i < n; ++i) {
    aut.state_descr.push_back(tag + std::to_string(i));
    std::vector<Dist<int>> row;
    if (i + 1 < n) {
      row.push_back(convex(Rat(1, 2), dirac(o_step<int>(0, i + 1)),
                           dirac(o_accept<int>())));
      row.push_back(convex(Rat(1, 3), dirac(o_step<int>(1, i + 1)),
                           dirac(o_reject<int>())));
    } else {
      row.push_back(dirac(o_accept<int>()));
      row.push_back(dirac(o_reject<int>()));
    }
    aut.trans.push_back(std::move(row));
  }
  return aut;
}

}  // namespace

int main() {
  // 1. The coin-flipping die and the direct three-way choice are bisimilar,
  //    decided within a one-second budget.
  criterion(1, "coin-flip die equals the direct die", [](std::string& label) {
    Alphabet a = die_alphabet();
    auto t0 = std::chrono::steady_clock::now();
    BisimResult r = bisim_exprs(a, parse_expr_text(a, kCoinDie),
                                parse_expr_text(a, kDirectDie));
    double secs = seconds_since(t0);
    std::ostringstream os;
    os << "coin-flip die equals the direct die (decided in " << secs
       << "s, budget 1s)";
    label = os.str();
    return r.bisimilar && secs < 1.0;
  });

  // 2. The bundled closed-form solution satisfies the bundled linear system.
  criterion(2, "bundled while-loop solution solves its system",
            [](std::string&) {
              SalomaaSystem sys =
                  parse_system_file(read_file(example_path("while_system.sys")));
              SolutionMap map = parse_solution_file(
                  read_file(example_path("while_solution.map")));
              std::vector<ExprPtr> h;
              for (const auto& var : sys.vars) {
                int i = map.find(var);
                if (i < 0) return false;
                h.push_back(map.exprs[i]);
              }
              SolutionCheck res = check_solution(sys, h);
              return res.ok &&
                     std::all_of(res.per_var.begin(), res.per_var.end(),
                                 [](bool b) { return b; });
            });

  // 3. Reachable-state count never exceeds the syntactic size bound
  //    (500 random programs of size <= 40 over two tests).
  criterion(3, "state count stays within the size bound (500 programs)",
            [](std::string&) {
              gen::Rng rng(0xacce9701u);
              Alphabet a = gen::small_alphabet(2, 2, 2);
              for (int i = 0; i < 500; ++i) {
                ExprPtr e = gen::random_expr(
                    rng, a, 1 + static_cast<int>(rng.below(40)));
                Automaton aut = build_automaton(a, e);
                if (Int(aut.num_states()) > size_bound(e)) return false;
              }
              return true;
            });

  // 4. The immediate-termination weight equals the derivative's acceptance
  //    mass (500 random expression/atom pairs, exact).
  criterion(4, "termination weight matches derivative acceptance (500 pairs)",
            [](std::string&) {
              gen::Rng rng(0xacce9702u);
              Alphabet a = gen::small_alphabet(2, 2, 2);
              for (int i = 0; i < 500; ++i) {
                ExprPtr e = gen::random_expr(
                    rng, a, 1 + static_cast<int>(rng.below(12)));
                Atom at{static_cast<std::uint32_t>(rng.below(4))};
                Dist<ExprPtr> d = derivative(a, e, at);
                Rat acc = mass(d, [](const Outcome<ExprPtr>& o) {
                  return o.k == OKind::Accept;
                });
                if (termination(a, e, at) != acc) return false;
              }
              return true;
            });

  // 5. Every program is bisimilar to its one-step unfolding
  //    (200 random programs, exact).
  criterion(5, "programs equal their one-step unfolding (200 programs)",
            [](std::string&) {
              gen::Rng rng(0xacce9703u);
              Alphabet a = gen::small_alphabet(2, 2, 2);
              for (int i = 0; i < 200; ++i) {
                ExprPtr e = gen::random_expr(
                    rng, a, 1 + static_cast<int>(rng.below(10)));
                if (!bisim_exprs(a, expand(a, e), e).bisimilar) return false;
              }
              return true;
            });

  // 6. Every unconditional axiom schema is sound: both sides of 50 random
  //    instances are bisimilar, for each of the 33 schemas.
  criterion(6, "axiom schemas sound on 50 instances each",
            [](std::string& label) {
              gen::Rng rng(0xacce9704u);
              Alphabet a = gen::small_alphabet(1, 2, 1);
              int schemas = 0;
              for (AxiomId id : schematic_axioms()) {
                if (!is_equational(id)) continue;
                ++schemas;
                for (int i = 0; i < 50; ++i) {
                  AxiomInstance inst = gen::random_instance(rng, a, id);
                  if (!bisim_exprs(a, inst.lhs, inst.rhs).bisimilar) {
                    label += " [failed: " + axiom_name(id) + "]";
                    return false;
                  }
                }
              }
              std::ostringstream os;
              os << "all " << schemas
                 << " unconditional axiom schemas sound on 50 instances each";
              label = os.str();
              return schemas == 33;
            });

  // 7. The partition refiner, the fixpoint chain and the flow-based
  //    certifier agree on 200 random automata (<= 8 states, 2 atoms,
  //    2 actions).
  criterion(7, "refiner, fixpoint chain and flow certifier agree (200 automata)",
            [](std::string&) {
              gen::Rng rng(0xacce9705u);
              Alphabet a = gen::small_alphabet(1, 2, 1);
              for (int i = 0; i < 200; ++i) {
                Automaton aut = gen::random_automaton(rng, a, 8);
                PairRelation pairs = partition_to_pairs(decide_bisim(aut));
                auto [fix, steps] = refinement_chain_stabilize(aut);
                (void)steps;
                if (fix != pairs) return false;
                if (!check_bisimulation_flow(aut, pairs)) return false;
              }
              return true;
            });

  // 8. Pseudometric properties: d(x,x)=0, the pinned distances d(p,q)=1 and
  //    d(p;p,p;q)=1/2, the ultrametric inequality on 1000 sampled triples,
  //    and the half-Lipschitz bound under substitution on 100 systems.
  criterion(
      8,
      "pseudometric: identity, pinned values, ultrametric (1000 triples), "
      "half-Lipschitz (100 systems)",
      [](std::string&) {
        Alphabet pq;
        pq.actions = {"p", "q"};
        pq.validate();
        if (pseudometric_exprs(pq, parse_expr_text(pq, "p"),
                               parse_expr_text(pq, "q")) != Rat(1))
          return false;
        if (pseudometric_exprs(pq, parse_expr_text(pq, "p ; p"),
                               parse_expr_text(pq, "p ; q")) != Rat(1, 2))
          return false;

        gen::Rng rng(0xacce9706u);
        Alphabet a = gen::small_alphabet(1, 2, 1);
        for (int round = 0; round < 100; ++round) {
          Automaton aut = gen::random_automaton(rng, a, 6);
          int n = static_cast<int>(aut.num_states());
          for (int t = 0; t < 10; ++t) {
            int x = static_cast<int>(rng.below(n));
            int y = static_cast<int>(rng.below(n));
            int z = static_cast<int>(rng.below(n));
            if (pseudometric(aut, x, x) != 0) return false;
            Rat dxz = pseudometric(aut, x, z);
            Rat dxy = pseudometric(aut, x, y);
            Rat dyz = pseudometric(aut, y, z);
            if (dxz > std::max(dxy, dyz)) return false;
          }
        }

        for (int i = 0; i < 100; ++i) {
          int nvars = 1 + static_cast<int>(rng.below(2));
          SalomaaSystem sys = gen::random_salomaa(rng, a, nvars);
          std::vector<ExprPtr> e, f;
          for (int v = 0; v < nvars; ++v) {
            e.push_back(
                gen::random_expr(rng, a, 1 + static_cast<int>(rng.below(4))));
            f.push_back(
                gen::random_expr(rng, a, 1 + static_cast<int>(rng.below(4))));
          }
          Rat din(0), dout(0);
          for (int v = 0; v < nvars; ++v)
            din = std::max(din, pseudometric_exprs(a, e[v], f[v]));
          std::vector<ExprPtr> te = tau_bar(sys, e), tf = tau_bar(sys, f);
          for (int v = 0; v < nvars; ++v)
            dout = std::max(dout, pseudometric_exprs(a, te[v], tf[v]));
          if (dout > din / 2) return false;
        }
        return true;
      });

  // 9. Feasibility of the decision procedure: bisimilarity on merged chain
  //    automata totalling 300 states finishes well within 30 seconds, and
  //    the measured growth over {50,100,200,300} states is sub-quartic.
  //    Sub-second absolute times are accepted as trivially feasible, since
  //    there the exponent estimate is dominated by timer noise.
  criterion(9, "merged-automaton decision scales", [](std::string& label) {
    Alphabet a;
    a.tests = {"t"};
    a.actions = {"a", "b"};
    a.validate();
    std::vector<int> sizes = {50, 100, 200, 300};
    std::vector<double> times;
    bool agreed = true;
    for (int n : sizes) {
      Automaton c1 = chain_automaton(a, n / 2, "l");
      Automaton c2 = chain_automaton(a, n / 2, "r");
      auto t0 = std::chrono::steady_clock::now();
      MergeResult m = merge_automata(c1, c2);
      Partition part = decide_bisim(m.automaton);
      times.push_back(seconds_since(t0));
      // Sanity: the two identical chains must come out bisimilar.
      agreed = agreed && part.same_block(0, m.map2[0]);
    }
    double t_min = std::max(times.front(), 1e-4);
    double t_max = std::max(times.back(), 1e-4);
    double exponent = std::log(t_max / t_min) / std::log(6.0);
    std::ostringstream os;
    os << "merged-automaton decision scales:";
    for (std::size_t i = 0; i < sizes.size(); ++i)
      os << " " << sizes[i] << ":" << times[i] << "s";
    os << " (exponent ~" << exponent << ", budget 30s)";
    label = os.str();
    bool subquartic = times.back() < 2.0 || exponent < 4.0;
    return agreed && times.back() < 30.0 && subquartic;
  });

  // 10. Monte-Carlo estimates: 100000 runs of each die program put every
  //     face within 1/100 of 1/3 (exact rational comparison); the loop
  //     version times out with frequency below 1/1000 at 200 steps.
  criterion(10, "die estimates within 1/100 of 1/3 over 100000 runs",
            [](std::string&) {
              Alphabet a = die_alphabet();
              const Rat third(1, 3), tol(1, 100);
              AtomPolicy pol = AtomPolicy::uniform();
              EstimateResult direct = estimate(
                  a, parse_expr_text(a, kDirectDie), pol, 100000, 20240817);
              EstimateResult loop =
                  estimate(a, parse_expr_text(a, kCoinDie), pol, 100000,
                           20240817, 200);
              for (const char* face :
                   {"returned:d1", "returned:d2", "returned:d3"}) {
                if (abs_diff(direct.frequency(face), third) > tol) return false;
                if (abs_diff(loop.frequency(face), third) > tol) return false;
              }
              return loop.frequency("timeout") < Rat(1, 1000);
            });

  // 11. The bundled equational proof verifies, and corrupting any single
  //     line's justification is rejected at exactly that line.
  criterion(11, "bundled proof verifies; every mutation rejected",
            [](std::string& label) {
              ProofScript script = parse_proof_script(
                  read_file(example_path("die_equivalence.proof")));
              ProofOutcome clean = check_proof(script);
              if (!clean.ok) return false;
              for (std::size_t i = 0; i < script.lines.size(); ++i) {
                ProofScript m = script;
                Justification mut;
                if (script.lines[i].just.kind == Justification::Kind::Refl ||
                    expr_eq(script.lines[i].lhs, script.lines[i].rhs)) {
                  // A refl step would survive replacement by refl; cite line
                  // 1 instead, which these sides cannot reverse.
                  mut.kind = Justification::Kind::Sym;
                  mut.refs = {1};
                } else {
                  mut.kind = Justification::Kind::Refl;
                }
                m.lines[i].just = mut;
                ProofOutcome out = check_proof(m);
                if (out.ok || out.failing_line != script.lines[i].number)
                  return false;
              }
              std::ostringstream os;
              os << "bundled proof verifies (" << clean.lines_checked
                 << " lines); all " << script.lines.size()
                 << " justification mutations rejected at their line";
              label = os.str();
              return true;
            });

  if (g_failures != 0)
    std::cout << g_failures << " criterion(s) failed\n";
  return g_failures == 0 ? 0 : 1;
}
