// Command-line front end: parse programs, build automata, decide
// equivalence, compute distances, check proofs/solutions, simulate.
//
// Exit codes: 0 success (or positive verdict), 1 negative verdict
// (not bisimilar / proof rejected / solution invalid), 2 usage, parse or
// I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <probgkat/probgkat.hpp>

namespace pg = probgkat;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pg::Program load_program(const std::string& path) {
  return pg::parse_program(read_file(path));
}

std::string atom_display(const pg::Alphabet& alph, pg::Atom a) {
  std::string s = pg::atom_to_string(alph, a);
  return s.empty() ? "-" : s;
}

void print_outcome_text(std::ostream& os, const pg::Alphabet& alph,
                        const pg::Outcome<pg::ExprPtr>& o) {
  switch (o.k) {
    case pg::OKind::Accept: os << "accept"; break;
    case pg::OKind::Reject: os << "reject"; break;
    case pg::OKind::Ret: os << "return " << alph.outputs[o.sym]; break;
    case pg::OKind::Step:
      os << alph.actions[o.sym] << " -> " << pg::print_expr(alph, o.target);
      break;
  }
}

void print_dist_text(std::ostream& os, const pg::Alphabet& alph,
                     const pg::Dist<pg::ExprPtr>& d) {
  for (const auto& [o, p] : d.entries) {
    os << "  " << pg::rat_to_string(p) << "  ";
    print_outcome_text(os, alph, o);
    os << "\n";
  }
}

void print_automaton_text(std::ostream& os, const pg::Automaton& aut) {
  os << aut.num_states() << " states, " << aut.num_atoms() << " atoms\n";
  for (std::size_t q = 0; q < aut.num_states(); ++q) {
    os << "state " << q << ": " << aut.state_descr[q] << "\n";
    for (std::uint32_t a = 0; a < aut.num_atoms(); ++a) {
      os << "  " << atom_display(aut.alphabet, pg::Atom{a}) << " |";
      for (const auto& [o, p] : aut.trans[q][a].entries) {
        os << "  " << pg::rat_to_string(p) << " ";
        switch (o.k) {
          case pg::OKind::Accept: os << "accept"; break;
          case pg::OKind::Reject: os << "reject"; break;
          case pg::OKind::Ret:
            os << "return " << aut.alphabet.outputs[o.sym];
            break;
          case pg::OKind::Step:
            os << aut.alphabet.actions[o.sym] << " -> s" << o.target;
            break;
        }
      }
      os << "\n";
    }
  }
}

// Two programs compared against each other must agree on tests (so atoms
// coincide); actions and outputs are pooled.
struct LoadedPair {
  pg::Alphabet alph;
  pg::ExprPtr e1, e2;
};

LoadedPair load_pair(const std::string& f1, const std::string& f2) {
  pg::Program p1 = load_program(f1);
  pg::Program p2 = load_program(f2);
  pg::Alphabet u = pg::union_alphabet(p1.alphabet, p2.alphabet);
  return {u, pg::remap_expr(p1.alphabet, u, p1.expr),
          pg::remap_expr(p2.alphabet, u, p2.expr)};
}

bool alphabets_identical(const pg::Alphabet& a, const pg::Alphabet& b) {
  return a.tests == b.tests && a.actions == b.actions &&
         a.outputs == b.outputs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "probgkat: probabilistic guarded Kleene algebra with tests.\n"
      "Parses programs, builds their probabilistic automata, decides\n"
      "bisimulation equivalence, computes the behavioural distance, checks\n"
      "equational proofs and linear-system solutions, and simulates runs."};
  app.require_subcommand(1);
  int rc = 0;

  // ---- atoms -------------------------------------------------------------
  auto* c_atoms = app.add_subcommand(
      "atoms", "List the truth assignments of a program's tests");
  std::string atoms_file;
  bool atoms_json = false;
  c_atoms->add_option("file", atoms_file, "program file")->required();
  c_atoms->add_flag("--json", atoms_json, "emit JSON");
  c_atoms->callback([&] {
    pg::Program p = load_program(atoms_file);
    if (atoms_json) {
      std::cout << pg::atoms_to_json(p.alphabet).dump(2) << "\n";
    } else {
      for (pg::Atom a : pg::enumerate_atoms(p.alphabet))
        std::cout << atom_display(p.alphabet, a) << "\n";
    }
  });

  // ---- derive ------------------------------------------------------------
  auto* c_derive = app.add_subcommand(
      "derive", "Print the one-step behaviour of a program");
  std::string derive_file, derive_atom;
  bool derive_json = false;
  c_derive->add_option("file", derive_file, "program file")->required();
  c_derive->add_option("--atom", derive_atom,
                       "atom as the comma-separated set of true tests "
                       "('-' for all-false); default: every atom");
  bool derive_atom_given = false;
  c_derive->callback([&] {
    derive_atom_given = c_derive->count("--atom") > 0;
    pg::Program p = load_program(derive_file);
    std::vector<pg::Atom> atoms;
    if (derive_atom_given)
      atoms.push_back(pg::atom_from_string(p.alphabet, derive_atom));
    else
      atoms = pg::enumerate_atoms(p.alphabet);
    if (derive_json) {
      pg::json out;
      out["expr"] = pg::print_expr(p.alphabet, p.expr);
      pg::json ders = pg::json::object();
      for (pg::Atom a : atoms)
        ders[atom_display(p.alphabet, a)] = pg::dist_expr_to_json(
            p.alphabet, pg::derivative(p.alphabet, p.expr, a));
      out["derivatives"] = ders;
      std::cout << out.dump(2) << "\n";
    } else {
      for (pg::Atom a : atoms) {
        std::cout << "atom " << atom_display(p.alphabet, a) << ":\n";
        print_dist_text(std::cout, p.alphabet,
                        pg::derivative(p.alphabet, p.expr, a));
      }
    }
  });
  c_derive->add_flag("--json", derive_json, "emit JSON");

  // ---- automaton ---------------------------------------------------------
  auto* c_auto = app.add_subcommand(
      "automaton", "Build the reachable automaton of a program");
  std::string auto_file;
  bool auto_json = false, auto_dot = false;
  c_auto->add_option("file", auto_file, "program file")->required();
  auto* auto_json_flag = c_auto->add_flag("--json", auto_json, "emit JSON");
  c_auto->add_flag("--dot", auto_dot, "emit Graphviz DOT")
      ->excludes(auto_json_flag);
  c_auto->callback([&] {
    pg::Program p = load_program(auto_file);
    pg::Automaton aut = pg::build_automaton(p.alphabet, p.expr);
    if (auto_json)
      std::cout << pg::automaton_to_json(aut).dump(2) << "\n";
    else if (auto_dot)
      std::cout << pg::automaton_to_dot(aut);
    else
      print_automaton_text(std::cout, aut);
  });

  // ---- equiv -------------------------------------------------------------
  auto* c_equiv = app.add_subcommand(
      "equiv", "Decide whether two programs are bisimilar (exit 0/1)");
  std::string equiv_f1, equiv_f2;
  bool equiv_json = false;
  c_equiv->add_option("file1", equiv_f1, "first program")->required();
  c_equiv->add_option("file2", equiv_f2, "second program")->required();
  c_equiv->add_flag("--json", equiv_json, "emit JSON");
  c_equiv->callback([&] {
    LoadedPair lp = load_pair(equiv_f1, equiv_f2);
    pg::BisimResult res = pg::bisim_exprs(lp.alph, lp.e1, lp.e2);
    if (equiv_json) {
      pg::json out;
      out["bisimilar"] = res.bisimilar;
      out["roots"] = {res.root1, res.root2};
      out["states"] = res.merged.state_descr;
      out["partition"] = pg::partition_to_json(res.partition);
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << (res.bisimilar ? "bisimilar" : "not bisimilar") << "\n";
      std::cout << pg::partition_to_json(res.partition).dump() << "\n";
    }
    rc = res.bisimilar ? 0 : 1;
  });

  // ---- metric ------------------------------------------------------------
  auto* c_metric = app.add_subcommand(
      "metric", "Behavioural distance between two programs");
  std::string metric_f1, metric_f2;
  bool metric_json = false;
  c_metric->add_option("file1", metric_f1, "first program")->required();
  c_metric->add_option("file2", metric_f2, "second program")->required();
  c_metric->add_flag("--json", metric_json, "emit JSON");
  c_metric->callback([&] {
    LoadedPair lp = load_pair(metric_f1, metric_f2);
    pg::Rat d = pg::pseudometric_exprs(lp.alph, lp.e1, lp.e2);
    if (metric_json)
      std::cout << pg::json{{"distance", pg::rat_to_string(d)}}.dump(2)
                << "\n";
    else
      std::cout << pg::rat_to_string(d) << "\n";
  });

  // ---- minimize ----------------------------------------------------------
  auto* c_min = app.add_subcommand(
      "minimize", "Collapse a program's automaton to bisimilarity classes");
  std::string min_file;
  bool min_json = false, min_dot = false;
  c_min->add_option("file", min_file, "program file")->required();
  auto* min_json_flag = c_min->add_flag("--json", min_json, "emit JSON");
  c_min->add_flag("--dot", min_dot, "emit Graphviz DOT")
      ->excludes(min_json_flag);
  c_min->callback([&] {
    pg::Program p = load_program(min_file);
    pg::Automaton aut = pg::build_automaton(p.alphabet, p.expr);
    pg::MinimizeResult res = pg::minimize(aut);
    if (min_json) {
      pg::json out;
      out["automaton"] = pg::automaton_to_json(res.automaton);
      out["partition"] = pg::partition_to_json(res.partition);
      std::cout << out.dump(2) << "\n";
    } else if (min_dot) {
      std::cout << pg::automaton_to_dot(res.automaton);
    } else {
      std::cout << res.partition.blocks.size() << " classes of "
                << aut.num_states() << " states\n";
      print_automaton_text(std::cout, res.automaton);
    }
  });

  // ---- expand ------------------------------------------------------------
  auto* c_expand = app.add_subcommand(
      "expand", "Rewrite a program as its one-step unfolding");
  std::string expand_file;
  bool expand_json = false;
  c_expand->add_option("file", expand_file, "program file")->required();
  c_expand->add_flag("--json", expand_json, "emit JSON");
  c_expand->callback([&] {
    pg::Program p = load_program(expand_file);
    std::string text =
        pg::print_expr(p.alphabet, pg::expand(p.alphabet, p.expr));
    if (expand_json)
      std::cout << pg::json{{"expr", text}}.dump(2) << "\n";
    else
      std::cout << text << "\n";
  });

  // ---- encode ------------------------------------------------------------
  auto* c_encode = app.add_subcommand(
      "encode", "Encode a program's automaton as a three-sorted graph");
  std::string encode_file;
  bool encode_json = false;
  c_encode->add_option("file", encode_file, "program file")->required();
  c_encode->add_flag("--json", encode_json, "emit JSON");
  c_encode->callback([&] {
    pg::Program p = load_program(encode_file);
    pg::EncodedGraph g =
        pg::encode_coalgebraic(pg::build_automaton(p.alphabet, p.expr));
    if (encode_json) {
      std::cout << pg::encoded_to_json(g).dump(2) << "\n";
    } else {
      std::cout << "states " << g.num_state_nodes << "\n"
                << "intermediates " << g.num_intermediate_nodes << "\n"
                << "action pairs " << g.num_pair_nodes << "\n"
                << "nodes " << g.node_count() << "\n"
                << "edges " << g.edge_count() << "\n";
    }
  });

  // ---- check-proof -------------------------------------------------------
  auto* c_proof = app.add_subcommand(
      "check-proof", "Verify an equational proof script (exit 0/1)");
  std::string proof_file;
  bool proof_json = false, proof_cross = false;
  c_proof->add_option("file", proof_file, "proof script")->required();
  c_proof->add_flag("--cross-check", proof_cross,
                    "also decide bisimilarity of both sides of every line");
  c_proof->add_flag("--json", proof_json, "emit JSON");
  c_proof->callback([&] {
    pg::ProofScript script = pg::parse_proof_script(read_file(proof_file));
    pg::ProofOptions opts;
    opts.cross_check = proof_cross;
    pg::ProofOutcome out = pg::check_proof(script, opts);
    if (proof_json) {
      pg::json j;
      j["ok"] = out.ok;
      j["lines_checked"] = out.lines_checked;
      if (!out.ok) {
        j["failing_line"] = out.failing_line;
        j["message"] = out.message;
      }
      std::cout << j.dump(2) << "\n";
    } else if (out.ok) {
      std::cout << "verified: " << out.lines_checked << " lines\n";
    } else {
      std::cout << "rejected at line " << out.failing_line << ": "
                << out.message << "\n";
    }
    rc = out.ok ? 0 : 1;
  });

  // ---- check-solution ----------------------------------------------------
  auto* c_sol = app.add_subcommand(
      "check-solution",
      "Check a candidate solution of a linear system (exit 0/1)");
  std::string sol_sys, sol_map;
  bool sol_json = false;
  c_sol->add_option("system", sol_sys, "system file")->required();
  c_sol->add_option("solution", sol_map, "solution file")->required();
  c_sol->add_flag("--json", sol_json, "emit JSON");
  c_sol->callback([&] {
    pg::SalomaaSystem sys = pg::parse_system_file(read_file(sol_sys));
    pg::SolutionMap map = pg::parse_solution_file(read_file(sol_map));
    if (!alphabets_identical(sys.alphabet, map.alphabet))
      throw std::runtime_error(
          "system and solution must declare identical tests, actions and "
          "outputs");
    for (const auto& name : map.names)
      if (sys.find_var(name) < 0)
        throw std::runtime_error("solution assigns '" + name +
                                 "' which is not an indeterminate of the "
                                 "system");
    std::vector<pg::ExprPtr> h;
    for (const auto& var : sys.vars) {
      int i = map.find(var);
      if (i < 0)
        throw std::runtime_error("solution does not assign indeterminate '" +
                                 var + "'");
      h.push_back(map.exprs[i]);
    }
    pg::SolutionCheck res = pg::check_solution(sys, h);
    if (sol_json) {
      pg::json vars = pg::json::object();
      for (std::size_t i = 0; i < sys.vars.size(); ++i)
        vars[sys.vars[i]] = static_cast<bool>(res.per_var[i]);
      std::cout << pg::json{{"ok", res.ok}, {"vars", vars}}.dump(2) << "\n";
    } else {
      for (std::size_t i = 0; i < sys.vars.size(); ++i)
        std::cout << sys.vars[i] << ": " << (res.per_var[i] ? "ok" : "FAIL")
                  << "\n";
      std::cout << (res.ok ? "solution valid" : "solution invalid") << "\n";
    }
    rc = res.ok ? 0 : 1;
  });

  // ---- simulate ----------------------------------------------------------
  auto* c_sim = app.add_subcommand(
      "simulate", "Monte Carlo estimate of a program's outcome frequencies");
  std::string sim_file, sim_policy = "uniform";
  std::uint64_t sim_n = 10000, sim_seed = 0;
  int sim_max_steps = pg::kDefaultMaxSteps;
  bool sim_json = false, sim_trace = false;
  c_sim->add_option("file", sim_file, "program file")->required();
  c_sim->add_option("--n", sim_n, "number of runs (default 10000)");
  c_sim->add_option("--seed", sim_seed, "base seed (default 0)");
  c_sim->add_option("--policy", sim_policy,
                    "atom policy: fixed:<atom> | uniform | cycle:<a>;<b>;... "
                    "(default uniform)");
  c_sim->add_option("--max-steps", sim_max_steps,
                    "steps before a run times out (default 10000)");
  c_sim->add_flag("--trace", sim_trace, "dump every run's trace");
  c_sim->add_flag("--json", sim_json, "emit JSON");
  c_sim->callback([&] {
    pg::Program p = load_program(sim_file);
    pg::AtomPolicy policy = pg::AtomPolicy::parse(p.alphabet, sim_policy);
    pg::EstimateResult res =
        pg::estimate(p.alphabet, p.expr, policy, sim_n, sim_seed,
                     sim_max_steps);
    pg::json runs = pg::json::array();
    if (sim_trace) {
      pg::DerivativeCache cache(p.alphabet);
      for (std::uint64_t i = 0; i < sim_n; ++i) {
        pg::RunResult r = pg::run_once(p.alphabet, p.expr, policy, sim_seed,
                                       i, sim_max_steps, &cache);
        if (sim_json) {
          pg::json steps = pg::json::array();
          for (const auto& [atom, act] : r.trace)
            steps.push_back({{"atom", atom_display(p.alphabet, atom)},
                             {"action", p.alphabet.actions[act]}});
          runs.push_back(
              {{"terminal",
                pg::terminal_key(p.alphabet, r.terminal, r.output)},
               {"trace", steps}});
        } else {
          std::cout << "run " << i << ":";
          for (const auto& [atom, act] : r.trace)
            std::cout << " [" << atom_display(p.alphabet, atom) << "] "
                      << p.alphabet.actions[act];
          std::cout << " -> "
                    << pg::terminal_key(p.alphabet, r.terminal, r.output)
                    << "\n";
        }
      }
    }
    if (sim_json) {
      if (sim_trace) {
        pg::json out;
        out["estimates"] = pg::estimate_to_json(res);
        out["runs"] = runs;
        std::cout << out.dump(2) << "\n";
      } else {
        std::cout << pg::estimate_to_json(res).dump(2) << "\n";
      }
    } else {
      for (const auto& [key, count] : res.counts)
        std::cout << key << " " << count << "/" << sim_n << " (~"
                  << res.frequency(key).convert_to<double>() << ")\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
