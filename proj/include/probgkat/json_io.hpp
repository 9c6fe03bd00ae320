#pragma once

// JSON views of the main data structures. Probabilities are rendered as
// "num/den" strings ("/den" omitted when the denominator is 1) so nothing is
// rounded.

#include <string>

#include <nlohmann/json.hpp>

#include "probgkat/equivalence.hpp"
#include "probgkat/semantics.hpp"
#include "probgkat/sim.hpp"
#include "probgkat/syntax.hpp"

namespace probgkat {

using nlohmann::json;

inline json atoms_to_json(const Alphabet& alph,
                          unsigned max_tests = kDefaultMaxTests) {
  json arr = json::array();
  for (Atom a : enumerate_atoms(alph, max_tests))
    arr.push_back(atom_to_string(alph, a));
  return arr;
}

namespace detail {

template <class T, class TargetFn>
json dist_to_json(const Alphabet& alph, const Dist<T>& d, TargetFn&& target) {
  json arr = json::array();
  for (const auto& [o, p] : d.entries) {
    json entry;
    switch (o.k) {
      case OKind::Accept: entry["kind"] = "accept"; break;
      case OKind::Reject: entry["kind"] = "reject"; break;
      case OKind::Ret:
        entry["kind"] = "return";
        entry["value"] = alph.outputs[o.sym];
        break;
      case OKind::Step:
        entry["kind"] = "step";
        entry["value"] = {{"action", alph.actions[o.sym]},
                          {"target", target(o.target)}};
        break;
    }
    entry["prob"] = rat_to_string(p);
    arr.push_back(entry);
  }
  return arr;
}

}  // namespace detail

inline json dist_expr_to_json(const Alphabet& alph, const Dist<ExprPtr>& d) {
  return detail::dist_to_json(alph, d,
                              [&](const ExprPtr& e) { return print_expr(alph, e); });
}

inline json automaton_to_json(const Automaton& aut) {
  json j;
  j["atoms"] = atoms_to_json(aut.alphabet);
  j["actions"] = aut.alphabet.actions;
  j["outputs"] = aut.alphabet.outputs;
  j["states"] = json::array();
  for (std::size_t i = 0; i < aut.num_states(); ++i)
    j["states"].push_back({{"id", i}, {"descr", aut.state_descr[i]}});
  j["trans"] = json::array();
  for (std::size_t s = 0; s < aut.num_states(); ++s)
    for (std::size_t a = 0; a < aut.trans[s].size(); ++a)
      j["trans"].push_back(
          {{"state", s},
           {"atom", a},
           {"dist", detail::dist_to_json(aut.alphabet, aut.trans[s][a],
                                         [](int t) { return t; })}});
  return j;
}

inline json partition_to_json(const Partition& p) {
  json j;
  j["blocks"] = json::array();
  for (const auto& b : p.blocks) j["blocks"].push_back(b);
  return j;
}

inline json encoded_to_json(const EncodedGraph& g) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    json node = {{"id", n.id},
                 {"sort", n.sort == EncodedGraph::State ? "state"
                          : n.sort == EncodedGraph::Intermediate
                              ? "intermediate"
                              : "action-pair"},
                 {"descr", n.descr}};
    if (n.sort == EncodedGraph::Intermediate) {
      json obs = json::object();
      for (const auto& [key, p] : n.observable) obs[key] = rat_to_string(p);
      node["observable"] = obs;
    }
    j["nodes"].push_back(node);
  }
  j["edges"] = json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}});
  j["counts"] = {{"states", g.num_state_nodes},
                 {"intermediates", g.num_intermediate_nodes},
                 {"pairs", g.num_pair_nodes},
                 {"nodes", g.node_count()},
                 {"edges", g.edge_count()}};
  return j;
}

inline json estimate_to_json(const EstimateResult& res) {
  json j = json::object();
  for (const auto& [key, count] : res.counts)
    j[key] = std::to_string(count) + "/" + std::to_string(res.runs);
  return j;
}

}  // namespace probgkat
