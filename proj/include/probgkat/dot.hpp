#pragma once

// Graphviz rendering of automata, following the usual drawing conventions:
// states are circles; each distinct per-state distribution becomes a small
// point reached by solid atom-labelled arrows; probabilistic branches leave
// the point dashed, labelled "action | prob" for steps and just "prob" for
// terminal outcomes (drawn with a double arrowhead into ✓, ✗ or an output).

#include <map>
#include <sstream>
#include <string>

#include "probgkat/semantics.hpp"

namespace probgkat {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string automaton_to_dot(const Automaton& aut) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=LR;\n  node [fontsize=11];\n";
  for (std::size_t s = 0; s < aut.num_states(); ++s)
    os << "  s" << s << " [shape=circle, label=\""
       << detail::dot_escape(aut.state_descr[s]) << "\"];\n";
  bool used_acc = false, used_rej = false;
  std::map<int, bool> used_out;
  int point_id = 0;
  for (std::size_t s = 0; s < aut.num_states(); ++s) {
    // Atoms with the same behaviour share one branch point.
    std::map<int, std::vector<std::size_t>> by_dist;  // point -> atoms
    std::vector<const Dist<int>*> dists;
    for (std::size_t a = 0; a < aut.trans[s].size(); ++a) {
      int found = -1;
      for (std::size_t i = 0; i < dists.size(); ++i)
        if (*dists[i] == aut.trans[s][a]) found = static_cast<int>(i);
      if (found < 0) {
        found = static_cast<int>(dists.size());
        dists.push_back(&aut.trans[s][a]);
      }
      by_dist[found].push_back(a);
    }
    for (const auto& [di, atoms] : by_dist) {
      std::string pname = "p" + std::to_string(point_id++);
      os << "  " << pname << " [shape=point, width=0.06];\n";
      for (std::size_t a : atoms) {
        std::string label = atom_to_string(aut.alphabet, Atom{std::uint32_t(a)});
        os << "  s" << s << " -> " << pname << " [label=\""
           << detail::dot_escape(label.empty() ? "-" : label) << "\"];\n";
      }
      for (const auto& [o, p] : dists[di]->entries) {
        switch (o.k) {
          case OKind::Step:
            os << "  " << pname << " -> s" << o.target
               << " [style=dashed, label=\""
               << detail::dot_escape(aut.alphabet.actions[o.sym]) << " | "
               << rat_to_string(p) << "\"];\n";
            break;
          case OKind::Accept:
            used_acc = true;
            os << "  " << pname << " -> acc [style=dashed, "
               << "arrowhead=normalnormal, label=\"" << rat_to_string(p)
               << "\"];\n";
            break;
          case OKind::Reject:
            used_rej = true;
            os << "  " << pname << " -> rej [style=dashed, "
               << "arrowhead=normalnormal, label=\"" << rat_to_string(p)
               << "\"];\n";
            break;
          case OKind::Ret:
            used_out[o.sym] = true;
            os << "  " << pname << " -> out" << o.sym << " [style=dashed, "
               << "arrowhead=normalnormal, label=\"" << rat_to_string(p)
               << "\"];\n";
            break;
        }
      }
    }
  }
  if (used_acc) os << "  acc [shape=none, label=\"✓\"];\n";
  if (used_rej) os << "  rej [shape=none, label=\"✗\"];\n";
  for (const auto& [sym, used] : used_out)
    if (used)
      os << "  out" << sym << " [shape=none, label=\""
         << detail::dot_escape(aut.alphabet.outputs[sym]) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace probgkat
