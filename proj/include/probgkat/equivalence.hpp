#pragma once

// Deciding and certifying behavioural equivalence:
//  - decide_bisim: greatest bisimulation by signature-based partition
//    refinement;
//  - phi_step / refinement_chain: the relation functional applied to
//    arbitrary relations, via per-pair max-flow checks (an independent route,
//    cross-checked against decide_bisim in the tests);
//  - check_bisimulation_flow: certifies a claimed bisimulation;
//  - pseudometric: behavioural distance 2^-n from the refinement chain;
//  - encode_coalgebraic: the three-sort labelled graph used to transfer
//    partition-refinement complexity bounds;
//  - minimize: quotient by the greatest bisimulation.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "probgkat/semantics.hpp"

namespace probgkat {

// ---------------------------------------------------------------------------
// Partitions and pair relations

struct Partition {
  // Blocks ordered by least member; ids inside each block ascending.
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of;

  static Partition from_blocks(std::vector<std::vector<int>> blocks,
                               std::size_t n) {
    Partition p;
    p.blocks = std::move(blocks);
    for (auto& b : p.blocks) std::sort(b.begin(), b.end());
    std::sort(p.blocks.begin(), p.blocks.end(),
              [](const auto& x, const auto& y) { return x[0] < y[0]; });
    p.block_of.assign(n, -1);
    for (std::size_t i = 0; i < p.blocks.size(); ++i)
      for (int s : p.blocks[i]) p.block_of[s] = static_cast<int>(i);
    for (int b : p.block_of)
      if (b < 0) throw std::logic_error("partition does not cover all states");
    return p;
  }

  bool same_block(int x, int y) const { return block_of[x] == block_of[y]; }
  bool operator==(const Partition& o) const { return blocks == o.blocks; }
};

using PairRelation = std::set<std::pair<int, int>>;

inline PairRelation partition_to_pairs(const Partition& p) {
  PairRelation r;
  for (const auto& block : p.blocks)
    for (int x : block)
      for (int y : block) r.emplace(x, y);
  return r;
}

inline PairRelation full_relation(std::size_t n) {
  PairRelation r;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      r.emplace(static_cast<int>(x), static_cast<int>(y));
  return r;
}

// ---------------------------------------------------------------------------
// Greatest bisimulation by partition refinement
//
// A state's signature at a partition consists, per atom, of its output
// probabilities (accept, reject, each return value) together with its total
// mass into each (action, block) pair. States are regrouped by identical
// signatures until the partition stops changing.

namespace detail {

// One signature row: (outcome tag, symbol, block, probability) tuples.
using SigAtom = std::vector<std::tuple<int, int, int, Rat>>;
using Sig = std::vector<SigAtom>;

inline Sig state_signature(const Automaton& aut, int state,
                           const std::vector<int>& block_of) {
  Sig sig;
  sig.reserve(aut.trans[state].size());
  for (const auto& d : aut.trans[state]) {
    SigAtom row;
    std::map<std::pair<int, int>, Rat> step_mass;
    for (const auto& [o, p] : d.entries) {
      if (o.k == OKind::Step)
        step_mass[{o.sym, block_of[o.target]}] += p;
      else
        row.emplace_back(static_cast<int>(o.k), o.sym, -1, p);
    }
    for (const auto& [key, m] : step_mass)
      row.emplace_back(static_cast<int>(OKind::Step), key.first, key.second, m);
    sig.push_back(std::move(row));
  }
  return sig;
}

}  // namespace detail

inline Partition decide_bisim(const Automaton& aut) {
  std::size_t n = aut.num_states();
  if (n == 0) return Partition{};
  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  Partition part = Partition::from_blocks({all}, n);
  while (true) {
    std::map<detail::Sig, std::vector<int>> groups;
    for (std::size_t s = 0; s < n; ++s)
      groups[detail::state_signature(aut, static_cast<int>(s), part.block_of)]
          .push_back(static_cast<int>(s));
    std::vector<std::vector<int>> blocks;
    blocks.reserve(groups.size());
    for (auto& [sig, members] : groups) blocks.push_back(std::move(members));
    Partition next = Partition::from_blocks(std::move(blocks), n);
    if (next == part) return part;
    part = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Flow-based checking of arbitrary relations

// Max flow with exact rational capacities (augmenting shortest paths).
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : adj_(nodes) {}

  void add_edge(int from, int to, const Rat& cap) {
    adj_[from].push_back({to, cap, static_cast<int>(adj_[to].size())});
    adj_[to].push_back({from, Rat(0), static_cast<int>(adj_[from].size()) - 1});
  }

  Rat max_flow(int s, int t) {
    Rat total(0);
    while (true) {
      // BFS for a shortest augmenting path in the residual graph.
      std::vector<std::pair<int, int>> parent(adj_.size(), {-1, -1});
      std::vector<int> queue{s};
      parent[s] = {s, -1};
      for (std::size_t qi = 0; qi < queue.size() && parent[t].first < 0; ++qi) {
        int u = queue[qi];
        for (std::size_t ei = 0; ei < adj_[u].size(); ++ei) {
          const Edge& e = adj_[u][ei];
          if (e.cap > 0 && parent[e.to].first < 0) {
            parent[e.to] = {u, static_cast<int>(ei)};
            queue.push_back(e.to);
          }
        }
      }
      if (parent[t].first < 0) return total;
      Rat bottleneck(-1);
      for (int v = t; v != s;) {
        auto [u, ei] = parent[v];
        const Rat& c = adj_[u][ei].cap;
        if (bottleneck < 0 || c < bottleneck) bottleneck = c;
        v = u;
      }
      for (int v = t; v != s;) {
        auto [u, ei] = parent[v];
        Edge& e = adj_[u][ei];
        e.cap -= bottleneck;
        adj_[e.to][e.rev].cap += bottleneck;
        v = u;
      }
      total += bottleneck;
    }
  }

 private:
  struct Edge {
    int to;
    Rat cap;
    int rev;  // index of the reverse edge in adj_[to]
  };
  std::vector<std::vector<Edge>> adj_;
};

namespace detail {

// Per-atom output probabilities must agree exactly.
inline bool outputs_agree(const Automaton& aut, int x, int y) {
  for (std::size_t a = 0; a < aut.trans[x].size(); ++a) {
    const Dist<int>&dx = aut.trans[x][a], &dy = aut.trans[y][a];
    auto non_step = [](const Dist<int>& d) {
      std::vector<std::pair<std::pair<int, int>, Rat>> v;
      for (const auto& [o, p] : d.entries)
        if (o.k != OKind::Step)
          v.push_back({{static_cast<int>(o.k), o.sym}, p});
      return v;
    };
    if (non_step(dx) != non_step(dy)) return false;
  }
  return true;
}

// The matching condition for one pair, atom and action: in the bipartite
// network (source -> x-successors -> related y-successors -> sink) the max
// flow must saturate both the source and the sink side. Related-successor
// edges get a sentinel capacity exceeding every possible flow value.
inline bool step_masses_match(const Automaton& aut, int x, int y, int atom,
                              int action, const PairRelation& r) {
  std::vector<std::pair<int, Rat>> left, right;
  for (const auto& [o, p] : aut.trans[x][atom].entries)
    if (o.k == OKind::Step && o.sym == action) left.push_back({o.target, p});
  for (const auto& [o, p] : aut.trans[y][atom].entries)
    if (o.k == OKind::Step && o.sym == action) right.push_back({o.target, p});
  Rat left_total(0), right_total(0);
  for (const auto& [s, p] : left) left_total += p;
  for (const auto& [s, p] : right) right_total += p;
  if (left_total != right_total) return false;
  if (left_total == 0) return true;
  Rat sentinel = left_total + right_total + 1;
  int ln = static_cast<int>(left.size()), rn = static_cast<int>(right.size());
  FlowNetwork net(ln + rn + 2);
  int source = ln + rn, sink = ln + rn + 1;
  for (int i = 0; i < ln; ++i) net.add_edge(source, i, left[i].second);
  for (int j = 0; j < rn; ++j) net.add_edge(ln + j, sink, right[j].second);
  for (int i = 0; i < ln; ++i)
    for (int j = 0; j < rn; ++j)
      if (r.count({left[i].first, right[j].first}))
        net.add_edge(i, ln + j, sentinel);
  return net.max_flow(source, sink) == left_total;
}

inline bool pair_in_phi(const Automaton& aut, int x, int y,
                        const PairRelation& r) {
  if (!outputs_agree(aut, x, y)) return false;
  for (std::size_t a = 0; a < aut.trans[x].size(); ++a)
    for (std::size_t p = 0; p < aut.alphabet.actions.size(); ++p)
      if (!step_masses_match(aut, x, y, static_cast<int>(a),
                             static_cast<int>(p), r))
        return false;
  return true;
}

}  // namespace detail

// One application of the relation functional: all pairs whose outputs agree
// and whose step masses match through r.
inline PairRelation phi_step(const Automaton& aut, const PairRelation& r) {
  PairRelation out;
  std::size_t n = aut.num_states();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (detail::pair_in_phi(aut, static_cast<int>(x), static_cast<int>(y), r))
        out.emplace(static_cast<int>(x), static_cast<int>(y));
  return out;
}

// r is a bisimulation iff it is contained in phi(r); checked pair by pair so
// a violation is local.
inline bool check_bisimulation_flow(const Automaton& aut,
                                    const PairRelation& r) {
  for (const auto& [x, y] : r)
    if (!detail::pair_in_phi(aut, x, y, r)) return false;
  return true;
}

// The i-th stage of the refinement chain: stage 0 relates everything, each
// stage applies the functional once.
inline PairRelation refinement_chain(const Automaton& aut, unsigned i) {
  PairRelation r = full_relation(aut.num_states());
  for (unsigned k = 0; k < i; ++k) r = phi_step(aut, r);
  return r;
}

// Applies the functional until the relation stops changing and returns the
// fixpoint (the greatest bisimulation) and the number of applications.
inline std::pair<PairRelation, unsigned> refinement_chain_stabilize(
    const Automaton& aut) {
  PairRelation r = full_relation(aut.num_states());
  unsigned steps = 0;
  while (true) {
    PairRelation next = phi_step(aut, r);
    if (next == r) return {r, steps};
    r = std::move(next);
    ++steps;
  }
}

// ---------------------------------------------------------------------------
// Behavioural pseudometric
//
// d(x,y) = 0 when x and y are bisimilar, otherwise 2^-n where n is the last
// chain stage that still relates them (stage 0 relates everything, so n >= 0
// and the distance is at most 1).

inline Rat pseudometric(const Automaton& aut, int x, int y) {
  PairRelation r = full_relation(aut.num_states());
  unsigned n = 0;
  while (true) {
    PairRelation next = phi_step(aut, r);
    if (!next.count({x, y})) {
      Rat d(1);
      for (unsigned k = 0; k < n; ++k) d /= 2;
      return d;
    }
    if (next == r) return Rat(0);
    r = std::move(next);
    ++n;
  }
}

// ---------------------------------------------------------------------------
// Expression-level conveniences

struct BisimResult {
  bool bisimilar;
  Automaton merged;
  int root1, root2;
  Partition partition;
};

inline BisimResult bisim_exprs(const Alphabet& alph, const ExprPtr& e,
                               const ExprPtr& f,
                               unsigned max_tests = kDefaultMaxTests) {
  Automaton a1 = build_automaton(alph, e, max_tests);
  Automaton a2 = build_automaton(alph, f, max_tests);
  MergeResult m = merge_automata(a1, a2);
  BisimResult res{false, std::move(m.automaton), 0, m.map2[0], {}};
  res.partition = decide_bisim(res.merged);
  res.bisimilar = res.partition.same_block(res.root1, res.root2);
  return res;
}

inline Rat pseudometric_exprs(const Alphabet& alph, const ExprPtr& e,
                              const ExprPtr& f,
                              unsigned max_tests = kDefaultMaxTests) {
  Automaton a1 = build_automaton(alph, e, max_tests);
  Automaton a2 = build_automaton(alph, f, max_tests);
  MergeResult m = merge_automata(a1, a2);
  return pseudometric(m.automaton, 0, m.map2[0]);
}

// ---------------------------------------------------------------------------
// Quotient (minimal) automaton

struct MinimizeResult {
  Automaton automaton;  // one state per bisimilarity class
  Partition partition;  // classes of the input automaton
};

inline MinimizeResult minimize(const Automaton& aut) {
  MinimizeResult res;
  res.partition = decide_bisim(aut);
  res.automaton.alphabet = aut.alphabet;
  const auto& blocks = res.partition.blocks;
  for (const auto& block : blocks) {
    int rep = block[0];
    res.automaton.state_descr.push_back(aut.state_descr[rep]);
    std::vector<Dist<int>> row;
    for (const auto& d : aut.trans[rep])
      row.push_back(map_targets<int>(
          d, [&](int t) { return res.partition.block_of[t]; }));
    // Every member of the block must induce the same quotient row; this is
    // guaranteed by the fixpoint and re-checked here as a sanity condition.
    for (std::size_t mi = 1; mi < block.size(); ++mi) {
      std::vector<Dist<int>> other;
      for (const auto& d : aut.trans[block[mi]])
        other.push_back(map_targets<int>(
            d, [&](int t) { return res.partition.block_of[t]; }));
      if (!(other == row))
        throw std::logic_error("minimize: inconsistent block transitions");
    }
    res.automaton.trans.push_back(std::move(row));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Coalgebraic encoding
//
// The three-sort labelled graph: state nodes, one node per distinct
// transition distribution, and one node per (action, state) pair. State
// nodes point to their per-atom distribution node (labelled by the atom),
// distribution nodes point to (action, state) nodes with positive mass
// (labelled by the probability), pair nodes point to their state (labelled
// by the action). Distribution nodes observe their accept/reject/return
// probabilities; other nodes observe nothing.

struct EncodedGraph {
  enum Sort { State = 0, Intermediate = 1, ActionPair = 2 };
  struct Node {
    int id;
    Sort sort;
    std::string descr;
    // Observable output probabilities ("accept"/"reject"/"return:v" -> prob),
    // present only on intermediate nodes.
    std::vector<std::pair<std::string, Rat>> observable;
  };
  struct Edge {
    int from, to;
    std::string label;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::size_t num_state_nodes = 0, num_intermediate_nodes = 0,
              num_pair_nodes = 0;
  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

inline EncodedGraph encode_coalgebraic(const Automaton& aut) {
  EncodedGraph g;
  std::size_t nq = aut.num_states();
  std::size_t nact = aut.alphabet.actions.size();
  // State nodes first, ids 0..|Q|-1.
  for (std::size_t q = 0; q < nq; ++q)
    g.nodes.push_back({static_cast<int>(q), EncodedGraph::State,
                       aut.state_descr[q],
                       {}});
  // Distribution nodes, deduplicated across all (state, atom) pairs in
  // scanning order.
  std::vector<const Dist<int>*> dists;
  std::vector<std::vector<int>> dist_node(nq,
                                          std::vector<int>(aut.num_atoms()));
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t a = 0; a < aut.num_atoms(); ++a) {
      const Dist<int>& d = aut.trans[q][a];
      int found = -1;
      for (std::size_t i = 0; i < dists.size(); ++i)
        if (*dists[i] == d) {
          found = static_cast<int>(i);
          break;
        }
      if (found < 0) {
        found = static_cast<int>(dists.size());
        dists.push_back(&d);
      }
      dist_node[q][a] = static_cast<int>(nq) + found;
    }
  for (std::size_t i = 0; i < dists.size(); ++i) {
    EncodedGraph::Node node{static_cast<int>(nq + i),
                            EncodedGraph::Intermediate,
                            "d" + std::to_string(i),
                            {}};
    for (const auto& [o, p] : dists[i]->entries) {
      if (o.k == OKind::Accept) node.observable.push_back({"accept", p});
      if (o.k == OKind::Reject) node.observable.push_back({"reject", p});
      if (o.k == OKind::Ret)
        node.observable.push_back(
            {"return:" + aut.alphabet.outputs[o.sym], p});
    }
    g.nodes.push_back(std::move(node));
  }
  // One node per (action, state) pair, action-major.
  int pair_base = static_cast<int>(nq + dists.size());
  auto pair_node = [&](int action, int state) {
    return pair_base + action * static_cast<int>(nq) + state;
  };
  for (std::size_t p = 0; p < nact; ++p)
    for (std::size_t q = 0; q < nq; ++q)
      g.nodes.push_back({pair_node(static_cast<int>(p), static_cast<int>(q)),
                         EncodedGraph::ActionPair,
                         "(" + aut.alphabet.actions[p] + "," +
                             std::to_string(q) + ")",
                         {}});
  // Edges.
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t a = 0; a < aut.num_atoms(); ++a) {
      std::string atom = atom_to_string(aut.alphabet, Atom{std::uint32_t(a)});
      g.edges.push_back({static_cast<int>(q), dist_node[q][a],
                         atom.empty() ? "-" : atom});
    }
  for (std::size_t i = 0; i < dists.size(); ++i)
    for (const auto& [o, p] : dists[i]->entries)
      if (o.k == OKind::Step)
        g.edges.push_back({static_cast<int>(nq + i),
                           pair_node(o.sym, o.target), rat_to_string(p)});
  for (std::size_t p = 0; p < nact; ++p)
    for (std::size_t q = 0; q < nq; ++q)
      g.edges.push_back({pair_node(static_cast<int>(p), static_cast<int>(q)),
                         static_cast<int>(q), aut.alphabet.actions[p]});
  g.num_state_nodes = nq;
  g.num_intermediate_nodes = dists.size();
  g.num_pair_nodes = nact * nq;
  return g;
}

}  // namespace probgkat
