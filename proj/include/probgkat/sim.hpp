#pragma once

// Monte-Carlo execution. Sampling is exact: every branch decision compares a
// 64-bit draw against rational thresholds in integer arithmetic, so run
// results are a deterministic function of (seed, run index) and frequencies
// are reported as exact counts.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "probgkat/semantics.hpp"

namespace probgkat {

// splitmix64; each run gets its own stream offset by a golden-ratio stride.
class RunRng {
 public:
  RunRng(std::uint64_t seed, std::uint64_t run_index)
      : state_(seed + 0x9E3779B97F4A7C15ull * run_index) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Picks the first outcome whose cumulative probability exceeds u/2^64; the
// comparison u < cum·2^64 is evaluated exactly as u·den < num·2^64.
template <class T>
const Outcome<T>& sample_outcome(const Dist<T>& d, std::uint64_t u) {
  Int u_int(u);
  Rat cum(0);
  for (const auto& [o, p] : d.entries) {
    cum += p;
    if (u_int * denominator(cum) < numerator(cum) << 64) return o;
  }
  // cum is exactly 1 here, so u < 2^64 always selects an entry above.
  throw std::logic_error("sample_outcome: distribution mass below 1");
}

// How the ambient atom is chosen at each step.
struct AtomPolicy {
  enum class Kind { Fixed, Uniform, Cycle };
  Kind kind = Kind::Fixed;
  Atom fixed{};
  std::vector<Atom> cycle;

  static AtomPolicy fixed_atom(Atom a) { return {Kind::Fixed, a, {}}; }
  static AtomPolicy uniform() { return {Kind::Uniform, Atom{}, {}}; }
  static AtomPolicy cycle_of(std::vector<Atom> atoms) {
    if (atoms.empty())
      throw std::invalid_argument("cycle policy needs at least one atom");
    return {Kind::Cycle, Atom{}, std::move(atoms)};
  }

  // "fixed:<atom>", "uniform" or "cycle:<atom>;<atom>;..." where an atom is
  // the comma-separated set of true tests ("" or "-" for all-false).
  static AtomPolicy parse(const Alphabet& alph, const std::string& text) {
    if (text == "uniform") return uniform();
    if (text.rfind("fixed:", 0) == 0)
      return fixed_atom(atom_from_string(alph, text.substr(6)));
    if (text.rfind("cycle:", 0) == 0) {
      std::vector<Atom> atoms;
      std::string rest = text.substr(6);
      std::size_t pos = 0;
      while (true) {
        std::size_t semi = rest.find(';', pos);
        atoms.push_back(atom_from_string(
            alph, rest.substr(pos, semi == std::string::npos ? semi
                                                             : semi - pos)));
        if (semi == std::string::npos) break;
        pos = semi + 1;
      }
      return cycle_of(std::move(atoms));
    }
    throw std::invalid_argument(
        "bad atom policy '" + text +
        "' (expected fixed:<atom>, uniform or cycle:<a>;<b>;...)");
  }

  // The atom count is a power of two, so masking low bits of the draw is
  // exactly uniform.
  Atom pick(const Alphabet& alph, int step, RunRng& rng) const {
    switch (kind) {
      case Kind::Fixed:
        return fixed;
      case Kind::Uniform: {
        if (alph.tests.empty()) return Atom{0};
        std::uint32_t mask = (std::uint32_t{1} << alph.tests.size()) - 1;
        return Atom{static_cast<std::uint32_t>(rng.next()) & mask};
      }
      case Kind::Cycle:
        return cycle[step % cycle.size()];
    }
    return Atom{0};
  }
};

enum class Terminal { Accepted, Rejected, Returned, Timeout };

inline std::string terminal_key(const Alphabet& alph, Terminal t,
                                int output = -1) {
  switch (t) {
    case Terminal::Accepted: return "accepted";
    case Terminal::Rejected: return "rejected";
    case Terminal::Timeout: return "timeout";
    case Terminal::Returned: return "returned:" + alph.outputs.at(output);
  }
  return "?";
}

struct RunResult {
  Terminal terminal = Terminal::Timeout;
  int output = -1;                             // Returned only
  std::vector<std::pair<Atom, int>> trace;     // (atom, action) per step
};

inline constexpr int kDefaultMaxSteps = 10000;

// Memoises derivatives across runs; states are interned structurally.
class DerivativeCache {
 public:
  explicit DerivativeCache(const Alphabet& alph) : alph_(alph) {}

  const Dist<ExprPtr>& get(const ExprPtr& e, Atom a) {
    int id = table_.intern(e);
    if (static_cast<std::size_t>(id) >= rows_.size()) rows_.resize(id + 1);
    auto& row = rows_[id];
    auto it = row.find(a.idx);
    if (it == row.end())
      it = row.emplace(a.idx, derivative(alph_, e, a)).first;
    return it->second;
  }

 private:
  const Alphabet& alph_;
  StateTable table_;
  std::vector<std::unordered_map<std::uint32_t, Dist<ExprPtr>>> rows_;
};

inline RunResult run_once(const Alphabet& alph, const ExprPtr& e,
                          const AtomPolicy& policy, std::uint64_t seed,
                          std::uint64_t run_index = 0,
                          int max_steps = kDefaultMaxSteps,
                          DerivativeCache* cache = nullptr) {
  RunRng rng(seed, run_index);
  RunResult res;
  ExprPtr current = e;
  for (int step = 0; step < max_steps; ++step) {
    Atom a = policy.pick(alph, step, rng);
    Dist<ExprPtr> local;
    const Dist<ExprPtr>* d;
    if (cache) {
      d = &cache->get(current, a);
    } else {
      local = derivative(alph, current, a);
      d = &local;
    }
    const Outcome<ExprPtr>& o = sample_outcome(*d, rng.next());
    switch (o.k) {
      case OKind::Accept:
        res.terminal = Terminal::Accepted;
        return res;
      case OKind::Reject:
        res.terminal = Terminal::Rejected;
        return res;
      case OKind::Ret:
        res.terminal = Terminal::Returned;
        res.output = o.sym;
        return res;
      case OKind::Step:
        res.trace.emplace_back(a, o.sym);
        current = o.target;
        break;
    }
  }
  res.terminal = Terminal::Timeout;
  return res;
}

struct EstimateResult {
  std::uint64_t runs = 0;
  // terminal key -> count; includes every category (and declared output),
  // so zero frequencies are reported explicitly.
  std::map<std::string, std::uint64_t> counts;

  Rat frequency(const std::string& key) const {
    auto it = counts.find(key);
    return Rat(it == counts.end() ? 0 : it->second, runs);
  }
};

inline EstimateResult estimate(const Alphabet& alph, const ExprPtr& e,
                               const AtomPolicy& policy, std::uint64_t n,
                               std::uint64_t seed,
                               int max_steps = kDefaultMaxSteps) {
  EstimateResult res;
  res.runs = n;
  res.counts[terminal_key(alph, Terminal::Accepted)] = 0;
  res.counts[terminal_key(alph, Terminal::Rejected)] = 0;
  res.counts[terminal_key(alph, Terminal::Timeout)] = 0;
  for (std::size_t v = 0; v < alph.outputs.size(); ++v)
    res.counts[terminal_key(alph, Terminal::Returned, static_cast<int>(v))] =
        0;
  DerivativeCache cache(alph);
  for (std::uint64_t i = 0; i < n; ++i) {
    RunResult r =
        run_once(alph, e, policy, seed, i, max_steps, &cache);
    ++res.counts[terminal_key(alph, r.terminal, r.output)];
  }
  return res;
}

}  // namespace probgkat
