#pragma once

// Finitely supported probability distributions over outcomes.
//
// An outcome is acceptance, rejection, returning an output value, or taking a
// labelled step to a continuation; the continuation type T is a state id
// (int) or an expression, depending on context. Distributions keep their
// support sorted in the canonical outcome order (Reject < Accept < Return <
// Step), store only strictly positive probabilities, and always have total
// mass exactly 1.

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "probgkat/rat.hpp"

namespace probgkat {

inline int target_compare(int x, int y) { return x < y ? -1 : (x > y ? 1 : 0); }

enum class OKind : std::uint8_t { Reject = 0, Accept = 1, Ret = 2, Step = 3 };

template <class T>
struct Outcome {
  OKind k = OKind::Reject;
  int sym = -1;  // Ret: output index; Step: action index
  T target{};    // Step only
};

template <class T>
Outcome<T> o_reject() {
  return {OKind::Reject, -1, T{}};
}
template <class T>
Outcome<T> o_accept() {
  return {OKind::Accept, -1, T{}};
}
template <class T>
Outcome<T> o_ret(int output) {
  return {OKind::Ret, output, T{}};
}
template <class T>
Outcome<T> o_step(int action, T target) {
  return {OKind::Step, action, std::move(target)};
}

template <class T>
int outcome_compare(const Outcome<T>& x, const Outcome<T>& y) {
  if (x.k != y.k) return x.k < y.k ? -1 : 1;
  if (x.k == OKind::Ret) return x.sym < y.sym ? -1 : (x.sym > y.sym ? 1 : 0);
  if (x.k == OKind::Step) {
    if (x.sym != y.sym) return x.sym < y.sym ? -1 : 1;
    return target_compare(x.target, y.target);
  }
  return 0;
}

template <class T>
bool outcome_eq(const Outcome<T>& x, const Outcome<T>& y) {
  return outcome_compare(x, y) == 0;
}

template <class T>
struct Dist {
  // Sorted by canonical outcome order; probabilities strictly positive and
  // summing to exactly 1 (enforced by DistBuilder).
  std::vector<std::pair<Outcome<T>, Rat>> entries;

  // Probability of one outcome (0 when outside the support).
  Rat prob_of(const Outcome<T>& o) const {
    for (const auto& [oc, p] : entries)
      if (outcome_eq(oc, o)) return p;
    return Rat(0);
  }

  bool operator==(const Dist& other) const {
    if (entries.size() != other.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (!outcome_eq(entries[i].first, other.entries[i].first) ||
          entries[i].second != other.entries[i].second)
        return false;
    return true;
  }
};

// Accumulates (outcome, probability) pairs, merging duplicates and dropping
// zeros; build() verifies the mass is exactly 1.
template <class T>
class DistBuilder {
 public:
  void add(Outcome<T> o, const Rat& p) {
    if (p < 0)
      throw std::logic_error("negative probability in distribution: " +
                             rat_to_string(p));
    if (p == 0) return;
    entries_.emplace_back(std::move(o), p);
  }

  // Adds every entry of d scaled by factor.
  void add_scaled(const Dist<T>& d, const Rat& factor) {
    for (const auto& [o, p] : d.entries) add(o, factor * p);
  }

  Dist<T> build() && {
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const auto& x, const auto& y) {
                       return outcome_compare(x.first, y.first) < 0;
                     });
    Dist<T> d;
    Rat mass(0);
    for (auto& [o, p] : entries_) {
      mass += p;
      if (!d.entries.empty() && outcome_eq(d.entries.back().first, o))
        d.entries.back().second += p;
      else
        d.entries.emplace_back(std::move(o), p);
    }
    if (mass != 1)
      throw std::logic_error("distribution mass is " + rat_to_string(mass) +
                             ", expected 1");
    return d;
  }

 private:
  std::vector<std::pair<Outcome<T>, Rat>> entries_;
};

template <class T>
Dist<T> dirac(Outcome<T> o) {
  DistBuilder<T> b;
  b.add(std::move(o), Rat(1));
  return std::move(b).build();
}

// r·d1 + (1−r)·d2.
template <class T>
Dist<T> convex(const Rat& r, const Dist<T>& d1, const Dist<T>& d2) {
  if (!is_probability(r))
    throw std::logic_error("convex weight out of range: " + rat_to_string(r));
  DistBuilder<T> b;
  b.add_scaled(d1, r);
  b.add_scaled(d2, 1 - r);
  return std::move(b).build();
}

// Σ wᵢ·dᵢ with the wᵢ summing to 1.
template <class T>
Dist<T> convex_extend(const std::vector<Rat>& weights,
                      const std::vector<Dist<T>>& dists) {
  if (weights.size() != dists.size())
    throw std::logic_error("convex_extend: weight/distribution count mismatch");
  DistBuilder<T> b;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!is_probability(weights[i]))
      throw std::logic_error("convex weight out of range: " +
                             rat_to_string(weights[i]));
    b.add_scaled(dists[i], weights[i]);
  }
  return std::move(b).build();
}

// Total probability of the outcomes satisfying pred.
template <class T, class Pred>
Rat mass(const Dist<T>& d, Pred&& pred) {
  Rat m(0);
  for (const auto& [o, p] : d.entries)
    if (pred(o)) m += p;
  return m;
}

// Re-targets every Step outcome through fn, keeping other outcomes intact.
template <class U, class T, class Fn>
Dist<U> map_targets(const Dist<T>& d, Fn&& fn) {
  DistBuilder<U> b;
  for (const auto& [o, p] : d.entries) {
    Outcome<U> m{o.k, o.sym, U{}};
    if (o.k == OKind::Step) m.target = fn(o.target);
    b.add(std::move(m), p);
  }
  return std::move(b).build();
}

}  // namespace probgkat
