#pragma once

// Basis partitions (explicit/implicit transition split), minimal
// explanations, and the maximal implicit firing vector of a marking.

#include <unordered_set>

#include "basisnet/net.hpp"

namespace basisnet {

/// Firing counts of the implicit transitions, indexed like
/// BasisPartition::implicit.
using ImplicitVector = std::vector<token_t>;

struct PartitionFlags {
  bool acyclic = false;
  bool non_conflicting = false;
  bool non_increasing = false;

  bool ci() const noexcept { return acyclic && non_conflicting && non_increasing; }
  friend bool operator==(const PartitionFlags&, const PartitionFlags&) = default;
};

struct BasisPartition {
  TransitionSet explicit_set;
  TransitionSet implicit;
  TransitionSet implicit_order;  // topological order, valid when flags.acyclic
  PartitionFlags flags;

  std::size_t implicit_position(index_t t) const {
    auto it = std::lower_bound(implicit.begin(), implicit.end(), t);
    if (it == implicit.end() || *it != t) throw error("transition is not implicit");
    return static_cast<std::size_t>(it - implicit.begin());
  }
  bool is_explicit(index_t t) const { return detail::contains(explicit_set, t); }

  friend bool operator==(const BasisPartition&, const BasisPartition&) = default;
};

struct Caps {
  std::size_t saturation = 1'000'000;  // cumulative implicit firings per max_ifv call
  std::size_t explanation = 1'000'000; // firing vectors visited per min_explanations call
  std::size_t implicit_reach = 1'000'000;
  std::size_t brg_states = 10'000'000;
  std::size_t rg_states = 200'000;
};

/// Recomputes the flags and implicit order of `pi` for this net and final set.
inline BasisPartition validate_partition(const PetriNet& net, const FinalSpec& final,
                                         BasisPartition pi) {
  detail::normalize(pi.explicit_set);
  detail::normalize(pi.implicit);
  std::vector<int> seen(net.num_transitions(), 0);
  for (auto* s : {&pi.explicit_set, &pi.implicit})
    for (index_t t : *s) {
      net.check_transition(t);
      if (seen[t]++) throw error("transition '" + net.transition_name(t) + "' is both explicit and implicit");
    }
  for (index_t t = 0; t < net.num_transitions(); ++t)
    if (!seen[t]) throw error("transition '" + net.transition_name(t) + "' is in neither T_E nor T_I");

  auto order = topological_order(net, pi.implicit);
  pi.flags.acyclic = order.has_value();
  pi.implicit_order = order.value_or(TransitionSet{});

  auto disjoint = [&](const TransitionSet& bad) {
    return std::none_of(pi.implicit.begin(), pi.implicit.end(),
                        [&](index_t t) { return detail::contains(bad, t); });
  };
  pi.flags.non_conflicting = disjoint(conflict_transitions(net));
  pi.flags.non_increasing = disjoint(increasing_transitions(net, final));
  return pi;
}

inline BasisPartition make_partition(const PetriNet& net, const FinalSpec& final,
                                     TransitionSet explicit_set) {
  detail::normalize(explicit_set);
  BasisPartition pi;
  for (index_t t = 0; t < net.num_transitions(); ++t)
    (detail::contains(explicit_set, t) ? pi.explicit_set : pi.implicit).push_back(t);
  for (index_t t : explicit_set) net.check_transition(t);
  return validate_partition(net, final, std::move(pi));
}

/// Deterministic CI-partition: everything in conflict, increasing, or forced
/// is explicit; then cycle transitions are made explicit, smallest index
/// first, until the implicit subnet is acyclic.
inline BasisPartition derive_ci_partition(const PetriNet& net, const FinalSpec& final,
                                          TransitionSet forced_explicit = {}) {
  TransitionSet explicit_set = conflict_transitions(net);
  auto inc = increasing_transitions(net, final);
  explicit_set.insert(explicit_set.end(), inc.begin(), inc.end());
  explicit_set.insert(explicit_set.end(), forced_explicit.begin(), forced_explicit.end());
  detail::normalize(explicit_set);
  for (index_t t : explicit_set) net.check_transition(t);

  TransitionSet implicit;
  for (index_t t = 0; t < net.num_transitions(); ++t)
    if (!detail::contains(explicit_set, t)) implicit.push_back(t);
  for (;;) {
    auto cyclic = cyclic_transitions(net, implicit);
    if (cyclic.empty()) break;
    implicit.erase(std::find(implicit.begin(), implicit.end(), cyclic.front()));
    explicit_set.push_back(cyclic.front());
  }
  return make_partition(net, final, std::move(explicit_set));
}

namespace detail {

inline void require_acyclic(const BasisPartition& pi) {
  if (!pi.flags.acyclic) throw error("basis partition must have an acyclic implicit subnet");
}

// Marking after firing each implicit transition y[i] times; nullopt if negative.
inline std::optional<Marking> apply_implicit(const PetriNet& net, const BasisPartition& pi,
                                             const Marking& m, const ImplicitVector& y) {
  if (y.size() != pi.implicit.size()) throw dimension_error("implicit vector length mismatch");
  std::vector<token_t> full(net.num_transitions(), 0);
  for (index_t i = 0; i < y.size(); ++i) full[pi.implicit[i]] = y[i];
  return fire_vector(net, m, full);
}

inline bool dominates_or_equal(const ImplicitVector& a, const ImplicitVector& b) {
  for (index_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

struct VectorHash {
  std::size_t operator()(const ImplicitVector& v) const noexcept {
    std::size_t h = 0;
    for (token_t x : v) h = h * 1000003u ^ std::hash<token_t>{}(x);
    return h;
  }
};

}  // namespace detail

inline Marking apply_implicit(const PetriNet& net, const BasisPartition& pi, const Marking& m,
                              const ImplicitVector& y) {
  auto r = detail::apply_implicit(net, pi, m, y);
  if (!r) throw error("implicit firing vector is not feasible from this marking");
  return *r;
}

/// Componentwise-minimal implicit firing vectors after which `t` is enabled,
/// sorted lexicographically. Breadth-first over firing vectors with
/// dominance pruning: a vector that already explains t, or dominates a found
/// explanation, is never extended.
inline std::vector<ImplicitVector> min_explanations(const PetriNet& net, const BasisPartition& pi,
                                                    const Marking& m, index_t t,
                                                    const Caps& caps = {}) {
  detail::require_acyclic(pi);
  net.check_transition(t);
  net.check_marking(m);
  if (!pi.is_explicit(t)) throw error("transition '" + net.transition_name(t) + "' is not explicit");

  const std::size_t ni = pi.implicit.size();
  std::vector<ImplicitVector> found;
  std::vector<std::pair<ImplicitVector, Marking>> level{{ImplicitVector(ni, 0), m}};
  std::size_t visited = 0;

  while (!level.empty()) {
    std::vector<std::pair<ImplicitVector, Marking>> next;
    std::unordered_set<ImplicitVector, detail::VectorHash> seen;
    for (auto& [y, mk] : level) {
      if (++visited > caps.explanation) throw cap_exceeded("explanation", caps.explanation);
      bool dominated = std::any_of(found.begin(), found.end(), [&](const ImplicitVector& f) {
        return detail::dominates_or_equal(y, f);
      });
      if (dominated) continue;
      if (is_enabled(net, mk, t)) {
        found.push_back(y);
        continue;
      }
      for (index_t i = 0; i < ni; ++i) {
        const index_t ti = pi.implicit[i];
        if (!is_enabled(net, mk, ti)) continue;
        ImplicitVector y2 = y;
        ++y2[i];
        if (seen.insert(y2).second) next.emplace_back(std::move(y2), fire(net, mk, ti));
      }
    }
    level = std::move(next);
  }
  std::sort(found.begin(), found.end());
  return found;
}

/// Transitions in `order` must be a topological order of T_I.
inline ImplicitVector max_ifv(const PetriNet& net, const BasisPartition& pi, const Marking& m,
                              const TransitionSet& order, const Caps& caps = {}) {
  detail::require_acyclic(pi);
  if (!pi.flags.non_conflicting)
    throw error("maximal implicit firing vector requires a non-conflicting implicit set");
  net.check_marking(m);
  if (order.size() != pi.implicit.size()) throw error("order must list every implicit transition");

  std::vector<token_t> tokens(m.tokens());
  ImplicitVector y(pi.implicit.size(), 0);
  std::size_t total = 0;
  for (index_t t : order) {
    const std::size_t pos = pi.implicit_position(t);
    std::optional<token_t> times;
    for (index_t p = 0; p < net.num_places(); ++p)
      if (net.pre(p, t) > 0) {
        token_t k = tokens[p] / net.pre(p, t);
        times = times ? std::min(*times, k) : k;
      }
    // no input places: fires without bound
    if (!times) throw cap_exceeded("saturation", caps.saturation);
    if (*times == 0) continue;
    total += static_cast<std::size_t>(*times);
    if (total > caps.saturation) throw cap_exceeded("saturation", caps.saturation);
    y[pos] = *times;
    for (index_t p = 0; p < net.num_places(); ++p)
      tokens[p] = detail::checked_add(tokens[p], detail::checked_mul(net.incidence(p, t), *times));
  }
  // A non-topological order can leave something enabled.
  Marking result(std::move(tokens));
  for (index_t t : pi.implicit)
    if (is_enabled(net, result, t)) throw error("implicit order is not topological");
  return y;
}

/// Unique maximal implicit firing vector at m (saturation in topological order).
inline ImplicitVector max_ifv(const PetriNet& net, const BasisPartition& pi, const Marking& m,
                              const Caps& caps = {}) {
  return max_ifv(net, pi, m, pi.implicit_order, caps);
}

inline Marking i_max_marking(const PetriNet& net, const BasisPartition& pi, const Marking& m,
                             const Caps& caps = {}) {
  return apply_implicit(net, pi, m, max_ifv(net, pi, m, caps));
}

/// All markings reachable from m by implicit transitions only, sorted.
inline std::vector<Marking> implicit_reach(const PetriNet& net, const BasisPartition& pi,
                                           const Marking& m, std::size_t cap) {
  detail::require_acyclic(pi);
  net.check_marking(m);
  std::unordered_set<Marking, MarkingHash> seen{m};
  std::vector<Marking> queue{m};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Marking cur = queue[head];
    for (index_t t : pi.implicit) {
      if (!is_enabled(net, cur, t)) continue;
      Marking nxt = fire(net, cur, t);
      if (seen.insert(nxt).second) {
        if (seen.size() > cap) throw cap_exceeded("implicit reach", cap);
        queue.push_back(std::move(nxt));
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

}  // namespace basisnet
