#pragma once

// Non-blockingness decision on a conflict-increase BRG.
//
// A plant is non-blocking iff every basis marking can reach, in the BRG, a
// basis marking whose implicit reach meets the final set. With a
// non-conflicting, non-increasing implicit set that last test reduces to
// checking the i-maximal marking alone.

#include <chrono>

#include "basisnet/brg.hpp"

namespace basisnet {

struct VerdictStats {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t final_basis = 0;
  double partition_seconds = 0;
  double build_seconds = 0;
  double final_seconds = 0;
  double coreach_seconds = 0;
};

struct Verdict {
  bool nonblocking = false;
  std::vector<std::size_t> final_basis;        // sorted state indices
  std::optional<std::size_t> blocking_witness;  // smallest non-coreachable state
  std::vector<std::size_t> dead_end_states;
  VerdictStats stats;
};

namespace detail {

inline void require_ci(const BasisPartition& pi) {
  if (!pi.flags.ci())
    throw error("partition is not a conflict-increase partition (need acyclic, non-conflicting, non-increasing)");
}

template <class F>
double timed(F&& f) {
  auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/// States whose implicit reach contains a final marking.
inline std::vector<std::size_t> final_basis_set(const CiBrg& g, const Plant& plant,
                                                const Caps& caps = {}) {
  detail::require_ci(g.partition);
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < g.num_states(); ++s)
    if (is_final(plant.final, i_max_marking(plant.net, g.partition, g.states[s], caps)))
      out.push_back(s);
  return out;
}

inline std::vector<std::size_t> dead_basis_markings(const CiBrg& g) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < g.num_states(); ++s)
    if (g.edge_begin[s] == g.edge_begin[s + 1]) out.push_back(s);
  return out;
}

/// Marks every state that can reach `targets` along BRG edges.
inline std::vector<bool> coreachable(const CiBrg& g, const std::vector<std::size_t>& targets) {
  auto pred = reverse_adjacency(g);
  std::vector<bool> seen(g.num_states(), false);
  std::vector<std::size_t> queue;
  for (std::size_t s : targets)
    if (!seen[s]) {
      seen[s] = true;
      queue.push_back(s);
    }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t p : pred[queue[head]])
      if (!seen[p]) {
        seen[p] = true;
        queue.push_back(p);
      }
  return seen;
}

/// Decision on an already built CI-BRG.
inline Verdict check_nonblocking(const CiBrg& g, const Plant& plant, const Caps& caps = {}) {
  Verdict v;
  v.stats.final_seconds = detail::timed([&] { v.final_basis = final_basis_set(g, plant, caps); });
  std::vector<bool> ok;
  v.stats.coreach_seconds = detail::timed([&] { ok = coreachable(g, v.final_basis); });
  for (std::size_t s = 0; s < g.num_states(); ++s)
    if (!ok[s]) {
      v.blocking_witness = s;
      break;
    }
  v.nonblocking = !v.blocking_witness.has_value();
  v.dead_end_states = dead_basis_markings(g);
  v.stats.states = g.num_states();
  v.stats.edges = g.num_edges();
  v.stats.final_basis = v.final_basis.size();
  return v;
}

struct VerifyResult {
  BasisPartition partition;
  CiBrg brg;
  Verdict verdict;
};

/// Derives a CI-partition unless one is given, builds the CI-BRG and decides.
inline VerifyResult verify_plant(const Plant& plant, std::optional<BasisPartition> pi = std::nullopt,
                                 const Caps& caps = {}, const TransitionSet& forced_explicit = {}) {
  VerifyResult r;
  double partition_seconds = detail::timed([&] {
    r.partition = pi ? validate_partition(plant.net, plant.final, *pi)
                     : derive_ci_partition(plant.net, plant.final, forced_explicit);
  });
  detail::require_ci(r.partition);
  double build_seconds = detail::timed([&] { r.brg = build_brg(plant, r.partition, caps); });
  r.verdict = check_nonblocking(r.brg, plant, caps);
  r.verdict.stats.partition_seconds = partition_seconds;
  r.verdict.stats.build_seconds = build_seconds;
  return r;
}

inline Verdict check_nonblocking(const Plant& plant, std::optional<BasisPartition> pi = std::nullopt,
                                 const Caps& caps = {}) {
  return verify_plant(plant, std::move(pi), caps).verdict;
}

}  // namespace basisnet
