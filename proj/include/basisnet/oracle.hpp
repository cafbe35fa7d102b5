#pragma once

// Reference engines for differential testing: exhaustive reachability
// graph, the direct blocking check on it, brute-force enumeration of
// implicit firing vectors, and a seeded random plant generator.
//
// Nothing here calls into the BRG code paths it is used to check.

#include <map>
#include <random>

#include "basisnet/basis.hpp"

namespace basisnet::oracle {

struct ReachGraph {
  std::vector<Marking> states;
  struct Edge {
    std::size_t source;
    index_t transition;
    std::size_t target;
    friend bool operator==(const Edge&, const Edge&) = default;
  };
  std::vector<Edge> edges;
  std::vector<std::size_t> dead;
  static constexpr std::size_t initial = 0;
};

inline ReachGraph build_rg(const Plant& plant, std::size_t cap = 200'000) {
  ReachGraph rg;
  std::unordered_map<Marking, std::size_t, MarkingHash> index{{plant.m0, 0}};
  rg.states.push_back(plant.m0);
  for (std::size_t s = 0; s < rg.states.size(); ++s) {
    bool any = false;
    for (index_t t = 0; t < plant.net.num_transitions(); ++t) {
      if (!is_enabled(plant.net, rg.states[s], t)) continue;
      any = true;
      Marking next = fire(plant.net, rg.states[s], t);
      auto [it, fresh] = index.emplace(next, rg.states.size());
      if (fresh) {
        if (rg.states.size() >= cap) throw cap_exceeded("reachability graph state", cap);
        rg.states.push_back(std::move(next));
      }
      rg.edges.push_back({s, t, it->second});
    }
    if (!any) rg.dead.push_back(s);
  }
  return rg;
}

struct RgVerdict {
  bool nonblocking = false;
  std::optional<std::size_t> witness;  // smallest blocking state
};

inline RgVerdict rg_nonblocking(const ReachGraph& rg, const FinalSpec& final) {
  std::vector<std::vector<std::size_t>> pred(rg.states.size());
  for (const auto& e : rg.edges) pred[e.target].push_back(e.source);
  std::vector<bool> ok(rg.states.size(), false);
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < rg.states.size(); ++s)
    if (is_final(final, rg.states[s])) {
      ok[s] = true;
      queue.push_back(s);
    }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t p : pred[queue[head]])
      if (!ok[p]) {
        ok[p] = true;
        queue.push_back(p);
      }
  RgVerdict v;
  for (std::size_t s = 0; s < rg.states.size(); ++s)
    if (!ok[s]) {
      v.witness = s;
      break;
    }
  v.nonblocking = !v.witness;
  return v;
}

/// Every implicit firing vector realisable by some implicit sequence from m,
/// with its resulting marking. Depth-first over sequences, memoised on vectors.
inline std::vector<std::pair<ImplicitVector, Marking>> implicit_vectors(const PetriNet& net,
                                                                         const BasisPartition& pi,
                                                                         const Marking& m,
                                                                         std::size_t cap) {
  if (!pi.flags.acyclic) throw error("basis partition must have an acyclic implicit subnet");
  std::map<ImplicitVector, Marking> seen;
  std::vector<std::pair<ImplicitVector, Marking>> stack{{ImplicitVector(pi.implicit.size(), 0), m}};
  seen.emplace(stack.back());
  while (!stack.empty()) {
    auto [y, mk] = stack.back();
    stack.pop_back();
    for (index_t i = 0; i < pi.implicit.size(); ++i) {
      if (!is_enabled(net, mk, pi.implicit[i])) continue;
      ImplicitVector y2 = y;
      ++y2[i];
      if (seen.count(y2)) continue;
      Marking m2 = fire(net, mk, pi.implicit[i]);
      seen.emplace(y2, m2);
      if (seen.size() > cap) throw cap_exceeded("oracle implicit vector", cap);
      stack.emplace_back(std::move(y2), std::move(m2));
    }
  }
  return {seen.begin(), seen.end()};
}

inline bool leq(const ImplicitVector& a, const ImplicitVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline std::vector<ImplicitVector> brute_min_explanations(const PetriNet& net, const BasisPartition& pi,
                                                          const Marking& m, index_t t,
                                                          std::size_t cap = 1'000'000) {
  std::vector<ImplicitVector> explaining;
  for (auto& [y, mk] : implicit_vectors(net, pi, m, cap))
    if (is_enabled(net, mk, t)) explaining.push_back(y);
  std::vector<ImplicitVector> minimal;
  for (const auto& y : explaining) {
    bool dominated = std::any_of(explaining.begin(), explaining.end(), [&](const ImplicitVector& z) {
      return z != y && leq(z, y);
    });
    if (!dominated) minimal.push_back(y);
  }
  std::sort(minimal.begin(), minimal.end());
  return minimal;
}

/// The maximal elements of the set of realisable implicit firing vectors.
inline std::vector<ImplicitVector> brute_maximal_vectors(const PetriNet& net, const BasisPartition& pi,
                                                         const Marking& m, std::size_t cap = 1'000'000) {
  auto all = implicit_vectors(net, pi, m, cap);
  std::vector<ImplicitVector> out;
  for (const auto& [y, mk] : all) {
    bool dominated = std::any_of(all.begin(), all.end(), [&](const auto& z) {
      return z.first != y && leq(y, z.first);
    });
    if (!dominated) out.push_back(y);
  }
  return out;
}

inline std::vector<Marking> brute_implicit_reach(const PetriNet& net, const BasisPartition& pi,
                                                 const Marking& m, std::size_t cap = 1'000'000) {
  std::vector<Marking> out;
  for (auto& [y, mk] : implicit_vectors(net, pi, m, cap)) out.push_back(mk);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Single-step simulator used to cross-check `fire`.
inline std::optional<Marking> step(const PetriNet& net, const Marking& m, index_t t) {
  std::vector<token_t> v(m.tokens());
  for (index_t p = 0; p < net.num_places(); ++p) {
    if (v[p] < net.pre_matrix()[p][t]) return std::nullopt;
    v[p] = v[p] - net.pre_matrix()[p][t] + net.post_matrix()[p][t];
  }
  return Marking(std::move(v));
}

struct RandomPlantParams {
  std::size_t places = 6;
  std::size_t transitions = 6;
  token_t max_weight = 2;
  token_t max_tokens = 4;
  double gmec_density = 0.4;
  std::size_t rg_cap = 200'000;
  std::size_t retries = 20;
};

/// Deterministic random plant for a seed. Every transition consumes at least
/// one token and never produces more tokens than it consumes, so all plants
/// are bounded; plants whose reachability graph exceeds rg_cap are resampled.
inline std::optional<Plant> random_plant(std::uint64_t seed, const RandomPlantParams& params = {}) {
  if (params.places == 0 || params.transitions == 0 || params.max_weight <= 0 || params.max_tokens < 0)
    throw error("random plant parameters must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&](token_t lo, token_t hi) {
    return std::uniform_int_distribution<token_t>(lo, hi)(rng);
  };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::size_t m = params.places, n = params.transitions;

  for (std::size_t attempt = 0; attempt < params.retries; ++attempt) {
    PetriNet::Matrix pre(m, std::vector<token_t>(n, 0)), post(m, std::vector<token_t>(n, 0));
    for (index_t t = 0; t < n; ++t) {
      token_t consumed = 0;
      const auto inputs = uniform(1, std::min<token_t>(2, m));
      for (token_t i = 0; i < inputs; ++i) {
        index_t p = static_cast<index_t>(uniform(0, m - 1));
        token_t w = chance(0.75) ? 1 : uniform(1, params.max_weight);
        pre[p][t] += w;
        consumed += w;
      }
      // Outputs sum to at most what was consumed; sometimes strictly less.
      token_t budget = chance(0.15) ? uniform(0, consumed - 1) : consumed;
      while (budget > 0) {
        index_t p = static_cast<index_t>(uniform(0, m - 1));
        token_t w = uniform(1, std::min(budget, params.max_weight));
        post[p][t] += w;
        budget -= w;
      }
    }
    std::vector<std::string> pn, tn;
    for (std::size_t p = 0; p < m; ++p) pn.push_back("p" + std::to_string(p + 1));
    for (std::size_t t = 0; t < n; ++t) tn.push_back("t" + std::to_string(t + 1));
    PetriNet net(pn, tn, pre, post);

    std::vector<token_t> m0(m, 0);
    for (auto& v : m0)
      if (chance(0.45)) v = uniform(1, std::max<token_t>(1, params.max_tokens));

    auto make_gmec = [&] {
      Gmec g;
      g.w.assign(m, 0);
      token_t hi = 0;
      for (auto& w : g.w) {
        if (!chance(params.gmec_density)) continue;
        w = chance(0.85) ? 1 : (chance(0.5) ? -1 : 2);
        if (w > 0) hi += w * params.max_tokens;
      }
      g.k = uniform(-1, std::max<token_t>(0, hi / 2));
      return g;
    };
    FinalSpec final;
    const auto pick = uniform(0, 9);
    if (pick < 6) {
      final = FinalSpec::single(make_gmec());
    } else {
      final.combinator = pick < 8 ? Combinator::all_of : Combinator::any_of;
      const auto count = uniform(2, 3);
      for (token_t i = 0; i < count; ++i) final.gmecs.push_back(make_gmec());
    }

    Plant plant(std::move(net), Marking(std::move(m0)), std::move(final));
    try {
      build_rg(plant, params.rg_cap);
    } catch (const cap_exceeded&) {
      continue;
    }
    return plant;
  }
  return std::nullopt;
}

}  // namespace basisnet::oracle
