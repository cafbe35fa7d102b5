#pragma once

// Basis reachability graph: a deterministic automaton over basis markings
// whose events are (explicit transition, minimal explanation) pairs.

#include <sstream>

#include "basisnet/basis.hpp"

namespace basisnet {

struct BrgEvent {
  index_t transition = 0;
  ImplicitVector explanation;

  friend bool operator==(const BrgEvent&, const BrgEvent&) = default;
  friend auto operator<=>(const BrgEvent&, const BrgEvent&) = default;
};

struct BrgEdge {
  std::size_t source = 0;
  BrgEvent event;
  std::size_t target = 0;

  friend bool operator==(const BrgEdge&, const BrgEdge&) = default;
};

/// State 0 is the initial marking. States are numbered in FIFO discovery
/// order; edges are grouped by source, then ordered by (transition, y).
struct CiBrg {
  std::vector<Marking> states;
  std::vector<BrgEdge> edges;
  BasisPartition partition;
  // edges[edge_begin[s] .. edge_begin[s+1]) leave state s
  std::vector<std::size_t> edge_begin;

  std::size_t num_states() const noexcept { return states.size(); }
  std::size_t num_edges() const noexcept { return edges.size(); }
  static constexpr std::size_t initial = 0;

  std::optional<std::size_t> find(const Marking& m) const {
    auto it = std::find(states.begin(), states.end(), m);
    if (it == states.end()) return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
  }

  std::vector<BrgEvent> alphabet() const {
    std::vector<BrgEvent> ev;
    for (const auto& e : edges) ev.push_back(e.event);
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    return ev;
  }

  friend bool operator==(const CiBrg& a, const CiBrg& b) {
    return a.states == b.states && a.edges == b.edges && a.partition == b.partition;
  }
};

inline void index_edges(CiBrg& g) {
  g.edge_begin.assign(g.states.size() + 1, 0);
  for (const auto& e : g.edges) {
    if (e.source >= g.states.size() || e.target >= g.states.size())
      throw error("edge refers to an unknown state");
    ++g.edge_begin[e.source + 1];
  }
  for (std::size_t s = 0; s < g.states.size(); ++s) g.edge_begin[s + 1] += g.edge_begin[s];
  for (std::size_t i = 1; i < g.edges.size(); ++i)
    if (g.edges[i].source < g.edges[i - 1].source) throw error("edges must be grouped by source");
}

inline CiBrg build_brg(const Plant& plant, const BasisPartition& pi, const Caps& caps = {}) {
  detail::require_acyclic(pi);
  const PetriNet& net = plant.net;
  CiBrg g;
  g.partition = pi;
  std::unordered_map<Marking, std::size_t, MarkingHash> index{{plant.m0, 0}};
  g.states.push_back(plant.m0);

  for (std::size_t s = 0; s < g.states.size(); ++s) {
    for (index_t t : pi.explicit_set) {
      for (auto& y : min_explanations(net, pi, g.states[s], t, caps)) {
        Marking target = fire(net, apply_implicit(net, pi, g.states[s], y), t);
        auto [it, fresh] = index.emplace(target, g.states.size());
        if (fresh) {
          if (g.states.size() >= caps.brg_states) throw cap_exceeded("BRG state", caps.brg_states);
          g.states.push_back(std::move(target));
        }
        g.edges.push_back({s, {t, std::move(y)}, it->second});
      }
    }
  }
  index_edges(g);
  return g;
}

struct Successor {
  BrgEvent event;
  std::size_t state;
};

inline std::vector<Successor> successors(const CiBrg& g, std::size_t s) {
  if (s >= g.num_states()) throw std::out_of_range("BRG state out of range");
  std::vector<Successor> out;
  for (std::size_t i = g.edge_begin[s]; i < g.edge_begin[s + 1]; ++i)
    out.push_back({g.edges[i].event, g.edges[i].target});
  return out;
}

/// Sorted predecessor lists with one entry per edge.
inline std::vector<std::vector<std::size_t>> reverse_adjacency(const CiBrg& g) {
  std::vector<std::vector<std::size_t>> pred(g.num_states());
  for (const auto& e : g.edges) pred[e.target].push_back(e.source);
  for (auto& p : pred) std::sort(p.begin(), p.end());
  return pred;
}

struct DotAnnotations {
  std::vector<bool> final;        // the basis marking itself is final: red dashed box
  std::vector<bool> final_reach;  // its implicit reach meets the final set: green label
  std::vector<bool> dead;         // no outgoing edge: double border
};

namespace detail {

inline std::string vector_text(const std::vector<token_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s + "]";
}

}  // namespace detail

inline std::string export_dot(const PetriNet& net, const CiBrg& g, const DotAnnotations& marks = {}) {
  std::ostringstream out;
  out << "digraph brg {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (std::size_t s = 0; s < g.num_states(); ++s) {
    out << "  s" << s << " [label=\"M_b" << s << "\\n" << detail::vector_text(g.states[s].tokens())
        << "\"";
    if (s < marks.final.size() && marks.final[s])
      out << ", shape=box, style=dashed, color=red";
    if (s < marks.final_reach.size() && marks.final_reach[s]) out << ", fontcolor=darkgreen";
    if (s < marks.dead.size() && marks.dead[s]) out << ", peripheries=2";
    if (s == CiBrg::initial) out << ", penwidth=2";
    out << "];\n";
  }
  for (const auto& e : g.edges)
    out << "  s" << e.source << " -> s" << e.target << " [label=\"("
        << net.transition_name(e.event.transition) << ", "
        << detail::vector_text(e.event.explanation) << ")\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace basisnet
