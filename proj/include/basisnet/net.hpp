#pragma once

// Place/transition nets, markings, GMECs and the structural transition
// classes used to pick a conflict-increase basis partition.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace basisnet {

using token_t = std::int64_t;
using index_t = std::size_t;

// Sorted, duplicate-free list of transition indices.
using TransitionSet = std::vector<index_t>;

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class dimension_error : public error {
 public:
  using error::error;
};

// A configured exploration or saturation limit was hit. For the bounded nets
// this library targets that usually means the input is not bounded.
class cap_exceeded : public error {
 public:
  cap_exceeded(std::string what_cap, std::size_t cap)
      : error(what_cap + " cap of " + std::to_string(cap) + " exceeded"),
        cap_name_(std::move(what_cap)),
        cap_(cap) {}
  const std::string& cap_name() const noexcept { return cap_name_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::string cap_name_;
  std::size_t cap_;
};

namespace detail {

inline token_t checked_add(token_t a, token_t b) {
  token_t r;
  if (__builtin_add_overflow(a, b, &r)) throw error("token arithmetic overflow");
  return r;
}

inline token_t checked_mul(token_t a, token_t b) {
  token_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw error("token arithmetic overflow");
  return r;
}

inline void normalize(TransitionSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool contains(const TransitionSet& s, index_t t) {
  return std::binary_search(s.begin(), s.end(), t);
}

}  // namespace detail

/// Token-count vector over the places of a net, in declared place order.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::vector<token_t> tokens) : tokens_(std::move(tokens)) {
    for (token_t v : tokens_)
      if (v < 0) throw error("marking entries must be nonnegative");
  }
  Marking(std::initializer_list<token_t> tokens) : Marking(std::vector<token_t>(tokens)) {}

  std::size_t size() const noexcept { return tokens_.size(); }
  token_t operator[](index_t p) const { return tokens_[p]; }
  const std::vector<token_t>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking& a, const Marking& b) { return a.tokens_ <=> b.tokens_; }

 private:
  std::vector<token_t> tokens_;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (token_t v : m.tokens()) {
      h ^= std::hash<token_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Dense place/transition net. Immutable after construction.
class PetriNet {
 public:
  using Matrix = std::vector<std::vector<token_t>>;  // [place][transition]

  PetriNet() = default;

  PetriNet(std::vector<std::string> places, std::vector<std::string> transitions, Matrix pre,
           Matrix post)
      : places_(std::move(places)),
        transitions_(std::move(transitions)),
        pre_(std::move(pre)),
        post_(std::move(post)) {
    const std::size_t m = places_.size(), n = transitions_.size();
    if (pre_.size() != m || post_.size() != m)
      throw dimension_error("Pre/Post row count must equal the number of places");
    incidence_.assign(m, std::vector<token_t>(n, 0));
    for (index_t p = 0; p < m; ++p) {
      if (pre_[p].size() != n || post_[p].size() != n)
        throw dimension_error("Pre/Post column count must equal the number of transitions");
      for (index_t t = 0; t < n; ++t) {
        if (pre_[p][t] < 0 || post_[p][t] < 0) throw error("arc weights must be nonnegative");
        incidence_[p][t] = post_[p][t] - pre_[p][t];
      }
    }
    index_names(places_, place_index_, "place");
    index_names(transitions_, transition_index_, "transition");
  }

  std::size_t num_places() const noexcept { return places_.size(); }
  std::size_t num_transitions() const noexcept { return transitions_.size(); }

  const std::vector<std::string>& places() const noexcept { return places_; }
  const std::vector<std::string>& transitions() const noexcept { return transitions_; }
  const std::string& place_name(index_t p) const { return places_.at(p); }
  const std::string& transition_name(index_t t) const { return transitions_.at(t); }

  token_t pre(index_t p, index_t t) const { return pre_[p][t]; }
  token_t post(index_t p, index_t t) const { return post_[p][t]; }
  token_t incidence(index_t p, index_t t) const { return incidence_[p][t]; }
  const Matrix& pre_matrix() const noexcept { return pre_; }
  const Matrix& post_matrix() const noexcept { return post_; }
  const Matrix& incidence_matrix() const noexcept { return incidence_; }

  std::optional<index_t> find_place(const std::string& id) const {
    auto it = place_index_.find(id);
    if (it == place_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<index_t> find_transition(const std::string& id) const {
    auto it = transition_index_.find(id);
    if (it == transition_index_.end()) return std::nullopt;
    return it->second;
  }
  index_t place(const std::string& id) const {
    if (auto p = find_place(id)) return *p;
    throw error("unknown place '" + id + "'");
  }
  index_t transition(const std::string& id) const {
    if (auto t = find_transition(id)) return *t;
    throw error("unknown transition '" + id + "'");
  }

  void check_transition(index_t t) const {
    if (t >= num_transitions())
      throw std::out_of_range("transition index " + std::to_string(t) + " out of range");
  }
  void check_marking(const Marking& m) const {
    if (m.size() != num_places())
      throw dimension_error("marking has " + std::to_string(m.size()) + " entries, net has " +
                            std::to_string(num_places()) + " places");
  }

  friend bool operator==(const PetriNet& a, const PetriNet& b) {
    return a.places_ == b.places_ && a.transitions_ == b.transitions_ && a.pre_ == b.pre_ &&
           a.post_ == b.post_;
  }

 private:
  static void index_names(const std::vector<std::string>& names,
                          std::unordered_map<std::string, index_t>& out, const char* kind) {
    for (index_t i = 0; i < names.size(); ++i)
      if (!out.emplace(names[i], i).second)
        throw error(std::string("duplicate ") + kind + " identifier '" + names[i] + "'");
  }

  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  Matrix pre_;
  Matrix post_;
  Matrix incidence_;
  std::unordered_map<std::string, index_t> place_index_;
  std::unordered_map<std::string, index_t> transition_index_;
};

/// Generalized mutual exclusion constraint: the set {M | w.M <= k}.
struct Gmec {
  std::vector<token_t> w;
  token_t k = 0;

  token_t weigh(const Marking& m) const {
    if (m.size() != w.size()) throw dimension_error("GMEC weight vector length mismatch");
    token_t s = 0;
    for (index_t p = 0; p < w.size(); ++p)
      s = detail::checked_add(s, detail::checked_mul(w[p], m[p]));
    return s;
  }
  bool holds(const Marking& m) const { return weigh(m) <= k; }

  friend bool operator==(const Gmec&, const Gmec&) = default;
};

enum class Combinator { single, all_of, any_of };

struct FinalSpec {
  Combinator combinator = Combinator::single;
  std::vector<Gmec> gmecs;

  static FinalSpec single(Gmec g) { return {Combinator::single, {std::move(g)}}; }

  void check(std::size_t places) const {
    if (gmecs.empty()) throw error("final specification needs at least one GMEC");
    if (combinator == Combinator::single && gmecs.size() != 1)
      throw error("single final specification must hold exactly one GMEC");
    for (const auto& g : gmecs)
      if (g.w.size() != places) throw dimension_error("GMEC weight vector length mismatch");
  }

  friend bool operator==(const FinalSpec&, const FinalSpec&) = default;
};

struct Plant {
  PetriNet net;
  Marking m0;
  FinalSpec final;

  Plant() = default;
  Plant(PetriNet n, Marking m, FinalSpec f)
      : net(std::move(n)), m0(std::move(m)), final(std::move(f)) {
    net.check_marking(m0);
    final.check(net.num_places());
  }

  friend bool operator==(const Plant&, const Plant&) = default;
};

// ---------------------------------------------------------------------------
// Firing semantics

inline bool is_enabled(const PetriNet& net, const Marking& m, index_t t) {
  net.check_transition(t);
  net.check_marking(m);
  for (index_t p = 0; p < net.num_places(); ++p)
    if (m[p] < net.pre(p, t)) return false;
  return true;
}

inline Marking fire(const PetriNet& net, const Marking& m, index_t t) {
  if (!is_enabled(net, m, t))
    throw error("transition '" + net.transition_name(t) + "' is not enabled");
  std::vector<token_t> next(m.tokens());
  for (index_t p = 0; p < net.num_places(); ++p)
    next[p] = detail::checked_add(next[p], net.incidence(p, t));
  return Marking(std::move(next));
}

/// m + C.y, or nullopt when some place would go negative. For acyclic nets a
/// result means a firing sequence with firing vector y exists.
inline std::optional<Marking> fire_vector(const PetriNet& net, const Marking& m,
                                          std::span<const token_t> y) {
  net.check_marking(m);
  if (y.size() != net.num_transitions()) throw dimension_error("firing vector length mismatch");
  std::vector<token_t> next(m.tokens());
  for (index_t t = 0; t < y.size(); ++t) {
    if (y[t] < 0) throw error("firing counts must be nonnegative");
    if (y[t] == 0) continue;
    for (index_t p = 0; p < net.num_places(); ++p)
      next[p] = detail::checked_add(next[p], detail::checked_mul(net.incidence(p, t), y[t]));
  }
  for (token_t v : next)
    if (v < 0) return std::nullopt;
  return Marking(std::move(next));
}

inline bool is_dead(const PetriNet& net, const Marking& m) {
  for (index_t t = 0; t < net.num_transitions(); ++t)
    if (is_enabled(net, m, t)) return false;
  return true;
}

inline bool is_final(const FinalSpec& final, const Marking& m) {
  switch (final.combinator) {
    case Combinator::single:
    case Combinator::all_of:
      return std::all_of(final.gmecs.begin(), final.gmecs.end(),
                         [&](const Gmec& g) { return g.holds(m); });
    case Combinator::any_of:
      return std::any_of(final.gmecs.begin(), final.gmecs.end(),
                         [&](const Gmec& g) { return g.holds(m); });
  }
  return false;
}

// ---------------------------------------------------------------------------
// Structure

/// Transitions sharing an input place with some other transition.
inline TransitionSet conflict_transitions(const PetriNet& net) {
  TransitionSet out;
  for (index_t p = 0; p < net.num_places(); ++p) {
    TransitionSet outputs;
    for (index_t t = 0; t < net.num_transitions(); ++t)
      if (net.pre(p, t) > 0) outputs.push_back(t);
    if (outputs.size() >= 2) out.insert(out.end(), outputs.begin(), outputs.end());
  }
  detail::normalize(out);
  return out;
}

/// Transitions whose firing raises w.M for at least one GMEC of the spec.
inline TransitionSet increasing_transitions(const PetriNet& net, const FinalSpec& final) {
  TransitionSet out;
  for (const auto& g : final.gmecs) {
    if (g.w.size() != net.num_places()) throw dimension_error("GMEC weight vector length mismatch");
    for (index_t t = 0; t < net.num_transitions(); ++t) {
      token_t effect = 0;
      for (index_t p = 0; p < net.num_places(); ++p)
        effect = detail::checked_add(effect, detail::checked_mul(g.w[p], net.incidence(p, t)));
      if (effect > 0) out.push_back(t);
    }
  }
  detail::normalize(out);
  return out;
}

inline PetriNet induced_subnet(const PetriNet& net, TransitionSet tx) {
  detail::normalize(tx);
  std::vector<std::string> names;
  for (index_t t : tx) {
    net.check_transition(t);
    names.push_back(net.transition_name(t));
  }
  PetriNet::Matrix pre(net.num_places()), post(net.num_places());
  for (index_t p = 0; p < net.num_places(); ++p)
    for (index_t t : tx) {
      pre[p].push_back(net.pre(p, t));
      post[p].push_back(net.post(p, t));
    }
  return PetriNet(net.places(), std::move(names), std::move(pre), std::move(post));
}

namespace detail {

// Transition-level successor relation of the place/transition digraph:
// t -> t' whenever some place is an output of t and an input of t'.
inline std::vector<std::vector<index_t>> transition_digraph(const PetriNet& net,
                                                            const TransitionSet& ts) {
  std::vector<std::vector<index_t>> succ(ts.size());
  for (index_t i = 0; i < ts.size(); ++i)
    for (index_t j = 0; j < ts.size(); ++j)
      for (index_t p = 0; p < net.num_places(); ++p)
        if (net.post(p, ts[i]) > 0 && net.pre(p, ts[j]) > 0) {
          succ[i].push_back(j);
          break;
        }
  return succ;
}

}  // namespace detail

/// Topological order of the given transitions in the digraph they induce,
/// or nullopt if it has a directed cycle. Ties go to the smallest index
/// unless `prefer` says otherwise.
inline std::optional<TransitionSet> topological_order(
    const PetriNet& net, TransitionSet ts,
    const std::function<bool(index_t, index_t)>& prefer = std::less<index_t>{}) {
  detail::normalize(ts);
  auto succ = detail::transition_digraph(net, ts);
  std::vector<std::size_t> indegree(ts.size(), 0);
  for (const auto& s : succ)
    for (index_t j : s) ++indegree[j];
  auto cmp = [&](index_t a, index_t b) { return prefer(ts[b], ts[a]); };
  std::priority_queue<index_t, std::vector<index_t>, decltype(cmp)> ready(cmp);
  for (index_t i = 0; i < ts.size(); ++i)
    if (indegree[i] == 0) ready.push(i);
  TransitionSet order;
  while (!ready.empty()) {
    index_t i = ready.top();
    ready.pop();
    order.push_back(ts[i]);
    for (index_t j : succ[i])
      if (--indegree[j] == 0) ready.push(j);
  }
  if (order.size() != ts.size()) return std::nullopt;
  return order;
}

inline bool is_acyclic(const PetriNet& net) {
  TransitionSet all(net.num_transitions());
  for (index_t t = 0; t < all.size(); ++t) all[t] = t;
  return topological_order(net, std::move(all)).has_value();
}

/// Transitions that lie on a directed cycle of the subnet induced by `ts`
/// (Tarjan SCCs of size > 1, plus self-loops).
inline TransitionSet cyclic_transitions(const PetriNet& net, TransitionSet ts) {
  detail::normalize(ts);
  auto succ = detail::transition_digraph(net, ts);
  const std::size_t n = ts.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<index_t> stack;
  int counter = 0;
  TransitionSet out;

  std::function<void(index_t)> strongconnect = [&](index_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (index_t w : succ[v]) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<index_t> component;
      index_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      bool self_loop = std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
      if (component.size() > 1 || self_loop)
        for (index_t c : component) out.push_back(ts[c]);
    }
  };
  for (index_t v = 0; v < n; ++v)
    if (index[v] < 0) strongconnect(v);
  detail::normalize(out);
  return out;
}

}  // namespace basisnet
