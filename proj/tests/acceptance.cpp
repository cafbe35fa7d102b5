// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "basisnet/basisnet.hpp"

using namespace basisnet;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << what;
    pass = pass && cond;
  }
};

int failures = 0;

void report(int id, const std::string& name, Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name;
  auto d = o.detail.str();
  if (!d.empty()) std::cout << "  [" << d << "]";
  std::cout << std::endl;
  failures += !o.pass;
}

template <class F>
void run(int id, const std::string& name, F&& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  report(id, name, o);
}

std::string nets(const std::string& name) { return std::string(BASISNET_NETS_DIR) + "/" + name; }

TransitionSet names(const PetriNet& net, std::initializer_list<const char*> ids) {
  TransitionSet out;
  for (auto id : ids) out.push_back(net.transition(id));
  std::sort(out.begin(), out.end());
  return out;
}

TransitionSet all_transitions(const PetriNet& net) {
  TransitionSet all(net.num_transitions());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

// Plants for the differential criteria: 3..8 places and transitions, at most
// 4 initial tokens per place.
const std::vector<Plant>& differential_plants() {
  static std::vector<Plant> plants = [] {
    std::vector<Plant> out;
    for (std::uint64_t seed = 1; out.size() < 200 && seed < 10'000; ++seed) {
      oracle::RandomPlantParams params;
      params.places = 3 + seed % 6;
      params.transitions = 3 + (seed / 6) % 6;
      params.max_tokens = 4;
      if (auto p = oracle::random_plant(seed, params)) out.push_back(std::move(*p));
    }
    return out;
  }();
  return plants;
}

// BRG and RG agree on the verdict, and the union of implicit reaches over the
// BRG is exactly the reachable set.
std::string differential(const Plant& plant, const VerifyResult& r, std::size_t rg_cap) {
  auto rg = oracle::build_rg(plant, rg_cap);
  if (oracle::rg_nonblocking(rg, plant.final).nonblocking != r.verdict.nonblocking) return "verdict differs from RG";
  std::set<Marking> reach(rg.states.begin(), rg.states.end()), from_brg;
  for (const auto& mb : r.brg.states)
    for (auto& m : implicit_reach(plant.net, r.partition, mb, rg_cap)) from_brg.insert(std::move(m));
  if (reach != from_brg) return "implicit reaches do not cover R(N,M0) exactly";
  return {};
}

struct Counts {
  std::size_t reachable = 0, basis = 0, final_basis = 0;
  bool nonblocking = false;
  std::string diff;
};

Counts measure(const Plant& plant, const TransitionSet& forced, bool with_rg) {
  Counts c;
  auto r = verify_plant(plant, std::nullopt, Caps{}, forced);
  c.basis = r.brg.num_states();
  c.final_basis = r.verdict.final_basis.size();
  c.nonblocking = r.verdict.nonblocking;
  if (with_rg) {
    c.reachable = oracle::build_rg(plant, 2'000'000).states.size();
    c.diff = differential(plant, r, 2'000'000);
  }
  return c;
}

}  // namespace

int main() {
  const NetFile ex = load_net(nets("example1.pnet"));
  const Plant& ex1 = ex.plant;

  run(1, "Reference plant: partition, basis markings and transition relation", [&](Outcome& o) {
    auto t0 = Clock::now();
    auto pi = derive_ci_partition(ex1.net, ex1.final);
    auto g = build_brg(ex1, pi);
    double dt = since(t0);
    o.require(pi.explicit_set == names(ex1.net, {"t3", "t4", "t6"}), "T_E != {t3,t4,t6}");
    const std::vector<Marking> states = {{1, 1, 0, 0, 0, 0}, {1, 0, 0, 1, 0, 0}, {1, 0, 0, 0, 0, 0},
                                         {0, 0, 0, 0, 1, 0}, {0, 0, 0, 2, 0, 0}, {0, 0, 0, 1, 0, 0}};
    o.require(g.states == states, "basis markings differ");
    struct T {
      std::size_t a;
      const char* t;
      ImplicitVector y;
      std::size_t b;
    };
    const std::vector<T> delta = {
        {0, "t3", {0, 1, 0, 0}, 1}, {0, "t4", {1, 2, 0, 0}, 2}, {0, "t6", {1, 2, 0, 0}, 3},
        {1, "t3", {1, 1, 0, 0}, 4}, {1, "t4", {2, 2, 1, 0}, 2}, {1, "t6", {2, 2, 1, 0}, 3},
        {2, "t3", {1, 1, 0, 0}, 5}, {4, "t3", {1, 1, 1, 0}, 4}, {4, "t4", {2, 2, 2, 0}, 2},
        {4, "t6", {2, 2, 2, 0}, 3}, {5, "t3", {1, 1, 1, 0}, 5}};
    std::set<std::tuple<std::size_t, index_t, ImplicitVector, std::size_t>> want, got;
    for (const auto& d : delta) want.emplace(d.a, ex1.net.transition(d.t), d.y, d.b);
    for (const auto& e : g.edges) got.emplace(e.source, e.event.transition, e.event.explanation, e.target);
    o.require(g.num_edges() == 11 && want == got, "transition relation differs");
    o.require(dt < 1.0, "took " + std::to_string(dt) + " s");
    o.detail << (o.pass ? "" : "; ") << g.num_states() << " states, " << g.num_edges() << " edges, "
             << dt * 1e3 << " ms";
  });

  run(2, "Reference plant: final basis set and blocking witness", [&](Outcome& o) {
    auto t0 = Clock::now();
    auto r = verify_plant(ex1);
    double dt = since(t0);
    o.require(r.verdict.final_basis == std::vector<std::size_t>{0, 1, 2, 4, 5}, "final basis differs");
    o.require(!r.verdict.nonblocking, "verdict is non-blocking");
    o.require(r.verdict.blocking_witness == std::optional<std::size_t>{3}, "witness is not M_b3");
    o.require(dt < 1.0, "took " + std::to_string(dt) + " s");
  });

  run(3, "Minimal explanation golden values at M_b0", [&](Outcome& o) {
    auto pi = derive_ci_partition(ex1.net, ex1.final);
    const auto& net = ex1.net;
    o.require(min_explanations(net, pi, ex1.m0, net.transition("t3")) == std::vector<ImplicitVector>{{0, 1, 0, 0}},
              "Y_min(t3)");
    o.require(min_explanations(net, pi, ex1.m0, net.transition("t4")) == std::vector<ImplicitVector>{{1, 2, 0, 0}},
              "Y_min(t4)");
    o.require(min_explanations(net, pi, ex1.m0, net.transition("t6")) == std::vector<ImplicitVector>{{1, 2, 0, 0}},
              "Y_min(t6)");
  });

  run(4, "Differential suite on 200 random plants (verdict, reach union, finality, dead markings)", [&](Outcome& o) {
    auto t0 = Clock::now();
    const auto& plants = differential_plants();
    o.require(plants.size() == 200, "only " + std::to_string(plants.size()) + " plants generated");
    std::size_t agree = 0, blocking = 0;
    for (std::size_t i = 0; i < plants.size(); ++i) {
      const Plant& plant = plants[i];
      auto r = verify_plant(plant);
      auto d = differential(plant, r, 200'000);
      if (d.empty()) ++agree;
      o.require(d.empty(), "plant " + std::to_string(i) + ": " + d);
      blocking += !r.verdict.nonblocking;
      for (const auto& mb : r.brg.states) {
        auto reach = implicit_reach(plant.net, r.partition, mb, 1'000'000);
        auto imax = i_max_marking(plant.net, r.partition, mb);
        bool some_final = std::any_of(reach.begin(), reach.end(), [&](const Marking& m) { return is_final(plant.final, m); });
        o.require(some_final == is_final(plant.final, imax), "plant " + std::to_string(i) + ": finality vs i-max");
        std::vector<Marking> dead;
        for (const auto& m : reach)
          if (is_dead(plant.net, m)) dead.push_back(m);
        o.require(dead.size() <= 1 && (dead.empty() || dead[0] == imax),
                  "plant " + std::to_string(i) + ": dead marking not unique or not i-max");
      }
    }
    double dt = since(t0);
    o.require(dt < 300.0, "took " + std::to_string(dt) + " s");
    o.detail << (o.pass ? "" : "; ") << agree << "/" << plants.size() << " agree, " << blocking << " blocking, "
             << dt << " s";
  });

  run(5, "max_ifv independent of the topological order of T_I", [&](Outcome& o) {
    std::size_t checked = 0;
    std::mt19937_64 rng(2024);
    for (const auto& plant : differential_plants()) {
      auto pi = derive_ci_partition(plant.net, plant.final);
      std::vector<std::size_t> rank(plant.net.num_transitions());
      std::iota(rank.begin(), rank.end(), 0);
      std::shuffle(rank.begin(), rank.end(), rng);
      std::vector<TransitionSet> orders = {
          pi.implicit_order, *topological_order(plant.net, pi.implicit, std::greater<index_t>{}),
          *topological_order(plant.net, pi.implicit, [&](index_t a, index_t b) { return rank[a] < rank[b]; })};
      for (const auto& mb : build_brg(plant, pi).states) {
        auto y = max_ifv(plant.net, pi, mb, orders[0]);
        for (std::size_t k = 1; k < orders.size(); ++k)
          o.require(max_ifv(plant.net, pi, mb, orders[k]) == y, "orders disagree");
        ++checked;
      }
    }
    o.detail << (o.pass ? "" : "; ") << checked << " basis markings";
  });

  run(6, "Benchmark runs 1-3 (reconstructed net)", [&](Outcome& o) {
    NetFile nf = load_net(nets("benchmark.pnet"));
    const auto& net = nf.plant.net;
    o.require(net.num_places() == 46 && net.num_transitions() == 39, "size");
    o.require(conflict_transitions(net) ==
                  names(net, {"t6", "t7", "t8", "t9", "t13", "t14", "t15", "t21", "t22", "t23", "t24", "t28",
                              "t29", "t30", "t31", "t32", "t33", "t34", "t35", "t36", "t37", "t38", "t39"}),
              "T_conf");
    o.require(increasing_transitions(net, nf.plant.final) == names(net, {"t1", "t7", "t22", "t24", "t35"}), "T_inc");

    struct Run {
      token_t alpha, beta;
      std::size_t reachable, basis;
      bool nonblocking;
    };
    const Run runs[] = {{1, 1, 1966, 604, true}, {1, 2, 12577, 2145, true}, {2, 2, 76808, 7718, false}};
    bool exact = true, downgraded = true;
    for (const auto& run : runs) {
      auto m0 = nf.plant.m0.tokens();
      m0[net.place("p1")] = run.alpha;
      m0[net.place("p16")] = run.beta;
      Plant plant(net, Marking(m0), nf.plant.final);
      auto c = measure(plant, nf.forced_explicit, true);
      o.detail << "run a=" << run.alpha << ",b=" << run.beta << ": |R|=" << c.reachable << "/" << run.reachable
               << " |M_B|=" << c.basis << "/" << run.basis << " nb=" << (c.nonblocking ? "Yes" : "No") << "/"
               << (run.nonblocking ? "Yes" : "No") << (c.diff.empty() ? "" : " " + c.diff) << "; ";
      exact = exact && c.reachable == run.reachable && c.basis == run.basis && c.nonblocking == run.nonblocking;
      downgraded = downgraded && c.nonblocking == run.nonblocking && c.diff.empty();
    }
    o.detail << "exact " << (exact ? "met" : "not met") << ", downgraded " << (downgraded ? "met" : "not met");
    o.pass = o.pass && (exact || downgraded);
  });

  run(7, "Hospital net, k=6 and k=8 (reconstructed net)", [&](Outcome& o) {
    NetFile nf = load_net(nets("hospital.pnet"));
    const auto& net = nf.plant.net;
    o.require(net.num_places() == 22 && net.num_transitions() == 22, "size");
    o.require(conflict_transitions(net) == names(net, {"t4", "t5", "t6", "t7", "t8", "t9", "t14", "t15", "t16"}),
              "T_conf");
    o.require(increasing_transitions(net, nf.plant.final) == names(net, {"t14", "t15", "t16"}), "T_inc");
    auto pi = derive_ci_partition(net, nf.plant.final);
    o.require(pi.explicit_set == names(net, {"t4", "t5", "t6", "t7", "t8", "t9", "t10", "t11", "t14", "t15", "t16"}),
              "derived T_E");

    struct Case {
      token_t k;
      std::size_t final_basis;
      bool nonblocking;
    };
    bool exact = true, downgraded = true;
    for (const Case& c : {Case{6, 818, false}, Case{8, 3863, true}}) {
      FinalSpec final = nf.plant.final;
      final.gmecs[0].k = c.k;
      Plant plant(net, nf.plant.m0, final);
      auto got = measure(plant, nf.forced_explicit, true);
      o.detail << "k=" << c.k << ": |M_B|=" << got.basis << "/3863 |M^_B|=" << got.final_basis << "/"
               << c.final_basis << " nb=" << (got.nonblocking ? "Yes" : "No") << "/" << (c.nonblocking ? "Yes" : "No")
               << " |R|=" << got.reachable << (got.diff.empty() ? "" : " " + got.diff) << "; ";
      exact = exact && got.basis == 3863 && got.final_basis == c.final_basis && got.nonblocking == c.nonblocking;
      downgraded = downgraded && got.nonblocking == c.nonblocking && got.diff.empty();
    }
    o.detail << "exact " << (exact ? "met" : "not met") << ", downgraded " << (downgraded ? "met" : "not met");
    o.pass = o.pass && (exact || downgraded);
  });

  run(8, "Empty T_I: BRG equals RG and the verdict is unchanged", [&](Outcome& o) {
    std::size_t checked = 0;
    for (const auto& plant : differential_plants()) {
      auto pi = make_partition(plant.net, plant.final, all_transitions(plant.net));
      auto g = build_brg(plant, pi);
      auto rg = oracle::build_rg(plant);
      std::map<Marking, std::size_t> rg_index;
      for (std::size_t s = 0; s < rg.states.size(); ++s) rg_index[rg.states[s]] = s;
      bool bijective = g.num_states() == rg.states.size() && g.num_edges() == rg.edges.size();
      std::vector<std::size_t> image(g.num_states());
      std::set<std::size_t> hit;
      for (std::size_t s = 0; bijective && s < g.num_states(); ++s) {
        auto it = rg_index.find(g.states[s]);
        bijective = it != rg_index.end() && hit.insert(it->second).second;
        if (bijective) image[s] = it->second;
      }
      if (bijective) {
        std::set<std::tuple<std::size_t, index_t, std::size_t>> a, b;
        for (const auto& e : g.edges) a.emplace(image[e.source], e.event.transition, image[e.target]);
        for (const auto& e : rg.edges) b.emplace(e.source, e.transition, e.target);
        bijective = a == b;
      }
      o.require(bijective, "plant " + std::to_string(checked) + ": BRG and RG differ");
      bool v = check_nonblocking(plant, pi).nonblocking;
      o.require(v == check_nonblocking(plant).nonblocking && v == oracle::rg_nonblocking(rg, plant.final).nonblocking,
                "plant " + std::to_string(checked) + ": verdict changed");
      ++checked;
    }
    o.detail << (o.pass ? "" : "; ") << checked << " plants";
  });

  std::cout << (failures ? std::to_string(failures) + " criterion(s) failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
