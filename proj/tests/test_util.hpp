#pragma once

#include <catch_amalgamated.hpp>

#include "basisnet/basisnet.hpp"

namespace basisnet::testing {

inline NetFile load_example(const std::string& name) {
  return load_net(std::string(BASISNET_NETS_DIR) + "/" + name);
}

inline Plant example1() { return load_example("example1.pnet").plant; }

// Transition index from a 1-based name such as "t3".
inline index_t tx(const PetriNet& net, const std::string& id) { return net.transition(id); }

inline TransitionSet txs(const PetriNet& net, std::initializer_list<const char*> ids) {
  TransitionSet out;
  for (auto id : ids) out.push_back(net.transition(id));
  std::sort(out.begin(), out.end());
  return out;
}

// Two-place, one-transition net: p1 -> t1 -> p2.
inline PetriNet line_net() {
  return PetriNet({"p1", "p2"}, {"t1"}, {{1}, {0}}, {{0}, {1}});
}

}  // namespace basisnet::testing
