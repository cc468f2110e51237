#pragma once

#include <vector>

#include "tcmc/kripke.hpp"

namespace tcmc::fixtures {

// 1 -> 1, 1 -> 2, 2 -> 2 with labels p={1}, q={2}
TransitionSystem two_state();
// red -> green -> yellow -> red
TransitionSystem traffic_light();
// red -> go, go -> go, go -> red
TransitionSystem traffic_light_abstract();
// even <-> odd
TransitionSystem even_odd();
TransitionSystem single_loop();

// every (backward and forward) total transition system with up to max_states
// states, state names "0", "1", ...
std::vector<TransitionSystem> all_total_systems(std::size_t max_states);

}  // namespace tcmc::fixtures
