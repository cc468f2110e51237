#include "tcmc/fixtures.hpp"

namespace tcmc::fixtures {

TransitionSystem two_state() {
  return TransitionSystem({"1", "2"}, {{0, 0}, {0, 1}, {1, 1}}, {{"p", 0b01}, {"q", 0b10}});
}

TransitionSystem traffic_light() {
  return TransitionSystem({"red", "green", "yellow"}, {{0, 1}, {1, 2}, {2, 0}});
}

TransitionSystem traffic_light_abstract() {
  return TransitionSystem({"red", "go"}, {{0, 1}, {1, 1}, {1, 0}});
}

TransitionSystem even_odd() {
  return TransitionSystem({"even", "odd"}, {{0, 1}, {1, 0}});
}

TransitionSystem single_loop() { return TransitionSystem({"s"}, {{0, 0}}); }

std::vector<TransitionSystem> all_total_systems(std::size_t max_states) {
  std::vector<TransitionSystem> out;
  for (std::size_t n = 1; n <= max_states; ++n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    const std::size_t bits = n * n;
    for (std::size_t rel = 0; rel < (std::size_t{1} << bits); ++rel) {
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if ((rel >> (a * n + b)) & 1) edges.emplace_back(a, b);
      TransitionSystem ts(names, edges);
      if (ts.is_total()) out.push_back(std::move(ts));
    }
  }
  return out;
}

}  // namespace tcmc::fixtures
