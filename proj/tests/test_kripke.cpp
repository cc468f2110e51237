#include <doctest.h>

#include <algorithm>

#include "support/fixtures.hpp"
#include "tcmc/kripke.hpp"
#include "tcmc/lattice.hpp"

using namespace tcmc;

TEST_CASE("totalize adds self-loops exactly where needed") {
  // {1->2}: 1 lacks a predecessor, 2 lacks a successor
  TransitionSystem ts({"1", "2"}, {{0, 1}});
  auto r = totalize(ts);
  CHECK(r.added_self_loops == 0b11);
  CHECK(r.system.edge(0, 0));
  CHECK(r.system.edge(0, 1));
  CHECK(r.system.edge(1, 1));
  CHECK(r.system.is_total());
  // idempotent
  auto r2 = totalize(r.system);
  CHECK(r2.added_self_loops == 0);
  CHECK(r2.system.edge_list() == r.system.edge_list());
  // single state, no edges -> self loop
  TransitionSystem one({"s"}, {});
  auto r3 = totalize(one);
  CHECK(r3.system.edge(0, 0));
}

TEST_CASE("pre/post transformers") {
  auto ts = fixtures::two_state();  // 1->1, 1->2, 2->2
  CHECK(pre_tilde(ts, 0b01) == 0);          // pre~({1}) = {}
  CHECK(pre_tilde(ts, 0b11) == 0b11);       // pre~(all) = all
  CHECK(post(ts, 0b01) == 0b11);            // post({1}) = {1,2}
  CHECK(pre(ts, 0b10) == 0b11);
  CHECK(post_tilde(ts, 0b01) == 0b01);      // states all of whose preds are in {1}
}

TEST_CASE("pre_tilde is the right adjoint of post") {
  auto ts = fixtures::two_state();
  StateSet all = ts.all_states();
  for (StateSet x = 0; x <= all; ++x)
    for (StateSet y = 0; y <= all; ++y)
      CHECK(((post(ts, x) & ~y) == 0) == ((x & ~pre_tilde(ts, y)) == 0));
}

TEST_CASE("injectivity and symmetry of the fixtures") {
  auto tl = fixtures::traffic_light();
  CHECK(is_injective(tl));
  CHECK_FALSE(is_symmetric(tl));
  auto ab = fixtures::traffic_light_abstract();
  CHECK_FALSE(is_injective(ab));
  CHECK(is_symmetric(ab));
  TransitionSystem self({"s"}, {{0, 0}});
  CHECK(is_injective(self));
  CHECK(is_symmetric(self));
  CHECK(is_injective(fixtures::even_odd()));
}

TEST_CASE("p_arrow on the two-state system") {
  auto ts = fixtures::two_state();
  auto w = p_arrow(ts, 0b01);  // S={1}
  REQUIRE(w);
  // 1 ->^1 2 and 2 ->^1 2
  CHECK(w->k >= 1);
  CHECK(((StateSet{1} << w->q) & 0b01) != 0);
  CHECK(((StateSet{1} << w->r) & 0b01) == 0);
  // trivial boundary cases: empty and full never satisfy P
  CHECK_FALSE(p_arrow(ts, 0));
  CHECK_FALSE(p_arrow(ts, ts.all_states()));
}

TEST_CASE("p_arrow complement symmetry on all <=3-state total systems") {
  for (const auto& ts : fixtures::all_total_systems(3)) {
    StateSet all = ts.all_states();
    for (StateSet s = 0; s <= all; ++s)
      CHECK(p_arrow(ts, s).has_value() == p_arrow(ts, static_cast<StateSet>(~s & all)).has_value());
  }
}

TEST_CASE("core_next_states of the fixtures") {
  auto two = fixtures::two_state();
  auto c = core_next_states(two);
  CHECK(c == std::vector<StateSet>{0b00, 0b11});

  auto tl = fixtures::traffic_light();
  CHECK(core_next_states(tl).size() == 8);  // injective: all subsets survive

  auto ab = fixtures::traffic_light_abstract();
  CHECK(core_next_states(ab) == std::vector<StateSet>{0b00, 0b11});

  CHECK(core_next_states(fixtures::even_odd()).size() == 4);

  // traffic light, S={green}: no equal-length confluence (forced by injectivity)
  auto green = tl.state("green");
  REQUIRE(green);
  CHECK_FALSE(p_arrow(tl, StateSet{1} << *green));
}

TEST_CASE("Theorem inj as a property over all <=3-state total systems") {
  for (const auto& ts : fixtures::all_total_systems(3)) {
    bool inj = is_injective(ts);
    bool full = core_next_states(ts).size() == (std::size_t{1} << ts.state_count());
    CHECK(inj == full);
  }
}

TEST_CASE("subset cap is enforced") {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (int i = 0; i < 14; ++i) {
    names.push_back("s" + std::to_string(i));
    edges.emplace_back(i, (i + 1) % 14);
  }
  TransitionSystem big(names, edges);
  CHECK_THROWS_AS(core_next_states(big), CapExceeded);
}

TEST_CASE("ts parsing round-trips") {
  const char* text = R"(
# traffic light
state red
state green
state yellow
edge red green
edge green yellow
edge yellow red
label go green yellow
)";
  auto ts = parse_ts_text(text, "t.ts");
  CHECK(ts.state_count() == 3);
  CHECK(ts.edge(0, 1));
  CHECK(*ts.label("go") == 0b110);
  auto again = parse_ts_text(format_ts(ts), "round.ts");
  CHECK(again.edge_list() == ts.edge_list());
  CHECK(again.labels() == ts.labels());
  CHECK_THROWS_AS(parse_ts_text("edge a b", "bad.ts"), InputError);
}

TEST_CASE("gfp of constrained pre_tilde on the two-state powerset") {
  auto ts = fixtures::two_state();
  PowersetLattice lat({"1", "2"}, SetOrder::Sub);
  // f(S) = pre~(S) ∩ {1}: descending iteration reaches empty in two steps
  LatticeFn f{"pre_seeded", 1, [&ts, &lat](std::span<const Elem> a) {
                StateSet s = static_cast<StateSet>(a[0]);
                return static_cast<Elem>(pre_tilde(ts, s) & 0b01) & lat.full();
              }};
  auto r = gfp(f, lat);
  CHECK(r.value == 0);
  CHECK(r.iterations == 2);
}

TEST_CASE("right adjoint of post is pre_tilde on the state powerset") {
  auto ts = fixtures::two_state();
  PowersetLattice lat({"1", "2"}, SetOrder::Sub);
  LatticeFn postfn{"post", 1, [&ts](std::span<const Elem> a) {
                     return static_cast<Elem>(post(ts, static_cast<StateSet>(a[0])));
                   }};
  auto adj = right_adjoint(postfn, lat);
  for (Elem y = 0; y < lat.size(); ++y)
    CHECK(adj(y) == static_cast<Elem>(pre_tilde(ts, static_cast<StateSet>(y))));
}
