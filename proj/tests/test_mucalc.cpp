#include <doctest.h>

#include "support/fixtures.hpp"
#include "support/formula_gen.hpp"
#include "tcmc/mucalc.hpp"

using namespace tcmc;

namespace {

UniverseBounds agreement_bounds() {
  UniverseBounds b;
  b.L = 2;
  b.B = 2;
  b.O = 1;
  b.I = 1;
  b.Delta = 2;
  b.K = 3;
  b.depth_cap = 4;
  return b;
}

}  // namespace

TEST_CASE("formula parsing") {
  auto f = parse_formula("G p | F G q");
  REQUIRE(f->kind == NodeKind::Or);
  CHECK(f->kids[0]->kind == NodeKind::Globally);
  CHECK(f->kids[1]->kind == NodeKind::Finally);
  CHECK(f->kids[1]->kids[0]->kind == NodeKind::Globally);

  auto g = parse_formula("()(rev ()(rev p))");
  REQUIRE(g->kind == NodeKind::Next);
  REQUIRE(g->kids[0]->kind == NodeKind::Reverse);
  REQUIRE(g->kids[0]->kids[0]->kind == NodeKind::Next);
  CHECK(g->kids[0]->kids[0]->kids[0]->kind == NodeKind::Reverse);

  CHECK(parse_formula("(-)p")->kind == NodeKind::Prev);
  CHECK(parse_formula("mu X. p | ()X")->kind == NodeKind::Mu);
  CHECK(parse_formula("[S:{1,2}]")->kind == NodeKind::StateProp);
  CHECK(parse_formula("[T:{(1,2),(2,2)}]")->kind == NodeKind::TransProp);
  CHECK(parse_formula("U(p, q)")->kind == NodeKind::Until);
  CHECK(parse_formula("F- p")->kind == NodeKind::FinallyPast);
  CHECK(parse_formula("p -> q")->kind == NodeKind::Implies);

  // monotonicity violation
  CHECK_THROWS_AS(parse_formula("mu X. !X"), InputError);
  CHECK_THROWS_AS(parse_formula("nu X. !(p | X) | q"), InputError);
  // parity-even double negation is fine
  CHECK(parse_formula("mu X. !!X")->kind == NodeKind::Mu);
  // syntax errors carry positions
  CHECK_THROWS_WITH_AS(parse_formula("p |"), doctest::Contains("position"), InputError);

  // round-trip through the printer
  for (const char* txt : {"G p | F G q", "()(rev ()(rev p))", "mu X. p | ()X",
                          "U(p & q, !p)", "[S:{1}] & [T:{(1,2)}]"}) {
    auto h = parse_formula(txt);
    CHECK(format_formula(parse_formula(format_formula(h))) == format_formula(h));
  }
}

TEST_CASE("trace_sem basics on the two-state system") {
  TraceUniverse u(fixtures::two_state(), UniverseBounds{});
  // σ_1: all universe traces presently at 1 (not only model traces)
  auto s1 = trace_sem(parse_formula("p"), u);
  CHECK(s1.bits() == u.sigma_mask(0));
  // μX.X = ∅
  CHECK(trace_sem(parse_formula("mu X. X"), u).count() == 0);
  // νX.X = carrier
  CHECK(trace_sem(parse_formula("nu X. X"), u).count() == u.size());
  // ¬φ is the carrier complement
  auto f = parse_formula("() p");
  auto pos = trace_sem(f, u);
  auto neg = trace_sem(parse_formula("!() p"), u);
  CHECK((pos.bits() & neg.bits()).none());
  // decided rows cover the user zone exactly
  CHECK(((pos.bits() | neg.bits()) & u.user_zone()) == u.user_zone());
}

TEST_CASE("Example first: Gp | FGq") {
  TraceUniverse u(fixtures::two_state(), UniverseBounds{});
  auto f = parse_formula("G p | F G q");
  auto sem = trace_sem(f, u);
  auto m = model_traces(u);
  // every model trace satisfies the formula
  CHECK(set_intersect(sem, m) == m);
  CHECK(alpha_forall(sem, u) == 0b11);
  CHECK(state_sem(f, u) == 0b10);
  auto br = is_branchable(f, u);
  CHECK_FALSE(br.branchable);
  CHECK(br.alpha_side == 0b11);
  CHECK(br.state_side == 0b10);
  CHECK(br.witness == 0b01);
}

TEST_CASE("next-prev example: state semantics of ()(rev ()(rev p)) is empty") {
  TraceUniverse u(fixtures::two_state(), UniverseBounds{});
  auto f = parse_formula("()(rev ()(rev p))");
  // trace side: ⊕⊖ is the identity, so the trace semantics is σ_1
  auto sem = trace_sem(f, u);
  CHECK((sem.bits() & u.user_zone()) == (u.sigma_mask(0) & u.user_zone()));
  CHECK(alpha_forall(sem, u) == 0b01);
  CHECK(state_sem(f, u) == 0);
  auto br = is_branchable(f, u);
  CHECK_FALSE(br.branchable);
  CHECK(br.alpha_side == 0b01);
  CHECK(br.state_side == 0);
  // the Prev sugar agrees with the explicit reversal spelling
  auto g = parse_formula("()((-)p)");
  CHECK(state_sem(g, u) == 0);
  CHECK((trace_sem(g, u).bits() & u.user_zone()) == (sem.bits() & u.user_zone()));
}

TEST_CASE("state_sem clauses") {
  TraceUniverse u(fixtures::two_state(), UniverseBounds{});
  // σ_S -> S for any S
  for (StateSet s = 0; s <= 3; ++s) CHECK(state_sem(make_state_prop(s), u) == s);
  // π_t -> {s : every successor step is in t}
  CHECK(state_sem(parse_formula("[T:{(1,1),(1,2)}]"), u) == 0b01);
  CHECK(state_sem(parse_formula("[T:{(1,1),(1,2),(2,2)}]"), u) == 0b11);
  // ⊕ -> pre~
  CHECK(state_sem(parse_formula("() q"), u) == 0b10);
  // A is the model guard: no state change
  CHECK(state_sem(parse_formula("A p"), u) == state_sem(parse_formula("p"), u));
  // ⟲ clause: {s in S : M↓s = ⟲M↓s}; on this system no state qualifies
  CHECK(state_sem(parse_formula("rev p"), u) == 0);
  // on a symmetric system every state qualifies
  TraceUniverse us(fixtures::traffic_light_abstract(), UniverseBounds{});
  CHECK(state_sem(parse_formula("rev [S:{red}]"), us) == *us.system().state("red") + 1);
}

TEST_CASE("eval_on_trace paper examples") {
  auto ts = fixtures::two_state();
  auto gp = parse_formula("G p");
  auto fgq = parse_formula("F G q");
  auto const1 = parse_trace("^(1) (1)^ @0 !0", ts);
  auto const2 = parse_trace("^(2) (2)^ @0 !0", ts);
  auto sw = parse_trace("^(1) (2)^ @0 !0", ts);  // switches to 2 at time 0
  CHECK(eval_on_trace(gp, const1, ts));
  CHECK_FALSE(eval_on_trace(gp, sw, ts));
  CHECK(eval_on_trace(fgq, sw, ts));
  CHECK(eval_on_trace(fgq, const2, ts));
  CHECK_FALSE(eval_on_trace(fgq, const1, ts));
  CHECK(eval_on_trace(parse_formula("G p | F G q"), const1, ts));
  CHECK(eval_on_trace(parse_formula("G p | F G q"), sw, ts));
  // ⊕p at present i iff p at present i+1
  auto np = parse_formula("() p");
  for (int i = -3; i <= 3; ++i) {
    auto t = sw;
    t.present = i;
    bool direct = eval_on_trace(np, t, ts);
    auto t2 = t;
    t2.present = i + 1;
    CHECK(direct == eval_on_trace(parse_formula("p"), t2, ts));
  }
  // past operators look left
  auto fpq = parse_formula("F- q");
  auto swq = parse_trace("^(1) (2)^ @0 !3", ts);
  CHECK(eval_on_trace(fpq, swq, ts));
  auto swp = parse_trace("^(1) (2)^ @0 !-1", ts);
  CHECK_FALSE(eval_on_trace(fpq, swp, ts));
  CHECK(eval_on_trace(parse_formula("G- p"), swp, ts));
  // fixpoints and quantifiers are rejected
  CHECK_THROWS_AS(eval_on_trace(parse_formula("mu X. X"), const1, ts), InputError);
  CHECK_THROWS_AS(eval_on_trace(parse_formula("A p"), const1, ts), InputError);
}

TEST_CASE("engine agreement: per-trace evaluator vs set engine") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  auto m = model_traces(u);
  auto members = m.members();
  auto formulas = formula_gen::fixpoint_free(ts, 4, 400);
  REQUIRE(formulas.size() >= 200);
  for (const auto& f : formulas) {
    TraceSet sem = trace_sem(f, u);
    for (const auto& t : members) {
      bool set_engine = sem.contains(t);
      bool per_trace = eval_on_trace(f, t, ts);
      if (set_engine != per_trace) {
        CAPTURE(format_formula(f));
        CAPTURE(format_trace(t, ts));
        REQUIRE(set_engine == per_trace);
      }
    }
  }
}

TEST_CASE("mu-free negation normal: trace_sem(!phi) complements on the user zone") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  auto formulas = formula_gen::fixpoint_free(ts, 3, 60);
  for (const auto& f : formulas) {
    auto pos = trace_sem(f, u);
    auto neg = trace_sem(make_node(NodeKind::Not, {f}), u);
    CHECK(((u.user_zone() - pos.bits())) ==
          (neg.bits() & u.user_zone()));
  }
}

TEST_CASE("prev equals rev-next-rev at both engine levels") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  auto direct = parse_formula("(-)p");
  auto spelled = parse_formula("rev ()(rev p)");
  CHECK((trace_sem(direct, u).bits() & u.user_zone()) ==
        (trace_sem(spelled, u).bits() & u.user_zone()));
  CHECK(state_sem(direct, u) == state_sem(spelled, u));
  for (const auto& t : model_traces(u).members()) {
    CHECK(eval_on_trace(direct, t, ts) == eval_on_trace(spelled, t, ts));
  }
}

TEST_CASE("soundness: state semantics below the universal abstraction (guarded fragment)") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  std::size_t checked = 0;
  for (const auto& f : formula_gen::fixpoint_free(ts, 4, 300)) {
    if (!negation_guarded(f)) continue;
    ++checked;
    auto br = is_branchable(f, u);  // throws on soundness violation
    CHECK((br.state_side & ~br.alpha_side) == 0);
  }
  CHECK(checked > 50);
}

TEST_CASE("negation over a temporal subformula can exceed the universal abstraction") {
  // !()p: the state side is the complement of pre~({1}) = {1,2}, while only
  // state 2 universally satisfies "next state is not 1" at the trace level.
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  auto f = parse_formula("!()p");
  CHECK_FALSE(negation_guarded(f));
  auto sem = trace_sem(f, u);
  CHECK(alpha_forall(sem, u) == 0b10);
  CHECK(state_sem(f, u) == 0b11);
  auto br = is_branchable(f, u);
  CHECK_FALSE(br.branchable);
  CHECK_FALSE(br.sound_fragment);
}

TEST_CASE("branchable cases") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, UniverseBounds{});
  // σ_S is branchable
  CHECK(is_branchable(parse_formula("p"), u).branchable);
  CHECK(is_branchable(parse_formula("[S:{1,2}]"), u).branchable);
  // ⊕σ_S: forward-closed argument, complete
  CHECK(is_branchable(parse_formula("() p"), u).branchable);
  CHECK(is_branchable(parse_formula("() q"), u).branchable);
}

TEST_CASE("is_ltl_det") {
  CHECK(is_ltl_det(parse_formula("p")));
  CHECK(is_ltl_det(parse_formula("!p")));
  CHECK(is_ltl_det(parse_formula("(p & ()q) | (!p & q)")));
  CHECK(is_ltl_det(parse_formula("U(p & q, !p & q)")));
  CHECK(is_ltl_det(parse_formula("W(p & q, !p & ()p)")));
  CHECK_FALSE(is_ltl_det(parse_formula("G p | F G q")));
  CHECK_FALSE(is_ltl_det(parse_formula("p | q")));
  CHECK_FALSE(is_ltl_det(parse_formula("F p")));
  CHECK_FALSE(is_ltl_det(parse_formula("U(p, q)")));
  CHECK_FALSE(is_ltl_det(parse_formula("rev p")));
  // the generator only produces members of the fragment
  auto ts = fixtures::two_state();
  for (const auto& f : formula_gen::ltl_det(ts, 3, 300)) CHECK(is_ltl_det(f));
}

TEST_CASE("LTL_det branchability on the fixtures") {
  for (auto mk : {fixtures::two_state, fixtures::traffic_light_abstract, fixtures::even_odd}) {
    auto ts = mk();
    TraceUniverse u(ts, agreement_bounds());
    for (const auto& f : formula_gen::ltl_det(ts, 2, 120)) {
      auto br = is_branchable(f, u);
      if (!br.branchable) {
        CAPTURE(format_formula(f));
        CHECK(br.branchable);
      }
    }
  }
}

TEST_CASE("set engine is exact on every user-zone trace, model or not") {
  // stronger than the model-trace agreement oracle: the per-trace evaluator
  // is universe-independent, so this pins the whole decided region of the
  // set engine, including rows repaired from periodic continuations
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  std::vector<BiLassoTrace> user;
  u.user_zone().for_each([&](std::size_t id) {
    user.push_back(u.trace_of(static_cast<uint32_t>(id)));
  });
  auto formulas = formula_gen::fixpoint_free(ts, 4, 250);
  for (const auto& f : formulas) {
    TraceSet sem = trace_sem(f, u);
    for (const auto& t : user) {
      bool set_engine = sem.contains(t);
      bool per_trace = eval_on_trace(f, t, ts);
      if (set_engine != per_trace) {
        CAPTURE(format_formula(f));
        CAPTURE(format_trace(t, ts));
        REQUIRE(set_engine == per_trace);
      }
    }
  }
}

TEST_CASE("carrier policies agree on the model window") {
  auto ts = fixtures::two_state();
  UniverseBounds b = agreement_bounds();
  TraceUniverse full(ts, b, TraceUniverse::CarrierPolicy::Full);
  TraceUniverse closure(ts, b, TraceUniverse::CarrierPolicy::ModelClosure);
  REQUIRE(full.full_carrier());
  REQUIRE_FALSE(closure.full_carrier());
  auto mf = model_traces(full).members();
  auto mc = model_traces(closure).members();
  REQUIRE(mf.size() == mc.size());
  for (const auto& t : mf) CHECK(model_traces(closure).contains(t));
  // branchability verdicts coincide across carriers
  for (const char* txt : {"p", "() p", "G p | F G q", "U(p & q, !p & q)", "rev p"}) {
    auto f = parse_formula(txt);
    auto b1 = is_branchable(f, full);
    auto b2 = is_branchable(f, closure);
    CHECK(b1.branchable == b2.branchable);
    CHECK(b1.alpha_side == b2.alpha_side);
    CHECK(b1.state_side == b2.state_side);
  }
}

TEST_CASE("temporal sugar agrees with raw fixpoint expansions on the user zone") {
  auto ts = fixtures::two_state();
  TraceUniverse u(ts, agreement_bounds());
  auto user_eq = [&](const char* a, const char* b) {
    auto sa = trace_sem(parse_formula(a), u);
    auto sb = trace_sem(parse_formula(b), u);
    CAPTURE(a);
    CHECK((sa.bits() & u.user_zone()) == (sb.bits() & u.user_zone()));
  };
  user_eq("F p", "mu X. p | ()X");
  user_eq("F () q", "mu X. (()q) | ()X");
  user_eq("G p", "nu X. p & ()X");
  user_eq("G (p | q)", "nu X. (p | q) & ()X");
  user_eq("U(p, q)", "mu X. q | (p & ()X)");
  user_eq("W(p, q)", "nu X. q | (p & ()X)");
  user_eq("F- p", "mu X. p | (-)X");
  user_eq("G- q", "nu X. q & (-)X");
}
