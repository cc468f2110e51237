#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "tcmc/lattice.hpp"

using namespace tcmc;

namespace {

// powerset of {1,2} under ⊆ as an explicit lattice, for cross-checks
std::shared_ptr<PowersetLattice> ps12() {
  return std::make_shared<PowersetLattice>(std::vector<std::string>{"1", "2"}, SetOrder::Sub);
}

// diamond: bot < a,b < top
std::shared_ptr<ExplicitLattice> diamond() {
  return std::make_shared<ExplicitLattice>(
      std::vector<std::string>{"bot", "a", "b", "top"},
      std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
}

Elem named(const FiniteLattice& lat, const std::string& n) {
  auto e = lat.find(n);
  REQUIRE(e);
  return *e;
}

}  // namespace

TEST_CASE("explicit lattice construction and order") {
  auto d = diamond();
  CHECK(d->size() == 4);
  CHECK(d->top() == named(*d, "top"));
  CHECK(d->bottom() == named(*d, "bot"));
  CHECK(d->leq(named(*d, "a"), named(*d, "top")));
  CHECK_FALSE(d->leq(named(*d, "a"), named(*d, "b")));
  CHECK(d->meet(named(*d, "a"), named(*d, "b")) == named(*d, "bot"));
  CHECK(d->join(named(*d, "a"), named(*d, "b")) == named(*d, "top"));

  // N5-style poset without all meets must be rejected: two incomparable
  // maximal elements and two incomparable minimal ones with a crossing.
  CHECK_THROWS_AS(ExplicitLattice({"a", "b", "c", "d"},
                                  {{0, 2}, {0, 3}, {1, 2}, {1, 3}}),
                  InputError);
}

TEST_CASE("moore closure on powersets") {
  auto l = ps12();
  // moore({}) = {top}
  auto m0 = moore_closure({}, *l);
  CHECK(m0 == std::vector<Elem>{l->top()});
  // moore({{1},{2}}) = all four subsets
  auto m1 = moore_closure({named(*l, "{1}"), named(*l, "{2}")}, *l);
  CHECK(m1.size() == 4);
}

TEST_CASE("Sign family via moore closure over the bounded-integer powerset") {
  auto lat = make_int_powerset(10);
  Elem zge = named(*lat, "{0..10}");
  Elem zle = named(*lat, "{-10..0}");
  auto fam = moore_closure({zge, zle}, *lat);
  CHECK(fam.size() == 4);
  CHECK(std::count(fam.begin(), fam.end(), lat->top()) == 1);
  CHECK(std::count(fam.begin(), fam.end(), named(*lat, "[0]")) == 1);
  CHECK(lat->name(named(*lat, "{0..10}")) == "[0,10]");
  CHECK(lat->name(lat->top()) == "Z");
}

TEST_CASE("uco apply: identity, Sign, Sign+") {
  auto lat = make_int_powerset(10);
  // identity uco: all elements as fixpoints is infeasible here; use small explicit
  auto d = diamond();
  Uco ident(*d, {0, 1, 2, 3});
  for (Elem x = 0; x < d->size(); ++x) CHECK(ident.apply(x) == x);

  Uco sign(*lat, {named(*lat, "Z"), named(*lat, "{0..10}"), named(*lat, "{-10..0}"),
                  named(*lat, "[0]")});
  CHECK(sign.apply(named(*lat, "{2,3}")) == named(*lat, "{0..10}"));

  Uco sign_plus(*lat, {named(*lat, "Z"), named(*lat, "{0..10}"), named(*lat, "{-10..0}"),
                       named(*lat, "{0..9}"), named(*lat, "[0]")});
  CHECK(sign_plus.apply(named(*lat, "{0..3}")) == named(*lat, "{0..9}"));
}

TEST_CASE("uco join and meet") {
  auto lat = make_int_powerset(4);
  Uco sign(*lat, {named(*lat, "Z"), named(*lat, "{0..4}"), named(*lat, "{-4..0}"),
                  named(*lat, "[0]")});
  // idempotence of join
  CHECK(uco_join(sign, sign) == sign);
  // meet with {Z, [0,4]}-like domain: all pairwise meets appear
  Uco other(*lat, {named(*lat, "Z"), named(*lat, "{0..3}")});
  Uco met = uco_meet(sign, other);
  CHECK(met.is_fixpoint(named(*lat, "{0..3}")));
  CHECK(met.is_fixpoint(named(*lat, "[0]")));
  CHECK(met.is_fixpoint(named(*lat, "{0..4}")));
  // ordering: meet refines both
  CHECK(uco_leq(met, sign));
  CHECK(uco_leq(met, other));
  // join abstracts both
  Uco joined = uco_join(sign, other);
  CHECK(uco_leq(sign, joined));
  CHECK(uco_leq(other, joined));
}

TEST_CASE("uco properties hold exhaustively at desk scale") {
  auto lat = make_int_powerset(2);  // 32 elements
  std::mt19937 rng(7);
  for (int round = 0; round < 20; ++round) {
    std::vector<Elem> fam;
    for (int i = 0; i < 4; ++i) fam.push_back(rng() % lat->size());
    Uco rho(*lat, fam);
    // extensive, idempotent, monotone
    for (Elem x = 0; x < lat->size(); ++x) {
      CHECK(lat->leq(x, rho.apply(x)));
      CHECK(rho.apply(rho.apply(x)) == rho.apply(x));
    }
    for (Elem x = 0; x < lat->size(); ++x)
      for (Elem y = 0; y < lat->size(); ++y)
        if (lat->leq(x, y)) CHECK(lat->leq(rho.apply(x), rho.apply(y)));
    // rho(join X) = rho(join of rho(x))
    for (int t = 0; t < 10; ++t) {
      std::vector<Elem> xs = {rng() % lat->size(), rng() % lat->size(), rng() % lat->size()};
      Elem j1 = rho.apply(lat->join_all(xs));
      std::vector<Elem> rxs;
      for (Elem x : xs) rxs.push_back(rho.apply(x));
      CHECK(j1 == rho.apply(lat->join_all(rxs)));
    }
  }
}

TEST_CASE("uco ordering agrees with pointwise apply comparison") {
  auto lat = make_int_powerset(2);
  std::mt19937 rng(11);
  for (int round = 0; round < 30; ++round) {
    std::vector<Elem> f1, f2;
    for (int i = 0; i < 3; ++i) f1.push_back(rng() % lat->size());
    for (int i = 0; i < 3; ++i) f2.push_back(rng() % lat->size());
    Uco a(*lat, f1), b(*lat, f2);
    bool fixside = uco_leq(a, b);
    bool ptwise = true;
    for (Elem x = 0; x < lat->size(); ++x)
      if (!lat->leq(a.apply(x), b.apply(x))) ptwise = false;
    CHECK(fixside == ptwise);
  }
}

TEST_CASE("lfp and gfp") {
  auto d = diamond();
  auto id = identity_fn(*d);
  CHECK(lfp(id, *d).value == d->bottom());
  CHECK(gfp(id, *d).value == d->top());

  Elem a = named(*d, "a");
  LatticeFn joina{"join_a", 1, [d, a](std::span<const Elem> x) { return d->join(x[0], a); }};
  CHECK(lfp(joina, *d).value == a);

  // lfp/gfp agree with exhaustive search over pre/post-fixpoints
  auto lat = make_int_powerset(2);
  std::mt19937 rng(3);
  for (int round = 0; round < 10; ++round) {
    // random monotone function: meet with a constant then join another
    Elem c1 = rng() % lat->size(), c2 = rng() % lat->size();
    LatticeFn f{"f", 1, [&lat, c1, c2](std::span<const Elem> x) {
                  return lat->join(lat->meet(x[0], c1), c2);
                }};
    Elem least = lat->top(), greatest = lat->bottom();
    for (Elem x = 0; x < lat->size(); ++x) {
      if (lat->leq(f(x), x)) least = lat->meet(least, x);
      if (lat->leq(x, f(x))) greatest = lat->join(greatest, x);
    }
    CHECK(lfp(f, *lat).value == least);
    CHECK(gfp(f, *lat).value == greatest);
  }

  // non-monotone function is reported
  auto dd = diamond();
  Elem top = dd->top(), bot = dd->bottom();
  LatticeFn bad{"bad", 1, [top, bot](std::span<const Elem> x) {
                  return x[0] == bot ? top : bot;
                }};
  CHECK_THROWS_AS(lfp(bad, *dd), InputError);
}

TEST_CASE("right adjoint: identity and brute-force adjunction") {
  auto lat = make_int_powerset(2);
  auto id = identity_fn(*lat);
  auto idr = right_adjoint(id, *lat);
  for (Elem x = 0; x < lat->size(); ++x) CHECK(idr(x) == x);

  // additive f: pointwise image under v -> v+1 (clamped)
  const int n = 2;
  LatticeFn f{"shift", 1, [n](std::span<const Elem> a) {
                Elem x = a[0], out = 0;
                for (int i = 0; i < 2 * n + 1; ++i)
                  if (x >> i & 1) out |= Elem{1} << std::min(i + 1, 2 * n);
                return out;
              }};
  auto fr = right_adjoint(f, *lat);
  // adjunction: f(x) <= y iff x <= fr(y), on all pairs
  for (Elem x = 0; x < lat->size(); ++x)
    for (Elem y = 0; y < lat->size(); ++y)
      CHECK(lat->leq(f(x), y) == lat->leq(x, fr(y)));
  // round trips
  for (Elem x = 0; x < lat->size(); ++x) {
    CHECK(f(fr(f(x))) == f(x));
    CHECK(fr(f(fr(x))) == fr(x));
  }

  // non-additive input rejected: f(X) keeps only adjacent value pairs,
  // so f({1}) ∪ f({2}) = {} but f({1,2}) != {}
  LatticeFn cu{"pairs_only", 1, [](std::span<const Elem> x) { return x[0] & (x[0] >> 1); }};
  CHECK_THROWS_AS(right_adjoint(cu, *lat), InputError);
}

TEST_CASE("lat file parsing: explicit and powerset") {
  const char* text = R"(
# tiny chain
element bot
element mid
element top
leq bot mid
leq mid top
fn up 1
bot -> mid
mid -> top
top -> top
domain coarse top bot
)";
  auto lf = parse_lat_text(text, "test.lat");
  CHECK(lf.lattice->size() == 3);
  auto up = lf.functions.at("up");
  CHECK(up(named(*lf.lattice, "bot")) == named(*lf.lattice, "mid"));
  CHECK(lf.domains.at("coarse").size() == 2);

  const char* ps = R"(
powerset int -4 4
fn add builtin satadd
fn mul builtin satmul
fn sq builtin satsq
domain Sign Z {0..4} {-4..0} [0]
)";
  auto pf = parse_lat_text(ps, "sign.lat");
  CHECK(pf.lattice->size() == 512);
  CHECK(pf.domains.at("Sign").size() == 4);
  // saturating arithmetic: 3+3 clamps to 4
  auto& add = pf.functions.at("add");
  Elem three = named(*pf.lattice, "{3}");
  CHECK(add(three, three) == named(*pf.lattice, "{4}"));
  auto& sq = pf.functions.at("sq");
  CHECK(sq(named(*pf.lattice, "{-2,1}")) == named(*pf.lattice, "{1,4}"));
}

TEST_CASE("right adjoint of the cyclic shift on a reversed powerset is the inverse shift") {
  // ⊇-ordered powerset of Z5 with the next-time style shift; its adjoint is
  // the previous-time shift
  PowersetLattice lat({"0", "1", "2", "3", "4"}, SetOrder::Sup);
  auto shift = [](Elem x, int d) {
    Elem out = 0;
    for (int i = 0; i < 5; ++i)
      if (x >> i & 1) out |= Elem{1} << ((i + d + 5) % 5);
    return out;
  };
  LatticeFn nxt{"next", 1, [&](std::span<const Elem> a) { return shift(a[0], -1); }};
  auto adj = right_adjoint(nxt, lat);
  for (Elem y = 0; y < lat.size(); ++y) CHECK(adj(y) == shift(y, +1));
  // adjunction on all pairs
  for (Elem x = 0; x < lat.size(); ++x)
    for (Elem y = 0; y < lat.size(); ++y)
      CHECK(lat.leq(nxt(x), y) == lat.leq(x, adj(y)));
}

TEST_CASE("uco_join of the windowed even/odd closures is the two-point family") {
  // ⊇-ordered powerset of [-2,2]; the even/odd closures' join keeps only
  // the window and the empty set
  std::vector<std::string> atoms;
  for (int v = -2; v <= 2; ++v) atoms.push_back(std::to_string(v));
  PowersetLattice lat(atoms, SetOrder::Sup);
  Elem evens = 0, odds = 0;
  for (int v = -2; v <= 2; ++v) {
    if (((v % 2) + 2) % 2 == 0)
      evens |= Elem{1} << (v + 2);
    else
      odds |= Elem{1} << (v + 2);
  }
  // fixpoints: window plus all subsets of the carrier (meets on ⊇ = unions)
  std::vector<Elem> ev_fam{lat.bottom()}, od_fam{lat.bottom()};
  for (Elem x = 0; x < lat.size(); ++x) {
    if ((x & ~evens) == 0) ev_fam.push_back(x);
    if ((x & ~odds) == 0) od_fam.push_back(x);
  }
  Uco ev(lat, ev_fam), od(lat, od_fam);
  Uco joined = uco_join(ev, od);
  CHECK(joined.fixpoints() == std::vector<Elem>{0, lat.bottom()});
}

TEST_CASE("uco join and meet are the lattice bounds under the pointwise order") {
  auto lat = make_int_powerset(2);
  std::mt19937 rng(47);
  for (int round = 0; round < 25; ++round) {
    std::vector<Elem> f1, f2, f3;
    for (int i = 0; i < 3; ++i) {
      f1.push_back(rng() % lat->size());
      f2.push_back(rng() % lat->size());
      f3.push_back(rng() % lat->size());
    }
    Uco a(*lat, f1), b(*lat, f2), other(*lat, f3);
    Uco j = uco_join(a, b), m = uco_meet(a, b);
    CHECK(uco_leq(a, j));
    CHECK(uco_leq(b, j));
    CHECK(uco_leq(m, a));
    CHECK(uco_leq(m, b));
    // any common upper bound dominates the join; dual for the meet
    if (uco_leq(a, other) && uco_leq(b, other)) CHECK(uco_leq(j, other));
    if (uco_leq(other, a) && uco_leq(other, b)) CHECK(uco_leq(other, m));
  }
}
