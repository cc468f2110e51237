#include "tcmc/shells.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace tcmc {

// --- TraceUco ---------------------------------------------------------------------

TraceUco TraceUco::explicit_family(const TraceUniverse& u, std::vector<TraceSet> family) {
  // close under unions and add the empty set (the ⊇-top)
  std::vector<Bitset> fam;
  auto push = [&](const Bitset& b) {
    for (const auto& f : fam)
      if (f == b) return false;
    fam.push_back(b);
    return true;
  };
  push(Bitset(u.size()));
  for (const auto& s : family) {
    if (&s.universe() != &u) throw InputError("family member from a different universe");
    push(s.bits());
  }
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t n = fam.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (push(fam[i] | fam[j])) grew = true;
    if (fam.size() > 4096) throw CapExceeded("trace closure family exceeds 4096 members");
  }
  TraceUco out;
  out.u_ = &u;
  std::vector<TraceSet> sets;
  sets.reserve(fam.size());
  for (auto& b : fam) sets.emplace_back(u, std::move(b));
  std::sort(sets.begin(), sets.end(), [](const TraceSet& a, const TraceSet& b) {
    return a.count() < b.count();
  });
  out.rep_ = std::move(sets);
  return out;
}

TraceUco TraceUco::intersect_with(TraceSet e) {
  TraceUco out;
  out.u_ = &e.universe();
  out.rep_ = std::move(e);
  return out;
}

TraceSet TraceUco::apply(const TraceSet& x) const {
  if (&x.universe() != u_) throw InputError("apply: universe mismatch");
  if (auto* e = std::get_if<TraceSet>(&rep_)) return set_intersect(x, *e);
  Bitset acc(u_->size());
  for (const auto& m : std::get<std::vector<TraceSet>>(rep_))
    if (m.bits().subset_of(x.bits())) acc |= m.bits();
  return TraceSet(*u_, std::move(acc));
}

const std::vector<TraceSet>& TraceUco::family() const {
  if (!is_explicit()) throw InputError("implicit powerset closure has no explicit family");
  return std::get<std::vector<TraceSet>>(rep_);
}

const TraceSet& TraceUco::carrier_set() const {
  if (is_explicit()) throw InputError("explicit family closure has no carrier set");
  return std::get<TraceSet>(rep_);
}

std::string TraceUco::describe() const {
  if (is_explicit()) return "family of " + std::to_string(family().size()) + " trace sets";
  return "lambda X. X ∩ E with |E| = " + std::to_string(carrier_set().count());
}

bool TraceUco::operator==(const TraceUco& o) const {
  if (u_ != o.u_ || is_explicit() != o.is_explicit()) return false;
  if (is_explicit()) {
    const auto& a = family();
    const auto& b = o.family();
    if (a.size() != b.size()) return false;
    for (const auto& m : a) {
      bool found = false;
      for (const auto& n : b)
        if (m == n) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }
  return carrier_set() == o.carrier_set();
}

TraceUco rho_forall_uco(const TraceUniverse& u) {
  std::vector<TraceSet> fam;
  StateSet all = u.system().all_states();
  for (StateSet s = 0;; ++s) {
    fam.push_back(gamma_forall(s, u));
    if (s == all) break;
  }
  return TraceUco::explicit_family(u, std::move(fam));
}

// --- next-time ---------------------------------------------------------------------

namespace {

// ⊖^k(γ∀(S)) rendered in the user window: model traces whose state k steps
// in the past lies in S
TraceSet prev_pow_gamma(const TraceUniverse& u, StateSet s, int k) {
  Bitset acc(u.size());
  for (std::size_t st = 0; st < u.system().state_count(); ++st)
    if ((s >> st) & 1) acc |= u.mz_down(-k, st);
  return TraceSet(u, std::move(acc));
}

}  // namespace

TraceUco core_next(const TraceUniverse& u, std::size_t max_states) {
  const auto& ts = u.system();
  auto survivors = core_next_states(ts, max_states);
  std::vector<TraceSet> fam;
  for (StateSet s : survivors) fam.push_back(gamma_forall(s, u));
  // cross-validation against the ⊖-stability characterization
  const int K = u.bounds().K;
  StateSet all = ts.all_states();
  for (StateSet s = 0;; ++s) {
    bool survives =
        std::find(survivors.begin(), survivors.end(), s) != survivors.end();
    if (survives) {
      for (int k = 0; k <= K; ++k) {
        TraceSet shifted = prev_pow_gamma(u, s, k);
        if (!(rho_forall(shifted, u) == shifted))
          throw InputError("core_next cross-validation failed: member " +
                           format_state_set(ts, s) + " unstable at k=" + std::to_string(k));
      }
    } else {
      auto w = p_arrow(ts, s);
      if (!w) throw InputError("core_next: excluded set without a P-witness (bug)");
      TraceSet shifted = prev_pow_gamma(u, s, static_cast<int>(w->k));
      if (rho_forall(shifted, u) == shifted)
        throw InputError("core_next cross-validation failed: excluded " +
                         format_state_set(ts, s) + " stable at its witness depth");
    }
    if (s == all) break;
  }
  return TraceUco::explicit_family(u, std::move(fam));
}

TraceSet shell_next_apply(const TraceSet& x, const TraceUniverse& u, int k_depth) {
  Bitset out(u.size());
  u.model_user().for_each([&](std::size_t id) {
    uint32_t uid = static_cast<uint32_t>(id);
    auto t = u.trace_of(uid);
    for (int k = 0; k <= k_depth; ++k) {
      uint8_t past = t.state_at(static_cast<int64_t>(t.present) - k);
      if (u.mz_down(-k, past).subset_of(x.bits())) {
        out.set(id);
        return;
      }
    }
  });
  // cross-validation: the union-closed family form over {⊖^n γ∀({s})}
  Bitset fam(u.size());
  for (int n = 0; n <= k_depth; ++n)
    for (std::size_t s = 0; s < u.system().state_count(); ++s) {
      Bitset m = u.mz_down(-n, s);
      if (m.subset_of(x.bits())) fam |= m;
    }
  if (!(fam == out))
    throw InputError("shell_next_apply: functional and family forms disagree (bug trap)");
  return TraceSet(u, std::move(out));
}

PastSequenceAbstraction alpha_next(const TraceSet& x, const TraceUniverse& u, int k_depth) {
  PastSequenceAbstraction out;
  out.k_depth = k_depth;
  for (int z = -k_depth; z <= 0; ++z) {
    StateSet s = 0;
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if (u.mz_down(z, st).subset_of(x.bits())) s |= StateSet{1} << st;
    out.at.push_back(s);
  }
  return out;
}

TraceSet gamma_next(const PastSequenceAbstraction& sigma, const TraceUniverse& u) {
  Bitset acc(u.size());
  for (int k = 0; k <= sigma.k_depth; ++k) {
    StateSet s = sigma(-k);
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if ((s >> st) & 1) acc |= u.mz_down(-k, st);
  }
  return TraceSet(u, std::move(acc));
}

BiSequenceAbstraction bidirectional_abstraction(const TraceSet& x, const TraceUniverse& u,
                                                int k_depth) {
  BiSequenceAbstraction out;
  out.k_depth = k_depth;
  for (int z = -k_depth; z <= k_depth; ++z) {
    StateSet s = 0;
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if (u.mz_down(z, st).subset_of(x.bits())) s |= StateSet{1} << st;
    out.at.push_back(s);
  }
  return out;
}

TraceSet bidirectional_concretization(const BiSequenceAbstraction& sigma, const TraceUniverse& u) {
  Bitset acc(u.size());
  for (int z = -sigma.k_depth; z <= sigma.k_depth; ++z) {
    StateSet s = sigma(z);
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if ((s >> st) & 1) acc |= u.mz_down(z, st);
  }
  return TraceSet(u, std::move(acc));
}

TraceSet bidirectional_concretization_internal(const BiSequenceAbstraction& sigma,
                                               const TraceUniverse& u) {
  Bitset acc(u.size());
  for (int z = -sigma.k_depth; z <= sigma.k_depth; ++z) {
    StateSet s = sigma(z);
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if ((s >> st) & 1) acc |= u.mz_down_internal(z, st);
  }
  return TraceSet(u, std::move(acc));
}

// --- time reversal -------------------------------------------------------------------

TraceUco core_reversal(const TraceUniverse& u) {
  StateSet all = u.system().all_states();
  std::vector<TraceSet> rho_fam;
  for (StateSet s = 0;; ++s) {
    rho_fam.push_back(gamma_forall(s, u));
    if (s == all) break;
  }
  auto in_family = [&](const TraceSet& y) {
    for (const auto& m : rho_fam)
      if (m == y) return true;
    return false;
  };
  std::vector<TraceSet> fam;
  for (const auto& y : rho_fam) {
    TraceSet ry(u, u.reversed(y.bits()) & u.user_zone());
    if (in_family(ry)) fam.push_back(y);
  }
  return TraceUco::explicit_family(u, std::move(fam));
}

TraceUco shell_reversal(const TraceUniverse& u) {
  StateSet all = u.system().all_states();
  std::vector<TraceSet> fam;
  for (StateSet s = 0;; ++s) {
    TraceSet g = gamma_forall(s, u);
    fam.push_back(g);
    // ⟲Y ∈ ρ∀-family iff Y is the reversal of a family member
    fam.emplace_back(u, u.reversed(g.bits()) & u.user_zone());
    if (s == all) break;
  }
  return TraceUco::explicit_family(u, std::move(fam));
}

// --- constants -------------------------------------------------------------------------

TraceUco core_union(const TraceUniverse& u) {
  return TraceUco::explicit_family(u, {TraceSet(u)});
}

TraceUco shell_union(const TraceUniverse& u) {
  return TraceUco::intersect_with(model_traces(u));
}

TraceUco core_negation(const TraceUniverse& u) {
  return TraceUco::explicit_family(u, {TraceSet(u)});
}

TraceUco shell_all(const TraceUniverse& u) {
  Bitset mstar = u.model_mask() | u.rev_model_mask();
  return TraceUco::intersect_with(TraceSet(u, mstar & u.user_zone()));
}

TraceUco shell_for_ops(const TraceUniverse& u, const std::vector<Connective>& ops) {
  auto has = [&](Connective c) { return std::find(ops.begin(), ops.end(), c) != ops.end(); };
  TraceUco result = rho_forall_uco(u);
  if (has(Connective::Union)) {
    result = has(Connective::Reversal) ? shell_all(u) : shell_union(u);
  } else {
    if (has(Connective::Negation))
      throw InputError(
          "no complete shell exists for negation (see the nonexistence witness report); "
          "include union to fall back to the powerset closure");
    if (has(Connective::SometimeF))
      throw InputError(
          "no complete shell exists for the sometime operator (see the nonexistence witness "
          "report); include union to fall back to the powerset closure");
    if (has(Connective::Reversal)) result = shell_reversal(u);
    if (has(Connective::Next)) {
      // close the current family under the K-bounded ⊖ images
      if (has(Connective::Reversal))
        throw InputError("shell_for_ops: next-time combined with reversal but without union is "
                         "outside the catalogued shells");
      std::vector<TraceSet> fam;
      for (int n = 0; n <= u.bounds().K; ++n)
        for (std::size_t s = 0; s < u.system().state_count(); ++s)
          fam.push_back(prev_pow_gamma(u, static_cast<StateSet>(StateSet{1} << s), n));
      result = TraceUco::explicit_family(u, std::move(fam));
    }
  }
  // verify completeness for everything requested
  for (Connective c : ops) {
    auto chk = check_trace_completeness(result, c);
    if (!chk.complete)
      throw InputError("shell_for_ops: result not complete for " + chk.op + " (bug trap)");
  }
  return result;
}

// --- completeness re-checks ----------------------------------------------------------

namespace {

TraceSet universe_sometime(const TraceSet& x) {
  // F(X) = ∪_{n>=0} ⊖^n(X): within the carrier every shift of a member is
  // representable or absent, so membership is decidable exactly
  const TraceUniverse& u = x.universe();
  Bitset out(u.size());
  x.bits().for_each([&](std::size_t id) {
    // t ∈ F(X) for every t = member shifted into the future
    uint32_t uid = static_cast<uint32_t>(id);
    int32_t p = u.present_of(uid);
    for (int32_t q = p; q <= u.present_bound(); ++q)
      out.set(uid + static_cast<uint32_t>(q - p));
  });
  return TraceSet(u, std::move(out));
}

}  // namespace

TraceCompleteness check_trace_completeness(const TraceUco& rho, Connective op,
                                           std::size_t samples, uint32_t seed) {
  const TraceUniverse& u = rho.universe();
  TraceCompleteness out;
  auto name = [&]() -> std::string {
    switch (op) {
      case Connective::Sigma: return "sigma";
      case Connective::Pi: return "pi";
      case Connective::Next: return "next";
      case Connective::Union: return "union";
      case Connective::Negation: return "negation";
      case Connective::Reversal: return "reversal";
      case Connective::Forall: return "forall";
      case Connective::SometimeF: return "sometime";
    }
    return "?";
  };
  out.op = name();
  if (op == Connective::Sigma || op == Connective::Pi) return out;  // 0-ary

  TraceSet m = model_traces(u);

  if (op == Connective::Next && rho.is_explicit()) {
    // The user-window rendering of ρ(⊕X) = ρ(⊕ρX) is degenerate (the top
    // present row truncates identically on both sides), so next-time
    // completeness of γ∀-generated families is decided through the
    // ⊖-stability characterization: every family member must stay a family
    // set under every ⊖^k, rendered window-free via past-state projections.
    const std::size_t nstates = u.system().state_count();
    auto gamma_of = [&](StateSet s) {
      Bitset b(u.size());
      for (std::size_t st = 0; st < nstates; ++st)
        if ((s >> st) & 1) b |= u.model_user_down(st);
      return b;
    };
    auto revdown = [&](std::size_t st) {
      return u.rev_model_mask() & u.user_zone() & u.sigma_mask(st);
    };
    int kmax = std::max<int>(u.bounds().K, static_cast<int>(nstates * nstates) + 1);
    for (const auto& member : rho.family()) {
      // decompose Y = γ∀(Sm) ∪ ⟲γ∀(Sr); fall back to the direct equation if
      // the member is not of that shape
      StateSet sm = 0, sr = 0;
      for (std::size_t st = 0; st < nstates; ++st) {
        if (u.model_user_down(st).any() && u.model_user_down(st).subset_of(member.bits()))
          sm |= StateSet{1} << st;
        if (revdown(st).any() && revdown(st).subset_of(member.bits())) sr |= StateSet{1} << st;
      }
      Bitset recon = gamma_of(sm);
      for (std::size_t st = 0; st < nstates; ++st)
        if ((sr >> st) & 1) recon |= revdown(st);
      if (!(recon == member.bits())) continue;  // unrecognized member: skip to direct probes
      for (int k = 0; k <= kmax; ++k) {
        Bitset rendered(u.size());
        for (std::size_t st = 0; st < nstates; ++st)
          if ((sm >> st) & 1) rendered |= u.mz_down(-k, st);
        if (sr) {
          Bitset fwd(u.size());
          for (std::size_t st = 0; st < nstates; ++st)
            if ((sr >> st) & 1) fwd |= u.mz_down(+k, st);
          rendered |= u.reversed(fwd);
        }
        TraceSet rset(u, std::move(rendered));
        if (!(rho.apply(rset) == rset)) {
          out.complete = false;
          out.witness = rset;
          return out;
        }
      }
    }
    return out;
  }

  auto unary = [&](const TraceSet& x) -> TraceSet {
    switch (op) {
      case Connective::Next: return next_op(x);
      case Connective::Negation: return TraceSet(u, u.user_zone() - x.bits());
      case Connective::Reversal:
        return TraceSet(u, u.reversed(x.bits()));
      case Connective::Forall: return forall_op(m, x);
      case Connective::SometimeF: return universe_sometime(x);
      default: throw InputError("not unary");
    }
  };

  std::vector<TraceSet> pool;
  StateSet all = u.system().all_states();
  for (StateSet s = 0;; ++s) {
    TraceSet g = gamma_forall(s, u);
    pool.push_back(g);
    // ⊖^k / ⊕^k images of the family and their reversals: these probe the
    // sources of incompleteness the theorems describe
    for (int k = 1; k <= u.bounds().K; ++k) {
      Bitset fwd(u.size()), bwd(u.size());
      for (std::size_t st = 0; st < u.system().state_count(); ++st)
        if ((s >> st) & 1) {
          fwd |= u.mz_down(-k, st);
          bwd |= u.mz_down(+k, st);
        }
      pool.emplace_back(u, std::move(fwd));
      pool.emplace_back(u, std::move(bwd));
    }
    pool.emplace_back(u, u.reversed(g.bits()) & u.user_zone());
    pool.emplace_back(u, u.user_zone() - g.bits());
    if (s == all) break;
  }
  std::mt19937 rng(seed);
  std::vector<std::size_t> user_ids, model_ids;
  u.user_zone().for_each([&](std::size_t id) { user_ids.push_back(id); });
  u.model_user().for_each([&](std::size_t id) { model_ids.push_back(id); });
  for (std::size_t i = 0; i < samples; ++i) {
    Bitset b(u.size());
    for (std::size_t id : user_ids)
      if (rng() & 1) b.set(id);
    pool.emplace_back(u, std::move(b));
    // denser hits on the model: random unions of projections minus members
    Bitset mb(u.size());
    for (std::size_t st = 0; st < u.system().state_count(); ++st)
      if (rng() & 1) mb |= u.model_user_down(st);
    for (int drops = 0; drops < 3 && !model_ids.empty(); ++drops)
      mb.reset(model_ids[rng() % model_ids.size()]);
    pool.emplace_back(u, std::move(mb));
  }

  if (op == Connective::Union) {
    for (std::size_t i = 0; i < pool.size() && out.complete; ++i)
      for (std::size_t j = 0; j < pool.size(); ++j) {
        const TraceSet& x = pool[i];
        const TraceSet& y = pool[j];
        TraceSet lhs = rho.apply(set_union(x, y));
        TraceSet rhs = rho.apply(set_union(rho.apply(x), rho.apply(y)));
        if (!(lhs == rhs)) {
          out.complete = false;
          out.witness = x;
          break;
        }
      }
    return out;
  }
  for (const auto& x : pool) {
    TraceSet lhs = rho.apply(unary(x));
    TraceSet rhs = rho.apply(unary(rho.apply(x)));
    if (!(lhs == rhs)) {
      out.complete = false;
      out.witness = x;
      return out;
    }
  }
  return out;
}

// --- nonexistence witnesses -------------------------------------------------------------

namespace {

using WinSet = uint32_t;  // subsets of [-W, W], bit i = integer i - W

struct Window {
  int w;
  WinSet full;
  explicit Window(int width) : w(width) {
    if (width < 2 || width > 14) throw InputError("witness window must be in [2, 14]");
    full = (WinSet{1} << (2 * width + 1)) - 1;
  }
  WinSet evens() const {
    WinSet r = 0;
    for (int v = -w; v <= w; ++v)
      if (((v % 2) + 2) % 2 == 0) r |= bit(v);
    return r;
  }
  WinSet odds() const { return full & ~evens(); }
  WinSet bit(int v) const { return WinSet{1} << (v + w); }
  WinSet tail(int k) const {  // [k, W]
    WinSet r = 0;
    for (int v = k; v <= w; ++v) r |= bit(v);
    return r;
  }
  std::vector<int> to_list(WinSet s) const {
    std::vector<int> out;
    for (int v = -w; v <= w; ++v)
      if (s & bit(v)) out.push_back(v);
    return out;
  }
  WinSet neg(WinSet s) const { return full & ~s; }
  WinSet sometime(WinSet s) const {  // {i : exists j >= i in s}
    WinSet r = 0;
    bool seen = false;
    for (int v = w; v >= -w; --v) {
      if (s & bit(v)) seen = true;
      if (seen) r |= bit(v);
    }
    return r;
  }
};

// closure with a special-cased top, per the nonexistence proofs:
// ρ(window) = window, otherwise ρ(X) = X ∩ carrier
struct PatchedClosure {
  std::string name;
  WinSet carrier;
  WinSet full;
  WinSet apply(WinSet x) const { return x == full ? full : (x & carrier); }
};

WindowClosureCheck check_closure(const Window& win, const PatchedClosure& rho,
                                 WinSet (Window::*op)(WinSet) const) {
  WindowClosureCheck out;
  out.name = rho.name;
  out.complete = true;
  for (WinSet x = 0;; ++x) {
    WinSet lhs = rho.apply((win.*op)(x));
    WinSet rhs = rho.apply((win.*op)(rho.apply(x)));
    if (lhs != rhs) {
      out.complete = false;
      out.witness = win.to_list(x);
      return out;
    }
    if (x == win.full) break;
  }
  return out;
}

// fixpoint family of the join = sets fixed by every closure
std::vector<WinSet> join_family(const Window& win, const std::vector<PatchedClosure>& closures) {
  std::vector<WinSet> fam;
  for (WinSet x = 0;; ++x) {
    bool fixed = true;
    for (const auto& c : closures)
      if (c.apply(x) != x) {
        fixed = false;
        break;
      }
    if (fixed) fam.push_back(x);
    if (x == win.full) break;
  }
  return fam;
}

}  // namespace

NegShellWitnessReport witness_neg_shell(int window) {
  Window win(window);
  NegShellWitnessReport rep;
  rep.window = window;
  std::vector<PatchedClosure> closures = {
      {"rho_ev", win.evens(), win.full},
      {"rho_od", win.odds(), win.full},
  };
  rep.all_closures_complete = true;
  for (const auto& c : closures) {
    auto chk = check_closure(win, c, &Window::neg);
    rep.all_closures_complete = rep.all_closures_complete && chk.complete;
    rep.closures.push_back(std::move(chk));
  }
  auto fam = join_family(win, closures);
  rep.join_family_is_rho_forall = fam == std::vector<WinSet>{0, win.full};
  // ρ∀ = {∅, window} is incomplete for windowed ¬
  PatchedClosure rho_forall{"rho_forall", 0, win.full};
  auto chk = check_closure(win, rho_forall, &Window::neg);
  rep.rho_forall_incomplete = !chk.complete;
  rep.rho_forall_witness = chk.witness;
  return rep;
}

FShellWitnessReport witness_f_shell(int window) {
  Window win(window);
  FShellWitnessReport rep;
  rep.window = window;
  std::vector<PatchedClosure> closures;
  for (int k = -window; k <= window; ++k)
    closures.push_back({"rho_" + std::to_string(k), win.tail(k), win.full});
  rep.all_closures_complete = true;
  for (const auto& c : closures) {
    auto chk = check_closure(win, c, &Window::sometime);
    rep.all_closures_complete = rep.all_closures_complete && chk.complete;
    rep.closures.push_back(std::move(chk));
  }
  auto fam = join_family(win, closures);
  for (WinSet s : fam) rep.join_family.push_back(win.to_list(s));
  // expected: {∅, {W}, window} — the boundary artifact {W} is asserted, not filtered
  rep.join_family_expected =
      fam == std::vector<WinSet>{0, win.bit(window), win.full};
  PatchedClosure rho_forall{"rho_forall", 0, win.full};
  auto chk = check_closure(win, rho_forall, &Window::sometime);
  rep.rho_forall_incomplete = !chk.complete;
  rep.rho_forall_witness = chk.witness;
  rep.tail_witness_shape = true;
  for (int k = 1; k <= window; ++k) {
    WinSet x = win.tail(k);
    bool lhs_full = rho_forall.apply(win.sometime(x)) == win.full;
    bool rhs_empty = rho_forall.apply(win.sometime(rho_forall.apply(x))) == 0;
    rep.tail_witness_shape = rep.tail_witness_shape && lhs_full && rhs_empty;
  }
  return rep;
}

}  // namespace tcmc
