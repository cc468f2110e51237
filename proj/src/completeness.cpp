#include "tcmc/completeness.hpp"

#include <algorithm>
#include <set>

namespace tcmc {

namespace {

// Immediate upper neighbours, used to find maximal elements of down-closed
// sets without an O(n^2) antichain scan.
std::vector<std::vector<Elem>> upper_neighbors(const FiniteLattice& lat) {
  if (const auto* ps = dynamic_cast<const PowersetLattice*>(&lat)) {
    std::vector<std::vector<Elem>> up(ps->size());
    for (Elem x = 0; x < ps->size(); ++x) {
      for (std::size_t i = 0; i < ps->atom_count(); ++i) {
        bool has = (x >> i) & 1;
        if (ps->order() == SetOrder::Sub && !has) up[x].push_back(x | (Elem{1} << i));
        if (ps->order() == SetOrder::Sup && has) up[x].push_back(x & ~(Elem{1} << i));
      }
    }
    return up;
  }
  const std::size_t n = lat.size();
  std::vector<std::vector<Elem>> up(n);
  for (Elem x = 0; x < n; ++x)
    for (Elem y = 0; y < n; ++y) {
      if (x == y || !lat.leq(x, y)) continue;
      bool cover = true;
      for (Elem z = 0; z < n && cover; ++z)
        if (z != x && z != y && lat.leq(x, z) && lat.leq(z, y)) cover = false;
      if (cover) up[x].push_back(y);
    }
  return up;
}

// Unary sections of every fn in F: unary fns pass through, binary fns are
// frozen in each argument over all carrier elements.
struct Section {
  LatticeFn fn;       // unary
  bool additive;      // decided once
  LatticeFn adjoint;  // valid iff additive
};

std::vector<LatticeFn> unary_sections(const FnSet& F) {
  std::vector<LatticeFn> out;
  for (const auto& f : F.fns) {
    if (f.arity == 1) {
      out.push_back(f);
      continue;
    }
    const std::size_t n = F.lat->size();
    if (n > (std::size_t{1} << 13))
      throw CapExceeded("currying a binary fn over " + std::to_string(n) + " elements exceeds cap");
    for (Elem c = 0; c < n; ++c) {
      out.push_back(LatticeFn{f.name + "(.," + F.lat->name(c) + ")", 1,
                              [f, c](std::span<const Elem> a) { return f(a[0], c); }});
      out.push_back(LatticeFn{f.name + "(" + F.lat->name(c) + ",.)", 1,
                              [f, c](std::span<const Elem> a) { return f(c, a[0]); }});
    }
  }
  return out;
}

std::vector<Section> make_sections(const FnSet& F) {
  std::vector<Section> out;
  for (auto& f : unary_sections(F)) {
    Section s{f, false, LatticeFn{}};
    // Additivity of lifted powerset sections is checked structurally (exact);
    // explicit carriers use the capped pairwise check.
    try {
      s.additive = !find_non_additive(f, *F.lat).has_value();
    } catch (const CapExceeded&) {
      s.additive = false;
    }
    if (s.additive) s.adjoint = right_adjoint(f, *F.lat);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<Elem> max_preimage(const LatticeFn& f, const FiniteLattice& lat, Elem y) {
  if (lat.size() > (std::size_t{1} << 13))
    throw CapExceeded("generic max-preimage scan on oversized carrier (non-additive fn?)");
  static thread_local const FiniteLattice* cached_lat = nullptr;
  static thread_local std::vector<std::vector<Elem>> cached_up;
  if (cached_lat != &lat) {
    cached_up = upper_neighbors(lat);
    cached_lat = &lat;
  }
  std::vector<char> in(lat.size(), 0);
  for (Elem x = 0; x < lat.size(); ++x) in[x] = lat.leq(f(x), y);
  std::vector<Elem> maxima;
  for (Elem x = 0; x < lat.size(); ++x) {
    if (!in[x]) continue;
    bool maximal = true;
    for (Elem u : cached_up[x])
      if (in[u]) {
        maximal = false;
        break;
      }
    if (maximal) maxima.push_back(x);
  }
  return maxima;
}

CompletenessCheck is_complete(const Uco& rho, const LatticeFn& f, std::size_t max_tuples) {
  const FiniteLattice& lat = rho.carrier();
  const std::size_t n = lat.size();
  CompletenessCheck r;
  r.fn_name = f.name;
  if (f.arity == 1) {
    if (n > max_tuples) throw CapExceeded("completeness check over " + std::to_string(n) + " tuples");
    for (Elem x = 0; x < n; ++x) {
      Elem lhs = rho.apply(f(x));
      Elem rhs = rho.apply(f(rho.apply(x)));
      if (lhs != rhs) return {false, f.name, {x}, lhs, rhs};
    }
    return r;
  }
  if (f.arity == 2) {
    if (n * n > max_tuples)
      throw CapExceeded("completeness check over " + std::to_string(n * n) + " tuples");
    std::vector<Elem> app(n);
    for (Elem x = 0; x < n; ++x) app[x] = rho.apply(x);
    for (Elem x = 0; x < n; ++x) {
      Elem rx = app[x];
      for (Elem y = 0; y < n; ++y) {
        Elem lhs = app[f(x, y)];
        Elem rhs = app[f(rx, app[y])];
        if (lhs != rhs) return {false, f.name, {x, y}, lhs, rhs};
      }
    }
    return r;
  }
  throw InputError("is_complete: unsupported arity");
}

CompletenessCheck is_complete(const Uco& rho, const FnSet& F, std::size_t max_tuples) {
  for (const auto& f : F.fns) {
    auto c = is_complete(rho, f, max_tuples);
    if (!c.complete) return c;
  }
  return {};
}

std::vector<Elem> l_transform(const Uco& eta, const FnSet& F) {
  const FiniteLattice& lat = *F.lat;
  auto sections = make_sections(F);
  std::vector<Elem> out;
  for (Elem y = 0; y < lat.size(); ++y) {
    bool keep = true;
    for (const auto& s : sections) {
      if (s.additive) {
        if (!eta.is_fixpoint(s.adjoint(y))) {
          keep = false;
          break;
        }
      } else {
        for (Elem m : max_preimage(s.fn, lat, y))
          if (!eta.is_fixpoint(m)) {
            keep = false;
            break;
          }
        if (!keep) break;
      }
    }
    if (keep) out.push_back(y);
  }
  return out;
}

Uco r_transform(const Uco& eta, const FnSet& F) {
  const FiniteLattice& lat = *F.lat;
  auto sections = make_sections(F);
  std::vector<Elem> collected;
  for (Elem y : eta.fixpoints()) {
    for (const auto& s : sections) {
      if (s.additive) {
        collected.push_back(s.adjoint(y));
      } else {
        auto m = max_preimage(s.fn, lat, y);
        collected.insert(collected.end(), m.begin(), m.end());
      }
    }
  }
  return Uco(lat, std::move(collected));
}

ShellCoreReport complete_shell(const Uco& rho, const FnSet& F) {
  ShellCoreReport rep{rho, rho, 0, {}};
  Uco cur = rho;
  while (true) {
    ++rep.iterations;
    Uco next = r_transform(cur, F);
    // refine: keep everything we had plus the new preimages
    Uco merged = uco_meet(cur, next);
    std::vector<Elem> added;
    std::set_difference(merged.fixpoints().begin(), merged.fixpoints().end(),
                        cur.fixpoints().begin(), cur.fixpoints().end(), std::back_inserter(added));
    rep.rounds.push_back({added, {}});
    if (added.empty()) break;
    cur = merged;
    if (rep.iterations > rho.carrier().size() + 2)
      throw InputError("complete_shell did not converge");
  }
  rep.result = cur;
  auto chk = is_complete(rep.result, F);
  if (!chk.complete)
    throw InputError("complete_shell produced an incomplete closure (bug trap) at fn " + chk.fn_name);
  if (!uco_leq(rep.result, rho)) throw InputError("complete_shell result does not refine the input");
  return rep;
}

ShellCoreReport complete_core(const Uco& rho, const FnSet& F) {
  ShellCoreReport rep{rho, rho, 0, {}};
  const FiniteLattice& lat = rho.carrier();
  auto sections = make_sections(F);
  Uco cur = rho;
  while (true) {
    ++rep.iterations;
    std::vector<Elem> keep;
    for (Elem y : cur.fixpoints()) {
      bool ok = true;
      for (const auto& s : sections) {
        if (s.additive) {
          if (!cur.is_fixpoint(s.adjoint(y))) {
            ok = false;
            break;
          }
        } else {
          for (Elem m : max_preimage(s.fn, lat, y))
            if (!cur.is_fixpoint(m)) {
              ok = false;
              break;
            }
          if (!ok) break;
        }
      }
      if (ok) keep.push_back(y);
    }
    std::vector<Elem> removed;
    std::set_difference(cur.fixpoints().begin(), cur.fixpoints().end(), keep.begin(), keep.end(),
                        std::back_inserter(removed));
    rep.rounds.push_back({{}, removed});
    if (removed.empty()) break;
    Uco next(lat, keep);
    if (next.fixpoints().size() > keep.size())
      throw InputError("complete_core: L_F produced a non-meet-closed family (bug trap)");
    cur = next;
    if (rep.iterations > lat.size() + 2) throw InputError("complete_core did not converge");
  }
  rep.result = cur;
  auto chk = is_complete(rep.result, F);
  if (!chk.complete)
    throw InputError("complete_core produced an incomplete closure (bug trap) at fn " + chk.fn_name);
  if (!uco_leq(rho, rep.result)) throw InputError("complete_core result does not abstract the input");
  return rep;
}

FixpointTransfer check_fixpoint_transfer(const Uco& rho, const LatticeFn& f) {
  if (f.arity != 1) throw InputError("check_fixpoint_transfer expects a unary function");
  auto chk = is_complete(rho, f);
  if (!chk.complete)
    throw InputError("check_fixpoint_transfer precondition: rho is not complete for " + f.name +
                     "; witness " + rho.carrier().name(chk.witness[0]) + " with " +
                     rho.carrier().name(chk.lhs) + " != " + rho.carrier().name(chk.rhs));
  const FiniteLattice& lat = rho.carrier();
  LatticeFn rf{"rho." + f.name, 1, [&rho, f](std::span<const Elem> a) {
                 return rho.apply(f(a[0]));
               }};
  FixpointTransfer t;
  t.lfp_concrete = rho.apply(lfp(f, lat).value);
  t.lfp_abstract = lfp(rf, lat).value;
  t.lfp_ok = t.lfp_concrete == t.lfp_abstract;
  t.gfp_concrete = rho.apply(gfp(f, lat).value);
  t.gfp_abstract = gfp(rf, lat).value;
  t.gfp_ok = t.gfp_concrete == t.gfp_abstract;
  return t;
}

}  // namespace tcmc
