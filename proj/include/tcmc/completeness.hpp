#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tcmc/lattice.hpp"

namespace tcmc {

// A named set of semantic functions over one carrier. Arities 1 and 2 are
// supported; binary functions take part in completeness checks over all
// argument pairs and enter the domain transformers through their unary
// sections (one argument frozen, over every element).
struct FnSet {
  const FiniteLattice* lat = nullptr;
  std::vector<LatticeFn> fns;

  FnSet(const FiniteLattice& l, std::vector<LatticeFn> f) : lat(&l), fns(std::move(f)) {
    if (fns.empty()) throw InputError("FnSet must be nonempty");
    for (auto& fn : fns)
      if (fn.arity < 1 || fn.arity > 2) throw InputError("FnSet supports arity 1 or 2");
  }
};

struct CompletenessCheck {
  bool complete = true;
  std::string fn_name;
  std::vector<Elem> witness;  // argument tuple where ρ(f(x)) ≠ ρ(f(ρ(x)))
  Elem lhs = 0, rhs = 0;
};

// ρ complete for f iff ρ∘f = ρ∘f∘ρ, checked over every argument tuple
// (throws CapExceeded when the tuple space is larger than max_tuples).
CompletenessCheck is_complete(const Uco& rho, const LatticeFn& f,
                              std::size_t max_tuples = std::size_t{1} << 24);
CompletenessCheck is_complete(const Uco& rho, const FnSet& F,
                              std::size_t max_tuples = std::size_t{1} << 24);

// L_F(η) = {y : ∪_f max{x : f(x) ≤ y} ⊆ η}; the returned vector is that
// element set (ascending). R_F(η) closes the collected max-preimages.
// Additive functions use the right-adjoint form; others fall back to the
// generic maximal-preimage scan (capped).
std::vector<Elem> l_transform(const Uco& eta, const FnSet& F);
Uco r_transform(const Uco& eta, const FnSet& F);

struct ShellCoreRound {
  std::vector<Elem> added;    // shell: fixpoints gained this round
  std::vector<Elem> removed;  // core: fixpoints dropped this round
};

struct ShellCoreReport {
  Uco input;
  Uco result;
  std::size_t iterations = 0;
  std::vector<ShellCoreRound> rounds;
};

// Most abstract refinement of ρ complete for F (iterated R_F), and most
// concrete abstraction of ρ complete for F (iterated L_F restricted to the
// current family). Results are re-verified with is_complete before return.
ShellCoreReport complete_shell(const Uco& rho, const FnSet& F);
ShellCoreReport complete_core(const Uco& rho, const FnSet& F);

struct FixpointTransfer {
  bool lfp_ok = false, gfp_ok = false;
  Elem lfp_concrete = 0, lfp_abstract = 0;
  Elem gfp_concrete = 0, gfp_abstract = 0;
};

// Requires ρ complete for (unary) f; reports ρ(lfp f) vs lfp(ρ∘f) and the
// gfp side. Precondition violations raise InputError with the witness.
FixpointTransfer check_fixpoint_transfer(const Uco& rho, const LatticeFn& f);

// max{x : f(x) ≤ y} for unary monotone f (antichain of maximal elements).
std::vector<Elem> max_preimage(const LatticeFn& f, const FiniteLattice& lat, Elem y);

}  // namespace tcmc
