#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tcmc/trace.hpp"

namespace tcmc {

// A union-closed (⊇-meet-closed) closure on trace sets, either as an
// explicit fixpoint family or as λX. X ∩ E (the family ℘(E), too large to
// materialize).
class TraceUco {
 public:
  static TraceUco explicit_family(const TraceUniverse& u, std::vector<TraceSet> family);
  static TraceUco intersect_with(TraceSet e);

  const TraceUniverse& universe() const { return *u_; }
  TraceSet apply(const TraceSet& x) const;
  bool is_explicit() const { return std::holds_alternative<std::vector<TraceSet>>(rep_); }
  // members of the explicit family (sorted, unique); throws for ℘(E) closures
  const std::vector<TraceSet>& family() const;
  const TraceSet& carrier_set() const;  // E of λX. X ∩ E
  std::string describe() const;

  bool operator==(const TraceUco& o) const;

 private:
  const TraceUniverse* u_ = nullptr;
  std::variant<std::vector<TraceSet>, TraceSet> rep_;
};

// exhaustive completeness check of a TraceUco for a trace transformer over
// the γ∀-family plus `samples` random user-zone sets (exhaustive over all
// user-zone subsets when the user zone is tiny)
struct TraceCompleteness {
  bool complete = true;
  std::optional<TraceSet> witness;
  std::string op;
};

// ρ∀ as a TraceUco (fixpoints {γ∀(S)}).
TraceUco rho_forall_uco(const TraceUniverse& u);

// --- next-time ---------------------------------------------------------------

// fixpoints {γ∀(S) : ¬P→(S)}; cross-validated against the ⊖-stability
// condition ∀k ≤ K: ⊖^k(Y) = ρ∀(⊖^k(Y)) for members and its failure for
// excluded γ∀(S).
TraceUco core_next(const TraceUniverse& u, std::size_t max_states = 12);

// shell_⊕(ρ∀)(X) = {t ∈ M : ∃k ∈ [0,K]. M^{-k}↓t ⊆ X}
TraceSet shell_next_apply(const TraceSet& x, const TraceUniverse& u, int k_depth);

// truncated past-sequence abstraction: Σ(z) for z ∈ [-K, 0]
struct PastSequenceAbstraction {
  int k_depth = 0;
  std::vector<StateSet> at;  // index i holds Σ(-K + i), so at.back() is Σ(0)
  StateSet operator()(int z) const { return at[static_cast<std::size_t>(z + k_depth)]; }
};

PastSequenceAbstraction alpha_next(const TraceSet& x, const TraceUniverse& u, int k_depth);
TraceSet gamma_next(const PastSequenceAbstraction& sigma, const TraceUniverse& u);

// two-sided prolongation over z ∈ [-K, K]
struct BiSequenceAbstraction {
  int k_depth = 0;
  std::vector<StateSet> at;  // index i holds Σ(-K + i)
  StateSet operator()(int z) const { return at[static_cast<std::size_t>(z + k_depth)]; }
};

BiSequenceAbstraction bidirectional_abstraction(const TraceSet& x, const TraceUniverse& u,
                                                int k_depth);
TraceSet bidirectional_concretization(const BiSequenceAbstraction& sigma, const TraceUniverse& u);
// concretization over the internal model set, for pipelines that shift the
// result with ⊕/⊖ before abstracting again
TraceSet bidirectional_concretization_internal(const BiSequenceAbstraction& sigma,
                                               const TraceUniverse& u);

// --- time reversal -----------------------------------------------------------

TraceUco core_reversal(const TraceUniverse& u);   // {Y : Y, ⟲Y ∈ ρ∀-family}
TraceUco shell_reversal(const TraceUniverse& u);  // union closure of ρ∀-family ∪ ⟲-preimages

// --- disjunction / negation / everything --------------------------------------

TraceUco core_union(const TraceUniverse& u);     // λX. ∅
TraceUco shell_union(const TraceUniverse& u);    // λX. X ∩ M
TraceUco core_negation(const TraceUniverse& u);  // λX. ∅
TraceUco shell_all(const TraceUniverse& u);      // λX. X ∩ (M ∪ ⟲M)

enum class Connective { Sigma, Pi, Next, Union, Negation, Reversal, Forall, SometimeF };

// Dispatch per the operator set: reversal+union give shell_all; union without
// reversal gives shell_union; negation or F alone have no shell (rejected
// with the nonexistence pointer) unless the union shell subsumes them.
TraceUco shell_for_ops(const TraceUniverse& u, const std::vector<Connective>& ops);

// brute-force completeness of a TraceUco for a named connective over sampled
// user-zone sets (exhaustive when feasible)
TraceCompleteness check_trace_completeness(const TraceUco& rho, Connective op,
                                           std::size_t samples = 200, uint32_t seed = 1);

// --- nonexistence witnesses -----------------------------------------------------
//
// The single-state windowed universe: traces are the integers [-W, W], the
// model is the full window, ρ∀ = {∅, window}. Closure families from the
// nonexistence proofs are built verbatim and every claim is checked by brute
// force over ℘(window).

struct WindowClosureCheck {
  std::string name;
  bool complete = false;
  std::vector<int> witness;  // X where ρ(op(X)) ≠ ρ(op(ρ(X))), if any
};

struct NegShellWitnessReport {
  int window = 0;
  std::vector<WindowClosureCheck> closures;     // ρ_ev, ρ_od vs windowed ¬
  bool join_family_is_rho_forall = false;       // img(ρ_ev ⊔ ρ_od) = {∅, window}
  bool rho_forall_incomplete = false;
  std::vector<int> rho_forall_witness;
  bool all_closures_complete = false;
};

struct FShellWitnessReport {
  int window = 0;
  std::vector<WindowClosureCheck> closures;  // ρ_k vs windowed F, k ∈ [-W, W]
  bool join_family_expected = false;         // {∅, {W}, window} with the boundary artifact
  std::vector<std::vector<int>> join_family;
  bool rho_forall_incomplete = false;
  std::vector<int> rho_forall_witness;
  bool all_closures_complete = false;
  // ∀k ∈ (0, W]: ρ∀(F([k,W])) = window while ρ∀(F(ρ∀([k,W]))) = ∅
  bool tail_witness_shape = false;
};

NegShellWitnessReport witness_neg_shell(int window);
FShellWitnessReport witness_f_shell(int window);

}  // namespace tcmc
