#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcmc/trace.hpp"

namespace tcmc {

enum class NodeKind {
  StateProp,  // σ_S: explicit state set or label name
  TransProp,  // π_t: explicit edge list (state names resolved at eval)
  Var,
  Next,     // ⊕
  Prev,     // ⊖ (= rev next rev)
  Reverse,  // ⟲
  Or,
  And,
  Not,
  Implies,
  Mu,
  Nu,
  ForallModel,  // A φ: ∀ guarded by the model
  Finally,      // F
  Globally,     // G
  FinallyPast,  // F-
  GloballyPast, // G-
  Until,        // U(φ1, φ2)
  WeakUntil     // W(φ1, φ2)
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  NodeKind kind;
  std::string name;  // label for StateProp, variable for Var/Mu/Nu
  std::optional<StateSet> states;  // explicit σ_S payload
  std::vector<std::pair<std::string, std::string>> edges;  // π_t payload
  std::vector<FormulaPtr> kids;
};

FormulaPtr make_state_prop(StateSet s);
FormulaPtr make_label_prop(std::string label);
FormulaPtr make_node(NodeKind k, std::vector<FormulaPtr> kids, std::string name = "");

// Concrete syntax (see docs/formula-syntax.md):
//   p  [S:{1,2}]  [T:{(1,2),(2,2)}]  X  ()phi  (-)phi  rev phi
//   phi | phi    phi & phi    !phi    phi -> phi
//   mu X. phi    nu X. phi    A phi
//   F phi   G phi   F- phi   G- phi   U(phi1, phi2)   W(phi1, phi2)
// Rejects fixpoint bodies whose bound variable occurs under an odd number
// of negations; errors carry the input position.
FormulaPtr parse_formula(const std::string& text);
std::string format_formula(const FormulaPtr& f);

// temporal operator nesting (Next/Prev/F/G/U/W/past); used for diagnostics
int temporal_depth(const FormulaPtr& f);

StateSet resolve_state_prop(const Formula& f, const TransitionSystem& ts);

// Three-valued result of the set engine: low ⊆ truth ⊆ high on the carrier;
// rows near the internal present boundary may stay undecided.
struct SemSet {
  Bitset low, high;
};

using TraceEnv = std::map<std::string, TraceSet>;
SemSet trace_sem_3v(const FormulaPtr& f, const TraceUniverse& u, const TraceEnv& env = {});

// Decided trace semantics. Throws UniverseOverflow if undecided rows reach
// the user-level universe; outside it the returned set is the decided-true
// part.
TraceSet trace_sem(const FormulaPtr& f, const TraceUniverse& u, const TraceEnv& env = {});

// Exact evaluation on one ultimately periodic trace; the independent oracle
// for the set engine. Supports the quantifier-free, fixpoint-free fragment
// with sugar (temporal operators decided through loop periodicity).
bool eval_on_trace(const FormulaPtr& f, const BiLassoTrace& t, const TransitionSystem& ts);

using StateEnv = std::map<std::string, StateSet>;
StateSet state_sem(const FormulaPtr& f, const TraceUniverse& u, const StateEnv& env = {});

struct BranchReport {
  bool branchable = false;
  StateSet alpha_side = 0;  // α∀(trace semantics)
  StateSet state_side = 0;  // state-based abstract semantics
  StateSet witness = 0;     // symmetric difference when not branchable
  // true when every negation in f applies to a literal; only there does
  // state_side ⊆ alpha_side hold by construction (it is asserted there,
  // and can genuinely fail outside: negation is antitone, so composing
  // best correct approximations through it errs upward)
  bool sound_fragment = true;
};
BranchReport is_branchable(const FormulaPtr& f, const TraceUniverse& u);

// every Not/Implies argument under an odd polarity is a plain literal
bool negation_guarded(const FormulaPtr& f);

// Syntactic membership in the deterministic LTL fragment (literals,
// conjunction, guarded disjunction/until/weak-until, next).
bool is_ltl_det(const FormulaPtr& f);

}  // namespace tcmc
