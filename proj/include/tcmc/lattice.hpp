#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcmc/util.hpp"

namespace tcmc {

// Elements of a finite lattice are dense indices 0..size()-1. For powerset
// lattices the index IS the subset bitmask over the atom list.
using Elem = uint64_t;

enum class SetOrder { Sub, Sup };  // ⊆ vs ⊇ as the lattice order

class FiniteLattice {
 public:
  virtual ~FiniteLattice() = default;

  virtual std::size_t size() const = 0;
  virtual bool leq(Elem a, Elem b) const = 0;
  virtual Elem meet(Elem a, Elem b) const = 0;
  virtual Elem join(Elem a, Elem b) const = 0;
  virtual Elem top() const = 0;
  virtual Elem bottom() const = 0;
  virtual std::string name(Elem e) const = 0;
  virtual std::optional<Elem> find(const std::string& name) const = 0;

  Elem meet_all(std::span<const Elem> xs) const {
    Elem m = top();
    for (Elem x : xs) m = meet(m, x);
    return m;
  }
  Elem join_all(std::span<const Elem> xs) const {
    Elem j = bottom();
    for (Elem x : xs) j = join(j, x);
    return j;
  }
};

// Lattice given by an explicit element list and the order relation
// (covering pairs closed reflexively/transitively at construction).
// Construction verifies antisymmetry and that all pairwise meets/joins
// exist and are unique.
class ExplicitLattice final : public FiniteLattice {
 public:
  ExplicitLattice(std::vector<std::string> names,
                  const std::vector<std::pair<std::size_t, std::size_t>>& leq_pairs);

  std::size_t size() const override { return names_.size(); }
  bool leq(Elem a, Elem b) const override { return leq_[a * names_.size() + b]; }
  Elem meet(Elem a, Elem b) const override { return meet_[a * names_.size() + b]; }
  Elem join(Elem a, Elem b) const override { return join_[a * names_.size() + b]; }
  Elem top() const override { return top_; }
  Elem bottom() const override { return bottom_; }
  std::string name(Elem e) const override { return names_[e]; }
  std::optional<Elem> find(const std::string& n) const override;

 private:
  std::vector<std::string> names_;
  std::vector<char> leq_;
  std::vector<Elem> meet_, join_;
  Elem top_ = 0, bottom_ = 0;
};

// Powerset of a finite atom list under ⊆ or ⊇; elements are bitmasks.
class PowersetLattice final : public FiniteLattice {
 public:
  PowersetLattice(std::vector<std::string> atoms, SetOrder order);

  std::size_t size() const override { return std::size_t{1} << atoms_.size(); }
  bool leq(Elem a, Elem b) const override {
    return order_ == SetOrder::Sub ? (a & ~b) == 0 : (b & ~a) == 0;
  }
  Elem meet(Elem a, Elem b) const override { return order_ == SetOrder::Sub ? (a & b) : (a | b); }
  Elem join(Elem a, Elem b) const override { return order_ == SetOrder::Sub ? (a | b) : (a & b); }
  Elem top() const override { return order_ == SetOrder::Sub ? full() : 0; }
  Elem bottom() const override { return order_ == SetOrder::Sub ? 0 : full(); }
  std::string name(Elem e) const override;
  std::optional<Elem> find(const std::string& n) const override;

  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<std::string>& atoms() const { return atoms_; }
  SetOrder order() const { return order_; }
  Elem full() const { return (Elem{1} << atoms_.size()) - 1; }

 private:
  std::vector<std::string> atoms_;
  std::map<std::string, std::size_t> atom_index_;
  SetOrder order_;
};

// Bounded-integer powerset [-n, n] under ⊆, the carrier of the sign fixtures.
std::shared_ptr<PowersetLattice> make_int_powerset(int n);

// A (possibly n-ary) function on lattice elements with a total evaluation
// rule. Monotonicity is a property checked on demand, not enforced here.
struct LatticeFn {
  std::string name;
  int arity = 1;
  std::function<Elem(std::span<const Elem>)> eval;

  Elem operator()(Elem x) const {
    Elem args[1] = {x};
    return eval(args);
  }
  Elem operator()(Elem x, Elem y) const {
    Elem args[2] = {x, y};
    return eval(args);
  }
};

LatticeFn identity_fn(const FiniteLattice& lat);
// Saturating set-lifted integer arithmetic over make_int_powerset(n).
LatticeFn sat_add_fn(const PowersetLattice& lat, int n);
LatticeFn sat_mul_fn(const PowersetLattice& lat, int n);
LatticeFn sat_sq_fn(const PowersetLattice& lat, int n);

struct MonotonicityWitness {
  Elem x, y;  // x ≤ y but f(x) ≰ f(y)
};
// Exhaustive over all comparable pairs, up to `max_comparisons`.
std::optional<MonotonicityWitness> find_non_monotone(const LatticeFn& f, const FiniteLattice& lat,
                                                     std::size_t max_comparisons = std::size_t{1} << 16);

struct AdditivityWitness {
  Elem x, y;  // f(x ∨ y) ≠ f(x) ∨ f(y), or x == y for the empty-join failure
};
std::optional<AdditivityWitness> find_non_additive(const LatticeFn& f, const FiniteLattice& lat,
                                                   std::size_t max_comparisons = std::size_t{1} << 16);

// Least meet-closed superset of `family`; always contains top.
std::vector<Elem> moore_closure(std::vector<Elem> family, const FiniteLattice& lat);

// An upper closure operator identified with its meet-closed fixpoint set.
class Uco {
 public:
  // Closes `fixpoints` under meets (so any family is accepted).
  Uco(const FiniteLattice& lat, std::vector<Elem> fixpoints);

  const FiniteLattice& carrier() const { return *lat_; }
  const std::vector<Elem>& fixpoints() const { return fix_; }  // sorted
  bool is_fixpoint(Elem x) const;
  Elem apply(Elem x) const;  // least fixpoint above x
  bool operator==(const Uco& o) const { return lat_ == o.lat_ && fix_ == o.fix_; }

 private:
  const FiniteLattice* lat_;
  std::vector<Elem> fix_;
};

// ρ ⊑ μ iff fix(μ) ⊆ fix(ρ) (pointwise ordering of closures).
bool uco_leq(const Uco& a, const Uco& b);
Uco uco_join(const Uco& a, const Uco& b);  // fixpoint intersection
Uco uco_meet(const Uco& a, const Uco& b);  // Moore closure of the union

struct FixpointResult {
  Elem value;
  std::size_t iterations;
};
// Ascending iteration from bottom / descending from top. Throws InputError
// with the witness step if non-monotone behaviour shows up during iteration.
FixpointResult lfp(const LatticeFn& f, const FiniteLattice& lat);
FixpointResult gfp(const LatticeFn& f, const FiniteLattice& lat);

// Right adjoint f^r(y) = ∨{x : f(x) ≤ y} of an additive f. Rejects
// non-additive input (InputError naming the witness pair).
LatticeFn right_adjoint(const LatticeFn& f, const FiniteLattice& lat);

// --- .lat file support -----------------------------------------------------

struct LatFile {
  std::shared_ptr<FiniteLattice> lattice;
  std::map<std::string, LatticeFn> functions;
  std::map<std::string, std::vector<Elem>> domains;  // named fixpoint families
};

// Grammar (one directive per line, '#' comments):
//   element <id>
//   leq <a> <b>            covering pair; reflexive-transitive closure applied
//   powerset int <lo> <hi>  bounded-integer powerset carrier (⊆), instead of elements
//   fn <name> <arity>       followed by `<in...> -> <out>` rows (explicit carriers)
//   fn <name> builtin <satadd|satmul|satsq>   (powerset carriers)
//   domain <name> <elem...> named fixpoint family (closed under meets on load)
// Powerset element syntax: {a,b,...} | {lo..hi} | empty | all.
LatFile parse_lat_file(const std::string& path);
LatFile parse_lat_text(const std::string& text, const std::string& origin = "<string>");

// Element spelled in the .lat element syntax for the given lattice.
std::optional<Elem> parse_elem(const std::string& token, const FiniteLattice& lat);

}  // namespace tcmc
