#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcmc/kripke.hpp"
#include "tcmc/util.hpp"

namespace tcmc {

// A pointed, doubly ultimately periodic bi-infinite trace:
//   path(n) = left cycled   for n < offset
//           = mid[n-offset] for offset <= n < offset+|mid|
//           = right cycled  for n >= offset+|mid|
// with the left loop anchored so that path(offset-1) = left.back().
// `present` is the trace's present time.
struct BiLassoTrace {
  std::vector<uint8_t> left;  // nonempty
  std::vector<uint8_t> mid;
  std::vector<uint8_t> right;  // nonempty
  int32_t offset = 0;
  int32_t present = 0;

  uint8_t state_at(int64_t n) const;
  bool operator==(const BiLassoTrace& o) const = default;
};

// Canonical form: loops primitive, middle minimal (absorbing into the right
// loop first), empty-middle boundary pushed as far left as possible, purely
// periodic paths anchored at the lexicographically least rotation with
// offset in [0, period). Denotation and present are unchanged; idempotent.
BiLassoTrace canonicalize(BiLassoTrace t);

// ⟲⟨i,σ⟩ = ⟨-i, λk.σ(-k)⟩, returned canonical.
BiLassoTrace reverse_trace(const BiLassoTrace& t);

// Same path, present moved by d.
BiLassoTrace shifted_trace(BiLassoTrace t, int32_t d);

// Pointwise comparison of the denoted paths on [lo,hi] plus equal presents;
// the independent equality oracle used by tests.
bool same_denotation_on_window(const BiLassoTrace& a, const BiLassoTrace& b, int64_t lo, int64_t hi);

// `^(u) v (w)^ @o !i` with states juxtaposed (single-char ids) or
// comma-separated.
std::string format_trace(const BiLassoTrace& t, const TransitionSystem& ts);
BiLassoTrace parse_trace(const std::string& text, const TransitionSystem& ts);

// Every consecutive pair of the denoted path (loops, seams, wrap-arounds)
// is an edge of ts.
bool trace_in_model(const BiLassoTrace& t, const TransitionSystem& ts);

struct UniverseBounds {
  int L = 2;      // max loop length
  int B = 4;      // max middle length
  int O = 3;      // offset range [-O, O]
  int I = 3;      // present range [-I, I]
  int Delta = 4;  // slack for boundary-crossing operations
  int K = 6;      // past depth used by the next-time shell machinery
  int depth_cap = 6;  // temporal nesting the internal present range absorbs
};

class TraceSet;

// The finite trace universe over a total transition system's states.
// User-level universe U: traces within (L,B,O,I). The internal carrier
// enlarges offsets and presents (never loops or middles, which no
// transformer grows) and is closed under time reversal.
class TraceUniverse {
 public:
  enum class CarrierPolicy { Auto, Full, ModelClosure };

  TraceUniverse(TransitionSystem ts, UniverseBounds bounds,
                CarrierPolicy policy = CarrierPolicy::Auto,
                std::size_t full_carrier_bit_cap = std::size_t{1} << 23);

  const TransitionSystem& system() const { return ts_; }
  const UniverseBounds& bounds() const { return bounds_; }
  bool full_carrier() const { return full_; }

  int present_bound() const { return p_int_; }    // internal presents within ±p_int
  int offset_bound_internal() const { return o_int_; }
  std::size_t struct_count() const { return structs_.size(); }
  std::size_t block() const { return 2 * static_cast<std::size_t>(p_int_) + 1; }
  std::size_t size() const { return structs_.size() * block(); }  // carrier bit count

  static constexpr uint32_t npos = ~uint32_t{0};
  uint32_t id_of(const BiLassoTrace& t) const;  // canonicalizes; npos if absent
  BiLassoTrace trace_of(uint32_t id) const;
  uint32_t struct_of(uint32_t id) const { return id / static_cast<uint32_t>(block()); }
  int32_t present_of(uint32_t id) const {
    return static_cast<int32_t>(id % block()) - p_int_;
  }
  std::optional<uint32_t> shifted_id(uint32_t id, int32_t d) const;

  struct StructInfo {
    BiLassoTrace shape;     // present field unused (0)
    int32_t loop_start;     // offset + |mid|: right loop covers n >= loop_start
    int32_t left_end;       // offset: left loop covers n < left_end
    uint32_t rev_struct;    // structure of the reversed trace
    bool model_valid;       // all steps are edges
    bool user_shape;        // within (L,B,O)
  };
  const StructInfo& info(uint32_t sid) const { return structs_[sid]; }
  uint8_t state_at(uint32_t sid, int64_t time) const { return structs_[sid].shape.state_at(time); }
  uint8_t present_state(uint32_t id) const {
    return state_at(struct_of(id), present_of(id));
  }

  // precomputed masks over the carrier
  const Bitset& sigma_mask(std::size_t state) const { return sigma_[state]; }
  const Bitset& pair_mask(std::size_t a, std::size_t b) const {
    return pair_[a * ts_.state_count() + b];
  }
  const Bitset& model_mask() const { return model_; }       // internal M
  const Bitset& rev_model_mask() const { return rev_model_; }
  const Bitset& user_zone() const { return user_; }
  const Bitset& model_user() const { return model_user_; }  // M ∩ U
  const Bitset& model_user_down(std::size_t state) const { return mdown_[state]; }
  // M^z↓s over M ∩ U: members whose state at (present+z) is s.
  Bitset mz_down(int z, std::size_t state) const;
  // the same over the internal model set (full internal present range)
  Bitset mz_down_internal(int z, std::size_t state) const;

  Bitset reversed(const Bitset& bits) const;  // apply the ⟲ permutation

  // lazily computed tail-equality keys for Fd/Bd
  uint32_t future_key(uint32_t id) const;
  uint32_t past_key(uint32_t id) const;

 private:
  void enumerate_structs(CarrierPolicy policy, std::size_t cap);
  uint32_t intern_struct(const BiLassoTrace& shape);

  TransitionSystem ts_;
  UniverseBounds bounds_;
  bool full_ = false;
  int o_int_ = 0, p_int_ = 0;
  std::vector<StructInfo> structs_;
  std::unordered_map<std::string, uint32_t> struct_index_;
  std::vector<Bitset> sigma_, pair_, mdown_;
  Bitset model_, rev_model_, user_, model_user_;
  mutable std::map<std::pair<int, std::size_t>, Bitset> mz_cache_;
  mutable std::vector<uint32_t> future_keys_, past_keys_;
  mutable std::unordered_map<std::string, uint32_t> key_intern_;
};

// A finite set of traces tagged with its universe. Structural equality of
// canonical members; operations require the same universe.
class TraceSet {
 public:
  TraceSet() = default;
  TraceSet(const TraceUniverse& u) : u_(&u), bits_(u.size()) {}
  TraceSet(const TraceUniverse& u, Bitset bits) : u_(&u), bits_(std::move(bits)) {}

  const TraceUniverse& universe() const { return *u_; }
  const Bitset& bits() const { return bits_; }
  Bitset& bits() { return bits_; }
  std::size_t count() const { return bits_.count(); }
  bool contains(const BiLassoTrace& t) const;
  void insert(const BiLassoTrace& t);

  std::vector<BiLassoTrace> members() const;  // sorted by id

  bool operator==(const TraceSet& o) const { return u_ == o.u_ && bits_ == o.bits_; }

 private:
  const TraceUniverse* u_ = nullptr;
  Bitset bits_;
};

TraceSet set_union(const TraceSet& a, const TraceSet& b);
TraceSet set_intersect(const TraceSet& a, const TraceSet& b);
TraceSet set_minus(const TraceSet& a, const TraceSet& b);
TraceSet set_complement(const TraceSet& a);  // within the carrier
bool set_subset(const TraceSet& a, const TraceSet& b);

// ⊕X = {⟨i-1,σ⟩ : ⟨i,σ⟩ ∈ X}; throws UniverseOverflow naming the offending
// trace if a member's shift leaves the internal present range. ⊖ dual.
TraceSet next_op(const TraceSet& x);
TraceSet prev_op(const TraceSet& x);
TraceSet reverse_op(const TraceSet& x);

TraceSet sigma_model(StateSet s, const TraceUniverse& u);
TraceSet pi_model(const std::vector<std::pair<std::size_t, std::size_t>>& t, const TraceUniverse& u);

// M ∩ U: model traces within the user-level universe.
TraceSet model_traces(const TraceUniverse& u);
// Internal model set (full carrier presents), used by transformer-closure
// checks.
TraceSet model_traces_internal(const TraceUniverse& u);

TraceSet state_projection(const TraceSet& x, std::size_t state);
// M^{-k}↓⟨i,σ⟩ = {⟨j,τ⟩ ∈ M : τ(j-k) = σ(i-k)}
TraceSet past_projection(const TraceUniverse& u, const BiLassoTrace& t, int k);

TraceSet forall_op(const TraceSet& n, const TraceSet& x);

// members with |present| <= bound
TraceSet present_clip(const TraceSet& x, int bound);

TraceSet fd_closure(const TraceSet& x);
TraceSet bd_closure(const TraceSet& x);

StateSet alpha_forall(const TraceSet& x, const TraceUniverse& u);
TraceSet gamma_forall(StateSet s, const TraceUniverse& u);
TraceSet rho_forall(const TraceSet& x, const TraceUniverse& u);
StateSet alpha_exists(const TraceSet& x, const TraceUniverse& u);
TraceSet gamma_exists(StateSet s, const TraceUniverse& u);
TraceSet rho_exists(const TraceSet& x, const TraceUniverse& u);

struct HypothesisReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::map<std::string, std::size_t> projection_sizes;
};

// (i) every state has >= 2 model traces projecting onto it within U;
// (ii) ⊕/⊖/⟲ applied to the internal model set re-intersect U as M ∩ U,
// and likewise for the reversed model.
HypothesisReport check_hypothesis(const TraceUniverse& u);

}  // namespace tcmc
