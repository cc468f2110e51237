#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tcmc/util.hpp"

namespace tcmc {

// Subsets of a system's states as bitmasks (systems are capped at 32 states).
using StateSet = uint32_t;

class TransitionSystem {
 public:
  TransitionSystem(std::vector<std::string> state_names,
                   std::vector<std::pair<std::size_t, std::size_t>> edges,
                   std::map<std::string, StateSet> labels = {});

  std::size_t state_count() const { return names_.size(); }
  const std::vector<std::string>& state_names() const { return names_; }
  std::optional<std::size_t> state(const std::string& name) const;

  bool edge(std::size_t a, std::size_t b) const { return (succ_[a] >> b) & 1; }
  StateSet successors(std::size_t s) const { return succ_[s]; }
  StateSet predecessors(std::size_t s) const { return pred_[s]; }
  StateSet all_states() const {
    return names_.size() == 32 ? ~StateSet{0} : ((StateSet{1} << names_.size()) - 1);
  }
  const std::map<std::string, StateSet>& labels() const { return labels_; }
  std::optional<StateSet> label(const std::string& name) const;

  bool is_total() const;  // every state has a successor and a predecessor

  std::vector<std::pair<std::size_t, std::size_t>> edge_list() const;

 private:
  std::vector<std::string> names_;
  std::vector<StateSet> succ_, pred_;
  std::map<std::string, StateSet> labels_;
};

struct TotalizeResult {
  TransitionSystem system;
  StateSet added_self_loops;  // states that received s->s
};

// Adds s->s exactly for states lacking a predecessor or a successor;
// idempotent.
TotalizeResult totalize(const TransitionSystem& ts);

// The reversed system (same states and labels, edges flipped).
TransitionSystem reverse_system(const TransitionSystem& ts);

StateSet pre(const TransitionSystem& ts, StateSet y);
StateSet post(const TransitionSystem& ts, StateSet y);
StateSet pre_tilde(const TransitionSystem& ts, StateSet y);
StateSet post_tilde(const TransitionSystem& ts, StateSet y);

bool is_injective(const TransitionSystem& ts);  // no state with two predecessors
bool is_symmetric(const TransitionSystem& ts);

// length of the shortest cycle (total systems always have one)
std::size_t min_cycle_length(const TransitionSystem& ts);

struct PArrowWitness {
  std::size_t q, r, t;
  std::size_t k;
};

// Equal-length path confluence: some t reachable in k>0 steps both from a
// state inside S and one outside S. Decided by BFS on the synchronous product.
std::optional<PArrowWitness> p_arrow(const TransitionSystem& ts, StateSet s);

// {S ⊆ states : ¬P→(S)}; throws CapExceeded above max_states (default 12).
std::vector<StateSet> core_next_states(const TransitionSystem& ts, std::size_t max_states = 12);

// --- .ts file support -------------------------------------------------------
// Lines: `state <id>`, `edge <a> <b>`, `label <prop> <id...>`; '#' comments.
TransitionSystem parse_ts_text(const std::string& text, const std::string& origin = "<string>");
TransitionSystem parse_ts_file(const std::string& path);
std::string format_ts(const TransitionSystem& ts);

std::string format_state_set(const TransitionSystem& ts, StateSet s);

}  // namespace tcmc
