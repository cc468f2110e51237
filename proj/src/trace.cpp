#include "tcmc/trace.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <sstream>

namespace tcmc {

namespace {

using Word = std::vector<uint8_t>;

int64_t floor_mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

Word rotate_right(Word w) {
  if (w.size() > 1) std::rotate(w.begin(), w.end() - 1, w.end());
  return w;
}

Word rotate_left(Word w) {
  if (w.size() > 1) std::rotate(w.begin(), w.begin() + 1, w.end());
  return w;
}

// primitive root: shortest p with w = p^k
Word primitive_root(const Word& w) {
  for (std::size_t d = 1; d <= w.size(); ++d) {
    if (w.size() % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < w.size() && ok; ++i)
      if (w[i] != w[i - d]) ok = false;
    if (ok) return Word(w.begin(), w.begin() + d);
  }
  return w;
}

Word least_rotation(Word w) {
  Word best = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    w = rotate_left(std::move(w));
    if (w < best) best = w;
  }
  return best;
}

}  // namespace

uint8_t BiLassoTrace::state_at(int64_t n) const {
  if (n >= offset + static_cast<int64_t>(mid.size()))
    return right[floor_mod(n - offset - static_cast<int64_t>(mid.size()),
                           static_cast<int64_t>(right.size()))];
  if (n >= offset) return mid[n - offset];
  return left[floor_mod(n - offset, static_cast<int64_t>(left.size()))];
}

BiLassoTrace canonicalize(BiLassoTrace t) {
  if (t.left.empty() || t.right.empty()) throw InputError("trace loops must be nonempty");
  t.left = primitive_root(t.left);
  t.right = primitive_root(t.right);

  // middle absorption, right loop first
  bool changed = true;
  while (changed) {
    changed = false;
    while (!t.mid.empty() && t.mid.back() == t.right.back()) {
      t.mid.pop_back();
      t.right = rotate_right(std::move(t.right));
      changed = true;
    }
    while (!t.mid.empty() && t.mid.front() == t.left.front()) {
      t.mid.erase(t.mid.begin());
      t.left = rotate_left(std::move(t.left));
      t.offset += 1;
      changed = true;
    }
  }

  if (t.mid.empty()) {
    const std::size_t cap = t.left.size() * t.right.size() + 2;
    for (std::size_t step = 0; step <= cap; ++step) {
      if (t.left == t.right) {
        // purely periodic path: anchor at the least rotation
        Word r = least_rotation(t.right);
        const int p = static_cast<int>(r.size());
        for (int o = 0; o < p; ++o) {
          bool match = true;
          for (int x = 0; x < p && match; ++x)
            if (r[floor_mod(x - o, p)] != t.state_at(x)) match = false;
          if (match) {
            t.left = t.right = r;
            t.offset = o;
            return t;
          }
        }
        throw InputError("canonicalize: periodic anchor not found (bug)");
      }
      if (t.left.back() == t.right.back()) {
        t.left = rotate_right(std::move(t.left));
        t.right = rotate_right(std::move(t.right));
        t.offset -= 1;
      } else {
        break;
      }
    }
  }
  return t;
}

BiLassoTrace reverse_trace(const BiLassoTrace& t) {
  BiLassoTrace r;
  r.left.assign(t.right.rbegin(), t.right.rend());
  r.mid.assign(t.mid.rbegin(), t.mid.rend());
  r.right.assign(t.left.rbegin(), t.left.rend());
  r.offset = -(t.offset + static_cast<int32_t>(t.mid.size())) + 1;
  r.present = -t.present;
  return canonicalize(r);
}

BiLassoTrace shifted_trace(BiLassoTrace t, int32_t d) {
  t.present += d;
  return t;
}

bool same_denotation_on_window(const BiLassoTrace& a, const BiLassoTrace& b, int64_t lo,
                               int64_t hi) {
  if (a.present != b.present) return false;
  for (int64_t n = lo; n <= hi; ++n)
    if (a.state_at(n) != b.state_at(n)) return false;
  return true;
}

bool trace_in_model(const BiLassoTrace& t, const TransitionSystem& ts) {
  auto edge = [&](uint8_t a, uint8_t b) { return ts.edge(a, b); };
  for (std::size_t i = 0; i < t.left.size(); ++i)
    if (!edge(t.left[i], t.left[(i + 1) % t.left.size()])) return false;
  for (std::size_t i = 0; i < t.right.size(); ++i)
    if (!edge(t.right[i], t.right[(i + 1) % t.right.size()])) return false;
  uint8_t after_left = t.mid.empty() ? t.right.front() : t.mid.front();
  if (!edge(t.left.back(), after_left)) return false;
  for (std::size_t i = 0; i + 1 < t.mid.size(); ++i)
    if (!edge(t.mid[i], t.mid[i + 1])) return false;
  if (!t.mid.empty() && !edge(t.mid.back(), t.right.front())) return false;
  return true;
}

// --- printing / parsing ---------------------------------------------------------

static std::string format_word(const Word& w, const TransitionSystem& ts) {
  bool single = true;
  for (const auto& n : ts.state_names())
    if (n.size() != 1) single = false;
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i) out += ",";
    out += ts.state_names()[w[i]];
  }
  return out;
}

std::string format_trace(const BiLassoTrace& t, const TransitionSystem& ts) {
  std::string mid = format_word(t.mid, ts);
  std::string out = "^(" + format_word(t.left, ts) + ")";
  if (!mid.empty()) out += " " + mid;
  out += " (" + format_word(t.right, ts) + ")^";
  out += " @" + std::to_string(t.offset) + " !" + std::to_string(t.present);
  return out;
}

static Word parse_word(const std::string& s, const TransitionSystem& ts) {
  Word w;
  if (s.empty()) return w;
  if (s.find(',') != std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto st = ts.state(item);
      if (!st) throw InputError("unknown state '" + item + "' in trace literal");
      w.push_back(static_cast<uint8_t>(*st));
    }
  } else {
    for (char c : s) {
      auto st = ts.state(std::string(1, c));
      if (!st) throw InputError(std::string("unknown state '") + c + "' in trace literal");
      w.push_back(static_cast<uint8_t>(*st));
    }
  }
  return w;
}

BiLassoTrace parse_trace(const std::string& text, const TransitionSystem& ts) {
  // ^(u) v (w)^ @o !i      (v optional)
  std::string s = text;
  auto fail = [&]() { throw InputError("bad trace literal: " + text); };
  auto lp = s.find("^(");
  auto lq = s.find(')', lp);
  if (lp == std::string::npos || lq == std::string::npos) fail();
  std::string u = s.substr(lp + 2, lq - lp - 2);
  auto rp = s.find('(', lq);
  auto rq = s.find(")^", rp);
  if (rp == std::string::npos || rq == std::string::npos) fail();
  std::string v = s.substr(lq + 1, rp - lq - 1);
  // trim whitespace in v
  v.erase(std::remove(v.begin(), v.end(), ' '), v.end());
  std::string w = s.substr(rp + 1, rq - rp - 1);
  auto at = s.find('@', rq);
  auto bang = s.find('!', rq);
  if (at == std::string::npos || bang == std::string::npos) fail();
  BiLassoTrace t;
  t.left = parse_word(u, ts);
  t.mid = parse_word(v, ts);
  t.right = parse_word(w, ts);
  t.offset = std::stoi(s.substr(at + 1));
  t.present = std::stoi(s.substr(bang + 1));
  if (t.left.empty() || t.right.empty()) fail();
  return canonicalize(t);
}

// --- TraceUniverse ----------------------------------------------------------------

static std::string struct_key(const BiLassoTrace& s) {
  std::string k;
  for (uint8_t c : s.left) k += static_cast<char>(c + 1);
  k += '\0';
  for (uint8_t c : s.mid) k += static_cast<char>(c + 1);
  k += '\0';
  for (uint8_t c : s.right) k += static_cast<char>(c + 1);
  k += '\0';
  k += std::to_string(s.offset);
  return k;
}

uint32_t TraceUniverse::intern_struct(const BiLassoTrace& shape) {
  std::string key = struct_key(shape);
  auto it = struct_index_.find(key);
  if (it != struct_index_.end()) return it->second;
  uint32_t id = static_cast<uint32_t>(structs_.size());
  StructInfo info;
  info.shape = shape;
  info.shape.present = 0;
  info.loop_start = shape.offset + static_cast<int32_t>(shape.mid.size());
  info.left_end = shape.offset;
  info.rev_struct = npos;
  info.model_valid = trace_in_model(shape, ts_);
  info.user_shape = static_cast<int>(shape.left.size()) <= bounds_.L &&
                    static_cast<int>(shape.right.size()) <= bounds_.L &&
                    static_cast<int>(shape.mid.size()) <= bounds_.B &&
                    std::abs(shape.offset) <= bounds_.O;
  structs_.push_back(std::move(info));
  struct_index_.emplace(std::move(key), id);
  return id;
}

void TraceUniverse::enumerate_structs(CarrierPolicy policy, std::size_t cap) {
  const std::size_t nstates = ts_.state_count();
  const int omax = bounds_.O + bounds_.Delta;

  enum class WordKind { Any, Path, Cycle };
  auto words_up_to = [&](int maxlen, WordKind kind, int minlen) {
    std::vector<Word> out;
    Word cur;
    std::function<void(int)> rec = [&](int len) {
      if (static_cast<int>(cur.size()) >= minlen) {
        bool emit = true;
        if (kind == WordKind::Cycle && !cur.empty() && !ts_.edge(cur.back(), cur.front()))
          emit = false;
        if (emit) out.push_back(cur);
      }
      if (len == maxlen) return;
      for (std::size_t s = 0; s < nstates; ++s) {
        if (kind != WordKind::Any && !cur.empty() && !ts_.edge(cur.back(), static_cast<uint8_t>(s)))
          continue;
        cur.push_back(static_cast<uint8_t>(s));
        rec(len + 1);
        cur.pop_back();
      }
    };
    rec(0);
    return out;
  };

  bool model_only = false;
  if (policy == CarrierPolicy::ModelClosure) model_only = true;
  if (policy == CarrierPolicy::Auto) {
    // rough full-carrier estimate: loops^2 * mids * offsets * block
    double loops = 0, mids = 0;
    for (int l = 1; l <= bounds_.L; ++l) loops += std::pow(static_cast<double>(nstates), l);
    for (int m = 0; m <= bounds_.B; ++m) mids += std::pow(static_cast<double>(nstates), m);
    double est = loops * loops * mids * (2 * omax + 1) * static_cast<double>(block());
    model_only = est > static_cast<double>(cap);
  }
  full_ = !model_only;

  auto loops = words_up_to(bounds_.L, model_only ? WordKind::Cycle : WordKind::Any, 1);
  auto mids = words_up_to(bounds_.B, model_only ? WordKind::Path : WordKind::Any, 0);

  for (const auto& lw : loops) {
    for (const auto& rw : loops) {
      for (const auto& mw : mids) {
        if (model_only) {
          uint8_t after_left = mw.empty() ? rw.front() : mw.front();
          if (!ts_.edge(lw.back(), after_left)) continue;
          if (!mw.empty() && !ts_.edge(mw.back(), rw.front())) continue;
        }
        for (int o = -omax; o <= omax; ++o) {
          BiLassoTrace t;
          t.left = lw;
          t.mid = mw;
          t.right = rw;
          t.offset = o;
          intern_struct(canonicalize(t));
        }
      }
    }
  }
  // close under time reversal
  for (std::size_t i = 0; i < structs_.size(); ++i) {
    BiLassoTrace rev = reverse_trace(structs_[i].shape);
    rev.present = 0;
    uint32_t rid = intern_struct(rev);
    structs_[i].rev_struct = rid;
    structs_[rid].rev_struct = static_cast<uint32_t>(i);
  }
}

TraceUniverse::TraceUniverse(TransitionSystem ts, UniverseBounds bounds, CarrierPolicy policy,
                             std::size_t full_carrier_bit_cap)
    : ts_(std::move(ts)), bounds_(bounds) {
  if (!ts_.is_total()) throw InputError("trace universe requires a total transition system");
  if (bounds_.L < 1 || bounds_.B < 0 || bounds_.O < 0 || bounds_.I < 0 || bounds_.Delta < 1)
    throw InputError("universe bounds must be positive (Delta >= 1)");
  o_int_ = bounds_.O + bounds_.Delta + bounds_.B + 1 + 2 * bounds_.L;
  p_int_ = bounds_.I + bounds_.Delta + bounds_.K + (o_int_ + bounds_.B) +
           2 * bounds_.L * bounds_.depth_cap;

  enumerate_structs(policy, full_carrier_bit_cap);

  const std::size_t n = size();
  const std::size_t nstates = ts_.state_count();
  sigma_.assign(nstates, Bitset(n));
  pair_.assign(nstates * nstates, Bitset(n));
  model_ = Bitset(n);
  rev_model_ = Bitset(n);
  user_ = Bitset(n);
  const std::size_t blk = block();
  for (std::size_t sid = 0; sid < structs_.size(); ++sid) {
    const auto& si = structs_[sid];
    for (std::size_t j = 0; j < blk; ++j) {
      const std::size_t id = sid * blk + j;
      const int32_t p = static_cast<int32_t>(j) - p_int_;
      uint8_t st = si.shape.state_at(p);
      sigma_[st].set(id);
      pair_[st * nstates + si.shape.state_at(p + 1)].set(id);
      if (si.model_valid) model_.set(id);
      if (structs_[si.rev_struct].model_valid) rev_model_.set(id);
      if (si.user_shape && std::abs(p) <= bounds_.I) user_.set(id);
    }
  }
  // close the user zone under time reversal so reversal images of
  // user-level sets stay inside it
  for (std::size_t sid = 0; sid < structs_.size(); ++sid) {
    const auto& si = structs_[sid];
    if (!si.user_shape || structs_[si.rev_struct].user_shape) continue;
    for (std::size_t j = 0; j < blk; ++j) {
      const int32_t p = static_cast<int32_t>(j) - p_int_;
      if (std::abs(p) <= bounds_.I) user_.set(si.rev_struct * blk + j);
    }
  }
  model_user_ = model_ & user_;
  mdown_.assign(nstates, Bitset(n));
  for (std::size_t s = 0; s < nstates; ++s) mdown_[s] = model_user_ & sigma_[s];
}

uint32_t TraceUniverse::id_of(const BiLassoTrace& t) const {
  BiLassoTrace c = canonicalize(t);
  if (std::abs(c.present) > p_int_) return npos;
  BiLassoTrace shape = c;
  shape.present = 0;
  auto it = struct_index_.find(struct_key(shape));
  if (it == struct_index_.end()) return npos;
  return it->second * static_cast<uint32_t>(block()) +
         static_cast<uint32_t>(c.present + p_int_);
}

BiLassoTrace TraceUniverse::trace_of(uint32_t id) const {
  BiLassoTrace t = structs_[struct_of(id)].shape;
  t.present = present_of(id);
  return t;
}

std::optional<uint32_t> TraceUniverse::shifted_id(uint32_t id, int32_t d) const {
  int32_t p = present_of(id) + d;
  if (std::abs(p) > p_int_) return std::nullopt;
  return id + d;
}

Bitset TraceUniverse::mz_down(int z, std::size_t state) const {
  auto key = std::make_pair(z, state);
  auto it = mz_cache_.find(key);
  if (it != mz_cache_.end()) return it->second;
  Bitset out(size());
  model_user_.for_each([&](std::size_t id) {
    uint32_t uid = static_cast<uint32_t>(id);
    if (state_at(struct_of(uid), static_cast<int64_t>(present_of(uid)) + z) == state) out.set(id);
  });
  mz_cache_.emplace(key, out);
  return out;
}

Bitset TraceUniverse::mz_down_internal(int z, std::size_t state) const {
  Bitset out(size());
  model_.for_each([&](std::size_t id) {
    uint32_t uid = static_cast<uint32_t>(id);
    if (state_at(struct_of(uid), static_cast<int64_t>(present_of(uid)) + z) == state) out.set(id);
  });
  return out;
}

Bitset TraceUniverse::reversed(const Bitset& bits) const {
  Bitset out(size());
  const std::size_t blk = block();
  bits.for_each([&](std::size_t id) {
    uint32_t sid = static_cast<uint32_t>(id / blk);
    int32_t p = static_cast<int32_t>(id % blk) - p_int_;
    out.set(structs_[sid].rev_struct * blk + static_cast<std::size_t>(-p + p_int_));
  });
  return out;
}

uint32_t TraceUniverse::future_key(uint32_t id) const {
  if (future_keys_.empty()) {
    future_keys_.assign(size(), npos);
    past_keys_.assign(size(), npos);
  }
  if (future_keys_[id] != npos) return future_keys_[id];
  const auto& si = structs_[struct_of(id)];
  const int32_t p = present_of(id);
  Word prefix;
  Word loop;
  const int P = static_cast<int>(si.shape.right.size());
  if (p >= si.loop_start) {
    int rot = static_cast<int>(floor_mod(p - si.loop_start, P));
    loop.assign(si.shape.right.begin() + rot, si.shape.right.end());
    loop.insert(loop.end(), si.shape.right.begin(), si.shape.right.begin() + rot);
  } else {
    for (int32_t x = p; x < si.loop_start; ++x) prefix.push_back(si.shape.state_at(x));
    loop = si.shape.right;
  }
  while (!prefix.empty() && prefix.back() == loop.back()) {
    prefix.pop_back();
    loop = rotate_right(std::move(loop));
  }
  std::string key;
  for (uint8_t c : prefix) key += static_cast<char>(c + 1);
  key += '\0';
  for (uint8_t c : loop) key += static_cast<char>(c + 1);
  auto [it, inserted] = key_intern_.emplace(key, static_cast<uint32_t>(key_intern_.size()));
  future_keys_[id] = it->second;
  return it->second;
}

uint32_t TraceUniverse::past_key(uint32_t id) const {
  if (future_keys_.empty()) {
    future_keys_.assign(size(), npos);
    past_keys_.assign(size(), npos);
  }
  if (past_keys_[id] != npos) return past_keys_[id];
  const std::size_t blk = block();
  uint32_t sid = struct_of(id);
  int32_t p = present_of(id);
  uint32_t rid = structs_[sid].rev_struct * static_cast<uint32_t>(blk) +
                 static_cast<uint32_t>(-p + p_int_);
  past_keys_[id] = future_key(rid);
  return past_keys_[id];
}

// --- TraceSet ---------------------------------------------------------------------

bool TraceSet::contains(const BiLassoTrace& t) const {
  uint32_t id = u_->id_of(t);
  return id != TraceUniverse::npos && bits_.test(id);
}

void TraceSet::insert(const BiLassoTrace& t) {
  uint32_t id = u_->id_of(t);
  if (id == TraceUniverse::npos)
    throw UniverseOverflow("trace not representable in this universe: offset/present out of range");
  bits_.set(id);
}

std::vector<BiLassoTrace> TraceSet::members() const {
  std::vector<BiLassoTrace> out;
  bits_.for_each([&](std::size_t id) { out.push_back(u_->trace_of(static_cast<uint32_t>(id))); });
  return out;
}

static void check_same_universe(const TraceSet& a, const TraceSet& b) {
  if (&a.universe() != &b.universe()) throw InputError("trace sets from different universes");
}

TraceSet set_union(const TraceSet& a, const TraceSet& b) {
  check_same_universe(a, b);
  return TraceSet(a.universe(), a.bits() | b.bits());
}
TraceSet set_intersect(const TraceSet& a, const TraceSet& b) {
  check_same_universe(a, b);
  return TraceSet(a.universe(), a.bits() & b.bits());
}
TraceSet set_minus(const TraceSet& a, const TraceSet& b) {
  check_same_universe(a, b);
  return TraceSet(a.universe(), a.bits() - b.bits());
}
TraceSet set_complement(const TraceSet& a) {
  return TraceSet(a.universe(), a.bits().complement());
}
bool set_subset(const TraceSet& a, const TraceSet& b) {
  check_same_universe(a, b);
  return a.bits().subset_of(b.bits());
}

static TraceSet shift_set(const TraceSet& x, int32_t d, const char* opname) {
  const TraceUniverse& u = x.universe();
  Bitset out(u.size());
  std::optional<uint32_t> offender;
  x.bits().for_each([&](std::size_t id) {
    auto nid = u.shifted_id(static_cast<uint32_t>(id), d);
    if (!nid) {
      if (!offender) offender = static_cast<uint32_t>(id);
      return;
    }
    out.set(*nid);
  });
  if (offender)
    throw UniverseOverflow(std::string(opname) + ": present leaves the internal universe for " +
                           format_trace(u.trace_of(*offender), u.system()));
  return TraceSet(u, std::move(out));
}

TraceSet next_op(const TraceSet& x) { return shift_set(x, -1, "next"); }
TraceSet prev_op(const TraceSet& x) { return shift_set(x, +1, "prev"); }

TraceSet reverse_op(const TraceSet& x) {
  return TraceSet(x.universe(), x.universe().reversed(x.bits()));
}

TraceSet sigma_model(StateSet s, const TraceUniverse& u) {
  Bitset out(u.size());
  for (std::size_t st = 0; st < u.system().state_count(); ++st)
    if ((s >> st) & 1) out |= u.sigma_mask(st);
  return TraceSet(u, std::move(out));
}

TraceSet pi_model(const std::vector<std::pair<std::size_t, std::size_t>>& t,
                  const TraceUniverse& u) {
  Bitset out(u.size());
  for (auto [a, b] : t) out |= u.pair_mask(a, b);
  return TraceSet(u, std::move(out));
}

TraceSet model_traces(const TraceUniverse& u) { return TraceSet(u, u.model_user()); }
TraceSet model_traces_internal(const TraceUniverse& u) { return TraceSet(u, u.model_mask()); }

TraceSet state_projection(const TraceSet& x, std::size_t state) {
  return TraceSet(x.universe(), x.bits() & x.universe().sigma_mask(state));
}

TraceSet past_projection(const TraceUniverse& u, const BiLassoTrace& t, int k) {
  if (k < 0) throw InputError("past_projection expects k >= 0");
  uint8_t s = t.state_at(static_cast<int64_t>(t.present) - k);
  return TraceSet(u, u.mz_down(-k, s));
}

TraceSet present_clip(const TraceSet& x, int bound) {
  const TraceUniverse& u = x.universe();
  Bitset out(u.size());
  x.bits().for_each([&](std::size_t id) {
    if (std::abs(u.present_of(static_cast<uint32_t>(id))) <= bound) out.set(id);
  });
  return TraceSet(u, std::move(out));
}

TraceSet forall_op(const TraceSet& n, const TraceSet& x) {
  check_same_universe(n, x);
  const TraceUniverse& u = n.universe();
  Bitset out(u.size());
  for (std::size_t st = 0; st < u.system().state_count(); ++st) {
    Bitset proj = n.bits() & u.sigma_mask(st);
    if (proj.subset_of(x.bits())) out |= proj;
  }
  return TraceSet(u, std::move(out));
}

TraceSet fd_closure(const TraceSet& x) {
  const TraceUniverse& u = x.universe();
  // members grouped by (present, future_key); closure adds every carrier
  // trace agreeing with some member on all times >= present
  std::map<std::pair<int32_t, uint32_t>, bool> keys;
  x.bits().for_each([&](std::size_t id) {
    keys[{u.present_of(static_cast<uint32_t>(id)), u.future_key(static_cast<uint32_t>(id))}] = true;
  });
  Bitset out(u.size());
  for (std::size_t id = 0; id < u.size(); ++id) {
    auto key = std::make_pair(u.present_of(static_cast<uint32_t>(id)),
                              u.future_key(static_cast<uint32_t>(id)));
    if (keys.count(key)) out.set(id);
  }
  return TraceSet(u, std::move(out));
}

TraceSet bd_closure(const TraceSet& x) {
  const TraceUniverse& u = x.universe();
  std::map<std::pair<int32_t, uint32_t>, bool> keys;
  x.bits().for_each([&](std::size_t id) {
    keys[{u.present_of(static_cast<uint32_t>(id)), u.past_key(static_cast<uint32_t>(id))}] = true;
  });
  Bitset out(u.size());
  for (std::size_t id = 0; id < u.size(); ++id) {
    auto key = std::make_pair(u.present_of(static_cast<uint32_t>(id)),
                              u.past_key(static_cast<uint32_t>(id)));
    if (keys.count(key)) out.set(id);
  }
  return TraceSet(u, std::move(out));
}

StateSet alpha_forall(const TraceSet& x, const TraceUniverse& u) {
  StateSet out = 0;
  for (std::size_t s = 0; s < u.system().state_count(); ++s)
    if (u.model_user_down(s).subset_of(x.bits())) out |= StateSet{1} << s;
  return out;
}

TraceSet gamma_forall(StateSet s, const TraceUniverse& u) {
  Bitset out(u.size());
  for (std::size_t st = 0; st < u.system().state_count(); ++st)
    if ((s >> st) & 1) out |= u.model_user_down(st);
  return TraceSet(u, std::move(out));
}

TraceSet rho_forall(const TraceSet& x, const TraceUniverse& u) {
  return gamma_forall(alpha_forall(x, u), u);
}

StateSet alpha_exists(const TraceSet& x, const TraceUniverse& u) {
  StateSet out = 0;
  for (std::size_t s = 0; s < u.system().state_count(); ++s)
    if (u.model_user_down(s).intersects(x.bits())) out |= StateSet{1} << s;
  return out;
}

TraceSet gamma_exists(StateSet s, const TraceUniverse& u) {
  Bitset out = u.user_zone() - u.model_user();
  for (std::size_t st = 0; st < u.system().state_count(); ++st)
    if ((s >> st) & 1) out |= u.model_user_down(st);
  return TraceSet(u, std::move(out));
}

TraceSet rho_exists(const TraceSet& x, const TraceUniverse& u) {
  Bitset negx = u.user_zone() - x.bits();
  Bitset r = rho_forall(TraceSet(u, std::move(negx)), u).bits();
  return TraceSet(u, u.user_zone() - r);
}

// lenient in-block shift used only by the hypothesis check: escaping bits are
// dropped before re-intersecting the user zone.
static Bitset lenient_shift(const TraceUniverse& u, const Bitset& bits, int32_t d) {
  Bitset out(u.size());
  bits.for_each([&](std::size_t id) {
    auto nid = u.shifted_id(static_cast<uint32_t>(id), d);
    if (nid) out.set(*nid);
  });
  return out;
}

HypothesisReport check_hypothesis(const TraceUniverse& u) {
  HypothesisReport rep;
  const auto& ts = u.system();
  for (std::size_t s = 0; s < ts.state_count(); ++s) {
    std::size_t c = u.model_user_down(s).count();
    rep.projection_sizes[ts.state_names()[s]] = c;
    if (c < 2) {
      rep.ok = false;
      rep.violations.push_back("|M↓" + ts.state_names()[s] + "| = " + std::to_string(c) +
                               " (need > 1)");
    }
  }
  struct Case {
    const char* name;
    Bitset value;
  };
  const Bitset& mu = u.model_user();
  const Bitset& ru = u.rev_model_mask() & u.user_zone();
  std::vector<Case> cases;
  cases.push_back({"next(M) ∩ U", lenient_shift(u, u.model_mask(), -1) & u.user_zone()});
  cases.push_back({"prev(M) ∩ U", lenient_shift(u, u.model_mask(), +1) & u.user_zone()});
  cases.push_back({"rev(rev M) ∩ U", u.reversed(u.reversed(u.model_mask())) & u.user_zone()});
  for (auto& c : cases) {
    if (!(c.value == mu)) {
      rep.ok = false;
      rep.violations.push_back(std::string(c.name) + " differs from M ∩ U");
    }
  }
  std::vector<Case> rcases;
  rcases.push_back({"next(revM) ∩ U", lenient_shift(u, u.rev_model_mask(), -1) & u.user_zone()});
  rcases.push_back({"prev(revM) ∩ U", lenient_shift(u, u.rev_model_mask(), +1) & u.user_zone()});
  for (auto& c : rcases) {
    if (!(c.value == ru)) {
      rep.ok = false;
      rep.violations.push_back(std::string(c.name) + " differs from revM ∩ U");
    }
  }
  return rep;
}

}  // namespace tcmc
