#include "tcmc/mucalc.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>

namespace tcmc {

FormulaPtr make_state_prop(StateSet s) {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::StateProp;
  f->states = s;
  return f;
}

FormulaPtr make_label_prop(std::string label) {
  auto f = std::make_shared<Formula>();
  f->kind = NodeKind::StateProp;
  f->name = std::move(label);
  return f;
}

FormulaPtr make_node(NodeKind k, std::vector<FormulaPtr> kids, std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->kids = std::move(kids);
  f->name = std::move(name);
  return f;
}

StateSet resolve_state_prop(const Formula& f, const TransitionSystem& ts) {
  if (f.states) {
    if (*f.states & ~ts.all_states()) throw InputError("state set literal out of range");
    return *f.states;
  }
  if (f.name == "true") return ts.all_states();
  if (f.name == "false") return 0;
  if (auto l = ts.label(f.name)) return *l;
  if (auto s = ts.state(f.name)) return StateSet{1} << *s;  // bare state id
  throw InputError("unknown label or state '" + f.name + "'");
}

static std::vector<std::pair<std::size_t, std::size_t>> resolve_edges(
    const Formula& f, const TransitionSystem& ts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto& [a, b] : f.edges) {
    auto sa = ts.state(a), sb = ts.state(b);
    if (!sa || !sb) throw InputError("unknown state in transition literal: (" + a + "," + b + ")");
    out.emplace_back(*sa, *sb);
  }
  return out;
}

int temporal_depth(const FormulaPtr& f) {
  int kid = 0;
  for (const auto& k : f->kids) kid = std::max(kid, temporal_depth(k));
  switch (f->kind) {
    case NodeKind::Next:
    case NodeKind::Prev:
    case NodeKind::Finally:
    case NodeKind::Globally:
    case NodeKind::FinallyPast:
    case NodeKind::GloballyPast:
    case NodeKind::Until:
    case NodeKind::WeakUntil:
      return kid + 1;
    default:
      return kid;
  }
}

// --- parsing ------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  std::vector<std::string> bound;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("formula syntax error at position " + std::to_string(pos) + ": " + msg);
  }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool peek(char c) {
    skip();
    return pos < s.size() && s[pos] == c;
  }
  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected identifier");
    return s.substr(start, pos - start);
  }
  bool peek_word(const std::string& w) {
    skip();
    if (s.compare(pos, w.size(), w) != 0) return false;
    std::size_t end = pos + w.size();
    if (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
      return false;
    return true;
  }
  bool eat_word(const std::string& w) {
    if (!peek_word(w)) return false;
    skip();
    pos += w.size();
    return true;
  }

  FormulaPtr parse_expr() {
    if (eat_word("mu")) return parse_fix(NodeKind::Mu);
    if (eat_word("nu")) return parse_fix(NodeKind::Nu);
    return parse_implies();
  }
  FormulaPtr parse_fix(NodeKind k) {
    std::string v = ident();
    expect('.');
    bound.push_back(v);
    auto body = parse_expr();
    bound.pop_back();
    return make_node(k, {body}, v);
  }
  FormulaPtr parse_implies() {
    auto l = parse_or();
    skip();
    if (pos + 1 < s.size() && s[pos] == '-' && s[pos + 1] == '>') {
      pos += 2;
      auto r = parse_implies();
      return make_node(NodeKind::Implies, {l, r});
    }
    return l;
  }
  FormulaPtr parse_or() {
    auto l = parse_and();
    while (eat('|')) l = make_node(NodeKind::Or, {l, parse_and()});
    return l;
  }
  FormulaPtr parse_and() {
    auto l = parse_unary();
    while (eat('&')) l = make_node(NodeKind::And, {l, parse_unary()});
    return l;
  }
  // F/G optionally followed by '-' for the past variants
  FormulaPtr parse_fg(bool globally) {
    skip();
    pos += 1;
    bool past = false;
    if (pos < s.size() && s[pos] == '-' && !(pos + 1 < s.size() && s[pos + 1] == '>')) {
      ++pos;
      past = true;
    }
    NodeKind k = globally ? (past ? NodeKind::GloballyPast : NodeKind::Globally)
                          : (past ? NodeKind::FinallyPast : NodeKind::Finally);
    return make_node(k, {parse_unary()});
  }
  FormulaPtr parse_unary() {
    skip();
    if (eat('!')) return make_node(NodeKind::Not, {parse_unary()});
    if (peek('(')) {
      std::size_t save = pos;
      ++pos;
      skip();
      if (pos < s.size() && s[pos] == ')') {
        ++pos;
        return make_node(NodeKind::Next, {parse_unary()});
      }
      if (pos < s.size() && s[pos] == '-') {
        std::size_t save2 = pos;
        ++pos;
        skip();
        if (pos < s.size() && s[pos] == ')') {
          ++pos;
          return make_node(NodeKind::Prev, {parse_unary()});
        }
        pos = save2;
      }
      pos = save;
      expect('(');
      auto e = parse_expr();
      expect(')');
      return e;
    }
    if (eat_word("rev")) return make_node(NodeKind::Reverse, {parse_unary()});
    if (eat_word("A")) return make_node(NodeKind::ForallModel, {parse_unary()});
    if (peek_word("mu") || peek_word("nu")) return parse_expr();
    if (peek_word("F")) return parse_fg(false);
    if (peek_word("G")) return parse_fg(true);
    if (peek_word("U") || peek_word("W")) {
      bool weak = peek_word("W");
      skip();
      pos += 1;
      expect('(');
      auto a = parse_expr();
      expect(',');
      auto b = parse_expr();
      expect(')');
      return make_node(weak ? NodeKind::WeakUntil : NodeKind::Until, {a, b});
    }
    return parse_atom();
  }
  FormulaPtr parse_atom() {
    skip();
    if (peek('[')) return parse_bracket();
    std::string id = ident();
    if (std::find(bound.begin(), bound.end(), id) != bound.end())
      return make_node(NodeKind::Var, {}, id);
    return make_label_prop(id);
  }
  FormulaPtr parse_bracket() {
    expect('[');
    std::string kindw = ident();
    expect(':');
    expect('{');
    auto f = std::make_shared<Formula>();
    if (kindw == "S") {
      f->kind = NodeKind::StateProp;
      if (!peek('}')) {
        do {
          f->edges.emplace_back(ident(), "");
        } while (eat(','));
      }
    } else if (kindw == "T") {
      f->kind = NodeKind::TransProp;
      if (!peek('}')) {
        do {
          expect('(');
          std::string a = ident();
          expect(',');
          std::string b = ident();
          expect(')');
          f->edges.emplace_back(a, b);
        } while (eat(','));
      }
    } else {
      fail("expected S or T literal");
    }
    expect('}');
    expect(']');
    return f;
  }
};

// bound fixpoint variables must occur under an even number of negations
void check_monotone(const FormulaPtr& f, std::vector<std::pair<std::string, bool>>& scope,
                    bool negated) {
  switch (f->kind) {
    case NodeKind::Var:
      for (auto it = scope.rbegin(); it != scope.rend(); ++it)
        if (it->first == f->name) {
          if (negated != it->second)
            throw InputError("fixpoint variable " + f->name +
                             " occurs under an odd number of negations");
          return;
        }
      return;
    case NodeKind::Not:
      check_monotone(f->kids[0], scope, !negated);
      return;
    case NodeKind::Implies:
      check_monotone(f->kids[0], scope, !negated);
      check_monotone(f->kids[1], scope, negated);
      return;
    case NodeKind::Mu:
    case NodeKind::Nu:
      scope.emplace_back(f->name, negated);
      check_monotone(f->kids[0], scope, negated);
      scope.pop_back();
      return;
    default:
      for (const auto& k : f->kids) check_monotone(k, scope, negated);
      return;
  }
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  Parser p{text, 0, {}};
  auto f = p.parse_expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  std::vector<std::pair<std::string, bool>> scope;
  check_monotone(f, scope, false);
  return f;
}

std::string format_formula(const FormulaPtr& f) {
  switch (f->kind) {
    case NodeKind::StateProp: {
      if (f->states) return "[S:#" + std::to_string(*f->states) + "]";
      if (!f->edges.empty()) {
        std::string r = "[S:{";
        for (std::size_t i = 0; i < f->edges.size(); ++i)
          r += (i ? "," : "") + f->edges[i].first;
        return r + "}]";
      }
      return f->name;
    }
    case NodeKind::TransProp: {
      std::string r = "[T:{";
      for (std::size_t i = 0; i < f->edges.size(); ++i)
        r += (i ? "," : "") + ("(" + f->edges[i].first + "," + f->edges[i].second + ")");
      return r + "}]";
    }
    case NodeKind::Var:
      return f->name;
    case NodeKind::Next:
      return "()" + format_formula(f->kids[0]);
    case NodeKind::Prev:
      return "(-)" + format_formula(f->kids[0]);
    case NodeKind::Reverse:
      return "rev (" + format_formula(f->kids[0]) + ")";
    case NodeKind::Or:
      return "(" + format_formula(f->kids[0]) + " | " + format_formula(f->kids[1]) + ")";
    case NodeKind::And:
      return "(" + format_formula(f->kids[0]) + " & " + format_formula(f->kids[1]) + ")";
    case NodeKind::Not:
      return "!" + format_formula(f->kids[0]);
    case NodeKind::Implies:
      return "(" + format_formula(f->kids[0]) + " -> " + format_formula(f->kids[1]) + ")";
    case NodeKind::Mu:
      return "mu " + f->name + ". " + format_formula(f->kids[0]);
    case NodeKind::Nu:
      return "nu " + f->name + ". " + format_formula(f->kids[0]);
    case NodeKind::ForallModel:
      return "A (" + format_formula(f->kids[0]) + ")";
    case NodeKind::Finally:
      return "F (" + format_formula(f->kids[0]) + ")";
    case NodeKind::Globally:
      return "G (" + format_formula(f->kids[0]) + ")";
    case NodeKind::FinallyPast:
      return "F- (" + format_formula(f->kids[0]) + ")";
    case NodeKind::GloballyPast:
      return "G- (" + format_formula(f->kids[0]) + ")";
    case NodeKind::Until:
      return "U(" + format_formula(f->kids[0]) + ", " + format_formula(f->kids[1]) + ")";
    case NodeKind::WeakUntil:
      return "W(" + format_formula(f->kids[0]) + ", " + format_formula(f->kids[1]) + ")";
  }
  return "?";
}

static StateSet resolve_state_prop_full(const Formula& f, const TransitionSystem& ts) {
  if (f.kind != NodeKind::StateProp) throw InputError("not a state literal");
  if (f.states) return resolve_state_prop(f, ts);
  if (!f.edges.empty()) {  // [S:{a,b}] literal: names carried in edges[i].first
    StateSet out = 0;
    for (auto& [n, unused] : f.edges) {
      auto s = ts.state(n);
      if (!s) throw InputError("unknown state '" + n + "' in state literal");
      out |= StateSet{1} << *s;
    }
    return out;
  }
  return resolve_state_prop(f, ts);
}

// --- the three-valued set engine -------------------------------------------------
//
// Sets are evaluated on the internal carrier as (low, high) pairs with
// low ⊆ truth ⊆ high, plus sound bounds (sr, sl) on the presents beyond
// which membership is semantically periodic along every carrier path (with
// that path's loop period). Temporal sugar reads one certified period from
// the stable zone and extends it, which also repairs boundary rows
// contaminated by shifts; when no zone can be certified the operator
// degrades to an honest one-sided answer. Consumers demand decidedness only
// on the user-level universe.

namespace {

constexpr int64_t kFar = int64_t{1} << 40;

struct ISem {
  Bitset low, high;
  int64_t sr = -kFar;  // presents >= sr: periodic along the right loop
  int64_t sl = kFar;   // presents <= sl: periodic along the left loop
};

struct Engine {
  const TraceUniverse& u;
  const std::size_t blk;
  const int pint;
  int64_t ls_max, le_min;
  int max_period;

  explicit Engine(const TraceUniverse& uni)
      : u(uni), blk(uni.block()), pint(uni.present_bound()) {
    ls_max = -kFar;
    le_min = kFar;
    max_period = 1;
    for (std::size_t sid = 0; sid < u.struct_count(); ++sid) {
      const auto& si = u.info(sid);
      ls_max = std::max<int64_t>(ls_max, si.loop_start);
      le_min = std::min<int64_t>(le_min, si.left_end);
      max_period = std::max<int>({max_period, static_cast<int>(si.shape.left.size()),
                                  static_cast<int>(si.shape.right.size())});
    }
  }

  ISem crisp(Bitset b) const {
    Bitset c = b;
    return {std::move(b), std::move(c), ls_max, le_min - 1};
  }

  std::size_t row(int64_t present) const { return static_cast<std::size_t>(present + pint); }

  // out[id] = src[id + d] within the block. Out-of-block reads fold one loop
  // period inward when the source is certified periodic there (sr/sl);
  // otherwise they yield `boundary`.
  Bitset shift_read(const Bitset& src, int d, bool boundary, int64_t sr, int64_t sl) const {
    Bitset out(u.size());
    const std::size_t n = u.struct_count();
    for (std::size_t sid = 0; sid < n; ++sid) {
      const std::size_t base = sid * blk;
      const auto& si = u.info(sid);
      const int pr = static_cast<int>(si.shape.right.size());
      const int pl = static_cast<int>(si.shape.left.size());
      for (std::size_t j = 0; j < blk; ++j) {
        int64_t srcj = static_cast<int64_t>(j) + d;
        bool v;
        if (srcj >= 0 && srcj < static_cast<int64_t>(blk)) {
          v = src.test(base + static_cast<std::size_t>(srcj));
        } else if (srcj >= static_cast<int64_t>(blk) &&
                   srcj - pr - pint >= std::max<int64_t>(si.loop_start, sr)) {
          v = src.test(base + static_cast<std::size_t>(srcj - pr));
        } else if (srcj < 0 && srcj + pl - pint <= std::min<int64_t>(si.left_end - 1, sl)) {
          v = src.test(base + static_cast<std::size_t>(srcj + pl));
        } else {
          v = boundary;
        }
        if (v) out.set(base + j);
      }
    }
    return out;
  }

  ISem shift(const ISem& x, int d) const {
    return {shift_read(x.low, d, false, x.sr, x.sl), shift_read(x.high, d, true, x.sr, x.sl),
            std::max(-kFar, x.sr - d), std::min(kFar, x.sl - d)};
  }

  ISem forall_model(const ISem& x) const {
    Bitset low(u.size()), high(u.size());
    for (std::size_t s = 0; s < u.system().state_count(); ++s) {
      const Bitset& proj = u.model_user_down(s);
      if (proj.subset_of(x.low)) low |= proj;
      if (proj.subset_of(x.high)) high |= proj;
    }
    // results live inside the user zone; constant false beyond it
    return {std::move(low), std::move(high), u.bounds().I + 1,
            -static_cast<int64_t>(u.bounds().I) - 1};
  }

  void load(const Bitset& b, std::size_t sid, std::vector<char>& buf) const {
    buf.assign(blk, 0);
    const std::size_t base = sid * blk;
    for (std::size_t j = b.next(base); j != Bitset::npos && j < base + blk; j = b.next(j + 1))
      buf[j - base] = 1;
  }
  void store(Bitset& b, std::size_t sid, const std::vector<char>& buf) const {
    const std::size_t base = sid * blk;
    for (std::size_t j = 0; j < blk; ++j)
      if (buf[j]) b.set(base + j);
  }

  enum class Op { F, G, U, W };

  // One certified period of child values at presents [zp, zp+P); requires the
  // zone inside the block, inside the right-loop region or past the child's
  // sr bound, and decided.
  bool right_zone(std::size_t sid, const ISem& c, int64_t child_sr, int64_t& zp, int& P) const {
    const auto& si = u.info(sid);
    P = static_cast<int>(si.shape.right.size());
    zp = std::max<int64_t>(si.loop_start, child_sr);
    if (zp + P - 1 > pint) return false;
    for (int i = 0; i < P; ++i) {
      std::size_t id = sid * blk + row(zp + i);
      if (c.low.test(id) != c.high.test(id)) return false;
    }
    return true;
  }

  bool left_zone(std::size_t sid, const ISem& c, int64_t child_sl, int64_t& zl, int& P) const {
    const auto& si = u.info(sid);
    P = static_cast<int>(si.shape.left.size());
    zl = std::min<int64_t>(si.left_end - 1, child_sl);
    if (zl - P + 1 < -pint) return false;
    for (int i = 0; i < P; ++i) {
      std::size_t id = sid * blk + row(zl - i);
      if (c.low.test(id) != c.high.test(id)) return false;
    }
    return true;
  }

  // future-time F/G/U over one struct, both polarities at once
  void block_future(Op op, std::size_t sid, const ISem& a, const ISem& b, int64_t zone_sr,
                    Bitset& out_low, Bitset& out_high) const {
    const std::size_t base = sid * blk;
    std::vector<char> alow(blk), ahigh(blk), blow, bhigh;
    load(a.low, sid, alow);
    load(a.high, sid, ahigh);
    if (op == Op::U || op == Op::W) {
      load(b.low, sid, blow);
      load(b.high, sid, bhigh);
    }
    int64_t zp;
    int P;
    bool ok = right_zone(sid, a, zone_sr, zp, P);
    if (op == Op::U || op == Op::W) {
      int64_t zpb;
      int Pb;
      ok = ok && right_zone(sid, b, zone_sr, zpb, Pb) && zpb == zp;
    }
    std::vector<char> repaired(blk, 0);
    char seed_low = 0, seed_high = 1;
    int64_t sweep_top = pint;  // sweep starts below this present
    if (ok) {
      // periodic continuation from one certified period
      if (op == Op::F || op == Op::G) {
        char acc = (op == Op::G) ? 1 : 0;
        for (int i = 0; i < P; ++i) {
          char v = alow[row(zp + i)];
          acc = (op == Op::G) ? (acc && v) : (acc || v);
        }
        for (int64_t p = zp; p <= pint; ++p) repaired[row(p)] = acc;
        seed_low = seed_high = acc;
      } else {
        std::vector<char> av(P), bv(P);
        for (int i = 0; i < P; ++i) {
          av[i] = alow[row(zp + i)];
          bv[i] = blow[row(zp + i)];
        }
        // until: least solution of the cyclic recurrence; weak until: greatest
        std::vector<char> ut(P, op == Op::W ? 1 : 0);
        for (int sweep = 0; sweep < 2 * P + 2; ++sweep)
          for (int i = P; i-- > 0;) ut[i] = bv[i] || (av[i] && ut[(i + 1) % P]);
        for (int64_t p = zp; p <= pint; ++p)
          repaired[row(p)] = ut[static_cast<std::size_t>((p - zp) % P)];
        seed_low = seed_high = ut[0];  // unused; sweeps start at zp - 1
      }
      sweep_top = zp - 1;
      for (int64_t p = zp; p <= pint; ++p) {
        if (repaired[row(p)]) {
          out_low.set(base + row(p));
          out_high.set(base + row(p));
        }
      }
    }
    auto sweep = [&](const std::vector<char>& ac, const std::vector<char>& bc, char seed,
                     Bitset& dst) {
      char nxt = ok ? repaired[row(sweep_top + 1)] : seed;
      for (int64_t p = sweep_top; p >= -pint; --p) {
        char v;
        switch (op) {
          case Op::F: v = ac[row(p)] || nxt; break;
          case Op::G: v = ac[row(p)] && nxt; break;
          case Op::U:
          case Op::W: v = bc[row(p)] || (ac[row(p)] && nxt); break;
        }
        if (v) dst.set(base + row(p));
        nxt = v;
      }
    };
    if (sweep_top >= -pint) {
      sweep(alow, blow, seed_low, out_low);
      sweep(ahigh, bhigh, seed_high, out_high);
    }
  }

  // past-time F-/G- over one struct
  void block_past(Op op, std::size_t sid, const ISem& a, int64_t zone_sl, Bitset& out_low,
                  Bitset& out_high) const {
    const std::size_t base = sid * blk;
    std::vector<char> alow(blk), ahigh(blk);
    load(a.low, sid, alow);
    load(a.high, sid, ahigh);
    int64_t zl;
    int P;
    bool ok = left_zone(sid, a, zone_sl, zl, P);
    char seed_low = 0, seed_high = 1;
    int64_t sweep_bot = -pint;
    char repaired_val = 0;
    if (ok) {
      char acc = (op == Op::G) ? 1 : 0;
      for (int i = 0; i < P; ++i) {
        char v = alow[row(zl - i)];
        acc = (op == Op::G) ? (acc && v) : (acc || v);
      }
      repaired_val = acc;
      for (int64_t p = -pint; p <= zl; ++p)
        if (acc) {
          out_low.set(base + row(p));
          out_high.set(base + row(p));
        }
      sweep_bot = zl + 1;
      seed_low = seed_high = acc;
    }
    auto sweep = [&](const std::vector<char>& ac, char seed, Bitset& dst) {
      char prv = ok ? repaired_val : seed;
      for (int64_t p = sweep_bot; p <= pint; ++p) {
        char v = (op == Op::G) ? (ac[row(p)] && prv) : (ac[row(p)] || prv);
        if (v) dst.set(base + row(p));
        prv = v;
      }
    };
    if (sweep_bot <= pint) {
      sweep(alow, seed_low, out_low);
      sweep(ahigh, seed_high, out_high);
    }
  }

  ISem sugar_future(Op op, const ISem& a, const ISem& b) const {
    ISem out{Bitset(u.size()), Bitset(u.size()), 0, 0};
    int64_t zone_sr = (op == Op::U) ? std::max(a.sr, b.sr) : a.sr;
    for (std::size_t sid = 0; sid < u.struct_count(); ++sid)
      block_future(op, sid, a, b, zone_sr, out.low, out.high);
    out.sr = std::max<int64_t>(zone_sr, ls_max);
    int64_t sl_in = (op == Op::U) ? std::min(a.sl, b.sl) : a.sl;
    out.sl = std::max<int64_t>(-kFar, std::min<int64_t>(sl_in, le_min - 1) - (2 * max_period + 2));
    return out;
  }

  ISem sugar_past(Op op, const ISem& a) const {
    ISem out{Bitset(u.size()), Bitset(u.size()), 0, 0};
    for (std::size_t sid = 0; sid < u.struct_count(); ++sid)
      block_past(op, sid, a, a.sl, out.low, out.high);
    out.sl = std::min<int64_t>(a.sl, le_min - 1);
    out.sr = std::min<int64_t>(kFar, std::max<int64_t>(a.sr, ls_max) + (2 * max_period + 2));
    return out;
  }

  using Env = std::map<std::string, ISem>;

  ISem eval(const FormulaPtr& f, Env& env) const {
    switch (f->kind) {
      case NodeKind::StateProp: {
        StateSet s = resolve_state_prop_full(*f, u.system());
        Bitset b(u.size());
        for (std::size_t st = 0; st < u.system().state_count(); ++st)
          if ((s >> st) & 1) b |= u.sigma_mask(st);
        return crisp(std::move(b));
      }
      case NodeKind::TransProp: {
        auto edges = resolve_edges(*f, u.system());
        Bitset b(u.size());
        for (auto [a, c] : edges) b |= u.pair_mask(a, c);
        return crisp(std::move(b));
      }
      case NodeKind::Var: {
        auto it = env.find(f->name);
        if (it == env.end()) throw InputError("unbound variable " + f->name);
        return it->second;
      }
      case NodeKind::Or: {
        auto a = eval(f->kids[0], env), b = eval(f->kids[1], env);
        return {a.low | b.low, a.high | b.high, std::max(a.sr, b.sr), std::min(a.sl, b.sl)};
      }
      case NodeKind::And: {
        auto a = eval(f->kids[0], env), b = eval(f->kids[1], env);
        return {a.low & b.low, a.high & b.high, std::max(a.sr, b.sr), std::min(a.sl, b.sl)};
      }
      case NodeKind::Not: {
        auto a = eval(f->kids[0], env);
        return {a.high.complement(), a.low.complement(), a.sr, a.sl};
      }
      case NodeKind::Implies: {
        auto a = eval(f->kids[0], env), b = eval(f->kids[1], env);
        return {a.high.complement() | b.low, a.low.complement() | b.high, std::max(a.sr, b.sr),
                std::min(a.sl, b.sl)};
      }
      case NodeKind::Next:
        return shift(eval(f->kids[0], env), +1);
      case NodeKind::Prev:
        return shift(eval(f->kids[0], env), -1);
      case NodeKind::Reverse: {
        auto a = eval(f->kids[0], env);
        return {u.reversed(a.low), u.reversed(a.high), a.sl == -kFar ? kFar : -a.sl,
                a.sr == kFar ? -kFar : -a.sr};
      }
      case NodeKind::ForallModel:
        return forall_model(eval(f->kids[0], env));
      case NodeKind::Finally:
        return sugar_future(Op::F, eval(f->kids[0], env), ISem{});
      case NodeKind::Globally:
        return sugar_future(Op::G, eval(f->kids[0], env), ISem{});
      case NodeKind::FinallyPast:
        return sugar_past(Op::F, eval(f->kids[0], env));
      case NodeKind::GloballyPast:
        return sugar_past(Op::G, eval(f->kids[0], env));
      case NodeKind::Until:
        return sugar_future(Op::U, eval(f->kids[0], env), eval(f->kids[1], env));
      case NodeKind::WeakUntil:
        // νX. φ2 ∨ (φ1 ∧ ⊕X): trace-equivalent to Gφ1 ∨ U(φ1,φ2) but with
        // the branching-time abstract semantics of weak until
        return sugar_future(Op::W, eval(f->kids[0], env), eval(f->kids[1], env));
      case NodeKind::Mu:
      case NodeKind::Nu: {
        bool mu = f->kind == NodeKind::Mu;
        // constant start sets are periodic everywhere
        ISem cur{Bitset(u.size()), Bitset(u.size()), -kFar, kFar};
        if (!mu) {
          cur.low.fill();
          cur.high.fill();
        }
        for (std::size_t it = 0; it <= u.size() + 1; ++it) {
          env.insert_or_assign(f->name, cur);
          ISem nxt = eval(f->kids[0], env);
          if (nxt.low == cur.low && nxt.high == cur.high) {
            env.erase(f->name);
            return cur;
          }
          cur = std::move(nxt);
        }
        throw InputError("fixpoint iteration did not stabilize for " + f->name);
      }
    }
    throw InputError("unknown formula node");
  }
};

}  // namespace

SemSet trace_sem_3v(const FormulaPtr& f, const TraceUniverse& u, const TraceEnv& env) {
  Engine e(u);
  Engine::Env ev;
  for (const auto& [k, v] : env) {
    if (&v.universe() != &u) throw InputError("environment set from a different universe");
    // caller-provided sets carry no periodicity guarantee
    ev.emplace(k, ISem{v.bits(), v.bits(), kFar, -kFar});
  }
  ISem r = e.eval(f, ev);
  return {std::move(r.low), std::move(r.high)};
}

TraceSet trace_sem(const FormulaPtr& f, const TraceUniverse& u, const TraceEnv& env) {
  SemSet s = trace_sem_3v(f, u, env);
  Bitset undec = s.high - s.low;
  if ((undec & u.user_zone()).any())
    throw UniverseOverflow(
        "universe too small: formula evaluation is undecided inside the user-level universe "
        "(increase slack or reduce temporal depth)");
  return TraceSet(u, std::move(s.low));
}

// --- per-trace evaluator -----------------------------------------------------------
//
// Labels every subformula over a window extending one padded stretch past
// both loop regions; temporal operators close their recurrences on the loop
// periods (classic lasso-word labeling), so the verdict is exact for the
// infinite trace.

namespace {

struct PTEval {
  const TransitionSystem& ts;
  BiLassoTrace t;  // canonical
  int64_t A, B;    // inclusive window
  int Pl, Pr;
  std::map<const Formula*, std::vector<char>> memo;
  std::unique_ptr<PTEval> rev;

  PTEval(const TransitionSystem& sys, BiLassoTrace tr, int depth_hint) : ts(sys), t(std::move(tr)) {
    Pl = static_cast<int>(t.left.size());
    Pr = static_cast<int>(t.right.size());
    int64_t lo = std::min<int64_t>({t.offset, t.present});
    int64_t hi = std::max<int64_t>({t.offset + static_cast<int64_t>(t.mid.size()), t.present});
    int64_t d = depth_hint + 3;
    A = lo - d * Pl - d;
    B = hi + d * Pr + d;
  }

  std::size_t len() const { return static_cast<std::size_t>(B - A + 1); }
  std::size_t idx(int64_t pos) const { return static_cast<std::size_t>(pos - A); }

  const std::vector<char>& labels(const FormulaPtr& f) {
    auto it = memo.find(f.get());
    if (it != memo.end()) return it->second;
    std::vector<char> out(len(), 0);
    switch (f->kind) {
      case NodeKind::StateProp: {
        StateSet s = resolve_state_prop_full(*f, ts);
        for (int64_t p = A; p <= B; ++p) out[idx(p)] = (s >> t.state_at(p)) & 1;
        break;
      }
      case NodeKind::TransProp: {
        auto edges = resolve_edges(*f, ts);
        for (int64_t p = A; p <= B; ++p) {
          auto a = t.state_at(p), b = t.state_at(p + 1);
          for (auto [x, y] : edges)
            if (x == a && y == b) {
              out[idx(p)] = 1;
              break;
            }
        }
        break;
      }
      case NodeKind::Or: {
        const auto& a = labels(f->kids[0]);
        const auto& b = labels(f->kids[1]);
        for (std::size_t i = 0; i < len(); ++i) out[i] = a[i] || b[i];
        break;
      }
      case NodeKind::And: {
        const auto& a = labels(f->kids[0]);
        const auto& b = labels(f->kids[1]);
        for (std::size_t i = 0; i < len(); ++i) out[i] = a[i] && b[i];
        break;
      }
      case NodeKind::Not: {
        const auto& a = labels(f->kids[0]);
        for (std::size_t i = 0; i < len(); ++i) out[i] = !a[i];
        break;
      }
      case NodeKind::Implies: {
        const auto& a = labels(f->kids[0]);
        const auto& b = labels(f->kids[1]);
        for (std::size_t i = 0; i < len(); ++i) out[i] = !a[i] || b[i];
        break;
      }
      case NodeKind::Next: {
        const auto& a = labels(f->kids[0]);
        for (int64_t p = A; p < B; ++p) out[idx(p)] = a[idx(p + 1)];
        out[idx(B)] = a[idx(B - Pr + 1)];  // periodic continuation
        break;
      }
      case NodeKind::Prev: {
        const auto& a = labels(f->kids[0]);
        for (int64_t p = A + 1; p <= B; ++p) out[idx(p)] = a[idx(p - 1)];
        out[idx(A)] = a[idx(A + Pl - 1)];
        break;
      }
      case NodeKind::Reverse: {
        if (!rev) {
          rev = std::make_unique<PTEval>(ts, reverse_trace(t), 0);
          rev->A = -B;
          rev->B = -A;
        }
        const auto& a = rev->labels(f->kids[0]);
        for (int64_t p = A; p <= B; ++p) out[idx(p)] = a[rev->idx(-p)];
        break;
      }
      case NodeKind::Finally: {
        const auto& a = labels(f->kids[0]);
        char seed = 0;
        for (int i = 0; i < Pr; ++i) seed = seed || a[idx(B - i)];
        char nxt = seed;
        for (int64_t p = B; p >= A; --p) {
          out[idx(p)] = a[idx(p)] || nxt;
          nxt = out[idx(p)];
        }
        break;
      }
      case NodeKind::Globally: {
        const auto& a = labels(f->kids[0]);
        char seed = 1;
        for (int i = 0; i < Pr; ++i) seed = seed && a[idx(B - i)];
        char nxt = seed;
        for (int64_t p = B; p >= A; --p) {
          out[idx(p)] = a[idx(p)] && nxt;
          nxt = out[idx(p)];
        }
        break;
      }
      case NodeKind::FinallyPast: {
        const auto& a = labels(f->kids[0]);
        char seed = 0;
        for (int i = 0; i < Pl; ++i) seed = seed || a[idx(A + i)];
        char prv = seed;
        for (int64_t p = A; p <= B; ++p) {
          out[idx(p)] = a[idx(p)] || prv;
          prv = out[idx(p)];
        }
        break;
      }
      case NodeKind::GloballyPast: {
        const auto& a = labels(f->kids[0]);
        char seed = 1;
        for (int i = 0; i < Pl; ++i) seed = seed && a[idx(A + i)];
        char prv = seed;
        for (int64_t p = A; p <= B; ++p) {
          out[idx(p)] = a[idx(p)] && prv;
          prv = out[idx(p)];
        }
        break;
      }
      case NodeKind::Until:
      case NodeKind::WeakUntil: {
        const auto& a = labels(f->kids[0]);
        const auto& b = labels(f->kids[1]);
        // least (until) / greatest (weak until) solution on the final cycle
        std::vector<char> ut(static_cast<std::size_t>(Pr),
                             f->kind == NodeKind::WeakUntil ? 1 : 0);
        for (int sweep = 0; sweep < 2 * Pr + 2; ++sweep)
          for (int i = Pr; i-- > 0;)
            ut[i] =
                b[idx(B - Pr + 1 + i)] || (a[idx(B - Pr + 1 + i)] && ut[(i + 1) % Pr]);
        char nxt = ut[0];
        for (int64_t p = B; p >= A; --p) {
          out[idx(p)] = b[idx(p)] || (a[idx(p)] && nxt);
          nxt = out[idx(p)];
        }
        break;
      }
      case NodeKind::Var:
      case NodeKind::Mu:
      case NodeKind::Nu:
      case NodeKind::ForallModel:
        throw InputError(
            "eval_on_trace supports only the quantifier-free, fixpoint-free fragment with sugar");
    }
    return memo.emplace(f.get(), std::move(out)).first->second;
  }
};

}  // namespace

bool eval_on_trace(const FormulaPtr& f, const BiLassoTrace& t, const TransitionSystem& ts) {
  BiLassoTrace c = canonicalize(t);
  PTEval ev(ts, c, temporal_depth(f));
  return ev.labels(f)[ev.idx(c.present)];
}

// --- state-based abstract semantics --------------------------------------------------

namespace {

StateSet rev_equal_states(const TraceUniverse& u) {
  StateSet out = 0;
  for (std::size_t s = 0; s < u.system().state_count(); ++s) {
    Bitset revdown = u.rev_model_mask() & u.user_zone() & u.sigma_mask(s);
    if (revdown == u.model_user_down(s)) out |= StateSet{1} << s;
  }
  return out;
}

struct StateEngine {
  const TraceUniverse& u;
  const TransitionSystem& ts;
  StateSet req;  // {s : M↓s = (⟲M)↓s} within U

  explicit StateEngine(const TraceUniverse& uni)
      : u(uni), ts(uni.system()), req(rev_equal_states(uni)) {}

  StateSet all() const { return ts.all_states(); }

  StateSet iterate(const std::function<StateSet(StateSet)>& f, StateSet start) const {
    StateSet cur = start;
    for (std::size_t i = 0; i <= 64; ++i) {
      StateSet nxt = f(cur);
      if (nxt == cur) return cur;
      cur = nxt;
    }
    throw InputError("state fixpoint did not stabilize");
  }

  StateSet rev_clause(StateSet s) const { return s & req; }

  StateSet eval(const FormulaPtr& f, StateEnv& env) const {
    switch (f->kind) {
      case NodeKind::StateProp:
        return resolve_state_prop_full(*f, ts);
      case NodeKind::TransProp: {
        auto edges = resolve_edges(*f, ts);
        StateSet out = 0;
        for (std::size_t s = 0; s < ts.state_count(); ++s) {
          bool ok = true;
          for (std::size_t s2 = 0; s2 < ts.state_count() && ok; ++s2) {
            if (!ts.edge(s, s2)) continue;
            bool in = false;
            for (auto [a, b] : edges)
              if (a == s && b == s2) in = true;
            if (!in) ok = false;
          }
          if (ok) out |= StateSet{1} << s;
        }
        return out;
      }
      case NodeKind::Var: {
        auto it = env.find(f->name);
        if (it == env.end()) throw InputError("unbound variable " + f->name);
        return it->second;
      }
      case NodeKind::Or:
        return eval(f->kids[0], env) | eval(f->kids[1], env);
      case NodeKind::And:
        return eval(f->kids[0], env) & eval(f->kids[1], env);
      case NodeKind::Not:
        return ~eval(f->kids[0], env) & all();
      case NodeKind::Implies:
        return (~eval(f->kids[0], env) & all()) | eval(f->kids[1], env);
      case NodeKind::Next:
        return pre_tilde(ts, eval(f->kids[0], env));
      case NodeKind::Prev:
        // ⊖ = ⟲ ∘ ⊕ ∘ ⟲, expanded through the table clauses
        return rev_clause(pre_tilde(ts, rev_clause(eval(f->kids[0], env))));
      case NodeKind::Reverse:
        return rev_clause(eval(f->kids[0], env));
      case NodeKind::ForallModel:
        // guard is the model itself, whose state abstraction is all states
        return eval(f->kids[0], env);
      case NodeKind::Finally: {
        StateSet base = eval(f->kids[0], env);
        return iterate([&](StateSet s) { return base | pre_tilde(ts, s); }, 0);
      }
      case NodeKind::Globally: {
        StateSet base = eval(f->kids[0], env);
        return iterate([&](StateSet s) { return base & pre_tilde(ts, s); }, all());
      }
      case NodeKind::FinallyPast: {
        StateSet base = rev_clause(eval(f->kids[0], env));
        StateSet fwd = iterate([&](StateSet s) { return base | pre_tilde(ts, s); }, 0);
        return rev_clause(fwd);
      }
      case NodeKind::GloballyPast: {
        StateSet base = rev_clause(eval(f->kids[0], env));
        StateSet fwd = iterate([&](StateSet s) { return base & pre_tilde(ts, s); }, all());
        return rev_clause(fwd);
      }
      case NodeKind::Until: {
        StateSet a = eval(f->kids[0], env), b = eval(f->kids[1], env);
        return iterate([&](StateSet s) { return b | (a & pre_tilde(ts, s)); }, 0);
      }
      case NodeKind::WeakUntil: {
        // νX. φ2 ∨ (φ1 ∧ ⊕X)
        StateSet a = eval(f->kids[0], env), b = eval(f->kids[1], env);
        return iterate([&](StateSet s) { return b | (a & pre_tilde(ts, s)); }, all());
      }
      case NodeKind::Mu: {
        StateSet cur = 0;
        while (true) {
          env.insert_or_assign(f->name, cur);
          StateSet nxt = eval(f->kids[0], env);
          env.erase(f->name);
          if (nxt == cur) return cur;
          cur = nxt;
        }
      }
      case NodeKind::Nu: {
        StateSet cur = all();
        while (true) {
          env.insert_or_assign(f->name, cur);
          StateSet nxt = eval(f->kids[0], env);
          env.erase(f->name);
          if (nxt == cur) return cur;
          cur = nxt;
        }
      }
    }
    throw InputError("unknown formula node");
  }
};

}  // namespace

StateSet state_sem(const FormulaPtr& f, const TraceUniverse& u, const StateEnv& env) {
  StateEngine e(u);
  StateEnv ev = env;
  return e.eval(f, ev);
}

bool negation_guarded(const FormulaPtr& f) {
  switch (f->kind) {
    case NodeKind::Not:
    case NodeKind::Implies: {
      const auto& neg = f->kids[0];
      bool lit = neg->kind == NodeKind::StateProp || neg->kind == NodeKind::TransProp;
      if (!lit) return false;
      return f->kind == NodeKind::Not || negation_guarded(f->kids[1]);
    }
    default:
      for (const auto& k : f->kids)
        if (!negation_guarded(k)) return false;
      return true;
  }
}

BranchReport is_branchable(const FormulaPtr& f, const TraceUniverse& u) {
  SemSet sem = trace_sem_3v(f, u);
  Bitset undec = sem.high - sem.low;
  if ((undec & u.model_user()).any())
    throw UniverseOverflow("branchability undecided: universe too small for this formula");
  BranchReport rep;
  StateSet alpha = 0;
  for (std::size_t s = 0; s < u.system().state_count(); ++s)
    if (u.model_user_down(s).subset_of(sem.low)) alpha |= StateSet{1} << s;
  rep.alpha_side = alpha;
  rep.state_side = state_sem(f, u);
  rep.sound_fragment = negation_guarded(f);
  if (rep.sound_fragment && (rep.state_side & ~rep.alpha_side) != 0)
    throw InputError(
        "soundness violation: state semantics is not below the universal abstraction "
        "(internal error)");
  rep.branchable = rep.alpha_side == rep.state_side;
  rep.witness = rep.alpha_side ^ rep.state_side;
  return rep;
}

// --- LTL_det recognizer --------------------------------------------------------------

namespace {

bool is_state_lit(const FormulaPtr& f) { return f->kind == NodeKind::StateProp; }

bool same_lit(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind != NodeKind::StateProp || b->kind != NodeKind::StateProp) return false;
  return a->name == b->name && a->states == b->states && a->edges == b->edges;
}

// (σ_S ∧ φ1) and (¬σ_S ∧ φ2) with the same S
bool guarded_args(const FormulaPtr& l, const FormulaPtr& r, FormulaPtr& f1, FormulaPtr& f2) {
  if (l->kind != NodeKind::And || r->kind != NodeKind::And) return false;
  const auto& g = l->kids[0];
  if (!is_state_lit(g)) return false;
  if (r->kids[0]->kind != NodeKind::Not || !same_lit(r->kids[0]->kids[0], g)) return false;
  f1 = l->kids[1];
  f2 = r->kids[1];
  return true;
}

}  // namespace

bool is_ltl_det(const FormulaPtr& f) {
  switch (f->kind) {
    case NodeKind::StateProp:
      return true;
    case NodeKind::Not:
      return is_state_lit(f->kids[0]);
    case NodeKind::And:
      return is_ltl_det(f->kids[0]) && is_ltl_det(f->kids[1]);
    case NodeKind::Or: {
      FormulaPtr f1, f2;
      if (!guarded_args(f->kids[0], f->kids[1], f1, f2)) return false;
      return is_ltl_det(f1) && is_ltl_det(f2);
    }
    case NodeKind::Next:
      return is_ltl_det(f->kids[0]);
    case NodeKind::Until:
    case NodeKind::WeakUntil: {
      FormulaPtr f1, f2;
      if (!guarded_args(f->kids[0], f->kids[1], f1, f2)) return false;
      return is_ltl_det(f1) && is_ltl_det(f2);
    }
    default:
      return false;
  }
}

}  // namespace tcmc
