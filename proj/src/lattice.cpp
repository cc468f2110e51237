#include "tcmc/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>
#include <sstream>

namespace tcmc {

// --- ExplicitLattice ---------------------------------------------------------

ExplicitLattice::ExplicitLattice(std::vector<std::string> names,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& leq_pairs)
    : names_(std::move(names)) {
  const std::size_t n = names_.size();
  if (n == 0) throw InputError("lattice needs at least one element");
  if (n > 4096) throw CapExceeded("explicit lattice too large (" + std::to_string(n) + " elements)");
  leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) leq_[i * n + i] = 1;
  for (auto [a, b] : leq_pairs) {
    if (a >= n || b >= n) throw InputError("leq pair out of range");
    leq_[a * n + b] = 1;
  }
  // transitive closure
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[k * n + j]) leq_[i * n + j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq_[i * n + j] && leq_[j * n + i])
        throw InputError("order not antisymmetric: " + names_[i] + " and " + names_[j]);

  meet_.assign(n * n, 0);
  join_.assign(n * n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      // glb: a lower bound dominating every other lower bound
      std::size_t glb = n, lub = n;
      for (std::size_t c = 0; c < n; ++c) {
        if (leq_[c * n + a] && leq_[c * n + b]) {
          bool dominates = true;
          for (std::size_t d = 0; d < n && dominates; ++d)
            if (leq_[d * n + a] && leq_[d * n + b] && !leq_[d * n + c]) dominates = false;
          if (dominates) {
            glb = c;
            break;
          }
        }
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (leq_[a * n + c] && leq_[b * n + c]) {
          bool dominated = true;
          for (std::size_t d = 0; d < n && dominated; ++d)
            if (leq_[a * n + d] && leq_[b * n + d] && !leq_[c * n + d]) dominated = false;
          if (dominated) {
            lub = c;
            break;
          }
        }
      }
      if (glb == n)
        throw InputError("no meet for " + names_[a] + ", " + names_[b] + ": not a lattice");
      if (lub == n)
        throw InputError("no join for " + names_[a] + ", " + names_[b] + ": not a lattice");
      meet_[a * n + b] = meet_[b * n + a] = glb;
      join_[a * n + b] = join_[b * n + a] = lub;
    }
  }
  // top = join of all, bottom = meet of all
  Elem top = 0, bot = 0;
  for (std::size_t i = 1; i < n; ++i) {
    top = join_[top * n + i];
    bot = meet_[bot * n + i];
  }
  top_ = top;
  bottom_ = bot;
}

std::optional<Elem> ExplicitLattice::find(const std::string& n) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == n) return Elem{i};
  return std::nullopt;
}

// --- PowersetLattice ---------------------------------------------------------

PowersetLattice::PowersetLattice(std::vector<std::string> atoms, SetOrder order)
    : atoms_(std::move(atoms)), order_(order) {
  if (atoms_.size() > 25) throw CapExceeded("powerset carrier too large: 2^" + std::to_string(atoms_.size()));
  for (std::size_t i = 0; i < atoms_.size(); ++i) atom_index_[atoms_[i]] = i;
}

static bool all_int_atoms(const std::vector<std::string>& atoms, std::vector<long>& vals) {
  vals.clear();
  for (const auto& a : atoms) {
    try {
      std::size_t pos = 0;
      long v = std::stol(a, &pos);
      if (pos != a.size()) return false;
      vals.push_back(v);
    } catch (...) {
      return false;
    }
  }
  return true;
}

std::string PowersetLattice::name(Elem e) const {
  std::vector<long> vals;
  if (all_int_atoms(atoms_, vals)) {
    std::vector<long> in;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (e >> i & 1) in.push_back(vals[i]);
    std::sort(in.begin(), in.end());
    if (in.empty()) return "{}";
    if (in.size() == atoms_.size()) return "Z";
    bool contiguous = true;
    for (std::size_t i = 1; i < in.size(); ++i)
      if (in[i] != in[i - 1] + 1) contiguous = false;
    if (contiguous) {
      if (in.size() == 1) return "[" + std::to_string(in[0]) + "]";
      return "[" + std::to_string(in.front()) + "," + std::to_string(in.back()) + "]";
    }
    std::string r = "{";
    for (std::size_t i = 0; i < in.size(); ++i) r += (i ? "," : "") + std::to_string(in[i]);
    return r + "}";
  }
  std::string r = "{";
  bool first = true;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (e >> i & 1) {
      if (!first) r += ",";
      r += atoms_[i];
      first = false;
    }
  return r + "}";
}

std::optional<Elem> PowersetLattice::find(const std::string& tok) const {
  if (tok == "all" || tok == "Z") return full();
  if (tok == "empty" || tok == "{}") return Elem{0};
  auto parse_list = [&](const std::string& body) -> std::optional<Elem> {
    Elem e = 0;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      // strip spaces
      item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
      if (item.empty()) continue;
      auto dots = item.find("..");
      if (dots != std::string::npos) {
        long lo = std::stol(item.substr(0, dots));
        long hi = std::stol(item.substr(dots + 2));
        for (long v = lo; v <= hi; ++v) {
          auto it = atom_index_.find(std::to_string(v));
          if (it == atom_index_.end()) return std::nullopt;
          e |= Elem{1} << it->second;
        }
      } else {
        auto it = atom_index_.find(item);
        if (it == atom_index_.end()) return std::nullopt;
        e |= Elem{1} << it->second;
      }
    }
    return e;
  };
  if (tok.size() >= 2 && tok.front() == '{' && tok.back() == '}')
    return parse_list(tok.substr(1, tok.size() - 2));
  if (tok.size() >= 2 && tok.front() == '[' && tok.back() == ']') {
    std::string body = tok.substr(1, tok.size() - 2);
    auto comma = body.find(',');
    if (comma == std::string::npos) return parse_list(body);  // [k]
    return parse_list(body.substr(0, comma) + ".." + body.substr(comma + 1));
  }
  return std::nullopt;
}

std::shared_ptr<PowersetLattice> make_int_powerset(int n) {
  std::vector<std::string> atoms;
  for (int v = -n; v <= n; ++v) atoms.push_back(std::to_string(v));
  return std::make_shared<PowersetLattice>(std::move(atoms), SetOrder::Sub);
}

// --- functions ----------------------------------------------------------------

LatticeFn identity_fn(const FiniteLattice&) {
  return LatticeFn{"id", 1, [](std::span<const Elem> a) { return a[0]; }};
}

static int sat_clamp(long v, int n) {
  if (v > n) return n;
  if (v < -n) return -n;
  return static_cast<int>(v);
}

// For the bounded-integer powerset, atom i represents the integer i - n.
static LatticeFn lifted_binary(const PowersetLattice& lat, int n, const std::string& name,
                               long (*op)(long, long)) {
  const std::size_t k = lat.atom_count();
  // pairwise singleton results as masks
  std::vector<Elem> table(k * k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      int r = sat_clamp(op(static_cast<long>(i) - n, static_cast<long>(j) - n), n);
      table[i * k + j] = Elem{1} << (r + n);
    }
  return LatticeFn{name, 2, [table, k](std::span<const Elem> args) {
                     Elem X = args[0], Y = args[1], out = 0;
                     for (std::size_t i = 0; i < k; ++i)
                       if (X >> i & 1)
                         for (std::size_t j = 0; j < k; ++j)
                           if (Y >> j & 1) out |= table[i * k + j];
                     return out;
                   }};
}

LatticeFn sat_add_fn(const PowersetLattice& lat, int n) {
  return lifted_binary(lat, n, "add", [](long a, long b) { return a + b; });
}
LatticeFn sat_mul_fn(const PowersetLattice& lat, int n) {
  return lifted_binary(lat, n, "mul", [](long a, long b) { return a * b; });
}
LatticeFn sat_sq_fn(const PowersetLattice& lat, int n) {
  const std::size_t k = lat.atom_count();
  std::vector<Elem> table(k);
  for (std::size_t i = 0; i < k; ++i) {
    long v = static_cast<long>(i) - n;
    table[i] = Elem{1} << (sat_clamp(v * v, n) + n);
  }
  return LatticeFn{"sq", 1, [table, k](std::span<const Elem> args) {
                     Elem X = args[0], out = 0;
                     for (std::size_t i = 0; i < k; ++i)
                       if (X >> i & 1) out |= table[i];
                     return out;
                   }};
}

std::optional<MonotonicityWitness> find_non_monotone(const LatticeFn& f, const FiniteLattice& lat,
                                                     std::size_t max_comparisons) {
  if (f.arity != 1) throw InputError("monotonicity check expects a unary function");
  const std::size_t n = lat.size();
  if (n * n > max_comparisons)
    throw CapExceeded("monotonicity check over " + std::to_string(n * n) + " pairs exceeds cap");
  for (Elem x = 0; x < n; ++x)
    for (Elem y = 0; y < n; ++y)
      if (lat.leq(x, y) && !lat.leq(f(x), f(y))) return MonotonicityWitness{x, y};
  return std::nullopt;
}

std::optional<AdditivityWitness> find_non_additive(const LatticeFn& f, const FiniteLattice& lat,
                                                   std::size_t max_comparisons) {
  if (f.arity != 1) throw InputError("additivity check expects a unary function");
  if (f(lat.bottom()) != lat.bottom()) return AdditivityWitness{lat.bottom(), lat.bottom()};
  if (const auto* ps = dynamic_cast<const PowersetLattice*>(&lat)) {
    // x is the join of its join-irreducible pieces: singletons under ⊆,
    // complements of singletons under ⊇. Additivity reduces to agreeing
    // with the piecewise join, checked per element.
    const std::size_t k = ps->atom_count();
    std::vector<Elem> piece_val(k);
    std::vector<Elem> piece(k);
    for (std::size_t i = 0; i < k; ++i) {
      piece[i] = ps->order() == SetOrder::Sub ? (Elem{1} << i) : (ps->full() & ~(Elem{1} << i));
      piece_val[i] = f.eval(std::span<const Elem>(&piece[i], 1));
    }
    for (Elem x = 0; x < ps->size(); ++x) {
      Elem expect = lat.bottom();
      for (std::size_t i = 0; i < k; ++i) {
        bool in_decomp = ps->order() == SetOrder::Sub ? ((x >> i) & 1) : !((x >> i) & 1);
        if (in_decomp) expect = lat.join(expect, piece_val[i]);
      }
      if (f(x) != expect) {
        // refine to a concrete witness pair
        for (std::size_t i = 0; i < k; ++i) {
          bool in_decomp = ps->order() == SetOrder::Sub ? ((x >> i) & 1) : !((x >> i) & 1);
          if (!in_decomp) continue;
          Elem rest = lat.bottom();
          for (std::size_t j = 0; j < k; ++j) {
            bool jd = ps->order() == SetOrder::Sub ? ((x >> j) & 1) : !((x >> j) & 1);
            if (jd && j != i) rest = lat.join(rest, piece[j]);
          }
          if (f(lat.join(rest, piece[i])) != lat.join(f(rest), f(piece[i])))
            return AdditivityWitness{rest, piece[i]};
        }
        return AdditivityWitness{x, x};
      }
    }
    return std::nullopt;
  }
  const std::size_t n = lat.size();
  if (n * n > max_comparisons)
    throw CapExceeded("additivity check over " + std::to_string(n * n) + " pairs exceeds cap");
  for (Elem x = 0; x < n; ++x)
    for (Elem y = 0; y < n; ++y)
      if (f(lat.join(x, y)) != lat.join(f(x), f(y))) return AdditivityWitness{x, y};
  return std::nullopt;
}

// --- Moore closure and ucos ----------------------------------------------------

std::vector<Elem> moore_closure(std::vector<Elem> family, const FiniteLattice& lat) {
  std::set<Elem> fam(family.begin(), family.end());
  fam.insert(lat.top());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Elem> cur(fam.begin(), fam.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        Elem m = lat.meet(cur[i], cur[j]);
        if (fam.insert(m).second) grew = true;
      }
  }
  return {fam.begin(), fam.end()};
}

Uco::Uco(const FiniteLattice& lat, std::vector<Elem> fixpoints) : lat_(&lat) {
  fix_ = moore_closure(std::move(fixpoints), lat);
}

bool Uco::is_fixpoint(Elem x) const { return std::binary_search(fix_.begin(), fix_.end(), x); }

Elem Uco::apply(Elem x) const {
  Elem m = lat_->top();
  for (Elem f : fix_)
    if (lat_->leq(x, f)) m = lat_->meet(m, f);
  return m;
}

bool uco_leq(const Uco& a, const Uco& b) {
  // a ⊑ b  iff  fix(b) ⊆ fix(a)
  return std::includes(a.fixpoints().begin(), a.fixpoints().end(), b.fixpoints().begin(),
                       b.fixpoints().end());
}

Uco uco_join(const Uco& a, const Uco& b) {
  if (&a.carrier() != &b.carrier()) throw InputError("uco_join: carrier mismatch");
  std::vector<Elem> inter;
  std::set_intersection(a.fixpoints().begin(), a.fixpoints().end(), b.fixpoints().begin(),
                        b.fixpoints().end(), std::back_inserter(inter));
  return Uco(a.carrier(), std::move(inter));
}

Uco uco_meet(const Uco& a, const Uco& b) {
  if (&a.carrier() != &b.carrier()) throw InputError("uco_meet: carrier mismatch");
  std::vector<Elem> uni;
  std::set_union(a.fixpoints().begin(), a.fixpoints().end(), b.fixpoints().begin(),
                 b.fixpoints().end(), std::back_inserter(uni));
  return Uco(a.carrier(), std::move(uni));
}

// --- fixpoints ------------------------------------------------------------------

static FixpointResult iterate_fix(const LatticeFn& f, const FiniteLattice& lat, Elem start,
                                  bool ascending) {
  if (f.arity != 1) throw InputError("lfp/gfp expects a unary function");
  Elem x = start;
  for (std::size_t it = 0; it <= lat.size() + 1; ++it) {
    Elem nx = f(x);
    if (nx == x) return {x, it};
    bool ok = ascending ? lat.leq(x, nx) : lat.leq(nx, x);
    if (!ok)
      throw InputError(std::string("non-monotone behaviour during ") +
                       (ascending ? "lfp" : "gfp") + " iteration at " + lat.name(x) + " -> " +
                       lat.name(nx));
    x = nx;
  }
  throw InputError("fixpoint iteration did not stabilize (non-monotone function?)");
}

FixpointResult lfp(const LatticeFn& f, const FiniteLattice& lat) {
  return iterate_fix(f, lat, lat.bottom(), true);
}
FixpointResult gfp(const LatticeFn& f, const FiniteLattice& lat) {
  return iterate_fix(f, lat, lat.top(), false);
}

// --- adjoints -------------------------------------------------------------------

LatticeFn right_adjoint(const LatticeFn& f, const FiniteLattice& lat) {
  if (f.arity != 1) throw InputError("right_adjoint expects a unary function");
  if (auto w = find_non_additive(f, lat)) {
    throw InputError("right_adjoint: function '" + f.name + "' is not additive; witness pair " +
                     lat.name(w->x) + ", " + lat.name(w->y));
  }
  if (const auto* ps = dynamic_cast<const PowersetLattice*>(&lat)) {
    const std::size_t k = ps->atom_count();
    std::vector<Elem> piece(k), piece_val(k);
    for (std::size_t i = 0; i < k; ++i) {
      piece[i] = ps->order() == SetOrder::Sub ? (Elem{1} << i) : (ps->full() & ~(Elem{1} << i));
      piece_val[i] = f.eval(std::span<const Elem>(&piece[i], 1));
    }
    const PowersetLattice* pl = ps;
    return LatticeFn{f.name + "^r", 1, [pl, piece, piece_val](std::span<const Elem> args) {
                       Elem y = args[0], r = pl->bottom();
                       for (std::size_t i = 0; i < piece.size(); ++i)
                         if (pl->leq(piece_val[i], y)) r = pl->join(r, piece[i]);
                       return r;
                     }};
  }
  const FiniteLattice* lp = &lat;
  LatticeFn fc = f;
  return LatticeFn{f.name + "^r", 1, [lp, fc](std::span<const Elem> args) {
                     Elem y = args[0], r = lp->bottom();
                     for (Elem x = 0; x < lp->size(); ++x)
                       if (lp->leq(fc(x), y)) r = lp->join(r, x);
                     return r;
                   }};
}

// --- .lat parsing -----------------------------------------------------------------

std::optional<Elem> parse_elem(const std::string& token, const FiniteLattice& lat) {
  return lat.find(token);
}

static std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::stringstream ss(line);
  std::string t;
  while (ss >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

LatFile parse_lat_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> element_names;
  std::vector<std::pair<std::size_t, std::size_t>> leq_pairs_named;
  std::map<std::string, std::size_t> elem_index;
  std::vector<std::pair<std::string, std::string>> leq_raw;
  std::optional<std::pair<int, int>> powerset_range;

  struct PendingFn {
    std::string name;
    int arity = 1;
    std::string builtin;                         // nonempty for builtin
    std::vector<std::vector<std::string>> rows;  // in... -> out (out last)
  };
  std::vector<PendingFn> fns;
  std::vector<std::pair<std::string, std::vector<std::string>>> domains_raw;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  PendingFn* open_fn = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    auto err = [&](const std::string& m) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": " + m);
    };
    const std::string& kw = toks[0];
    if (kw == "element") {
      if (toks.size() != 2) err("element expects one id");
      if (elem_index.count(toks[1])) err("duplicate element " + toks[1]);
      elem_index[toks[1]] = element_names.size();
      element_names.push_back(toks[1]);
      open_fn = nullptr;
    } else if (kw == "leq") {
      if (toks.size() != 3) err("leq expects two ids");
      leq_raw.emplace_back(toks[1], toks[2]);
      open_fn = nullptr;
    } else if (kw == "powerset") {
      if (toks.size() != 4 || toks[1] != "int") err("usage: powerset int <lo> <hi>");
      powerset_range = {std::stoi(toks[2]), std::stoi(toks[3])};
      open_fn = nullptr;
    } else if (kw == "fn") {
      if (toks.size() == 4 && toks[2] == "builtin") {
        fns.push_back({toks[1], 0, toks[3], {}});
        open_fn = nullptr;
      } else if (toks.size() == 3) {
        fns.push_back({toks[1], std::stoi(toks[2]), "", {}});
        open_fn = &fns.back();
      } else {
        err("usage: fn <name> <arity> | fn <name> builtin <satadd|satmul|satsq>");
      }
    } else if (kw == "domain") {
      if (toks.size() < 2) err("usage: domain <name> <elem...>");
      domains_raw.emplace_back(toks[1], std::vector<std::string>(toks.begin() + 2, toks.end()));
      open_fn = nullptr;
    } else if (open_fn) {
      // table row: <in...> -> <out>
      auto arrow = std::find(toks.begin(), toks.end(), "->");
      if (arrow == toks.end()) err("expected table row '<in...> -> <out>'");
      std::vector<std::string> row(toks.begin(), arrow);
      if (static_cast<int>(row.size()) != open_fn->arity) err("row arity mismatch");
      if (arrow + 1 == toks.end()) err("missing row output");
      row.push_back(*(arrow + 1));
      open_fn->rows.push_back(std::move(row));
    } else {
      err("unknown directive '" + kw + "'");
    }
  }

  LatFile out;
  if (powerset_range) {
    auto [lo, hi] = *powerset_range;
    if (lo != -hi || hi <= 0) throw InputError(origin + ": powerset int expects symmetric range -N N");
    if (!element_names.empty()) throw InputError(origin + ": powerset and explicit elements are exclusive");
    out.lattice = make_int_powerset(hi);
  } else {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (auto& [a, b] : leq_raw) {
      auto ia = elem_index.find(a), ib = elem_index.find(b);
      if (ia == elem_index.end()) throw InputError(origin + ": unknown element " + a);
      if (ib == elem_index.end()) throw InputError(origin + ": unknown element " + b);
      pairs.emplace_back(ia->second, ib->second);
    }
    out.lattice = std::make_shared<ExplicitLattice>(element_names, pairs);
  }

  for (auto& pf : fns) {
    if (!pf.builtin.empty()) {
      auto ps = std::dynamic_pointer_cast<PowersetLattice>(out.lattice);
      if (!ps) throw InputError(origin + ": builtin fns need a powerset carrier");
      int n = static_cast<int>((ps->atom_count() - 1) / 2);
      if (pf.builtin == "satadd")
        out.functions.emplace(pf.name, sat_add_fn(*ps, n));
      else if (pf.builtin == "satmul")
        out.functions.emplace(pf.name, sat_mul_fn(*ps, n));
      else if (pf.builtin == "satsq")
        out.functions.emplace(pf.name, sat_sq_fn(*ps, n));
      else
        throw InputError(origin + ": unknown builtin " + pf.builtin);
      out.functions.at(pf.name).name = pf.name;
    } else {
      if (out.lattice->size() > 4096) throw CapExceeded("table fn on oversized carrier");
      auto table = std::make_shared<std::map<std::vector<Elem>, Elem>>();
      for (auto& row : pf.rows) {
        std::vector<Elem> key;
        for (int i = 0; i < pf.arity; ++i) {
          auto e = out.lattice->find(row[i]);
          if (!e) throw InputError(origin + ": unknown element " + row[i] + " in fn " + pf.name);
          key.push_back(*e);
        }
        auto v = out.lattice->find(row.back());
        if (!v) throw InputError(origin + ": unknown element " + row.back() + " in fn " + pf.name);
        (*table)[key] = *v;
      }
      // totality check
      std::size_t expect = 1;
      for (int i = 0; i < pf.arity; ++i) expect *= out.lattice->size();
      if (table->size() != expect)
        throw InputError(origin + ": fn " + pf.name + " is not total (" +
                         std::to_string(table->size()) + "/" + std::to_string(expect) + " rows)");
      out.functions.emplace(pf.name, LatticeFn{pf.name, pf.arity,
                                               [table](std::span<const Elem> args) {
                                                 return table->at(std::vector<Elem>(args.begin(), args.end()));
                                               }});
    }
  }

  for (auto& [dname, toks] : domains_raw) {
    std::vector<Elem> fam;
    for (auto& t : toks) {
      auto e = out.lattice->find(t);
      if (!e) throw InputError(origin + ": unknown element " + t + " in domain " + dname);
      fam.push_back(*e);
    }
    out.domains[dname] = moore_closure(std::move(fam), *out.lattice);
  }
  return out;
}

LatFile parse_lat_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_lat_text(ss.str(), path);
}

}  // namespace tcmc
