#include "tcmc/kripke.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace tcmc {

TransitionSystem::TransitionSystem(std::vector<std::string> state_names,
                                   std::vector<std::pair<std::size_t, std::size_t>> edges,
                                   std::map<std::string, StateSet> labels)
    : names_(std::move(state_names)), labels_(std::move(labels)) {
  if (names_.empty()) throw InputError("transition system needs at least one state");
  if (names_.size() > 32) throw CapExceeded("transition systems are capped at 32 states");
  succ_.assign(names_.size(), 0);
  pred_.assign(names_.size(), 0);
  for (auto [a, b] : edges) {
    if (a >= names_.size() || b >= names_.size()) throw InputError("edge out of range");
    succ_[a] |= StateSet{1} << b;
    pred_[b] |= StateSet{1} << a;
  }
  for (auto& [name, set] : labels_)
    if (set & ~all_states()) throw InputError("label " + name + " mentions unknown states");
}

std::optional<std::size_t> TransitionSystem::state(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::optional<StateSet> TransitionSystem::label(const std::string& name) const {
  auto it = labels_.find(name);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

bool TransitionSystem::is_total() const {
  for (std::size_t s = 0; s < names_.size(); ++s)
    if (!succ_[s] || !pred_[s]) return false;
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> TransitionSystem::edge_list() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < names_.size(); ++a)
    for (std::size_t b = 0; b < names_.size(); ++b)
      if (edge(a, b)) out.emplace_back(a, b);
  return out;
}

TotalizeResult totalize(const TransitionSystem& ts) {
  StateSet add = 0;
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    if (!ts.successors(s) || !ts.predecessors(s)) add |= StateSet{1} << s;
  auto edges = ts.edge_list();
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    if ((add >> s) & 1) edges.emplace_back(s, s);
  return {TransitionSystem(ts.state_names(), edges, ts.labels()), add};
}

TransitionSystem reverse_system(const TransitionSystem& ts) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (auto [a, b] : ts.edge_list()) edges.emplace_back(b, a);
  return TransitionSystem(ts.state_names(), edges, ts.labels());
}

StateSet pre(const TransitionSystem& ts, StateSet y) {
  StateSet r = 0;
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    if (ts.successors(s) & y) r |= StateSet{1} << s;
  return r;
}

StateSet post(const TransitionSystem& ts, StateSet y) {
  StateSet r = 0;
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    if ((y >> s) & 1) r |= ts.successors(s);
  return r;
}

StateSet pre_tilde(const TransitionSystem& ts, StateSet y) {
  return ~pre(ts, ~y & ts.all_states()) & ts.all_states();
}

StateSet post_tilde(const TransitionSystem& ts, StateSet y) {
  return ~post(ts, ~y & ts.all_states()) & ts.all_states();
}

bool is_injective(const TransitionSystem& ts) {
  for (std::size_t s = 0; s < ts.state_count(); ++s)
    if (__builtin_popcount(ts.predecessors(s)) > 1) return false;
  return true;
}

bool is_symmetric(const TransitionSystem& ts) {
  for (auto [a, b] : ts.edge_list())
    if (!ts.edge(b, a)) return false;
  return true;
}

std::size_t min_cycle_length(const TransitionSystem& ts) {
  const std::size_t n = ts.state_count();
  std::size_t best = 0;
  for (std::size_t s = 0; s < n; ++s) {
    // BFS back to s
    std::vector<int> dist(n, -1);
    std::deque<std::size_t> q;
    q.push_back(s);
    dist[s] = 0;
    std::size_t found = 0;
    while (!q.empty() && !found) {
      std::size_t a = q.front();
      q.pop_front();
      for (std::size_t b = 0; b < n; ++b) {
        if (!ts.edge(a, b)) continue;
        if (b == s) {
          found = static_cast<std::size_t>(dist[a]) + 1;
          break;
        }
        if (dist[b] == -1) {
          dist[b] = dist[a] + 1;
          q.push_back(b);
        }
      }
    }
    if (found && (best == 0 || found < best)) best = found;
  }
  return best;
}

std::optional<PArrowWitness> p_arrow(const TransitionSystem& ts, StateSet s) {
  const std::size_t n = ts.state_count();
  const StateSet all = ts.all_states();
  if (!(s & all) || (s & all) == all) return std::nullopt;
  // synchronous product BFS; a diagonal pair (t,t) at depth >= 1 is a witness
  std::vector<int> dist(n * n, -1);
  std::vector<int> parent(n * n, -1);
  std::deque<std::size_t> queue;
  for (std::size_t q = 0; q < n; ++q) {
    if (!((s >> q) & 1)) continue;
    for (std::size_t r = 0; r < n; ++r) {
      if ((s >> r) & 1 || !((all >> r) & 1)) continue;
      std::size_t id = q * n + r;
      dist[id] = 0;
      queue.push_back(id);
    }
  }
  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    std::size_t a = id / n, b = id % n;
    for (std::size_t a2 = 0; a2 < n; ++a2) {
      if (!ts.edge(a, a2)) continue;
      for (std::size_t b2 = 0; b2 < n; ++b2) {
        if (!ts.edge(b, b2)) continue;
        std::size_t nid = a2 * n + b2;
        if (dist[nid] != -1) continue;
        dist[nid] = dist[id] + 1;
        parent[nid] = static_cast<int>(id);
        if (a2 == b2) {
          // walk back to the start pair
          std::size_t cur = nid;
          while (parent[cur] != -1 && dist[parent[cur]] > 0) cur = parent[cur];
          std::size_t start = parent[cur] == -1 ? cur : static_cast<std::size_t>(parent[cur]);
          return PArrowWitness{start / n, start % n, a2, static_cast<std::size_t>(dist[nid])};
        }
        queue.push_back(nid);
      }
    }
  }
  return std::nullopt;
}

std::vector<StateSet> core_next_states(const TransitionSystem& ts, std::size_t max_states) {
  if (ts.state_count() > max_states)
    throw CapExceeded("core_next_states: subset enumeration over " +
                      std::to_string(ts.state_count()) + " states exceeds cap " +
                      std::to_string(max_states));
  std::vector<StateSet> out;
  StateSet all = ts.all_states();
  for (StateSet s = 0;; ++s) {
    if (!p_arrow(ts, s)) out.push_back(s);
    if (s == all) break;
  }
  return out;
}

// --- parsing -----------------------------------------------------------------

TransitionSystem parse_ts_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::map<std::string, StateSet> labels;

  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::stringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) {
      if (t[0] == '#') break;
      toks.push_back(t);
    }
    if (toks.empty()) continue;
    auto err = [&](const std::string& m) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": " + m);
    };
    auto lookup = [&](const std::string& s) -> std::size_t {
      auto it = index.find(s);
      if (it == index.end()) err("unknown state " + s);
      return it->second;
    };
    if (toks[0] == "state") {
      if (toks.size() != 2) err("state expects one id");
      if (index.count(toks[1])) err("duplicate state " + toks[1]);
      index[toks[1]] = names.size();
      names.push_back(toks[1]);
    } else if (toks[0] == "edge") {
      if (toks.size() != 3) err("edge expects two ids");
      edges.emplace_back(lookup(toks[1]), lookup(toks[2]));
    } else if (toks[0] == "label") {
      if (toks.size() < 2) err("label expects a name");
      StateSet set = 0;
      for (std::size_t i = 2; i < toks.size(); ++i) set |= StateSet{1} << lookup(toks[i]);
      labels[toks[1]] = set;
    } else {
      err("unknown directive '" + toks[0] + "'");
    }
  }
  return TransitionSystem(names, edges, labels);
}

TransitionSystem parse_ts_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ts_text(ss.str(), path);
}

std::string format_ts(const TransitionSystem& ts) {
  std::string out;
  for (const auto& n : ts.state_names()) out += "state " + n + "\n";
  for (auto [a, b] : ts.edge_list())
    out += "edge " + ts.state_names()[a] + " " + ts.state_names()[b] + "\n";
  for (const auto& [name, set] : ts.labels()) {
    out += "label " + name;
    for (std::size_t s = 0; s < ts.state_count(); ++s)
      if ((set >> s) & 1) out += " " + ts.state_names()[s];
    out += "\n";
  }
  return out;
}

std::string format_state_set(const TransitionSystem& ts, StateSet s) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < ts.state_count(); ++i)
    if ((s >> i) & 1) parts.push_back(ts.state_names()[i]);
  return "{" + join(parts, ",") + "}";
}

}  // namespace tcmc
