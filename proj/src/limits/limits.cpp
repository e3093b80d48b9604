#include "endspace/limits.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "endspace/error.hpp"

namespace endspace {

namespace {

bool in_class(const TailPattern& tp, std::size_t e, VertexRef v) {
  if (v.core) return false;
  TailSlot s = tp.locate(v.index, v.level);
  return s.kind == TailSlot::Kind::infinite && s.index == e;
}

struct RuleEdge {
  VertexRef from, to;
  LimitEdge::Source source;
  std::size_t index;
};

// Block edges leaving level l, tagged with the rule producing them.
std::vector<RuleEdge> edges_at(const Presentation& p, std::size_t l) {
  std::vector<RuleEdge> out;
  for (std::size_t i = 0; i < p.block_edges.size(); ++i) {
    const Edge& e = p.block_edges[i];
    out.push_back({VertexRef::of_block(e.tail, l), VertexRef::of_block(e.head, l),
                   LimitEdge::Source::block_edge, i});
  }
  for (std::size_t i = 0; i < p.block_rules.size(); ++i) {
    const BlockRule& r = p.block_rules[i];
    long to = static_cast<long>(l) + r.offset;
    if (to < 0) continue;
    out.push_back({VertexRef::of_block(r.from, l),
                   VertexRef::of_block(r.to, static_cast<std::size_t>(to)),
                   LimitEdge::Source::block_rule, i});
  }
  return out;
}

// Periodic-region levels on which every rule edge has both ends past the head.
std::size_t region_start(const TailPattern& tp) { return tp.head_levels + tp.span; }

// A class vertex of end e reached by the cofinal rule c, past the head.
std::optional<VertexRef> cofinal_hit(const TailPattern& tp, const CoreLink& c, std::size_t e) {
  std::size_t from = region_start(tp);
  for (std::size_t l = from; l < from + tp.period; ++l) {
    VertexRef v = VertexRef::of_block(c.block, l);
    if (in_class(tp, e, v)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::vector<LimitEdge> limit_edges(const Presentation& p, const TailPattern& tp) {
  const std::size_t ne = tp.infinite_count();
  std::map<std::pair<std::size_t, std::size_t>, LimitEdge> end_end;
  std::size_t from = region_start(tp);
  for (std::size_t l = from; l < from + tp.period; ++l)
    for (const RuleEdge& r : edges_at(p, l)) {
      TailSlot a = tp.locate(r.from.index, r.from.level), b = tp.locate(r.to.index, r.to.level);
      if (a.kind != TailSlot::Kind::infinite || b.kind != TailSlot::Kind::infinite) continue;
      if (a.index == b.index) continue;
      end_end.insert({{a.index, b.index},
                      {LimitEdge::Kind::end_end, a.index, b.index, r.source, r.index}});
    }
  std::vector<LimitEdge> out;
  for (auto& [key, e] : end_end) out.push_back(e);

  std::vector<LimitEdge> to_core;
  for (std::size_t i = 0; i < p.cofinal_rules.size(); ++i) {
    const CoreLink& c = p.cofinal_rules[i];
    for (std::size_t e = 0; e < ne; ++e) {
      if (!cofinal_hit(tp, c, e)) continue;
      if (c.direction == LinkDirection::core_to_block)
        out.push_back({LimitEdge::Kind::vertex_end, c.core, e, LimitEdge::Source::cofinal_rule, i});
      else
        to_core.push_back({LimitEdge::Kind::end_vertex, e, c.core, LimitEdge::Source::cofinal_rule, i});
    }
  }
  out.insert(out.end(), to_core.begin(), to_core.end());
  // Several cofinal rules may realize one pair; keep the first.
  auto key = [](const LimitEdge& e) { return std::tuple(e.kind, e.first, e.second); };
  std::stable_sort(out.begin(), out.end(),
                   [&](const LimitEdge& a, const LimitEdge& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end(),
                        [&](const LimitEdge& a, const LimitEdge& b) { return key(a) == key(b); }),
            out.end());
  return out;
}

std::string describe(const Presentation& p, const LimitEdge& e) {
  auto end = [](std::size_t i) { return "end " + std::to_string(i); };
  auto core = [&](std::size_t v) { return vertex_name(p, VertexRef::of_core(static_cast<Vertex>(v))); };
  switch (e.kind) {
    case LimitEdge::Kind::end_end: return end(e.first) + " -> " + end(e.second);
    case LimitEdge::Kind::vertex_end: return core(e.first) + " -> " + end(e.second);
    case LimitEdge::Kind::end_vertex: return end(e.first) + " -> " + core(e.second);
  }
  return "";
}

LimitWitness witness_necklaces(const Presentation& p, const TailPattern& tp, const LimitEdge& e) {
  std::vector<LimitEdge> all = limit_edges(p, tp);
  auto same = [&](const LimitEdge& x) {
    return x.kind == e.kind && x.first == e.first && x.second == e.second;
  };
  auto it = std::find_if(all.begin(), all.end(), same);
  if (it == all.end())
    throw Error(ErrorCode::invalid_argument, describe(p, e) + " is not a limit edge");
  const LimitEdge edge = *it;
  const std::size_t q = tp.period;
  const std::size_t from = region_start(tp);
  const std::size_t budget = 16 * q + 64;

  if (edge.kind == LimitEdge::Kind::end_end) {
    std::optional<RuleEdge> link;
    for (std::size_t l = from; l < from + q && !link; ++l)
      for (const RuleEdge& r : edges_at(p, l))
        if (in_class(tp, edge.first, r.from) && in_class(tp, edge.second, r.to)) {
          link = r;
          break;
        }
    if (!link) consistency_failure("limit edge without a periodic rule edge");
    for (std::size_t s = q; s <= budget; s += q) {
      auto a = build_necklace(p, tp, edge.first, {}, {link->from}, 1, q, s);
      if (!a) continue;
      auto b = build_necklace(p, tp, edge.second, {}, {link->to}, 1, q, s);
      if (!b) continue;
      return {edge, *a, *b};
    }
    throw BudgetExceeded("witness necklaces for " + describe(p, edge));
  }

  std::size_t end = edge.kind == LimitEdge::Kind::vertex_end ? edge.second : edge.first;
  auto hit = cofinal_hit(tp, p.cofinal_rules.at(edge.source_index), end);
  if (!hit) consistency_failure("limit edge without a cofinal hit");
  auto n = build_necklace(p, tp, end, {}, {*hit}, 1, q);
  if (!n) throw BudgetExceeded("witness necklace for " + describe(p, edge));
  return {edge, *n, std::nullopt};
}

std::string check_limit_witness(const Presentation& p, const LimitWitness& w, std::size_t beads) {
  NecklacePrefix a = materialize(w.first, beads);
  if (auto err = check_necklace(p, a); !err.empty()) return "first necklace: " + err;
  auto edge = [&](VertexRef x, VertexRef y) {
    return has_edge(p, x, y);
  };
  if (w.edge.kind == LimitEdge::Kind::end_end) {
    if (!w.second) return "missing second necklace";
    NecklacePrefix b = materialize(*w.second, beads);
    if (auto err = check_necklace(p, b); !err.empty()) return "second necklace: " + err;
    std::set<VertexRef> only_a;
    for (const auto* group : {&a.beads, &a.forward, &a.backward})
      for (const auto& vs : *group) only_a.insert(vs.begin(), vs.end());
    for (const auto* group : {&b.beads, &b.forward, &b.backward})
      for (const auto& vs : *group)
        for (const VertexRef& v : vs)
          if (only_a.count(v)) return "necklaces meet at " + vertex_name(p, v);
    for (std::size_t i = 0; i < beads; ++i) {
      bool found = false;
      for (const VertexRef& x : a.beads[i])
        for (const VertexRef& y : b.beads[i])
          if (!found && edge(x, y)) found = true;
      if (!found) return "bead " + std::to_string(i) + " sends no edge to its partner";
    }
    return "";
  }
  VertexRef v = VertexRef::of_core(static_cast<Vertex>(
      w.edge.kind == LimitEdge::Kind::vertex_end ? w.edge.first : w.edge.second));
  bool out = w.edge.kind == LimitEdge::Kind::vertex_end;
  for (std::size_t i = 0; i < beads; ++i) {
    bool found = std::any_of(a.beads[i].begin(), a.beads[i].end(), [&](const VertexRef& x) {
      return out ? edge(v, x) : edge(x, v);
    });
    if (!found) return "bead " + std::to_string(i) + " is not joined to " + vertex_name(p, v);
  }
  return "";
}

EndOrder end_order_leq(const Presentation& p, const TailPattern& tp, std::size_t first,
                       std::size_t second) {
  const std::size_t ne = tp.infinite_count();
  if (first >= ne || second >= ne) throw Error(ErrorCode::invalid_argument, "no such end");
  EndOrder out;
  if (first == second) {
    out.leq = true;
    return out;
  }
  // Reachability between eventual descriptors in the periodic region of
  // the tail; paths through the head translate up into it.
  std::vector<std::vector<std::size_t>> adj(tp.eventual.size());
  for (auto [a, b] : tp.eventual_dag) adj[a].push_back(b);
  std::vector<bool> seen(tp.eventual.size(), false);
  std::deque<std::size_t> queue{first};
  seen[first] = true;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : adj[x])
      if (!seen[y]) {
        seen[y] = true;
        queue.push_back(y);
      }
  }
  if (!seen[second]) {
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i]) out.closed.push_back(i);
    return out;
  }
  out.leq = true;
  // A concrete path inside the periodic region, found by breadth-first
  // search from one class vertex of the first end.
  const std::size_t floor = region_start(tp);
  const std::size_t depth = (tp.eventual.size() + 2) * (tp.window + tp.period + tp.span);
  VertexRef start = VertexRef::of_block(tp.eventual[first].walk_from.index,
                                        tp.eventual[first].walk_from.level);
  while (start.level < floor + depth) start.level += tp.period;
  std::map<VertexRef, VertexRef> parent{{start, start}};
  std::deque<VertexRef> frontier{start};
  while (!frontier.empty()) {
    VertexRef x = frontier.front();
    frontier.pop_front();
    if (in_class(tp, second, x)) {
      std::vector<VertexRef> path{x};
      while (parent.at(path.back()) != path.back()) path.push_back(parent.at(path.back()));
      std::reverse(path.begin(), path.end());
      std::size_t lo = npos, hi = 0;
      for (const VertexRef& v : path) {
        lo = std::min(lo, v.level);
        hi = std::max(hi, v.level);
      }
      out.path = std::move(path);
      out.shift = (hi - lo + tp.period) / tp.period * tp.period;
      return out;
    }
    for (const VertexRef& y : block_neighbours(p, x, false)) {
      if (y.level < floor || y.level >= start.level + depth || parent.count(y)) continue;
      parent[y] = x;
      frontier.push_back(y);
    }
  }
  consistency_failure("reachable ends without a path in the periodic region");
}

}  // namespace endspace
