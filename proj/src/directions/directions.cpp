#include "endspace/directions.hpp"

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

std::size_t level_top(const std::vector<VertexRef>& vs) {
  std::size_t top = 0;
  for (const VertexRef& v : vs)
    if (!v.core) top = std::max(top, v.level + 1);
  return top;
}

std::vector<VertexRef> exhaustion_refs(const Presentation& p, std::size_t n) {
  std::vector<VertexRef> out;
  for (Vertex f = 0; f < p.core_size(); ++f) out.push_back(VertexRef::of_core(f));
  for (std::size_t l = 0; l < n; ++l)
    for (Vertex t = 0; t < p.block_size(); ++t) out.push_back(VertexRef::of_block(t, l));
  return out;
}

// Index of the infinite component of `to` holding the class of end e of
// `from`; both patterns describe digraphs with the same strong components.
std::size_t matching_end(const TailPattern& from, const TailPattern& to, std::size_t e) {
  const EventualComponent& ec = from.eventual.at(e);
  std::size_t level = std::max(from.head_levels, to.head_levels) + ec.walk_from.level + from.period;
  while (!in_class(from, e, VertexRef::of_block(ec.walk_from.index, level))) ++level;
  TailSlot s = to.locate(ec.walk_from.index, level);
  if (s.kind != TailSlot::Kind::infinite) consistency_failure("reversed pattern loses an end");
  return s.index;
}

// Eventual descriptors reachable from `start` in the tail condensation.
std::vector<bool> descriptor_reach(const TailPattern& tp, std::size_t start) {
  std::vector<std::vector<std::size_t>> adj(tp.eventual.size());
  for (auto [a, b] : tp.eventual_dag) adj[a].push_back(b);
  std::vector<bool> seen(tp.eventual.size(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : adj[x])
      if (!seen[y]) {
        seen[y] = true;
        queue.push_back(y);
      }
  }
  return seen;
}

bool is_subset(const VertexSet& small, const VertexSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool compatible(const Presentation& p, const ThreadChoice& a, const ThreadChoice& b) {
  if (!a.is_bundle && !b.is_bundle) return is_subset(b.vertices, a.vertices);
  if (a.is_bundle && b.is_bundle)
    return std::includes(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end());
  if (a.is_bundle) return false;
  for (const Edge& e : b.edges)
    for (Vertex x : {e.tail, e.head}) {
      if (vertex_ref(p, x).core) continue;
      if (!std::binary_search(a.vertices.begin(), a.vertices.end(), x)) return false;
    }
  return true;
}

VertexSet restricted(const Presentation& p, const VertexSet& vs, std::size_t bound) {
  VertexSet out;
  for (Vertex v : vs) {
    VertexRef r = vertex_ref(p, v);
    if (r.core || r.level < bound) out.push_back(v);
  }
  return out;
}

std::vector<Edge> restricted_edges(const Presentation& p, const std::vector<Edge>& es,
                                   std::size_t bound) {
  std::vector<Edge> out;
  for (const Edge& e : es) {
    VertexRef a = vertex_ref(p, e.tail), b = vertex_ref(p, e.head);
    if ((a.core || a.level < bound) && (b.core || b.level < bound)) out.push_back(e);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Periodic sets derived from reachability

PeriodicSet reach_set(const Presentation& p, const TailPattern& tp, const PeriodicSet& sources,
                      const std::vector<VertexRef>& removed, bool reverse, std::size_t base) {
  const std::size_t levels = base + tp.period + tp.margin + tp.window + p.span;
  FiniteDigraph g = truncate(p, levels);
  VertexMask cut(g.size(), false);
  for (const VertexRef& r : removed)
    if (r.core || r.level < levels) cut[vertex_id(p, r)] = true;
  VertexSet src;
  for (const VertexRef& v : sources.members_below(levels)) {
    Vertex id = vertex_id(p, v);
    if (!cut[id]) src.push_back(id);
  }
  VertexMask m = reachable(g, src, cut, reverse);
  return PeriodicSet::sample(p.core_size(), p.block_size(), base, tp.period, [&](VertexRef v) {
    return (v.core || v.level < levels) && m[vertex_id(p, v)];
  });
}

PeriodicSet living_set(const Presentation& p, const TailPattern& tp, std::size_t end,
                       std::size_t n) {
  return PeriodicSet::sample(p.core_size(), p.block_size(), n + tp.head_levels, tp.period,
                             [&](VertexRef v) { return tp.in_living_component(end, n, v); });
}

// ---------------------------------------------------------------------------
// Threads

ThreadSet direction_threads(const Presentation& p, const TailPattern& tp, std::size_t depth,
                            DirectionThread::Kind kind) {
  ThreadSet ts;
  ts.depth = depth;
  ts.bound = depth + tp.head_levels + 2 * tp.window + p.span + tp.period;
  ts.levels = ts.bound + tp.margin + tp.window;
  FiniteDigraph g = truncate(p, ts.levels);

  std::vector<VertexMask> masks;
  std::vector<Condensation> conds;
  for (std::size_t n = 0; n <= depth; ++n) {
    VertexSet x = exhaustion(p, n);
    masks.push_back(to_mask(g.size(), x));
    conds.push_back(strong_components(g, masks.back()));
  }
  // Two copies of one block vertex below the bound certify an infinite component.
  auto repeat = [&](const VertexSet& comp) -> std::optional<std::pair<VertexRef, VertexRef>> {
    std::map<Vertex, VertexRef> first;
    for (Vertex v : comp) {
      VertexRef r = vertex_ref(p, v);
      if (r.core || r.level >= ts.bound) continue;
      auto [it, fresh] = first.insert({r.index, r});
      if (!fresh) return std::pair(it->second, r);
    }
    return std::nullopt;
  };
  auto ancestor = [&](std::size_t n, std::size_t comp_at_next) {
    Vertex v = conds[n + 1].components[comp_at_next].front();
    return conds[n].component_of[v];
  };
  auto component_choice = [&](std::size_t n, std::size_t c) {
    ThreadChoice ch;
    ch.component = c;
    ch.vertices = restricted(p, conds[n].components[c], ts.bound);
    return ch;
  };

  for (std::size_t n = 0; n < depth; ++n)
    for (const VertexSet& comp : conds[n].components) {
      bool swallowed = std::all_of(comp.begin(), comp.end(),
                                   [&](Vertex v) { return vertex_ref(p, v).level == n; });
      if (swallowed) ts.dead_ends.push_back({n, vertex_ref(p, comp.front())});
    }
  for (const VertexSet& comp : conds[depth].components) {
    bool below = std::all_of(comp.begin(), comp.end(),
                             [&](Vertex v) { return vertex_ref(p, v).level < ts.bound; });
    if (below && !repeat(comp)) ++ts.finite_at_depth;
  }

  if (kind == DirectionThread::Kind::vertex) {
    for (std::size_t c = 0; c < conds[depth].size(); ++c) {
      auto rep = repeat(conds[depth].components[c]);
      if (!rep) continue;
      DirectionThread t;
      t.kind = kind;
      t.certificate = {rep->first, rep->second};
      t.choices.resize(depth + 1);
      std::size_t cur = c;
      for (std::size_t n = depth + 1; n-- > 0;) {
        if (n < depth) cur = ancestor(n, cur);
        t.choices[n] = component_choice(n, cur);
      }
      ts.threads.push_back(std::move(t));
    }
    std::sort(ts.threads.begin(), ts.threads.end(), [](const auto& a, const auto& b) {
      return a.choices.back().vertices < b.choices.back().vertices;
    });
    return ts;
  }

  // Edge threads: bundles of D - X_depth at infinite components carrying an
  // edge past the head of D - X_depth.
  const std::size_t past_head = depth + tp.head_levels + p.span;
  std::vector<std::vector<Bundle>> all_bundles;
  for (std::size_t n = 0; n <= depth; ++n) all_bundles.push_back(bundles(g, masks[n], conds[n]));
  auto is_infinite = [&](std::size_t c) { return repeat(conds[depth].components[c]).has_value(); };
  for (const Bundle& b : all_bundles[depth]) {
    bool ok = false;
    switch (b.kind) {
      case Bundle::Kind::component_component: ok = is_infinite(b.first) && is_infinite(b.second); break;
      case Bundle::Kind::vertex_component:
        ok = vertex_ref(p, static_cast<Vertex>(b.first)).core && is_infinite(b.second);
        break;
      case Bundle::Kind::component_vertex:
        ok = vertex_ref(p, static_cast<Vertex>(b.second)).core && is_infinite(b.first);
        break;
    }
    if (!ok) continue;
    std::optional<Edge> witness;
    for (const Edge& e : b.edges) {
      VertexRef x = vertex_ref(p, e.tail), y = vertex_ref(p, e.head);
      bool high = (x.core || (x.level >= past_head && x.level < ts.bound)) &&
                  (y.core || (y.level >= past_head && y.level < ts.bound));
      if (high) {
        witness = e;
        break;
      }
    }
    if (!witness) continue;
    DirectionThread t;
    t.kind = kind;
    t.certificate = {vertex_ref(p, witness->tail), vertex_ref(p, witness->head)};
    t.choices.resize(depth + 1);
    Bundle cur = b;
    bool merged = false;
    std::size_t merged_comp = 0;
    for (std::size_t n = depth + 1; n-- > 0;) {
      if (n < depth) {
        if (merged) {
          merged_comp = ancestor(n, merged_comp);
        } else {
          std::size_t f = cur.first, s = cur.second;
          if (cur.kind != Bundle::Kind::vertex_component) f = ancestor(n, f);
          if (cur.kind != Bundle::Kind::component_vertex) s = ancestor(n, s);
          if (cur.kind == Bundle::Kind::component_component && f == s) {
            merged = true;
            merged_comp = f;
          } else {
            auto it = std::find_if(all_bundles[n].begin(), all_bundles[n].end(), [&](const Bundle& x) {
              return x.kind == cur.kind && x.first == f && x.second == s;
            });
            if (it == all_bundles[n].end()) consistency_failure("bundle without an ancestor bundle");
            cur = *it;
          }
        }
      }
      if (merged) {
        t.choices[n] = component_choice(n, merged_comp);
      } else {
        ThreadChoice ch;
        ch.is_bundle = true;
        ch.bundle = cur;
        ch.edges = restricted_edges(p, cur.edges, ts.bound);
        t.choices[n] = std::move(ch);
      }
    }
    ts.threads.push_back(std::move(t));
  }
  std::sort(ts.threads.begin(), ts.threads.end(), [](const auto& a, const auto& b) {
    return a.choices.back().edges < b.choices.back().edges;
  });
  return ts;
}

namespace {

std::vector<std::string> thread_compatibility(const Presentation& p, const DirectionThread& t,
                                              std::size_t index) {
  std::vector<std::string> out;
  for (std::size_t n = 0; n + 1 < t.choices.size(); ++n)
    for (std::size_t step : {1, 2})
      if (n + step < t.choices.size() && !compatible(p, t.choices[n], t.choices[n + step]))
        out.push_back("thread " + std::to_string(index) + " is incompatible at " +
                      std::to_string(n) + " and " + std::to_string(n + step));
  return out;
}

// First thread whose choices match `want` at every index, or npos.
std::size_t match_thread(const ThreadSet& ts, const std::vector<ThreadChoice>& want) {
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    const auto& ch = ts.threads[i].choices;
    bool same = ch.size() == want.size();
    for (std::size_t n = 0; same && n < ch.size(); ++n)
      same = ch[n].is_bundle == want[n].is_bundle &&
             (ch[n].is_bundle ? ch[n].edges == want[n].edges : ch[n].vertices == want[n].vertices);
    if (same) return i;
  }
  return npos;
}

void finish_matching(BijectionReport& r, const std::vector<std::size_t>& image) {
  std::vector<std::size_t> hits(r.threads, 0);
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (image[i] == npos) {
      r.failures.push_back("object " + std::to_string(i) + " induces no thread");
      continue;
    }
    r.matching.push_back({i, image[i]});
    ++hits[image[i]];
  }
  for (std::size_t j = 0; j < r.threads; ++j) {
    if (hits[j] == 0) r.failures.push_back("thread " + std::to_string(j) + " is not induced");
    if (hits[j] > 1) r.failures.push_back("thread " + std::to_string(j) + " is induced twice");
  }
  r.ok = r.failures.empty();
}

VertexSet living_ids(const Presentation& p, const TailPattern& tp, std::size_t end, std::size_t n,
                     std::size_t bound) {
  VertexSet out;
  for (const VertexRef& v : tp.members({TailSlot::Kind::infinite, tp.shifted(end, n), 0}, n, bound))
    out.push_back(vertex_id(p, v));
  return normalized(out);
}

}  // namespace

BijectionReport check_end_direction_bijection(const Presentation& p, const TailPattern& tp,
                                              std::size_t depth) {
  ThreadSet ts = direction_threads(p, tp, depth, DirectionThread::Kind::vertex);
  BijectionReport r;
  r.depth = depth;
  r.objects = tp.infinite_count();
  r.threads = ts.threads.size();
  for (std::size_t i = 0; i < ts.threads.size(); ++i)
    for (auto& f : thread_compatibility(p, ts.threads[i], i)) r.failures.push_back(f);

  std::vector<std::size_t> image;
  std::vector<VertexSet> last;
  for (std::size_t e = 0; e < r.objects; ++e) {
    std::vector<ThreadChoice> want(depth + 1);
    for (std::size_t n = 0; n <= depth; ++n) want[n].vertices = living_ids(p, tp, e, n, ts.bound);
    for (std::size_t n = 0; n < depth; ++n)
      if (!is_subset(want[n + 1].vertices, want[n].vertices))
        r.failures.push_back("end " + std::to_string(e) + " induces an incompatible thread at " +
                             std::to_string(n));
    if (std::find(last.begin(), last.end(), want[depth].vertices) != last.end())
      r.failures.push_back("end " + std::to_string(e) + " induces the thread of an earlier end");
    last.push_back(want[depth].vertices);
    image.push_back(match_thread(ts, want));
  }
  finish_matching(r, image);
  return r;
}

BijectionReport check_limit_edge_direction_bijection(const Presentation& p,
                                                     const TailPattern& tp, std::size_t depth) {
  ThreadSet ts = direction_threads(p, tp, depth, DirectionThread::Kind::edge);
  std::vector<LimitEdge> les = limit_edges(p, tp);
  BijectionReport r;
  r.depth = depth;
  r.objects = les.size();
  r.threads = ts.threads.size();
  for (std::size_t i = 0; i < ts.threads.size(); ++i)
    for (auto& f : thread_compatibility(p, ts.threads[i], i)) r.failures.push_back(f);

  FiniteDigraph g = truncate(p, ts.levels);
  std::vector<std::size_t> image;
  for (std::size_t i = 0; i < les.size(); ++i) {
    const LimitEdge& le = les[i];
    std::vector<ThreadChoice> want(depth + 1);
    for (std::size_t n = 0; n <= depth; ++n) {
      VertexMask from(g.size(), false), to(g.size(), false);
      auto fill = [&](VertexMask& m, bool is_end, std::size_t x) {
        if (is_end) {
          for (Vertex v : living_ids(p, tp, x, n, ts.bound)) m[v] = true;
        } else {
          m[vertex_id(p, VertexRef::of_core(static_cast<Vertex>(x)))] = true;
        }
      };
      fill(from, le.kind != LimitEdge::Kind::vertex_end, le.first);
      fill(to, le.kind != LimitEdge::Kind::end_vertex, le.second);
      want[n].is_bundle = true;
      for (const Edge& e : g.edges())
        if (from[e.tail] && to[e.head]) want[n].edges.push_back(e);
      want[n].edges = restricted_edges(p, want[n].edges, ts.bound);
      if (want[n].edges.empty())
        r.failures.push_back("limit edge " + std::to_string(i) + " has an empty bundle at " +
                             std::to_string(n));
    }
    image.push_back(match_thread(ts, want));
  }
  finish_matching(r, image);
  return r;
}

// ---------------------------------------------------------------------------
// Pointing

namespace {

Pointing side_of(const PresentedSeparation& s, VertexRef w) {
  bool a = s.side_a.contains(w), b = s.side_b.contains(w);
  if (b && !a) return Pointing::towards;
  if (a && !b) return Pointing::away;
  consistency_failure("direction component meets the separator");
}

}  // namespace

Pointing separation_points(const Presentation& p, const TailPattern& tp,
                           const PresentedSeparation& s, std::size_t end) {
  if (!is_separation(p, s)) throw Error(ErrorCode::invalid_argument, "not a finite-order separation");
  std::size_t m = level_top(separator(s));
  // C(X_m, omega) lies inside the component of D - (A n B) holding the end,
  // and that component lies on one side.
  std::size_t from = m + tp.head_levels;
  for (std::size_t l = from; l < from + tp.period; ++l)
    for (Vertex t = 0; t < tp.block_size; ++t) {
      VertexRef w = VertexRef::of_block(t, l);
      if (tp.in_living_component(end, m, w)) return side_of(s, w);
    }
  consistency_failure("living component without a periodic member");
}

Pointing separation_points(const Presentation& p, const ThreadSet& threads,
                           const PresentedSeparation& s, std::size_t thread) {
  const DirectionThread& t = threads.threads.at(thread);
  if (t.kind != DirectionThread::Kind::vertex)
    throw Error(ErrorCode::invalid_argument, "pointing is defined for vertex-directions");
  if (!is_separation(p, s)) throw Error(ErrorCode::invalid_argument, "not a finite-order separation");
  std::size_t m = level_top(separator(s));
  if (m > threads.depth)
    throw Error(ErrorCode::invalid_argument,
                "separator reaches level " + std::to_string(m - 1) + "; a thread of depth " +
                    std::to_string(m) + " is needed");
  const VertexSet& comp = t.choices[m].vertices;
  if (comp.empty()) consistency_failure("empty thread choice");
  return side_of(s, vertex_ref(p, comp.front()));
}

// ---------------------------------------------------------------------------
// Domination

std::vector<std::vector<VertexRef>> fan_paths(const Fan& f, std::size_t count) {
  std::vector<std::vector<VertexRef>> out;
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<VertexRef> path;
    for (const VertexRef& v : f.path)
      path.push_back(v.core ? v : VertexRef::of_block(v.index, v.level + j * f.shift));
    out.push_back(std::move(path));
  }
  return out;
}

namespace {

std::optional<Fan> forward_fan(const Presentation& p, const TailPattern& tp, Vertex v,
                               std::size_t end) {
  std::vector<bool> reach_end(tp.eventual.size(), false);
  for (std::size_t d = 0; d < tp.eventual.size(); ++d) reach_end[d] = descriptor_reach(tp, d)[end];
  const std::size_t floor = tp.head_levels + p.span;
  for (const CoreLink& c : p.cofinal_rules) {
    if (c.core != v || c.direction != LinkDirection::core_to_block) continue;
    for (std::size_t j = floor; j < floor + tp.period; ++j) {
      if (!reach_end[tp.locate(c.block, j).index]) continue;
      // A concrete tail path from a translate of c.block@j into the class.
      std::size_t climb = (tp.eventual.size() + 2) * (tp.window + tp.period + p.span);
      for (std::size_t attempt = 0; attempt < 4; ++attempt, climb *= 2) {
        VertexRef start = VertexRef::of_block(c.block, j + climb / tp.period * tp.period);
        std::map<VertexRef, VertexRef> parent{{start, start}};
        std::deque<VertexRef> queue{start};
        std::optional<VertexRef> hit;
        while (!queue.empty() && !hit) {
          VertexRef x = queue.front();
          queue.pop_front();
          if (in_class(tp, end, x)) {
            hit = x;
            break;
          }
          for (const VertexRef& y : block_neighbours(p, x, false)) {
            if (y.level < floor || y.level >= start.level + climb || parent.count(y)) continue;
            parent[y] = x;
            queue.push_back(y);
          }
        }
        if (!hit) continue;
        std::vector<VertexRef> tail{*hit};
        while (parent.at(tail.back()) != tail.back()) tail.push_back(parent.at(tail.back()));
        std::reverse(tail.begin(), tail.end());
        std::size_t lo = npos, hi = 0;
        for (const VertexRef& x : tail) {
          lo = std::min(lo, x.level);
          hi = std::max(hi, x.level);
        }
        Fan f;
        f.path.push_back(VertexRef::of_core(v));
        f.path.insert(f.path.end(), tail.begin(), tail.end());
        f.shift = (hi - lo + tp.period) / tp.period * tp.period;
        return f;
      }
      throw BudgetExceeded("fan path search from " + vertex_name(p, VertexRef::of_core(v)));
    }
  }
  return std::nullopt;
}

// Separation (V - R, R + S) with R the vertices v reaches in D - S.
std::optional<NotDominates> cut_separation(const Presentation& p, const TailPattern& tp,
                                           VertexRef v, const std::vector<VertexRef>& cut,
                                           std::size_t end) {
  std::size_t base = level_top(cut) + tp.head_levels + tp.window;
  PeriodicSet reach = reach_set(p, tp, PeriodicSet::of_members(p.core_size(), p.block_size(), {v}),
                                cut, false, base);
  PeriodicSet cut_set = PeriodicSet::of_members(p.core_size(), p.block_size(), cut);
  PresentedSeparation s{reach.complement(), reach.united(cut_set)};
  if (!is_separation(p, s)) return std::nullopt;
  if (!s.side_b.contains(v) || s.side_a.contains(v)) return std::nullopt;
  if (separation_points(p, tp, s, end) != Pointing::away) return std::nullopt;
  return NotDominates{s, separator(s)};
}

std::variant<Dominates, NotDominates> forward_dominates(const Presentation& p,
                                                        const TailPattern& tp, Vertex v,
                                                        std::size_t end) {
  if (auto fan = forward_fan(p, tp, v, end)) return Dominates{v, *fan};
  // Minimum vertex cut between v and far class vertices, then the reach of v.
  std::size_t far = tp.head_levels + p.span + tp.window;
  std::size_t levels = far + tp.window + tp.margin + tp.period;
  FiniteDigraph g = truncate(p, levels);
  VertexSet targets;
  for (std::size_t l = far; l < levels - tp.margin; ++l)
    for (Vertex t = 0; t < p.block_size(); ++t)
      if (in_class(tp, end, VertexRef::of_block(t, l)))
        targets.push_back(vertex_id(p, VertexRef::of_block(t, l)));
  VertexRef vr = VertexRef::of_core(v);
  FanResult fr = max_disjoint_fan(g, vertex_id(p, vr), normalized(targets));
  std::vector<VertexRef> cut;
  for (Vertex x : fr.min_cut) cut.push_back(vertex_ref(p, x));
  if (auto s = cut_separation(p, tp, vr, cut, end)) return *s;
  std::vector<VertexRef> x1;
  for (const VertexRef& x : exhaustion_refs(p, 1))
    if (x != vr) x1.push_back(x);
  if (auto s = cut_separation(p, tp, vr, x1, end)) return *s;
  consistency_failure("undominated end without a separation witness");
}

// Separation pointing away from the end with the vertex in B - A, for a
// vertex that does not dominate it.
NotDominates escape_separation(const Presentation& p, const TailPattern& tp, VertexRef x,
                               std::size_t end) {
  if (x.core) {
    auto r = forward_dominates(p, tp, x.index, end);
    if (auto* nd = std::get_if<NotDominates>(&r)) return *nd;
    consistency_failure("separator vertex dominates the end");
  }
  // A block vertex has its out-neighbours below level + span + 1.
  std::vector<VertexRef> cut;
  for (const VertexRef& y : exhaustion_refs(p, x.level + p.span + 1))
    if (y != x) cut.push_back(y);
  if (auto s = cut_separation(p, tp, x, cut, end)) return *s;
  consistency_failure("block vertex without a separation witness");
}

}  // namespace

std::variant<Dominates, NotDominates> dominates(const Presentation& p, const TailPattern& tp,
                                                Vertex core_vertex, std::size_t end, bool reverse) {
  if (core_vertex >= p.core_size())
    throw Error(ErrorCode::invalid_argument, "only core vertices have infinite degree and can dominate");
  if (end >= tp.infinite_count()) throw Error(ErrorCode::invalid_argument, "no such end");
  if (!reverse) return forward_dominates(p, tp, core_vertex, end);
  Presentation rp = reversed(p);
  TailPattern rtp = tail_stabilization(rp);
  auto r = forward_dominates(rp, rtp, core_vertex, matching_end(tp, rtp, end));
  if (auto* d = std::get_if<Dominates>(&r)) {
    std::reverse(d->fan.path.begin(), d->fan.path.end());
    d->fan.reverse = true;
    return *d;
  }
  auto nd = std::get<NotDominates>(r);
  nd.separation = swapped(nd.separation);
  return nd;
}

// ---------------------------------------------------------------------------
// Separation sequences

std::string check_separation_sequence(const Presentation& p, const TailPattern& tp,
                                      std::size_t end, const SeparationSequence& s) {
  const Pointing want = s.orientation == Orientation::away ? Pointing::away : Pointing::towards;
  std::set<VertexRef> used;
  for (std::size_t i = 0; i < s.separations.size(); ++i) {
    const PresentedSeparation& sep = s.separations[i];
    std::string at = " at " + std::to_string(i);
    if (!is_separation(p, sep)) return "not a finite-order separation" + at;
    if (separator(sep) != s.separators.at(i)) return "separator list mismatch" + at;
    for (const VertexRef& v : s.separators[i])
      if (!used.insert(v).second) return "separators meet at " + vertex_name(p, v);
    if (separation_points(p, tp, sep, end) != want) return "wrong orientation" + at;
    if (i > 0) {
      const PresentedSeparation& prev = s.separations[i - 1];
      bool ordered = s.orientation == Orientation::away ? separation_leq(sep, prev)
                                                        : separation_leq(prev, sep);
      if (!ordered || sep == prev) return "sequence is not strictly monotone" + at;
    }
  }
  return "";
}

std::variant<SeparationSequence, Dominates> descending_separation_sequence(
    const Presentation& p, const TailPattern& tp, std::size_t end, std::size_t count,
    Orientation orientation) {
  if (end >= tp.infinite_count()) throw Error(ErrorCode::invalid_argument, "no such end");
  if (!is_strongly_connected(p, tp))
    throw Error(ErrorCode::invalid_argument, "the digraph is not strongly connected");
  if (orientation == Orientation::towards) {
    Presentation rp = reversed(p);
    TailPattern rtp = tail_stabilization(rp);
    auto r = descending_separation_sequence(rp, rtp, matching_end(tp, rtp, end), count,
                                            Orientation::away);
    if (auto* d = std::get_if<Dominates>(&r)) {
      std::reverse(d->fan.path.begin(), d->fan.path.end());
      d->fan.reverse = true;
      return *d;
    }
    auto seq = std::get<SeparationSequence>(r);
    seq.orientation = Orientation::towards;
    for (auto& s : seq.separations) s = swapped(s);
    return seq;
  }

  for (Vertex v = 0; v < p.core_size(); ++v) {
    auto r = forward_dominates(p, tp, v, end);
    if (auto* d = std::get_if<Dominates>(&r)) return *d;
  }
  SeparationSequence seq;
  seq.orientation = Orientation::away;
  if (count == 0) return seq;

  // (A_0, B_0) = (down-closure of f(X_1) plus X_1, its complement).
  std::vector<VertexRef> x1 = exhaustion_refs(p, 1);
  PeriodicSet xset = PeriodicSet::of_members(p.core_size(), p.block_size(), x1);
  PeriodicSet down = reach_set(p, tp, living_set(p, tp, end, 1), x1, true,
                               1 + tp.head_levels + tp.window);
  PresentedSeparation cur{down.united(xset), down.complement()};
  seq.separations.push_back(cur);
  seq.separators.push_back(separator(cur));
  while (seq.separations.size() < count) {
    PresentedSeparation next = cur;
    for (const VertexRef& x : seq.separators.back())
      next = sep_inf(next, escape_separation(p, tp, x, end).separation);
    cur = next;
    seq.separations.push_back(cur);
    seq.separators.push_back(separator(cur));
  }
  if (auto err = check_separation_sequence(p, tp, end, seq); !err.empty())
    consistency_failure("separation sequence check failed: " + err);
  return seq;
}

ClosureUniqueness sequence_closure_uniqueness(const Presentation& p, const TailPattern& tp,
                                              std::size_t end, std::size_t depth) {
  ClosureUniqueness out;
  ThreadSet ts = direction_threads(p, tp, depth, DirectionThread::Kind::vertex);
  BijectionReport bij = check_end_direction_bijection(p, tp, depth);
  for (auto [e, t] : bij.matching)
    if (e == end) out.thread = t;
  if (out.thread == npos) {
    out.failure = "end induces no thread";
    return out;
  }
  // Grow the sequence until a separator lies above X_depth.
  SeparationSequence seq;
  for (std::size_t count = depth + 2;; count *= 2) {
    auto r = descending_separation_sequence(p, tp, end, count, Orientation::away);
    if (std::holds_alternative<Dominates>(r))
      throw Error(ErrorCode::invalid_argument, "a vertex dominates the end");
    seq = std::get<SeparationSequence>(std::move(r));
    const auto& last = seq.separators.back();
    bool above = !last.empty() && std::all_of(last.begin(), last.end(), [&](const VertexRef& v) {
      return !v.core && v.level >= depth;
    });
    if (above) break;
    if (count > 64 * (depth + tp.window + tp.period + 1)) {
      out.failure = "separators do not leave X_" + std::to_string(depth);
      return out;
    }
  }
  // f(S) in a truncation: the strong component of D_L - S holding a class
  // vertex high above S. Its smallest vertex lies in the true f(S).
  FiniteDigraph g = truncate(p, ts.levels);
  for (const auto& sep : seq.separators) {
    VertexMask cut(g.size(), false);
    for (const VertexRef& v : sep)
      if (v.core || v.level < ts.levels) cut[vertex_id(p, v)] = true;
    Condensation c = strong_components(g, cut);
    std::size_t top = level_top(sep) + tp.head_levels + tp.window + tp.period;
    std::optional<std::size_t> comp;
    for (std::size_t l = top; l < ts.levels && !comp; ++l)
      for (Vertex t = 0; t < p.block_size() && !comp; ++t) {
        VertexRef w = VertexRef::of_block(t, l);
        if (in_class(tp, end, w) && !cut[vertex_id(p, w)]) comp = c.component_of[vertex_id(p, w)];
      }
    if (!comp) {
      out.failure = "truncation too shallow for a separator";
      return out;
    }
    VertexRef pick = vertex_ref(p, c.components[*comp].front());
    if (!pick.core && pick.level >= ts.bound) {
      out.failure = "picked vertex " + vertex_name(p, pick) + " lies above the thread bound";
      return out;
    }
    out.u.push_back(pick);
  }
  VertexSet uid;
  for (const VertexRef& v : out.u) uid.push_back(vertex_id(p, v));
  uid = normalized(uid);
  for (std::size_t i = 0; i < ts.threads.size(); ++i) {
    bool all = std::all_of(ts.threads[i].choices.begin(), ts.threads[i].choices.end(),
                           [&](const ThreadChoice& ch) {
                             return std::any_of(uid.begin(), uid.end(), [&](Vertex x) {
                               return std::binary_search(ch.vertices.begin(), ch.vertices.end(), x);
                             });
                           });
    if (all) out.in_closure.push_back(i);
  }
  out.ok = out.in_closure == std::vector<std::size_t>{out.thread};
  if (!out.ok) out.failure = std::to_string(out.in_closure.size()) + " threads in the closure of U";
  return out;
}

PresentedSeparation random_separation(const Presentation& p, const TailPattern& tp,
                                      std::mt19937_64& rng, std::size_t levels) {
  std::bernoulli_distribution third(1.0 / 3.0), quarter(0.25), half(0.5);
  std::vector<VertexRef> x;
  for (const VertexRef& v : exhaustion_refs(p, levels))
    if (third(rng)) x.push_back(v);
  std::set<VertexRef> removed(x.begin(), x.end());
  const std::size_t top = levels + tp.window;
  std::vector<VertexRef> src;
  for (Vertex f = 0; f < p.core_size(); ++f)
    if (!removed.count(VertexRef::of_core(f)) && quarter(rng)) src.push_back(VertexRef::of_core(f));
  for (std::size_t l = 0; l < top; ++l)
    for (Vertex t = 0; t < p.block_size(); ++t)
      if (!removed.count(VertexRef::of_block(t, l)) && quarter(rng))
        src.push_back(VertexRef::of_block(t, l));
  PeriodicSet sources = PeriodicSet::of_members(p.core_size(), p.block_size(), src);
  if (tp.infinite_count() > 0 && half(rng)) {
    std::uniform_int_distribution<std::size_t> pick(0, tp.infinite_count() - 1);
    sources = sources.united(living_set(p, tp, pick(rng), levels));
  }
  // A - B must be closed under in-neighbours in D - X, B - A under
  // out-neighbours; one side is the closure of the sources.
  const bool up = half(rng);
  PeriodicSet closed = reach_set(p, tp, sources, x, !up, top + tp.head_levels);
  PeriodicSet xset = PeriodicSet::of_members(p.core_size(), p.block_size(), x);
  if (up) return {closed.complement(), closed.united(xset)};
  return {closed.united(xset), closed.complement()};
}

}  // namespace endspace
