#include "endspace/ends.hpp"

#include <algorithm>
#include <deque>
#include <functional>
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

VertexRef lifted(VertexRef v, std::size_t by) {
  return VertexRef::of_block(v.index, v.level + by);
}

// Whether the tail component e meets u infinitely often.
bool meets_infinitely(const TailPattern& tp, std::size_t e, const PeriodicSet& u) {
  std::size_t from = std::max(tp.head_levels, u.base());
  std::size_t q = std::lcm(tp.period, u.period());
  for (std::size_t l = from; l < from + q; ++l)
    for (Vertex t = 0; t < tp.block_size; ++t) {
      VertexRef v = VertexRef::of_block(t, l);
      if (in_class(tp, e, v) && u.contains(v)) return true;
    }
  return false;
}

// A ray in the tail component e: a path P from a class vertex w to
// w + gain (gain a multiple of the period) such that P without its last
// vertex is disjoint from its translates by nonzero multiples of gain, so the
// translates concatenate without repetition.
RaySpec representative_ray(const Presentation& p, const TailPattern& tp, std::size_t e) {
  const EventualComponent& ec = tp.eventual.at(e);
  const std::size_t nt = p.block_size();
  const std::size_t jmax = 4 * nt * p.span + 4;
  auto translates_disjoint = [](const std::vector<VertexRef>& path, std::size_t gain) {
    std::set<std::pair<Vertex, std::size_t>> seen;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (!seen.insert({path[i].index, path[i].level % gain}).second) return false;
    return true;
  };
  for (std::size_t j = 1; j <= jmax; ++j) {
    const std::size_t gain = j * tp.period;
    const std::size_t room = gain + 2 * nt * p.span;
    for (std::size_t extra = 0; extra <= 2 * nt * p.span; extra += p.span)
      for (auto [t, r] : ec.residues) {
        std::size_t base = tp.head_levels + room;
        while (base % tp.period != r) ++base;
        const VertexRef w = VertexRef::of_block(t, base), goal = lifted(w, gain);
        const std::size_t width = gain + extra;
        for (std::size_t d = 0; d < width; ++d) {
          const std::size_t lo = w.level - d, hi = lo + width;
          if (lo < tp.head_levels) break;
          std::map<VertexRef, VertexRef> parent{{w, w}};
          std::deque<VertexRef> queue{w};
          bool found = false;
          while (!queue.empty() && !found) {
            VertexRef x = queue.front();
            queue.pop_front();
            for (const VertexRef& y : block_neighbours(p, x, false)) {
              if (y == goal) {
                parent[y] = x;
                found = true;
                break;
              }
              if (y.level < lo || y.level >= hi || parent.count(y)) continue;
              parent[y] = x;
              queue.push_back(y);
            }
          }
          if (!found) continue;
          std::vector<VertexRef> path{goal};
          while (path.back() != w) path.push_back(parent.at(path.back()));
          std::reverse(path.begin(), path.end());
          if (!translates_disjoint(path, gain)) continue;
          RaySpec out;
          out.preperiod = {w};
          for (std::size_t i = 1; i < path.size(); ++i)
            out.cycle.push_back({path[i].index, static_cast<int>(path[i].level) -
                                                    static_cast<int>(path[i - 1].level)});
          return out;
        }
      }
  }
  consistency_failure("no periodic ray in an infinite tail component");
}

}  // namespace

std::vector<End> ends(const Presentation& p, const TailPattern& tp) {
  std::vector<End> out;
  for (std::size_t e = 0; e < tp.infinite_count(); ++e)
    out.push_back({e, e, representative_ray(p, tp, e)});
  return out;
}

bool LivingComponent::contains(const TailPattern& tp, VertexRef v) const {
  return tp.in_living_component(end, exhaustion_index, v);
}

std::vector<VertexRef> LivingComponent::members(const TailPattern& tp,
                                                std::size_t levels) const {
  return tp.members({TailSlot::Kind::infinite, tail_component, 0}, exhaustion_index, levels);
}

LivingComponent living_component(const TailPattern& tp, std::size_t n, const End& end) {
  return {end.id, n, tp.shifted(end.eventual_component, n)};
}

bool is_in_closure(const TailPattern& tp, const UFamily& u, const End& end) {
  return std::all_of(u.begin(), u.end(), [&](const PeriodicSet& s) {
    return meets_infinitely(tp, end.eventual_component, s);
  });
}

// ---------------------------------------------------------------------------
// Necklaces

NecklacePrefix materialize(const Necklace& n, std::size_t beads) {
  ENDSPACE_ENSURE(beads >= 1 && n.shift > 0);
  NecklacePrefix out;
  auto shift_all = [](const std::vector<VertexRef>& vs, std::size_t by) {
    std::vector<VertexRef> r;
    for (const VertexRef& v : vs) r.push_back(lifted(v, by));
    return r;
  };
  std::size_t top = 0;
  for (std::size_t j = 0; j < beads; ++j) {
    out.beads.push_back(shift_all(n.bead, j * n.shift));
    if (j + 1 < beads) {
      out.forward.push_back(shift_all(n.forward, j * n.shift));
      out.backward.push_back(shift_all(n.backward, j * n.shift));
    }
  }
  for (const auto* group : {&out.beads, &out.forward, &out.backward})
    for (const auto& vs : *group)
      for (const VertexRef& v : vs) top = std::max(top, v.level + 1);
  out.levels = top;
  return out;
}

std::string check_necklace(const Presentation& p, const NecklacePrefix& prefix,
                           const UFamily* attach) {
  const std::size_t nb = prefix.beads.size();
  if (nb == 0) return "no beads";
  if (prefix.forward.size() + 1 != nb || prefix.backward.size() + 1 != nb)
    return "path count does not match bead count";
  FiniteDigraph g = truncate(p, prefix.levels);
  auto id = [&](const VertexRef& v) { return vertex_id(p, v); };
  for (const auto* group : {&prefix.beads, &prefix.forward, &prefix.backward})
    for (const auto& vs : *group)
      for (const VertexRef& v : vs)
        if (v.core || v.level >= prefix.levels) return "vertex outside the truncation";

  std::map<Vertex, std::size_t> bead_of;
  for (std::size_t j = 0; j < nb; ++j) {
    const auto& bead = prefix.beads[j];
    if (bead.empty()) return "empty bead " + std::to_string(j);
    VertexSet ids;
    for (const VertexRef& v : bead) {
      if (!bead_of.insert({id(v), j}).second)
        return "beads overlap at " + vertex_name(p, v);
      ids.push_back(id(v));
    }
    ids = normalized(ids);
    if (strong_components(g.induced(ids)).size() != 1)
      return "bead " + std::to_string(j) + " is not strongly connected";
    if (attach)
      for (std::size_t i = 0; i < attach->size(); ++i)
        if (std::none_of(bead.begin(), bead.end(),
                         [&](const VertexRef& v) { return (*attach)[i].contains(v); }))
          return "bead " + std::to_string(j) + " misses set " + std::to_string(i);
  }

  std::set<Vertex> interior;
  auto check_path = [&](const std::vector<VertexRef>& path, std::size_t from,
                        std::size_t to) -> std::string {
    if (path.size() < 2) return "path too short";
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (!g.has_edge(id(path[i]), id(path[i + 1])))
        return "missing edge " + vertex_name(p, path[i]) + " -> " + vertex_name(p, path[i + 1]);
    auto first = bead_of.find(id(path.front())), last = bead_of.find(id(path.back()));
    if (first == bead_of.end() || first->second != from) return "path does not start on its bead";
    if (last == bead_of.end() || last->second != to) return "path does not end on its bead";
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      Vertex v = id(path[i]);
      if (bead_of.count(v)) return "path interior meets a bead at " + vertex_name(p, path[i]);
      if (!interior.insert(v).second) return "path interiors meet at " + vertex_name(p, path[i]);
    }
    return "";
  };
  for (std::size_t j = 0; j + 1 < nb; ++j) {
    if (auto err = check_path(prefix.forward[j], j, j + 1); !err.empty()) return err;
    if (auto err = check_path(prefix.backward[j], j + 1, j); !err.empty()) return err;
  }
  return "";
}

namespace {

struct BeadChoice {
  std::vector<VertexRef> bead;
  std::size_t lo = 0, hi = 0;  // level range, inclusive
};

// The largest strong component of the class vertices on levels
// [base, base + w) holding `required` and meeting every set of u.
std::optional<BeadChoice> choose_bead(const Presentation& p, const TailPattern& tp, std::size_t e,
                                      const UFamily& u, const std::vector<VertexRef>& required,
                                      std::size_t base, std::size_t w) {
  std::size_t top = base + w;
  FiniteDigraph g = truncate(p, top);
  VertexMask removed(g.size(), true);
  for (std::size_t l = base; l < top; ++l)
    for (Vertex t = 0; t < p.block_size(); ++t) {
      VertexRef v = VertexRef::of_block(t, l);
      if (in_class(tp, e, v)) removed[vertex_id(p, v)] = false;
    }
  Condensation c = strong_components(g, removed);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const VertexSet& comp = c.components[i];
    auto has = [&](Vertex x) { return std::binary_search(comp.begin(), comp.end(), x); };
    bool ok = std::all_of(required.begin(), required.end(),
                          [&](const VertexRef& v) { return has(vertex_id(p, v)); });
    for (const PeriodicSet& s : u) {
      if (!ok) break;
      ok = std::any_of(comp.begin(), comp.end(),
                       [&](Vertex x) { return s.contains(vertex_ref(p, x)); });
    }
    if (ok && (!best || comp.size() > c.components[*best].size())) best = i;
  }
  if (!best) return std::nullopt;
  BeadChoice out;
  out.lo = npos;
  for (Vertex x : c.components[*best]) {
    VertexRef v = vertex_ref(p, x);
    out.bead.push_back(v);
    out.lo = std::min(out.lo, v.level);
    out.hi = std::max(out.hi, v.level);
  }
  return out;
}

// Shortest path from `from` to `to` through block vertices below `top`
// whose interior avoids `blocked`.
std::optional<std::vector<VertexRef>> bounded_path(const Presentation& p,
                                                   const std::vector<VertexRef>& from,
                                                   const std::set<VertexRef>& to,
                                                   const std::function<bool(VertexRef)>& blocked,
                                                   std::size_t top) {
  std::map<VertexRef, VertexRef> parent;
  std::deque<VertexRef> queue;
  for (const VertexRef& s : from) {
    parent[s] = s;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    VertexRef x = queue.front();
    queue.pop_front();
    for (const VertexRef& y : block_neighbours(p, x, false)) {
      if (y.level >= top) continue;
      if (to.count(y)) {
        std::vector<VertexRef> path{y, x};
        while (parent.at(path.back()) != path.back()) path.push_back(parent.at(path.back()));
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (parent.count(y) || blocked(y)) continue;
      parent[y] = x;
      queue.push_back(y);
    }
  }
  return std::nullopt;
}

std::optional<Necklace> connect(const Presentation& p, std::size_t e, const BeadChoice& b,
                                std::size_t s) {
  std::set<VertexRef> bead(b.bead.begin(), b.bead.end());
  auto on_some_bead = [&](VertexRef v) {
    for (const VertexRef& x : b.bead) {
      if (x.index != v.index) continue;
      long d = static_cast<long>(v.level) - static_cast<long>(x.level);
      if (d % static_cast<long>(s) == 0) return true;
    }
    return false;
  };
  std::set<VertexRef> next;
  for (const VertexRef& v : b.bead) next.insert(lifted(v, s));
  std::size_t top = b.hi + 2 * s + 2 * (p.block_size() + 1) * p.span + 1;

  auto fwd = bounded_path(p, b.bead, next, on_some_bead, top);
  if (!fwd) return std::nullopt;
  std::set<VertexRef> used(fwd->begin() + 1, fwd->end() - 1);
  std::vector<VertexRef> from_next(next.begin(), next.end());
  auto bwd = bounded_path(
      p, from_next, bead, [&](VertexRef v) { return on_some_bead(v) || used.count(v) > 0; }, top);
  if (!bwd) return std::nullopt;

  std::vector<VertexRef> interior(fwd->begin() + 1, fwd->end() - 1);
  interior.insert(interior.end(), bwd->begin() + 1, bwd->end() - 1);
  std::set<VertexRef> inner(interior.begin(), interior.end());
  std::size_t lo = npos, hi = 0;
  for (const VertexRef& v : interior) {
    lo = std::min(lo, v.level);
    hi = std::max(hi, v.level);
  }
  for (std::size_t j = 1; !interior.empty() && lo + j * s <= hi; ++j)
    for (const VertexRef& v : interior)
      if (inner.count(lifted(v, j * s))) return std::nullopt;
  return Necklace{e, s, b.bead, *fwd, *bwd};
}

std::size_t family_period(const TailPattern& tp, const UFamily& u) {
  std::size_t q = tp.period;
  for (const PeriodicSet& s : u) q = std::lcm(q, s.period());
  return q;
}

std::size_t family_base(const TailPattern& tp, const UFamily& u) {
  std::size_t b = tp.head_levels;
  for (const PeriodicSet& s : u) b = std::max(b, s.base());
  return b;
}

}  // namespace

std::optional<Necklace> build_necklace(const Presentation& p, const TailPattern& tp,
                                       std::size_t end, const UFamily& u,
                                       const std::vector<VertexRef>& required,
                                       std::size_t min_shift, std::size_t shift_step,
                                       std::size_t exact_shift) {
  std::size_t q = family_period(tp, u);
  if (shift_step > 0) q = std::lcm(q, shift_step);
  std::size_t base = family_base(tp, u);
  for (const VertexRef& v : required)
    if (!in_class(tp, end, v) || v.level < base) return std::nullopt;
  if (required.empty()) {
    base = (base + q - 1) / q * q;
  } else {
    base = std::min_element(required.begin(), required.end(), [](const VertexRef& a, const VertexRef& b) {
             return a.level < b.level;
           })->level;
  }
  std::size_t need = 0;
  for (const VertexRef& v : required) need = std::max(need, v.level + 1 - base);
  // Wider bead windows absorb the connecting paths, so a failed connection
  // moves on to the next window.
  const std::size_t w0 = std::max(q, need);
  for (std::size_t w = w0; w <= w0 + 8 * q; w += q) {
    auto bead = choose_bead(p, tp, end, u, required, base, w);
    if (!bead) continue;
    if (exact_shift > 0) {
      if (exact_shift % q != 0 || exact_shift <= bead->hi - bead->lo) continue;
      if (auto n = connect(p, end, *bead, exact_shift)) return n;
      continue;
    }
    std::size_t s0 = std::max(min_shift, bead->hi - bead->lo + 1);
    s0 = (s0 + q - 1) / q * q;
    for (std::size_t s = s0; s <= s0 + 8 * q; s += q)
      if (auto n = connect(p, end, *bead, s)) return n;
  }
  return std::nullopt;
}

std::variant<Necklace, NoNecklace> find_necklace(const Presentation& p, const TailPattern& tp,
                                                 const UFamily& u, std::size_t beads) {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i].is_finite())
      return NoNecklace{"set " + std::to_string(i) + " is finite", i};
  for (std::size_t e = 0; e < tp.infinite_count(); ++e) {
    if (!is_in_closure(tp, u, End{e, e, {}})) continue;
    auto n = build_necklace(p, tp, e, u, {}, 1, 1);
    if (!n) throw BudgetExceeded("necklace search in the component of end " + std::to_string(e));
    NecklacePrefix prefix = materialize(*n, std::max<std::size_t>(beads, 2));
    if (auto err = check_necklace(p, prefix, &u); !err.empty())
      consistency_failure("necklace check failed: " + err);
    return *n;
  }
  return NoNecklace{"no end lies in the closure of the family", std::nullopt};
}

// ---------------------------------------------------------------------------
// Star-comb

namespace {

VertexRef root_vertex(const Presentation& p) {
  return p.core_size() > 0 ? VertexRef::of_core(0) : VertexRef::of_block(0, 0);
}

// One star or comb in g attached to `target`, grown along the BFS
// arborescence from the root: a core vertex with `want` rich children
// becomes a star centre, otherwise the spine follows the richest child and
// collects one tooth per spine vertex from the other subtrees.
std::optional<StarComb> grow(const Presentation& p, const FiniteDigraph& g, Vertex root,
                             bool reverse, const VertexMask& target, std::size_t want) {
  Arborescence t = bfs_arborescence(g, root, reverse, VertexMask(g.size(), false));
  std::vector<VertexSet> kids = t.children();
  std::vector<std::size_t> order;
  for (Vertex v = 0; v < g.size(); ++v)
    if (t.contains(v)) order.push_back(v);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return t.depth[a] > t.depth[b]; });
  std::vector<std::size_t> rich(g.size(), 0);
  std::vector<std::size_t> nearest(g.size(), npos);  // shallowest target below
  for (std::size_t v : order) {
    if (target[v]) {
      ++rich[v];
      nearest[v] = v;
    }
    for (Vertex c : kids[v]) {
      rich[v] += rich[c];
      std::size_t n = nearest[c];
      if (n != npos && (nearest[v] == npos || t.depth[n] < t.depth[nearest[v]] ||
                        (t.depth[n] == t.depth[nearest[v]] && n < nearest[v])))
        nearest[v] = n;
    }
  }
  auto refs = [&](const Path& path) {
    std::vector<VertexRef> out;
    for (Vertex v : path) out.push_back(vertex_ref(p, v));
    return out;
  };
  // Tree path between x and the shallowest target below it, in edge direction.
  auto branch = [&](Vertex x, Vertex c) {
    Path full = t.root_path(static_cast<Vertex>(nearest[c]));
    Path seg;
    if (!reverse) {
      auto it = std::find(full.begin(), full.end(), x);
      seg.assign(it, full.end());
    } else {
      auto it = std::find(full.begin(), full.end(), x);
      seg.assign(full.begin(), it + 1);
    }
    return refs(seg);
  };

  StarComb sc;
  sc.reverse = reverse;
  Vertex x = root;
  Path spine{x};
  while (sc.teeth.size() < want) {
    std::vector<Vertex> live;
    for (Vertex c : kids[x])
      if (rich[c] > 0) live.push_back(c);
    if (vertex_ref(p, x).core && live.size() >= want) {
      StarComb star;
      star.shape = StarComb::Shape::star;
      star.reverse = reverse;
      star.centre = vertex_ref(p, x);
      Path to_centre = t.root_path(x);
      star.spine = refs(to_centre);
      if (reverse) std::reverse(star.spine.begin(), star.spine.end());
      for (std::size_t i = 0; i < want; ++i) {
        star.teeth.push_back(branch(x, live[i]));
        star.attachment.push_back(vertex_ref(p, static_cast<Vertex>(nearest[live[i]])));
      }
      std::sort(star.attachment.begin(), star.attachment.end());
      return star;
    }
    if (live.empty()) return std::nullopt;
    Vertex next = *std::max_element(live.begin(), live.end(), [&](Vertex a, Vertex b) {
      return rich[a] < rich[b] || (rich[a] == rich[b] && a > b);
    });
    if (target[x]) {
      sc.teeth.push_back({vertex_ref(p, x)});
      sc.attachment.push_back(vertex_ref(p, x));
    } else {
      for (Vertex c : live)
        if (c != next) {
          sc.teeth.push_back(branch(x, c));
          sc.attachment.push_back(vertex_ref(p, static_cast<Vertex>(nearest[c])));
          break;
        }
    }
    x = next;
    spine.push_back(x);
  }
  sc.shape = StarComb::Shape::comb;
  sc.spine = refs(spine);
  std::sort(sc.attachment.begin(), sc.attachment.end());
  return sc;
}

void keep_teeth(StarComb& s, const std::set<VertexRef>& keep) {
  std::vector<std::vector<VertexRef>> teeth;
  for (auto& tooth : s.teeth) {
    const VertexRef& end = s.reverse ? tooth.front() : tooth.back();
    if (keep.count(end)) teeth.push_back(std::move(tooth));
  }
  s.teeth = std::move(teeth);
  std::vector<VertexRef> att;
  for (const VertexRef& v : s.attachment)
    if (keep.count(v)) att.push_back(v);
  s.attachment = std::move(att);
}

}  // namespace

bool is_strongly_connected(const Presentation& p, const TailPattern& tp) {
  std::size_t slack = tp.margin + tp.window;
  std::size_t l1 = tp.head_levels + tp.window + 2 * slack;
  for (std::size_t levels : {l1, 2 * l1}) {
    FiniteDigraph g = truncate(p, levels);
    Vertex root = vertex_id(p, root_vertex(p));
    VertexMask none(g.size(), false);
    Vertex r[] = {root};
    VertexMask out = reachable(g, r, none, false), in = reachable(g, r, none, true);
    std::size_t checked = prefix_size(p, levels - slack);
    for (Vertex v = 0; v < checked; ++v)
      if (!out[v] || !in[v]) return false;
  }
  return true;
}

StarCombPair star_comb(const Presentation& p, const TailPattern& tp, const UFamily& u,
                       std::size_t teeth) {
  if (teeth == 0) throw Error(ErrorCode::invalid_argument, "at least one tooth is required");
  auto it = std::find_if(u.begin(), u.end(), [](const PeriodicSet& s) { return !s.is_finite(); });
  if (it == u.end()) throw Error(ErrorCode::invalid_argument, "star-comb needs an infinite vertex set");
  const PeriodicSet& target_set = *it;
  if (!is_strongly_connected(p, tp))
    throw Error(ErrorCode::invalid_argument, "the digraph is not strongly connected");

  std::size_t base = tp.head_levels + tp.window + tp.margin + target_set.base();
  std::size_t stride = std::max<std::size_t>(1, target_set.period()) * (teeth + 2) * p.span * 2;
  for (std::size_t attempt = 0; attempt < 4; ++attempt) {
    std::size_t levels = (base + stride) << attempt;
    FiniteDigraph g = truncate(p, levels);
    Vertex root = vertex_id(p, root_vertex(p));
    VertexMask target(g.size(), false);
    for (const VertexRef& v : target_set.members_below(levels / 2)) target[vertex_id(p, v)] = true;
    std::size_t want = teeth * (2 + attempt);
    auto fwd = grow(p, g, root, false, target, want);
    if (!fwd) continue;
    VertexMask shared_target(g.size(), false);
    for (const VertexRef& v : fwd->attachment) shared_target[vertex_id(p, v)] = true;
    auto bwd = grow(p, g, root, true, shared_target, teeth);
    if (!bwd) continue;
    std::set<VertexRef> shared(bwd->attachment.begin(), bwd->attachment.end());
    keep_teeth(*fwd, shared);
    if (fwd->teeth.size() != teeth) consistency_failure("star-comb attachment sets differ");
    for (const StarComb* s : {&*fwd, &*bwd})
      if (auto err = check_star_comb(p, levels, *s, target_set); !err.empty())
        consistency_failure("star-comb check failed: " + err);
    return {levels, *fwd, *bwd, bwd->attachment};
  }
  throw BudgetExceeded("star-comb search with " + std::to_string(teeth) + " teeth");
}

std::string check_star_comb(const Presentation& p, std::size_t levels, const StarComb& s,
                            const PeriodicSet& u) {
  FiniteDigraph g = truncate(p, levels);
  for (const auto& tooth : s.teeth)
    for (const VertexRef& v : tooth)
      if (!v.core && v.level >= levels) return "vertex outside the truncation";
  for (const VertexRef& v : s.spine)
    if (!v.core && v.level >= levels) return "vertex outside the truncation";
  auto id = [&](const VertexRef& v) { return vertex_id(p, v); };
  auto edge = [&](const VertexRef& a, const VertexRef& b) { return g.has_edge(id(a), id(b)); };

  std::set<VertexRef> spine(s.spine.begin(), s.spine.end());
  if (spine.size() != s.spine.size()) return "spine repeats a vertex";
  for (std::size_t i = 0; i + 1 < s.spine.size(); ++i) {
    bool ok = s.reverse ? edge(s.spine[i + 1], s.spine[i]) : edge(s.spine[i], s.spine[i + 1]);
    if (!ok) return "spine edge missing at " + vertex_name(p, s.spine[i]);
  }
  std::set<VertexRef> used;
  std::vector<VertexRef> ends;
  for (const auto& tooth : s.teeth) {
    if (tooth.empty()) return "empty tooth";
    for (std::size_t i = 0; i + 1 < tooth.size(); ++i)
      if (!edge(tooth[i], tooth[i + 1])) return "tooth edge missing at " + vertex_name(p, tooth[i]);
    const VertexRef& base = s.reverse ? tooth.back() : tooth.front();
    const VertexRef& tip = s.reverse ? tooth.front() : tooth.back();
    if (s.shape == StarComb::Shape::comb) {
      if (!spine.count(base)) return "tooth does not start on the spine";
      for (const VertexRef& v : tooth)
        if (v != base && spine.count(v)) return "tooth meets the spine twice";
      for (const VertexRef& v : tooth)
        if (!used.insert(v).second) return "teeth meet at " + vertex_name(p, v);
    } else {
      if (base != s.centre) return "leaf path does not start at the centre";
      if (tooth.size() < 2) return "trivial leaf path";
      for (const VertexRef& v : tooth)
        if (v != s.centre && !used.insert(v).second) return "leaf paths meet at " + vertex_name(p, v);
    }
    if (!u.contains(tip)) return "attachment " + vertex_name(p, tip) + " is not in the set";
    ends.push_back(tip);
  }
  std::sort(ends.begin(), ends.end());
  if (ends != s.attachment) return "attachment list does not match the teeth";
  return "";
}

// ---------------------------------------------------------------------------
// Rays

std::variant<End, NotSolid> end_of_ray(const Presentation& p, const TailPattern& tp,
                                       const RaySpec& r) {
  validate_ray(p, r);
  std::size_t gain = cycle_gain(r);
  const VertexRef start = r.preperiod.back();
  // Level of each cycle vertex relative to the cycle start.
  long lowest = 0, cur = 0;
  for (const RayStep& s : r.cycle) {
    cur += s.level_delta;
    lowest = std::min(lowest, cur);
  }
  long first_low = static_cast<long>(start.level) + lowest;
  std::size_t j0 = 0;
  if (first_low < static_cast<long>(tp.head_levels))
    j0 = (static_cast<std::size_t>(static_cast<long>(tp.head_levels) - first_low) + gain - 1) / gain;
  std::size_t cycles = j0 + tp.period + 1;
  std::vector<VertexRef> verts = ray_prefix(r, r.preperiod.size() + cycles * r.cycle.size());
  std::optional<std::size_t> cls;
  for (std::size_t i = r.preperiod.size() + j0 * r.cycle.size(); i < verts.size(); ++i) {
    const VertexRef& v = verts[i];
    TailSlot s = tp.locate(v.index, v.level);
    if (s.kind != TailSlot::Kind::infinite || (cls && *cls != s.index)) return NotSolid{0};
    cls = s.index;
  }
  ENDSPACE_ENSURE(cls.has_value());
  return End{*cls, *cls, representative_ray(p, tp, *cls)};
}

}  // namespace endspace
