#include "endspace/tail_pattern.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "endspace/error.hpp"

namespace endspace {

namespace {

// Strong components of the tail truncated at `truncation` levels, recorded
// for the block vertices on the first `levels` levels. A component is
// flagged infinite when it holds two copies of one block vertex; by the
// shift argument such a component is infinite in the tail.
struct Labelling {
  std::size_t levels = 0;
  std::size_t block = 0;
  std::vector<std::size_t> comp;
  std::vector<bool> infinite;
  std::vector<std::vector<VertexRef>> members;  // per component, within truncation

  std::size_t at(Vertex t, std::size_t l) const { return comp[l * block + t]; }
  bool inf(Vertex t, std::size_t l) const { return infinite[comp[l * block + t]]; }
};

Labelling label_tail(const Presentation& p, std::size_t levels, std::size_t truncation) {
  const std::size_t nf = p.core_size(), nt = p.block_size();
  FiniteDigraph g = truncate(p, truncation);
  VertexMask removed(g.size(), false);
  for (std::size_t f = 0; f < nf; ++f) removed[f] = true;
  Condensation c = strong_components(g, removed);

  Labelling out;
  out.levels = levels;
  out.block = nt;
  out.comp.assign(levels * nt, npos);
  out.infinite.assign(c.size(), false);
  out.members.resize(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::set<Vertex> seen;
    for (Vertex v : c.components[i]) {
      VertexRef r = vertex_ref(p, v);
      out.members[i].push_back(r);
      if (!seen.insert(r.index).second) out.infinite[i] = true;
    }
  }
  for (std::size_t l = 0; l < levels; ++l)
    for (Vertex t = 0; t < nt; ++t)
      out.comp[l * nt + t] = c.component_of[vertex_id(p, VertexRef::of_block(t, l))];
  return out;
}

bool same_partition(const Labelling& a, const Labelling& b) {
  std::map<std::size_t, std::size_t> fwd, bwd;
  for (std::size_t i = 0; i < a.comp.size(); ++i) {
    std::size_t x = a.comp[i], y = b.comp[i];
    if (a.infinite[x] != b.infinite[y]) return false;
    auto [it, fresh] = fwd.insert({x, y});
    if (!fresh && it->second != y) return false;
    auto [jt, fresh2] = bwd.insert({y, x});
    if (!fresh2 && jt->second != x) return false;
  }
  return true;
}

struct Limits {
  std::size_t nt, k, p_max, n_max, margin0, margin_max;

  std::size_t window(std::size_t period) const {
    // A finite tail component holds each block vertex at most once, so it
    // spans at most (|T| - 1) k levels; the window fits one full period of
    // anchors plus such a copy, and at least three periods.
    return std::max(3 * (period + k), period + nt * k + k);
  }
  std::size_t high() const { return n_max + window(p_max) + 1; }
};

// Checks that shifting by `period` maps the components seen in the window
// [n0, n0 + w) onto components: infinite ones onto themselves, finite ones
// lying inside the window onto equal-size translates.
bool shift_invariant(const Labelling& lab, std::size_t nt, std::size_t n0,
                     std::size_t period, std::size_t w) {
  std::size_t top = n0 + w;
  for (std::size_t l = n0; l + period < top; ++l)
    for (Vertex t = 0; t < nt; ++t) {
      bool a = lab.inf(t, l), b = lab.inf(t, l + period);
      if (a != b) return false;
      if (a && lab.at(t, l) != lab.at(t, l + period)) return false;
    }
  std::set<std::size_t> checked;
  for (std::size_t l = n0; l + period < top; ++l)
    for (Vertex t = 0; t < nt; ++t) {
      std::size_t c = lab.at(t, l);
      if (lab.infinite[c] || !checked.insert(c).second) continue;
      const auto& mem = lab.members[c];
      bool inside = std::all_of(mem.begin(), mem.end(), [&](const VertexRef& v) {
        return v.level >= n0 && v.level + period < top;
      });
      if (!inside) continue;
      std::size_t image = lab.at(mem.front().index, mem.front().level + period);
      if (lab.members[image].size() != mem.size()) return false;
      for (const VertexRef& v : mem)
        if (lab.at(v.index, v.level + period) != image) return false;
    }
  return true;
}

TailPattern build_pattern(const Presentation& p, const Labelling& lab, std::size_t n0,
                          std::size_t period, std::size_t w, std::size_t margin) {
  const std::size_t nt = p.block_size();
  TailPattern tp;
  tp.block_size = nt;
  tp.span = p.span;
  tp.period = period;
  tp.onset = n0;
  tp.margin = margin;
  tp.window = w;

  // Infinite descriptors from one period of levels at the onset.
  std::map<std::size_t, std::size_t> inf_index;  // labelling comp -> eventual
  std::vector<std::size_t> inf_comps;
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> inf_res;
  for (std::size_t r = 0; r < period; ++r)
    for (Vertex t = 0; t < nt; ++t) {
      std::size_t l = n0 + ((r + period - n0 % period) % period);
      if (!lab.inf(t, l)) continue;
      std::size_t c = lab.at(t, l);
      auto it = std::find(inf_comps.begin(), inf_comps.end(), c);
      if (it == inf_comps.end()) {
        inf_comps.push_back(c);
        inf_res.emplace_back();
        it = inf_comps.end() - 1;
      }
      inf_res[static_cast<std::size_t>(it - inf_comps.begin())].push_back({t, r});
    }
  // Order by smallest (residue, block vertex).
  std::vector<std::size_t> order(inf_comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto key = [&](std::size_t i) {
      auto m = *std::min_element(inf_res[i].begin(), inf_res[i].end(),
                                 [](auto x, auto y) { return std::pair(x.second, x.first) < std::pair(y.second, y.first); });
      return std::pair(m.second, m.first);
    };
    return key(a) < key(b);
  });
  for (std::size_t i : order) {
    EventualComponent ec;
    ec.infinite = true;
    ec.residues = inf_res[i];
    std::sort(ec.residues.begin(), ec.residues.end());
    auto [t, r] = ec.residues.front();
    std::size_t l = n0 + ((r + period - n0 % period) % period);
    ec.walk_from = VertexRef::of_block(t, l);
    ec.walk_shift = period;
    inf_index[inf_comps[i]] = tp.eventual.size();
    tp.eventual.push_back(std::move(ec));
  }

  // Finite templates: components anchored on one period from the onset.
  std::map<std::size_t, std::size_t> template_of;  // labelling comp -> eventual
  for (std::size_t a = n0; a < n0 + period; ++a)
    for (Vertex t = 0; t < nt; ++t) {
      std::size_t c = lab.at(t, a);
      if (lab.infinite[c] || template_of.count(c)) continue;
      const auto& mem = lab.members[c];
      std::size_t anchor = mem.front().level;
      for (const VertexRef& v : mem) anchor = std::min(anchor, v.level);
      if (anchor != a) continue;
      EventualComponent ec;
      ec.anchor_residue = a % period;
      for (const VertexRef& v : mem) ec.cells.push_back({v.index, v.level - a});
      std::sort(ec.cells.begin(), ec.cells.end(),
                [](auto x, auto y) { return std::pair(x.second, x.first) < std::pair(y.second, y.first); });
      template_of[c] = tp.eventual.size();
      tp.eventual.push_back(std::move(ec));
    }

  // Head region: finite components that start below the onset, plus
  // everything below it.
  std::size_t head = n0;
  for (std::size_t l = 0; l < n0; ++l)
    for (Vertex t = 0; t < nt; ++t) {
      std::size_t c = lab.at(t, l);
      if (lab.infinite[c]) continue;
      for (const VertexRef& v : lab.members[c]) head = std::max(head, v.level + 1);
    }
  tp.head_levels = head;

  auto residue_slot = [&](Vertex t, std::size_t r) -> TailSlot {
    std::size_t l = head + ((r + period - head % period) % period);
    std::size_t c = lab.at(t, l);
    if (lab.infinite[c]) return {TailSlot::Kind::infinite, inf_index.at(c), 0};
    // The copy holding t@l is a translate of one anchored on the first period.
    const auto& mem = lab.members[c];
    std::size_t anchor = mem.front().level;
    for (const VertexRef& v : mem) anchor = std::min(anchor, v.level);
    if (anchor < n0) consistency_failure("head component above the head region");
    std::size_t back = ((anchor - n0) / period) * period;
    auto it = template_of.find(lab.at(t, l - back));
    if (it == template_of.end()) consistency_failure("tail vertex outside every eventual component");
    return {TailSlot::Kind::instance, it->second, l - anchor};
  };
  tp.residue_slots.resize(period * nt);
  for (std::size_t r = 0; r < period; ++r)
    for (Vertex t = 0; t < nt; ++t) tp.residue_slots[r * nt + t] = residue_slot(t, r);

  std::map<std::size_t, std::size_t> head_index;
  tp.head_slots.resize(head * nt);
  for (std::size_t l = 0; l < head; ++l)
    for (Vertex t = 0; t < nt; ++t) {
      std::size_t c = lab.at(t, l);
      TailSlot s;
      if (lab.infinite[c]) {
        s = {TailSlot::Kind::infinite, inf_index.at(c), 0};
      } else {
        const auto& mem = lab.members[c];
        std::size_t anchor = mem.front().level;
        for (const VertexRef& v : mem) anchor = std::min(anchor, v.level);
        bool is_copy = false;
        if (anchor >= n0) {
          TailSlot rs = tp.residue_slots[(l % period) * nt + t];
          if (rs.kind == TailSlot::Kind::instance && l >= rs.anchor && l - rs.anchor == anchor) {
            s = {TailSlot::Kind::instance, rs.index, anchor};
            is_copy = true;
          }
        }
        if (!is_copy) {
          auto [it, fresh] = head_index.insert({c, tp.head_components.size()});
          if (fresh) {
            auto sorted = mem;
            std::sort(sorted.begin(), sorted.end());
            tp.head_components.push_back(std::move(sorted));
          }
          s = {TailSlot::Kind::head, it->second, 0};
        }
      }
      tp.head_slots[l * nt + t] = s;
    }

  // Condensation edges between eventual descriptors, read on one period of
  // the periodic region.
  std::set<std::pair<std::size_t, std::size_t>> dag;
  for (std::size_t l = head; l < head + period; ++l) {
    auto descriptor = [&](Vertex t, std::size_t level) {
      TailSlot s = tp.locate(t, level);
      return s.index;
    };
    for (const Edge& e : p.block_edges) {
      std::size_t a = descriptor(e.tail, l), b = descriptor(e.head, l);
      if (a != b) dag.insert({a, b});
    }
    for (const BlockRule& r : p.block_rules) {
      long target = static_cast<long>(l) + r.offset;
      if (target < static_cast<long>(head)) continue;
      std::size_t a = descriptor(r.from, l), b = descriptor(r.to, static_cast<std::size_t>(target));
      if (a != b) dag.insert({a, b});
    }
  }
  tp.eventual_dag.assign(dag.begin(), dag.end());
  return tp;
}

}  // namespace

std::size_t TailPattern::infinite_count() const {
  std::size_t n = 0;
  while (n < eventual.size() && eventual[n].infinite) ++n;
  return n;
}

TailSlot TailPattern::locate(Vertex t, std::size_t level) const {
  if (level < head_levels) return head_slots[level * block_size + t];
  TailSlot s = residue_slots[(level % period) * block_size + t];
  if (s.kind == TailSlot::Kind::instance) s.anchor = level - s.anchor;
  return s;
}

std::size_t TailPattern::shifted(std::size_t e, std::size_t n) const {
  std::vector<std::pair<Vertex, std::size_t>> want;
  for (auto [t, r] : eventual.at(e).residues)
    want.push_back({t, (r + period - n % period) % period});
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < infinite_count(); ++i)
    if (eventual[i].residues == want) return i;
  consistency_failure("shifted infinite component not in the pattern");
}

bool TailPattern::in_living_component(std::size_t e, std::size_t n, VertexRef v) const {
  if (v.core || v.level < n) return false;
  TailSlot s = locate(v.index, v.level - n);
  return s.kind == TailSlot::Kind::infinite && s.index == shifted(e, n);
}

std::vector<VertexRef> TailPattern::members(const TailSlot& slot, std::size_t n,
                                            std::size_t levels) const {
  std::vector<VertexRef> out;
  switch (slot.kind) {
    case TailSlot::Kind::infinite:
      for (std::size_t l = n; l < levels; ++l)
        for (Vertex t = 0; t < block_size; ++t)
          if (locate(t, l - n) == slot) out.push_back(VertexRef::of_block(t, l));
      break;
    case TailSlot::Kind::instance:
      for (auto [t, off] : eventual.at(slot.index).cells)
        if (slot.anchor + off + n < levels) out.push_back(VertexRef::of_block(t, slot.anchor + off + n));
      break;
    case TailSlot::Kind::head:
      for (const VertexRef& v : head_components.at(slot.index))
        if (v.level + n < levels) out.push_back(VertexRef::of_block(v.index, v.level + n));
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_infinite_components(const Presentation& p) {
  const std::size_t nt = p.block_size();
  struct Arc {
    Vertex from, to;
    long weight;
  };
  std::vector<Arc> arcs;
  for (const Edge& e : p.block_edges) arcs.push_back({e.tail, e.head, 0});
  for (const BlockRule& r : p.block_rules) arcs.push_back({r.from, r.to, r.offset});

  std::set<Edge> simple;
  for (const Arc& a : arcs)
    if (a.from != a.to) simple.insert({a.from, a.to});
  FiniteDigraph g(nt, std::vector<Edge>(simple.begin(), simple.end()));
  Condensation c = strong_components(g);

  std::size_t total = 0;
  for (std::size_t s = 0; s < c.size(); ++s) {
    std::vector<Arc> inside;
    for (const Arc& a : arcs)
      if (c.component_of[a.from] == s && c.component_of[a.to] == s) inside.push_back(a);
    if (inside.empty()) continue;
    // Potentials along a BFS tree; discrepancies generate the cycle weights.
    const auto& verts = c.components[s];
    std::map<Vertex, long> phi{{verts.front(), 0}};
    std::vector<Vertex> queue{verts.front()};
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (const Arc& a : inside)
        if (a.from == queue[i] && !phi.count(a.to)) {
          phi[a.to] = phi[queue[i]] + a.weight;
          queue.push_back(a.to);
        }
    long g_s = 0;
    for (const Arc& a : inside) g_s = std::gcd(g_s, std::abs(phi[a.from] + a.weight - phi[a.to]));
    if (g_s == 0) continue;
    // Bellman-Ford detects a cycle of negative weight (and, negated, of
    // positive weight).
    auto has_cycle_below_zero = [&](long sign) {
      std::map<Vertex, long> dist;
      for (Vertex v : verts) dist[v] = 0;
      for (std::size_t round = 0; round <= verts.size(); ++round) {
        bool changed = false;
        for (const Arc& a : inside) {
          long cand = dist[a.from] + sign * a.weight;
          if (cand < dist[a.to]) {
            dist[a.to] = cand;
            changed = true;
          }
        }
        if (!changed) return false;
      }
      return true;
    };
    if (has_cycle_below_zero(1) && has_cycle_below_zero(-1)) total += static_cast<std::size_t>(g_s);
  }
  return total;
}

TailPattern tail_stabilization(const Presentation& p, const Budget& budget) {
  require_valid(p);
  Limits lim;
  lim.nt = p.block_size();
  lim.k = p.span;
  lim.p_max = budget.max_period ? budget.max_period : 2 * lim.nt * lim.k;
  lim.n_max = budget.max_onset ? budget.max_onset : 4 * lim.nt * lim.k;
  lim.margin0 = 2 * lim.nt * lim.k * (lim.nt + 1) + 4 * lim.k + 4;
  lim.margin_max = budget.max_margin ? budget.max_margin : 16 * lim.margin0;

  // The labelling on the checked levels must not change when the truncation
  // margin doubles; components reaching into the margin are otherwise
  // artifacts of the cut.
  const std::size_t high = lim.high();
  std::size_t margin = std::min(lim.margin0, lim.margin_max);
  Labelling lab = label_tail(p, high, high + margin);
  for (;;) {
    if (2 * margin > lim.margin_max)
      throw BudgetExceeded("tail components did not settle within a margin of " +
                           std::to_string(lim.margin_max) + " levels");
    Labelling wider = label_tail(p, high, high + 2 * margin);
    if (same_partition(lab, wider)) break;
    margin *= 2;
    lab = std::move(wider);
  }

  for (std::size_t period = 1; period <= lim.p_max; ++period) {
    std::size_t w = lim.window(period);
    for (std::size_t n0 = 0; n0 <= lim.n_max; ++n0) {
      if (!shift_invariant(lab, lim.nt, n0, period, w)) continue;
      TailPattern tp = build_pattern(p, lab, n0, period, w, margin);
      std::size_t expected = count_infinite_components(p);
      if (tp.infinite_count() != expected)
        consistency_failure("pattern has " + std::to_string(tp.infinite_count()) +
                            " infinite components, voltage analysis gives " +
                            std::to_string(expected));
      return tp;
    }
  }
  throw BudgetExceeded("no tail period up to " + std::to_string(lim.p_max) +
                       " with onset up to " + std::to_string(lim.n_max));
}

}  // namespace endspace
