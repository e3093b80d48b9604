#include <algorithm>
#include <deque>
#include <functional>
#include <queue>

#include "endspace/core.hpp"
#include "endspace/error.hpp"

namespace endspace {

VertexSet normalized(VertexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

VertexMask to_mask(std::size_t n, std::span<const Vertex> s) {
  VertexMask m(n, false);
  for (Vertex v : s) {
    if (v >= n) throw Error(ErrorCode::invalid_argument, "vertex id out of range");
    m[v] = true;
  }
  return m;
}

VertexSet from_mask(const VertexMask& m) {
  VertexSet s;
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m[v]) s.push_back(static_cast<Vertex>(v));
  return s;
}

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool by_head,
               std::vector<std::size_t>& offset, std::vector<Vertex>& adj) {
  offset.assign(n + 1, 0);
  for (const Edge& e : edges) ++offset[(by_head ? e.head : e.tail) + 1];
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] += offset[i];
  adj.assign(edges.size(), 0);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (const Edge& e : edges) {
    Vertex from = by_head ? e.head : e.tail;
    adj[fill[from]++] = by_head ? e.tail : e.head;
  }
  for (std::size_t v = 0; v < n; ++v)
    std::sort(adj.begin() + static_cast<std::ptrdiff_t>(offset[v]),
              adj.begin() + static_cast<std::ptrdiff_t>(offset[v + 1]));
}

}  // namespace

FiniteDigraph::FiniteDigraph(std::size_t n, std::vector<Edge> edges,
                             std::vector<std::string> labels)
    : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
  if (!labels_.empty() && labels_.size() != n_)
    throw Error(ErrorCode::invalid_argument, "label count differs from vertex count");
  for (const Edge& e : edges_) {
    if (e.tail >= n_ || e.head >= n_)
      throw Error(ErrorCode::invalid_argument, "edge endpoint out of range");
    if (e.tail == e.head)
      throw Error(ErrorCode::invalid_argument,
                  "loop at vertex " + std::to_string(e.tail));
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end())
    throw Error(ErrorCode::invalid_argument,
                "duplicate edge " + std::to_string(dup->tail) + "->" +
                    std::to_string(dup->head));
  build_csr(n_, edges_, false, out_offset_, out_);
  build_csr(n_, edges_, true, in_offset_, in_);
}

std::span<const Vertex> FiniteDigraph::out_neighbours(Vertex v) const {
  return {out_.data() + out_offset_[v], out_offset_[v + 1] - out_offset_[v]};
}

std::span<const Vertex> FiniteDigraph::in_neighbours(Vertex v) const {
  return {in_.data() + in_offset_[v], in_offset_[v + 1] - in_offset_[v]};
}

bool FiniteDigraph::has_edge(Vertex from, Vertex to) const {
  if (from >= n_ || to >= n_) return false;
  auto out = out_neighbours(from);
  return std::binary_search(out.begin(), out.end(), to);
}

std::string FiniteDigraph::label(Vertex v) const {
  if (labels_.empty()) return std::to_string(v);
  return labels_.at(v);
}

FiniteDigraph FiniteDigraph::reversed() const {
  std::vector<Edge> rev;
  rev.reserve(edges_.size());
  for (const Edge& e : edges_) rev.push_back({e.head, e.tail});
  return FiniteDigraph(n_, std::move(rev), labels_);
}

FiniteDigraph FiniteDigraph::induced(std::span<const Vertex> keep) const {
  std::vector<std::size_t> index(n_, npos);
  VertexSet kept(keep.begin(), keep.end());
  kept = normalized(std::move(kept));
  for (std::size_t i = 0; i < kept.size(); ++i) index[kept[i]] = i;
  std::vector<Edge> sub;
  for (const Edge& e : edges_)
    if (index[e.tail] != npos && index[e.head] != npos)
      sub.push_back({static_cast<Vertex>(index[e.tail]),
                     static_cast<Vertex>(index[e.head])});
  std::vector<std::string> sub_labels;
  if (!labels_.empty())
    for (Vertex v : kept) sub_labels.push_back(labels_[v]);
  return FiniteDigraph(kept.size(), std::move(sub), std::move(sub_labels));
}

Condensation strong_components(const FiniteDigraph& g) {
  return strong_components(g, VertexMask(g.size(), false));
}

Condensation strong_components(const FiniteDigraph& g,
                               const VertexMask& removed) {
  const std::size_t n = g.size();
  // Iterative Tarjan; raw component numbers come out in reverse topological
  // order and are renumbered below.
  std::vector<std::size_t> index(n, npos), low(n, 0), raw(n, npos);
  std::vector<bool> on_stack(n, false);
  std::vector<Vertex> stack;
  std::vector<std::pair<Vertex, std::size_t>> call;
  std::size_t counter = 0, raw_count = 0;

  for (Vertex s = 0; s < n; ++s) {
    if (removed[s] || index[s] != npos) continue;
    call.push_back({s, 0});
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = true;
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      auto out = g.out_neighbours(v);
      if (pos < out.size()) {
        Vertex w = out[pos++];
        if (removed[w]) continue;
        if (index[w] == npos) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        Vertex w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          raw[w] = raw_count;
        } while (w != v);
        ++raw_count;
      }
      Vertex done = v;
      call.pop_back();
      if (!call.empty()) {
        Vertex parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }

  std::vector<Vertex> min_vertex(raw_count, 0);
  std::vector<bool> seen(raw_count, false);
  for (Vertex v = 0; v < n; ++v) {
    if (raw[v] == npos || seen[raw[v]]) continue;
    seen[raw[v]] = true;
    min_vertex[raw[v]] = v;
  }
  std::vector<std::vector<std::size_t>> succ(raw_count);
  std::vector<std::size_t> indegree(raw_count, 0);
  for (const Edge& e : g.edges()) {
    if (raw[e.tail] == npos || raw[e.head] == npos) continue;
    if (raw[e.tail] != raw[e.head]) succ[raw[e.tail]].push_back(raw[e.head]);
  }
  for (auto& s : succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (std::size_t c : s) ++indegree[c];
  }

  using Item = std::pair<Vertex, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (std::size_t c = 0; c < raw_count; ++c)
    if (indegree[c] == 0) ready.push({min_vertex[c], c});
  std::vector<std::size_t> renumber(raw_count, npos);
  std::size_t next = 0;
  while (!ready.empty()) {
    std::size_t c = ready.top().second;
    ready.pop();
    renumber[c] = next++;
    for (std::size_t d : succ[c])
      if (--indegree[d] == 0) ready.push({min_vertex[d], d});
  }

  Condensation result;
  result.component_of.assign(n, npos);
  result.components.resize(raw_count);
  for (Vertex v = 0; v < n; ++v) {
    if (raw[v] == npos) continue;
    std::size_t c = renumber[raw[v]];
    result.component_of[v] = c;
    result.components[c].push_back(v);
  }
  for (std::size_t c = 0; c < raw_count; ++c)
    for (std::size_t d : succ[c])
      result.dag_edges.push_back({renumber[c], renumber[d]});
  std::sort(result.dag_edges.begin(), result.dag_edges.end());
  return result;
}

VertexMask reachable(const FiniteDigraph& g, std::span<const Vertex> sources,
                     const VertexMask& removed, bool reverse) {
  VertexMask seen(g.size(), false);
  std::deque<Vertex> queue;
  for (Vertex s : sources) {
    if (removed[s] || seen[s]) continue;
    seen[s] = true;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    auto next = reverse ? g.in_neighbours(v) : g.out_neighbours(v);
    for (Vertex w : next) {
      if (removed[w] || seen[w]) continue;
      seen[w] = true;
      queue.push_back(w);
    }
  }
  return seen;
}

std::vector<Bundle> bundles(const FiniteDigraph& g, const VertexSet& x) {
  VertexMask mask = to_mask(g.size(), x);
  return bundles(g, mask, strong_components(g, mask));
}

std::vector<Bundle> bundles(const FiniteDigraph& g, const VertexMask& x,
                            const Condensation& c) {
  std::vector<Bundle> out;
  auto key_of = [&](const Edge& e) -> std::pair<Bundle::Kind, std::pair<std::size_t, std::size_t>> {
    if (x[e.tail])
      return {Bundle::Kind::vertex_component, {e.tail, c.component_of[e.head]}};
    if (x[e.head])
      return {Bundle::Kind::component_vertex, {c.component_of[e.tail], e.head}};
    return {Bundle::Kind::component_component,
            {c.component_of[e.tail], c.component_of[e.head]}};
  };
  std::vector<std::pair<std::pair<Bundle::Kind, std::pair<std::size_t, std::size_t>>, Edge>> keyed;
  for (const Edge& e : g.edges()) {
    if (x[e.tail] && x[e.head]) continue;
    if (!x[e.tail] && !x[e.head] &&
        c.component_of[e.tail] == c.component_of[e.head])
      continue;
    keyed.push_back({key_of(e), e});
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size();) {
    Bundle b;
    b.kind = keyed[i].first.first;
    b.first = keyed[i].first.second.first;
    b.second = keyed[i].first.second.second;
    std::size_t j = i;
    while (j < keyed.size() && keyed[j].first == keyed[i].first)
      b.edges.push_back(keyed[j++].second);
    out.push_back(std::move(b));
    i = j;
  }
  return out;
}

bool Arborescence::contains(Vertex v) const {
  return v < depth.size() && depth[v] != npos;
}

bool Arborescence::tree_leq(Vertex v, Vertex w) const {
  if (!contains(v) || !contains(w)) return false;
  // Forward trees: v is an ancestor of w. Reverse trees: w is an ancestor of v.
  Vertex lo = reverse ? v : w, hi = reverse ? w : v;
  while (depth[lo] > depth[hi]) lo = static_cast<Vertex>(parent[lo]);
  return lo == hi;
}

VertexSet Arborescence::up_closure(Vertex v) const {
  VertexSet out;
  for (Vertex w = 0; w < depth.size(); ++w)
    if (tree_leq(v, w)) out.push_back(w);
  return out;
}

Path Arborescence::root_path(Vertex v) const {
  Path p;
  if (!contains(v)) return p;
  for (Vertex w = v;; w = static_cast<Vertex>(parent[w])) {
    p.push_back(w);
    if (w == root) break;
  }
  if (!reverse) std::reverse(p.begin(), p.end());
  return p;
}

std::vector<VertexSet> Arborescence::children() const {
  std::vector<VertexSet> ch(parent.size());
  for (Vertex v = 0; v < parent.size(); ++v)
    if (parent[v] != npos) ch[parent[v]].push_back(v);
  return ch;
}

Arborescence bfs_arborescence(const FiniteDigraph& g, Vertex root, bool reverse,
                              const VertexMask& removed) {
  Arborescence t;
  t.root = root;
  t.reverse = reverse;
  t.parent.assign(g.size(), npos);
  t.depth.assign(g.size(), npos);
  if (root >= g.size() || removed[root]) return t;
  std::deque<Vertex> queue{root};
  t.depth[root] = 0;
  while (!queue.empty()) {
    Vertex v = queue.front();
    queue.pop_front();
    auto next = reverse ? g.in_neighbours(v) : g.out_neighbours(v);
    for (Vertex w : next) {
      if (removed[w] || t.depth[w] != npos) continue;
      t.depth[w] = t.depth[v] + 1;
      t.parent[w] = v;
      queue.push_back(w);
    }
  }
  return t;
}

Arborescence spanning_arborescence(const FiniteDigraph& g, Vertex root,
                                   bool reverse) {
  if (g.size() == 0 || root >= g.size())
    throw Error(ErrorCode::invalid_argument, "root is not a vertex");
  Arborescence t = bfs_arborescence(g, root, reverse, VertexMask(g.size(), false));
  for (Vertex v = 0; v < g.size(); ++v)
    if (!t.contains(v))
      throw Error(ErrorCode::unreachable_vertex,
                  "vertex " + g.label(v) +
                      (reverse ? " does not reach the root" : " is unreachable from the root"));
  return t;
}

std::string check_arborescence(const FiniteDigraph& g, const Arborescence& t,
                               bool spanning) {
  if (t.parent.size() != g.size() || t.depth.size() != g.size())
    return "size mismatch";
  if (!t.contains(t.root) || t.depth[t.root] != 0 || t.parent[t.root] != npos)
    return "root malformed";
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!t.contains(v)) {
      if (spanning) return "vertex " + std::to_string(v) + " not spanned";
      if (t.parent[v] != npos) return "parent set outside tree";
      continue;
    }
    if (v == t.root) continue;
    std::size_t p = t.parent[v];
    if (p == npos || !t.contains(static_cast<Vertex>(p)))
      return "vertex " + std::to_string(v) + " lacks a parent in the tree";
    if (t.depth[v] != t.depth[p] + 1) return "depth inconsistent";
    bool edge = t.reverse ? g.has_edge(v, static_cast<Vertex>(p))
                          : g.has_edge(static_cast<Vertex>(p), v);
    if (!edge) return "parent edge missing at vertex " + std::to_string(v);
  }
  return {};
}

}  // namespace endspace
