// Menger fans by unit vertex-capacity max flow.
//
// Network: every vertex x becomes x_in -> x_out with capacity 1 (the fan
// centre gets no such arc, flow leaves from v_out). Digraph edges become
// u_out -> w_in with unbounded capacity, so every finite cut consists of
// vertex arcs only. Targets feed the sink from x_in, which keeps targets off
// the interior of every path.

#include <algorithm>
#include <deque>

#include "endspace/core.hpp"
#include "endspace/error.hpp"

namespace endspace {

namespace {

constexpr int kUnbounded = 1 << 28;

struct Arc {
  std::size_t to;
  int cap;
  std::size_t rev;
  int orig;  // capacity at creation; 0 for residual twins
};

class Network {
 public:
  explicit Network(std::size_t nodes) : adj_(nodes) {}

  void add(std::size_t from, std::size_t to, int cap) {
    adj_[from].push_back({to, cap, adj_[to].size(), cap});
    adj_[to].push_back({from, 0, adj_[from].size() - 1, 0});
  }

  std::size_t max_flow(std::size_t s, std::size_t t) {
    std::size_t flow = 0;
    for (;;) {
      std::vector<std::pair<std::size_t, std::size_t>> via(adj_.size(), {npos, npos});
      std::deque<std::size_t> queue{s};
      via[s] = {s, npos};
      while (!queue.empty() && via[t].first == npos) {
        std::size_t x = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < adj_[x].size(); ++i) {
          const Arc& a = adj_[x][i];
          if (a.cap <= 0 || via[a.to].first != npos) continue;
          via[a.to] = {x, i};
          queue.push_back(a.to);
        }
      }
      if (via[t].first == npos) return flow;
      for (std::size_t y = t; y != s;) {
        auto [x, i] = via[y];
        Arc& a = adj_[x][i];
        a.cap -= 1;
        adj_[y][a.rev].cap += 1;
        y = x;
      }
      ++flow;
    }
  }

  std::vector<bool> residual_reach(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      std::size_t x = queue.front();
      queue.pop_front();
      for (const Arc& a : adj_[x])
        if (a.cap > 0 && !seen[a.to]) {
          seen[a.to] = true;
          queue.push_back(a.to);
        }
    }
    return seen;
  }

  std::vector<Arc>& arcs(std::size_t x) { return adj_[x]; }

 private:
  std::vector<std::vector<Arc>> adj_;
};

FanResult forward_fan(const FiniteDigraph& g, Vertex v, const VertexSet& b,
                      const VertexMask& removed) {
  const std::size_t n = g.size();
  auto in = [](std::size_t x) { return 2 * x; };
  auto out = [](std::size_t x) { return 2 * x + 1; };
  const std::size_t sink = 2 * n;
  VertexMask target = to_mask(n, b);

  Network net(2 * n + 1);
  for (Vertex x = 0; x < n; ++x) {
    if (removed[x] || x == v) continue;
    if (target[x]) {
      net.add(in(x), sink, 1);
    } else {
      net.add(in(x), out(x), 1);
    }
  }
  for (const Edge& e : g.edges()) {
    if (removed[e.tail] || removed[e.head]) continue;
    if (e.head == v) continue;
    if (e.tail != v && target[e.tail]) continue;
    net.add(out(e.tail), in(e.head), kUnbounded);
  }

  FanResult result;
  result.count = net.max_flow(out(v), sink);

  std::vector<bool> reach = net.residual_reach(out(v));
  for (Vertex x = 0; x < n; ++x) {
    if (removed[x] || x == v || !reach[in(x)]) continue;
    bool cut = target[x] ? !reach[sink] : !reach[out(x)];
    if (cut) result.min_cut.push_back(x);
  }

  // Decompose the flow along arcs that carry it (orig - cap > 0).
  for (std::size_t k = 0; k < result.count; ++k) {
    Path path{v};
    std::size_t node = out(v);
    while (node != sink) {
      bool moved = false;
      for (Arc& a : net.arcs(node)) {
        if (a.orig <= 0 || a.orig - a.cap <= 0) continue;
        a.cap += 1;
        node = a.to;
        if (node != sink && node % 2 == 0) path.push_back(static_cast<Vertex>(node / 2));
        moved = true;
        break;
      }
      ENDSPACE_ENSURE(moved);
    }
    result.paths.push_back(std::move(path));
  }
  std::sort(result.paths.begin(), result.paths.end());
  ENDSPACE_ENSURE(result.min_cut.size() == result.count);
  return result;
}

}  // namespace

FanResult max_disjoint_fan(const FiniteDigraph& g, Vertex v, const VertexSet& b,
                           bool reverse) {
  return max_disjoint_fan(g, v, b, reverse, VertexMask(g.size(), false));
}

FanResult max_disjoint_fan(const FiniteDigraph& g, Vertex v, const VertexSet& b,
                           bool reverse, const VertexMask& removed) {
  if (v >= g.size())
    throw Error(ErrorCode::invalid_argument, "fan centre is not a vertex");
  if (std::binary_search(b.begin(), b.end(), v))
    throw Error(ErrorCode::invalid_argument, "fan centre lies in the target set");
  FanResult r;
  if (b.empty() || removed[v]) return r;
  VertexSet targets;
  for (Vertex x : b)
    if (!removed[x]) targets.push_back(x);
  if (targets.empty()) return r;
  if (!reverse) return forward_fan(g, v, targets, removed);
  r = forward_fan(g.reversed(), v, targets, removed);
  for (Path& p : r.paths) std::reverse(p.begin(), p.end());
  std::sort(r.paths.begin(), r.paths.end());
  return r;
}

}  // namespace endspace
