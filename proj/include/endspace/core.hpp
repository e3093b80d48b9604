#pragma once

// Finite digraph engine: strong components, bundles, separations,
// disjoint-path fans and arborescences over dense vertex ids.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace endspace {

using Vertex = std::uint32_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

struct Edge {
  Vertex tail = 0;
  Vertex head = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;
using VertexMask = std::vector<bool>;
using Path = std::vector<Vertex>;

VertexSet normalized(VertexSet s);
VertexMask to_mask(std::size_t n, std::span<const Vertex> s);
VertexSet from_mask(const VertexMask& m);

/// Loopless simple digraph on vertices 0..size()-1.
///
/// Edges are stored sorted by (tail, head); adjacency lists are sorted by id,
/// which fixes every tie-break in the algorithms below.
class FiniteDigraph {
 public:
  FiniteDigraph() = default;

  /// Throws Error(invalid_argument) on loops, duplicate edges or endpoints
  /// out of range. An empty label list means "use decimal ids".
  FiniteDigraph(std::size_t n, std::vector<Edge> edges,
                std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Vertex> out_neighbours(Vertex v) const;
  std::span<const Vertex> in_neighbours(Vertex v) const;
  bool has_edge(Vertex from, Vertex to) const;

  std::string label(Vertex v) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  FiniteDigraph reversed() const;

  /// Subdigraph induced by `keep`, renumbered in increasing id order.
  FiniteDigraph induced(std::span<const Vertex> keep) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offset_;
  std::vector<Vertex> out_;
  std::vector<std::size_t> in_offset_;
  std::vector<Vertex> in_;
  std::vector<std::string> labels_;
};

/// Strong components numbered in topological order of the condensation
/// (sources first), ties broken by the smallest contained vertex id.
struct Condensation {
  std::vector<std::size_t> component_of;  // npos for removed vertices
  std::vector<VertexSet> components;
  std::vector<std::pair<std::size_t, std::size_t>> dag_edges;  // sorted

  std::size_t size() const noexcept { return components.size(); }
};

Condensation strong_components(const FiniteDigraph& g);

/// Strong components of g minus the vertices flagged in `removed`.
Condensation strong_components(const FiniteDigraph& g,
                               const VertexMask& removed);

/// Vertices reachable from `sources` in g minus `removed` (sources included
/// unless removed).
VertexMask reachable(const FiniteDigraph& g, std::span<const Vertex> sources,
                     const VertexMask& removed, bool reverse = false);

struct Bundle {
  enum class Kind { component_component, vertex_component, component_vertex };

  Kind kind = Kind::component_component;
  // component_component: (component, component); vertex_component:
  // (vertex, component); component_vertex: (component, vertex).
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<Edge> edges;  // sorted, nonempty
};

/// All nonempty bundles of g - x, component ids as in
/// strong_components(g, to_mask(x)). Sorted by (kind, first, second).
std::vector<Bundle> bundles(const FiniteDigraph& g, const VertexSet& x);
std::vector<Bundle> bundles(const FiniteDigraph& g, const VertexMask& x,
                            const Condensation& c);

struct Separation {
  VertexSet side_a;
  VertexSet side_b;

  friend bool operator==(const Separation&, const Separation&) = default;
};

bool is_separation(const FiniteDigraph& g, const Separation& s);
VertexSet separator(const Separation& s);
/// (A1,B1) <= (A2,B2) iff A1 is a subset of A2 and B2 of B1.
bool separation_leq(const Separation& s1, const Separation& s2);
Separation sep_sup(const Separation& s1, const Separation& s2);
Separation sep_inf(const Separation& s1, const Separation& s2);
/// As above; aborts if an input or the result is not a separation of g.
Separation sep_sup(const FiniteDigraph& g, const Separation& s1,
                   const Separation& s2);
Separation sep_inf(const FiniteDigraph& g, const Separation& s1,
                   const Separation& s2);

struct FanResult {
  std::size_t count = 0;
  std::vector<Path> paths;  // v..b paths, or b..v paths when reversed
  VertexSet min_cut;        // |min_cut| == count, v never in it
};

/// Maximum family of v-b paths pairwise meeting only in v, each meeting b
/// only in its last vertex. With `reverse`, b-v paths instead.
FanResult max_disjoint_fan(const FiniteDigraph& g, Vertex v,
                           const VertexSet& b, bool reverse = false);
FanResult max_disjoint_fan(const FiniteDigraph& g, Vertex v,
                           const VertexSet& b, bool reverse,
                           const VertexMask& removed);

/// Rooted tree whose edges point away from the root, or towards it when
/// `reverse` is set. parent[v] == npos for the root and for vertices not in
/// the tree.
struct Arborescence {
  Vertex root = 0;
  bool reverse = false;
  std::vector<std::size_t> parent;
  std::vector<std::size_t> depth;  // npos outside the tree

  bool contains(Vertex v) const;
  /// v <=_T w: the tree contains a directed path from v to w.
  bool tree_leq(Vertex v, Vertex w) const;
  /// Vertices w with v <=_T w.
  VertexSet up_closure(Vertex v) const;
  /// Tree path between the root and v, in edge direction.
  Path root_path(Vertex v) const;
  std::vector<VertexSet> children() const;
};

/// Breadth-first, smallest id first. Throws Error(unreachable_vertex) naming
/// the smallest vertex not reached.
Arborescence spanning_arborescence(const FiniteDigraph& g, Vertex root,
                                   bool reverse = false);

/// Breadth-first arborescence of the part reachable from root in g - removed.
Arborescence bfs_arborescence(const FiniteDigraph& g, Vertex root, bool reverse,
                              const VertexMask& removed);

/// Checks the Arborescence invariants against g; an empty string means valid.
std::string check_arborescence(const FiniteDigraph& g, const Arborescence& t,
                               bool spanning);

}  // namespace endspace
