#pragma once

// Finite encodings of eventually periodic infinite digraphs.
//
// A presentation has a finite core F and a block T repeated at levels
// 0, 1, 2, ...; block vertex t at level n is written t@n. Block rules
// (u, v, d) add the edges u@n -> v@(n+d) for every n with both ends present.
// Attach edges join F to level 0 only; cofinal rules join a core vertex to
// t@n for every n.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "endspace/core.hpp"

namespace endspace {

enum class LinkDirection { core_to_block, block_to_core };

struct BlockRule {
  Vertex from = 0;
  Vertex to = 0;
  int offset = 0;  // nonzero, |offset| <= span

  friend auto operator<=>(const BlockRule&, const BlockRule&) = default;
};

struct CoreLink {
  Vertex core = 0;
  Vertex block = 0;
  LinkDirection direction = LinkDirection::core_to_block;

  friend auto operator<=>(const CoreLink&, const CoreLink&) = default;
};

/// Named vertex-set specification carried along with a presentation, used by
/// `--u NAME` on the command line. `spec` uses the UFamily syntax.
struct NamedSet {
  std::string name;
  std::string spec;

  friend auto operator<=>(const NamedSet&, const NamedSet&) = default;
};

struct Presentation {
  std::vector<std::string> core;
  std::vector<Edge> core_edges;
  std::vector<std::string> block;
  std::vector<Edge> block_edges;
  std::size_t span = 1;
  std::vector<BlockRule> block_rules;
  std::vector<CoreLink> attach_edges;
  std::vector<CoreLink> cofinal_rules;
  std::vector<NamedSet> named_sets;

  friend bool operator==(const Presentation&, const Presentation&) = default;

  std::size_t core_size() const noexcept { return core.size(); }
  std::size_t block_size() const noexcept { return block.size(); }
};

struct ValidationIssue {
  enum class Item {
    presentation,
    core_label,
    block_label,
    core_edge,
    block_edge,
    block_rule,
    attach_edge,
    cofinal_rule,
    named_set,
  };
  Item item = Item::presentation;
  std::size_t index = 0;
  std::string message;
};

std::vector<ValidationIssue> validate(const Presentation& p);
/// Throws Error(validation_error) carrying the first issue.
void require_valid(const Presentation& p);

/// A vertex of the presented digraph: a core vertex, or a block vertex at a
/// level.
struct VertexRef {
  bool core = false;
  Vertex index = 0;
  std::size_t level = 0;  // 0 for core vertices

  static VertexRef of_core(Vertex f) { return {true, f, 0}; }
  static VertexRef of_block(Vertex t, std::size_t level) { return {false, t, level}; }

  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

/// Ids in truncations: core vertices first, then t@n at |F| + n*|T| + t.
/// Stable in the number of levels.
Vertex vertex_id(const Presentation& p, VertexRef v);
VertexRef vertex_ref(const Presentation& p, Vertex id);
/// "F.<label>" or "<label>@<level>".
std::string vertex_name(const Presentation& p, VertexRef v);
std::string vertex_name(const Presentation& p, Vertex id);
std::optional<VertexRef> parse_vertex_name(const Presentation& p,
                                           std::string_view name);
std::optional<Vertex> find_core(const Presentation& p, std::string_view label);
std::optional<Vertex> find_block(const Presentation& p, std::string_view label);

/// Whether the infinite digraph has the edge a -> b.
bool has_edge(const Presentation& p, VertexRef a, VertexRef b);

/// Out- or in-neighbours of a block vertex among block vertices (core
/// neighbours excluded); levels below 0 are dropped.
std::vector<VertexRef> block_neighbours(const Presentation& p, VertexRef v,
                                        bool reverse);

/// D_m: the subdigraph induced by F and levels 0..m-1, labelled by
/// vertex_name.
FiniteDigraph truncate(const Presentation& p, std::size_t levels);

/// X_n = F together with levels 0..n-1, as truncation ids.
VertexSet exhaustion(const Presentation& p, std::size_t n);

/// Number of truncation vertices below level n: |X_n|.
std::size_t prefix_size(const Presentation& p, std::size_t n);

/// Presentation of the reverse digraph (every edge flipped).
Presentation reversed(const Presentation& p);

struct RayStep {
  Vertex block = 0;
  int level_delta = 0;

  friend auto operator<=>(const RayStep&, const RayStep&) = default;
};

/// Eventually periodic ray: the preperiod, then the cycle of steps forever.
/// The last preperiod vertex is a block vertex and the cycle returns to its
/// block vertex with a positive level gain, so the ray escapes every X_n.
/// A reverse ray lists its vertices in the order v0, v1, ... with edges
/// v(i+1) -> v(i).
struct RaySpec {
  std::vector<VertexRef> preperiod;
  std::vector<RayStep> cycle;
  bool reverse = false;

  friend bool operator==(const RaySpec&, const RaySpec&) = default;
};

/// Level gain of one cycle.
std::size_t cycle_gain(const RaySpec& r);
/// The first `count` vertices of the ray.
std::vector<VertexRef> ray_prefix(const RaySpec& r, std::size_t count);
/// Throws Error(validation_error) describing the first defect.
void validate_ray(const Presentation& p, const RaySpec& r);

}  // namespace endspace
