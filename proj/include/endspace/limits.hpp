#pragma once

// Limit edges between ends, and between core vertices and ends; their
// necklace witnesses; the order on ends.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "endspace/ends.hpp"

namespace endspace {

struct LimitEdge {
  enum class Kind { end_end, vertex_end, end_vertex };
  Kind kind = Kind::end_end;
  /// end_end: tail end and head end. vertex_end: `first` is the core
  /// vertex, `second` the end. end_vertex: `first` the end, `second` the
  /// core vertex.
  std::size_t first = 0;
  std::size_t second = 0;
  /// The rule realizing the edges in the periodic region: a block edge, a
  /// block rule or a cofinal rule, by index into the presentation.
  enum class Source { block_edge, block_rule, cofinal_rule };
  Source source = Source::block_edge;
  std::size_t source_index = 0;

  friend bool operator==(const LimitEdge&, const LimitEdge&) = default;
};

/// All limit edges, sorted: end-end pairs, then vertex-end, then end-vertex.
std::vector<LimitEdge> limit_edges(const Presentation& p, const TailPattern& tp);

/// Human-readable endpoints, e.g. "end 1 -> end 0" or "F.v -> end 0".
std::string describe(const Presentation& p, const LimitEdge& e);

/// End-end: `first` represents the tail end, `second` the head end, and bead
/// i of the first sends an edge to bead i of the second. Vertex-end: `first`
/// only, and the core vertex sends (receives) an edge to (from) every bead.
struct LimitWitness {
  LimitEdge edge;
  Necklace first;
  std::optional<Necklace> second;
};

/// Throws Error(invalid_argument) when `e` is not a limit edge of p.
LimitWitness witness_necklaces(const Presentation& p, const TailPattern& tp, const LimitEdge& e);

/// Checks the first `beads` beads of a witness; empty string when valid.
std::string check_limit_witness(const Presentation& p, const LimitWitness& w, std::size_t beads);

struct EndOrder {
  bool leq = false;
  /// When leq and the ends differ: a tail path from the first end's
  /// component to the second's; its translates by `shift` levels are
  /// pairwise disjoint and give infinitely many disjoint paths.
  std::vector<VertexRef> path;
  std::size_t shift = 0;
  /// When not leq: the eventual components reachable from the first end,
  /// a set closed under the tail condensation that excludes the second.
  std::vector<std::size_t> closed;
};

EndOrder end_order_leq(const Presentation& p, const TailPattern& tp, std::size_t first,
                       std::size_t second);

}  // namespace endspace
