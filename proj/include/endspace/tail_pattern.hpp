#pragma once

// Stabilized strong-component structure of the tail.
//
// The tail is D - X_0: the block copies on levels 0, 1, ... without the core.
// For every n, D - X_n is the tail shifted up by n levels, so the strong
// components of every D - X_n are read off one certified pattern.

#include <cstddef>
#include <utility>
#include <vector>

#include "endspace/presentation.hpp"

namespace endspace {

/// Search limits. Zero selects the default derived from |T| and the span k.
struct Budget {
  std::size_t max_period = 0;  // default 2|T|k
  std::size_t max_onset = 0;   // default 4|T|k
  std::size_t max_margin = 0;  // default 16 times the initial margin
};

struct EventualComponent {
  bool infinite = false;
  /// Infinite: the component holds t@l for every l >= onset with
  /// (t, l mod period) listed.
  std::vector<std::pair<Vertex, std::size_t>> residues;
  /// Finite: one copy for each anchor a >= onset with a = anchor_residue mod
  /// period, holding t@(a + offset) for each listed (t, offset).
  std::size_t anchor_residue = 0;
  std::vector<std::pair<Vertex, std::size_t>> cells;
  /// Infinite: walk_from and walk_from shifted walk_shift levels up lie in
  /// the same strong component (a closed walk crossing level boundaries).
  VertexRef walk_from;
  std::size_t walk_shift = 0;
};

struct TailSlot {
  enum class Kind { infinite, instance, head };
  Kind kind = Kind::head;
  std::size_t index = 0;   // eventual index (infinite, instance) or head index
  std::size_t anchor = 0;  // instance anchor level

  friend bool operator==(const TailSlot&, const TailSlot&) = default;
};

struct TailPattern {
  std::size_t block_size = 0;
  std::size_t span = 1;
  std::size_t period = 1;
  std::size_t onset = 0;
  /// Levels below head_levels are described by head_slots; above, every
  /// block vertex is in an infinite component or a finite-template copy.
  std::size_t head_levels = 0;
  std::size_t margin = 0;
  std::size_t window = 0;

  std::vector<EventualComponent> eventual;  // infinite ones first
  std::vector<std::pair<std::size_t, std::size_t>> eventual_dag;
  std::vector<std::vector<VertexRef>> head_components;
  std::vector<TailSlot> head_slots;  // row-major by level, head_levels * |T|
  /// Slot of t@l for l >= head_levels, indexed by (l mod period) * |T| + t;
  /// for instances `anchor` holds the level offset of t within the copy.
  std::vector<TailSlot> residue_slots;

  std::size_t infinite_count() const;
  /// Component of t@level in the tail.
  TailSlot locate(Vertex t, std::size_t level) const;
  /// Index of the infinite tail component that becomes, after shifting by n
  /// levels, the component of D - X_n holding the end of component e.
  std::size_t shifted(std::size_t e, std::size_t n) const;
  /// Whether v lies in the component of D - X_n that holds the end of the
  /// infinite eventual component e.
  bool in_living_component(std::size_t e, std::size_t n, VertexRef v) const;
  /// Members of a component of D - X_n given by its tail slot, restricted to
  /// levels below `levels` (absolute levels).
  std::vector<VertexRef> members(const TailSlot& slot, std::size_t n,
                                 std::size_t levels) const;
};

/// Searches period p = 1, 2, ... and onset n0 = 0, 1, ... for a pattern
/// and certifies it on a window of levels. Throws BudgetExceeded when no
/// pattern is found within the limits.
TailPattern tail_stabilization(const Presentation& p, const Budget& budget = {});

/// Number of infinite tail components, derived from the static voltage
/// digraph on T: each strong component of it whose cycles take both signs
/// contributes the gcd of its cycle weights.
std::size_t count_infinite_components(const Presentation& p);

}  // namespace endspace
