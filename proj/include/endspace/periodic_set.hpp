#pragma once

// Eventually periodic vertex sets of a presented digraph, and separations
// built from them.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "endspace/presentation.hpp"

namespace endspace {

/// A set of vertices given by a core part, an explicit part on the levels
/// below base(), and a pattern over (block vertex, level mod period()) on
/// all levels from base() on.
class PeriodicSet {
 public:
  PeriodicSet() = default;
  PeriodicSet(std::size_t core_size, std::size_t block_size);

  static PeriodicSet everything(std::size_t core_size, std::size_t block_size);
  static PeriodicSet of_members(std::size_t core_size, std::size_t block_size,
                                const std::vector<VertexRef>& members);
  /// Block vertices t@n with n >= from_level and (t, n mod period) listed.
  static PeriodicSet of_residues(std::size_t core_size, std::size_t block_size,
                                 std::size_t period,
                                 const std::vector<std::pair<Vertex, std::size_t>>& residues,
                                 std::size_t from_level = 0);
  /// Samples `member` on the core, on the levels below base and on one
  /// period from base; membership above base + period is extrapolated.
  static PeriodicSet sample(std::size_t core_size, std::size_t block_size,
                            std::size_t base, std::size_t period,
                            const std::function<bool(VertexRef)>& member);

  std::size_t core_size() const noexcept { return core_.size(); }
  std::size_t block_size() const noexcept { return block_size_; }
  std::size_t base() const noexcept { return base_; }
  std::size_t period() const noexcept { return period_; }

  bool contains(VertexRef v) const;
  bool empty() const;
  bool is_finite() const;
  /// All members; throws Error(invalid_argument) if the set is infinite.
  std::vector<VertexRef> finite_members() const;
  std::vector<VertexRef> members_below(std::size_t levels) const;
  /// Block vertices of the periodic part as (t, residue mod period()).
  std::vector<std::pair<Vertex, std::size_t>> pattern() const;
  /// Whether some block vertex t appears at infinitely many levels.
  bool repeats(Vertex t) const;

  PeriodicSet united(const PeriodicSet& o) const;
  PeriodicSet intersected(const PeriodicSet& o) const;
  PeriodicSet minus(const PeriodicSet& o) const;
  PeriodicSet complement() const;
  bool subset_of(const PeriodicSet& o) const;

  /// Same set re-expressed with base >= b and period a multiple of q.
  PeriodicSet aligned(std::size_t b, std::size_t q) const;

  friend bool operator==(const PeriodicSet& a, const PeriodicSet& b);

 private:
  void normalize();
  template <class Op>
  PeriodicSet combine(const PeriodicSet& o, Op op) const;

  std::size_t block_size_ = 0;
  std::vector<bool> core_;
  std::size_t base_ = 0;
  std::vector<bool> explicit_;  // base_ * block_size_, row-major by level
  std::size_t period_ = 1;
  std::vector<bool> pattern_;   // period_ * block_size_, row r = levels = r mod period
};

/// A separation (A, B) of the presented digraph with periodic sides.
struct PresentedSeparation {
  PeriodicSet side_a;
  PeriodicSet side_b;

  friend bool operator==(const PresentedSeparation&, const PresentedSeparation&) = default;
};

/// Exact check: A and B cover V, A and B meet in a finite set, and no edge
/// of the infinite digraph runs from B - A to A - B.
bool is_separation(const Presentation& p, const PresentedSeparation& s);
/// Sorted separator; throws if it is infinite.
std::vector<VertexRef> separator(const PresentedSeparation& s);
bool separation_leq(const PresentedSeparation& s1, const PresentedSeparation& s2);
PresentedSeparation sep_sup(const PresentedSeparation& s1, const PresentedSeparation& s2);
PresentedSeparation sep_inf(const PresentedSeparation& s1, const PresentedSeparation& s2);
/// (B, A): a separation of the reverse digraph.
PresentedSeparation swapped(const PresentedSeparation& s);

}  // namespace endspace
