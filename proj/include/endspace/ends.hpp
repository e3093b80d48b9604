#pragma once

// Ends, closures of vertex-set families, necklaces and star-combs.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "endspace/periodic_set.hpp"
#include "endspace/presentation.hpp"
#include "endspace/tail_pattern.hpp"

namespace endspace {

using UFamily = std::vector<PeriodicSet>;

/// An end: the class of solid rays whose tails eventually lie in one
/// infinite tail component. Ids coincide with the infinite eventual indices.
struct End {
  std::size_t id = 0;
  std::size_t eventual_component = 0;
  RaySpec representative_ray;
};

std::vector<End> ends(const Presentation& p, const TailPattern& tp);

/// C(X_n, omega): the component of D - X_n holding the end.
struct LivingComponent {
  std::size_t end = 0;
  std::size_t exhaustion_index = 0;
  std::size_t tail_component = 0;  // infinite index in the tail pattern

  bool contains(const TailPattern& tp, VertexRef v) const;
  /// Members on the levels below `levels`.
  std::vector<VertexRef> members(const TailPattern& tp, std::size_t levels) const;
};

LivingComponent living_component(const TailPattern& tp, std::size_t n, const End& end);

/// Whether C(X_n, omega) meets every set of u for every n.
bool is_in_closure(const TailPattern& tp, const UFamily& u, const End& end);

/// Periodic necklace: bead j is `bead` shifted up by j * shift levels;
/// `forward` runs from bead 0 to bead 1 and `backward` from bead 1 to bead 0,
/// and their shifts join the later beads. Every bead lies in the tail
/// component of `end`.
struct Necklace {
  std::size_t end = 0;
  std::size_t shift = 0;
  std::vector<VertexRef> bead;
  std::vector<VertexRef> forward;
  std::vector<VertexRef> backward;
};

struct NecklacePrefix {
  std::size_t levels = 0;  // truncation depth holding the prefix
  std::vector<std::vector<VertexRef>> beads;
  std::vector<std::vector<VertexRef>> forward;
  std::vector<std::vector<VertexRef>> backward;
};

NecklacePrefix materialize(const Necklace& n, std::size_t beads);

/// Checks the inflated-symmetric-ray shape of a prefix in the presented
/// digraph, and that every bead meets every set of `attach` when given.
/// Returns an empty string when all checks pass.
std::string check_necklace(const Presentation& p, const NecklacePrefix& prefix,
                           const UFamily* attach = nullptr);

struct NoNecklace {
  std::string reason;
  std::optional<std::size_t> finite_set;  // index of a finite set of u
};

/// A necklace attached to u (every bead meets every set), or the reason
/// none exists. The prefix of `beads` beads is verified before returning.
std::variant<Necklace, NoNecklace> find_necklace(const Presentation& p, const TailPattern& tp,
                                                 const UFamily& u, std::size_t beads);

/// Necklace in the component of `end` whose bead 0 contains `required` and
/// meets every set of u, with shift a multiple of `shift_step` and at least
/// `min_shift`. Returns nothing when the search window is exhausted.
std::optional<Necklace> build_necklace(const Presentation& p, const TailPattern& tp,
                                       std::size_t end, const UFamily& u,
                                       const std::vector<VertexRef>& required,
                                       std::size_t min_shift, std::size_t shift_step,
                                       std::size_t exact_shift = 0);

struct StarComb {
  enum class Shape { star, comb };
  Shape shape = Shape::comb;
  bool reverse = false;
  /// Comb: spine from the root (edges point along it, or against it when
  /// reverse). Star: tree path between the root and the centre.
  std::vector<VertexRef> spine;
  VertexRef centre;
  /// Paths in edge direction. Forward comb: from a spine vertex to its
  /// tooth; reverse comb: from the tooth to a spine vertex. Forward star:
  /// from the centre to a leaf; reverse star: from a leaf to the centre.
  std::vector<std::vector<VertexRef>> teeth;
  std::vector<VertexRef> attachment;  // sorted
};

struct StarCombPair {
  std::size_t levels = 0;
  StarComb forward;
  StarComb backward;
  std::vector<VertexRef> shared;  // common attachment, sorted
};

/// Whether D is strongly connected, checked on two truncation windows.
bool is_strongly_connected(const Presentation& p, const TailPattern& tp);

/// A star or comb attached to U and a reverse star or reverse comb attached
/// to U with equal attachment sets of size `teeth`; U is the first infinite
/// set of u. Throws Error(invalid_argument) when D is not strongly
/// connected, BudgetExceeded when the windows run out.
StarCombPair star_comb(const Presentation& p, const TailPattern& tp, const UFamily& u,
                       std::size_t teeth);

/// Structural check of one star or comb in D_levels; empty string when valid.
std::string check_star_comb(const Presentation& p, std::size_t levels, const StarComb& s,
                            const PeriodicSet& u);

struct NotSolid {
  std::size_t witness = 0;  // exhaustion index at which no tail is in one component
};

/// The end containing the ray, or NotSolid.
std::variant<End, NotSolid> end_of_ray(const Presentation& p, const TailPattern& tp,
                                       const RaySpec& r);

}  // namespace endspace
