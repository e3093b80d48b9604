#pragma once

// U-ranks with ordinal values below omega^4, the necklace/rank dichotomy, and
// acyclic vertex partitions of rankable digraphs.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "endspace/ends.hpp"

namespace endspace {

/// omega^3 * c[0] + omega^2 * c[1] + omega * c[2] + c[3].
struct OrdinalCNF {
  std::array<std::uint64_t, 4> c{};

  static OrdinalCNF finite(std::uint64_t n) { return {{0, 0, 0, n}}; }
  /// The largest representable budget: omega^4 is not representable, so
  /// the default budget admits every value.
  static OrdinalCNF max();
  OrdinalCNF successor() const;
  bool is_zero() const { return c == std::array<std::uint64_t, 4>{}; }

  friend auto operator<=>(const OrdinalCNF&, const OrdinalCNF&) = default;
};

/// "0", "3", "w", "w^2*2 + w + 1".
std::string to_string(const OrdinalCNF& o);
/// Inverse of to_string; also accepts "omega" for "w". Throws ParseError.
OrdinalCNF parse_ordinal(std::string_view text);

/// One node of a rank certificate. The node stands for a digraph (the whole
/// presented digraph, one component, or the family of all copies of one
/// finite component template). Rank-0 nodes name a set with finite
/// intersection; other nodes list X and one child per component kind of the
/// digraph minus X.
struct RankNode {
  enum class Kind { digraph, end_component, head_component, template_copies };
  Kind kind = Kind::digraph;
  std::size_t index = 0;  // end, head component or template index
  std::size_t cut = 0;    // the node's digraph is a component of D - X_cut
  std::string descriptor;
  OrdinalCNF rank;
  std::vector<VertexRef> x;
  std::optional<std::size_t> finite_set;
  std::vector<VertexRef> intersection;  // the finite intersection with that set
  std::vector<RankNode> children;
};

struct RankResult {
  OrdinalCNF rank;
  RankNode witness;
  /// Number of prefix cuts tried per node; the rank is exact within this
  /// search space.
  std::size_t cuts_tried = 0;
};

struct NoRank {
  Necklace necklace;
};

/// Exact U-rank of the presented digraph, or NoRank with a necklace
/// attached to u. Throws BudgetExceeded when the rank exceeds `budget`.
std::variant<RankResult, NoRank> u_rank(const Presentation& p, const TailPattern& tp,
                                        const UFamily& u,
                                        const OrdinalCNF& budget = OrdinalCNF::max());

/// U-rank of a finite digraph, each set given as vertex ids: 0 when u is
/// nonempty (every intersection is finite), otherwise 1 with X = V. Vertex
/// ids are reported as core references.
RankResult u_rank(const FiniteDigraph& g, const std::vector<VertexSet>& u);

/// Re-derives the components below every node of a presentation witness
/// and checks the rank inequalities; empty string when valid.
std::string check_rank_witness(const Presentation& p, const TailPattern& tp, const UFamily& u,
                               const RankResult& r);

struct DichotomyReport {
  bool conclusive = false;
  bool necklace_found = false;
  bool rank_found = false;
  std::optional<Necklace> necklace;
  std::optional<NoNecklace> no_necklace;
  std::optional<RankResult> rank;
  std::vector<std::string> log;
};

/// Runs find_necklace and u_rank; exactly one of them succeeds on every
/// conclusive run (a violation raises a consistency failure).
DichotomyReport dichotomy(const Presentation& p, const TailPattern& tp, const UFamily& u);

/// Acyclic classes: the vertices of X are singleton classes 0..|X|-1, and
/// class |X| + j holds the j-th vertex (by id) of every component of D - X.
struct DichromaticPartition {
  std::vector<VertexRef> singletons;
  std::size_t merged_classes = 0;
  std::size_t x_levels = 0;  // X = X_(x_levels)

  std::size_t class_count() const { return singletons.size() + merged_classes; }
};

/// Throws Error(invalid_argument) when D has no rank (it has an end).
DichromaticPartition dichromatic_partition(const Presentation& p, const TailPattern& tp);
std::size_t class_of(const Presentation& p, const TailPattern& tp, const DichromaticPartition& d,
                     VertexRef v);
/// Checks that every class induces an acyclic subdigraph of D_L for every
/// L <= depth; empty string when valid.
std::string verify_acyclic(const Presentation& p, const TailPattern& tp,
                           const DichromaticPartition& d, std::size_t depth);

}  // namespace endspace
