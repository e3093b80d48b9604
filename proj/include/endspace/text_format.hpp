#pragma once

// Line-oriented presentation text format.
//
//   # comment
//   core: v w              core labels (section optional)
//   block: top bottom      block labels (required)
//   span: 1                maximal rule offset (default 1)
//   set top: top@*         named vertex set, see parse_vertex_set
//   F.v -> F.w             core edge
//   bottom -> top          block edge inside every level
//   top -> top @ +1        block rule, offsets +d or -d with d <= span
//   F.v -> top @0          attach edge to level 0 (either direction)
//   F.v -> top @*          cofinal rule, one edge per level
//
// Headers precede edge lines. Unqualified names resolve to block labels
// first, then to core labels.

#include <string>
#include <string_view>
#include <vector>

#include "endspace/periodic_set.hpp"
#include "endspace/presentation.hpp"

namespace endspace {

/// Parses and validates. Throws ParseError whose line/column locate the
/// offending token (validation errors point at the rule's line).
Presentation parse_presentation(std::string_view text);

/// Canonical text; parse_presentation(serialize_presentation(p)) == p.
std::string serialize_presentation(const Presentation& p);

/// One vertex set, given as whitespace- or comma-separated items:
///   all        every vertex          F.x     a core vertex
///   t@*        t on every level      t@n     the single vertex t@n
///   t@r%q      t on levels = r mod q (0 <= r < q)
///   t@*:N, t@r%q:N   as above, restricted to levels >= N
///   NAME       a named set of p      t       same as t@*
/// Throws ParseError with the column of the bad item.
PeriodicSet parse_vertex_set(const Presentation& p, std::string_view spec);

/// A family of sets: each entry is a vertex-set spec; entries may also
/// contain several specs separated by ';'.
std::vector<PeriodicSet> parse_vertex_family(const Presentation& p,
                                             const std::vector<std::string>& specs);

/// Text form of a set in the spec syntax above (round trips through
/// parse_vertex_set).
std::string describe_vertex_set(const Presentation& p, const PeriodicSet& s);

}  // namespace endspace
