#pragma once

// Graphviz export of a truncation: strong components (or necklace beads) as
// clusters, ends as point nodes, limit edges dashed.

#include <cstddef>
#include <string>

#include "endspace/ends.hpp"

namespace endspace {

struct DotOptions {
  std::size_t levels = 0;                 // 0: head plus two periods and the span
  const NecklacePrefix* necklace = nullptr;  // clusters become its beads
};

std::string to_dot(const Presentation& p, const TailPattern& tp, const DotOptions& o = {});

}  // namespace endspace
