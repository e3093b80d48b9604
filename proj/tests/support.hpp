#pragma once

// Shared fixtures for the test suites: corpus access and small random
// digraphs with brute-force reference computations.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "endspace/core.hpp"
#include "endspace/presentation.hpp"
#include "endspace/tail_pattern.hpp"
#include "endspace/text_format.hpp"

#ifndef ENDSPACE_CORPUS_DIR
#error "ENDSPACE_CORPUS_DIR must name the corpus directory"
#endif

namespace endspace::testing {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path corpus_dir() { return ENDSPACE_CORPUS_DIR; }

/// Sorted paths of every corpus presentation.
inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".pres") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline Presentation load(const std::string& name) {
  return parse_presentation(read_file(corpus_dir() / (name + ".pres")));
}

struct Loaded {
  std::string name;
  Presentation p;
  TailPattern tp;
};

inline std::vector<Loaded> load_corpus() {
  std::vector<Loaded> out;
  for (const auto& path : corpus_files()) {
    Presentation p = parse_presentation(read_file(path));
    TailPattern tp = tail_stabilization(p);
    out.push_back({path.stem().string(), std::move(p), std::move(tp)});
  }
  return out;
}

/// Random simple digraph on n vertices, each ordered pair an edge with
/// probability `density`.
inline FiniteDigraph random_digraph(std::mt19937_64& rng, std::size_t n, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = 0; b < n; ++b)
      if (a != b && coin(rng)) edges.push_back({a, b});
  return FiniteDigraph(n, std::move(edges));
}

/// Transitive closure by repeated squaring of the adjacency relation;
/// reach[a][b] iff a path a -> ... -> b exists (reach[a][a] always).
inline std::vector<std::vector<bool>> transitive_closure(const FiniteDigraph& g,
                                                         const VertexMask& removed = {}) {
  const std::size_t n = g.size();
  auto gone = [&](Vertex v) { return !removed.empty() && removed[v]; };
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (Vertex v = 0; v < n; ++v)
    if (!gone(v)) r[v][v] = true;
  for (const Edge& e : g.edges())
    if (!gone(e.tail) && !gone(e.head)) r[e.tail][e.head] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 0; a < n; ++a)
      if (r[a][k])
        for (std::size_t b = 0; b < n; ++b)
          if (r[k][b]) r[a][b] = true;
  return r;
}

/// Mutual-reachability classes keyed by their smallest vertex.
inline std::vector<VertexSet> closure_components(const FiniteDigraph& g,
                                                 const VertexMask& removed = {}) {
  auto r = transitive_closure(g, removed);
  std::vector<VertexSet> out;
  std::vector<bool> seen(g.size(), false);
  for (Vertex a = 0; a < g.size(); ++a) {
    if (seen[a] || (!removed.empty() && removed[a])) continue;
    VertexSet c;
    for (Vertex b = a; b < g.size(); ++b)
      if (r[a][b] && r[b][a]) {
        c.push_back(b);
        seen[b] = true;
      }
    out.push_back(c);
  }
  return out;
}

}  // namespace endspace::testing
