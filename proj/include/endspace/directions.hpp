#pragma once

// Vertex- and edge-directions as threads along the exhaustion X_0, X_1, ...;
// the two bijection checks; pointing, domination and separation sequences.

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "endspace/limits.hpp"

namespace endspace {

/// One value f(X_n) of a thread: a strong component of D - X_n or a bundle,
/// recorded in the truncation D_levels of the thread set. Vertex and edge
/// lists are restricted to the levels below the set's `bound`.
struct ThreadChoice {
  bool is_bundle = false;
  std::size_t component = 0;  // component id in the condensation of D_levels - X_n
  Bundle bundle;              // ids as in that condensation
  VertexSet vertices;         // component members (component choice)
  std::vector<Edge> edges;    // bundle edges (bundle choice)
};

struct DirectionThread {
  enum class Kind { vertex, edge };
  Kind kind = Kind::vertex;
  std::vector<ThreadChoice> choices;  // index n = 0..depth
  /// Periodic continuation: vertex threads hold two copies of one block
  /// vertex in the last component; edge threads hold a last-bundle edge past
  /// the head of D - X_depth, which recurs on every later level period.
  std::vector<VertexRef> certificate;
};

struct ThreadSet {
  std::size_t depth = 0;
  std::size_t levels = 0;  // truncation depth
  std::size_t bound = 0;   // levels below which choices are exact
  std::vector<DirectionThread> threads;
  /// Component threads ending before the depth: (n, smallest vertex) of a
  /// finite component of D - X_n swallowed by X_(n+1).
  std::vector<std::pair<std::size_t, VertexRef>> dead_ends;
  std::size_t finite_at_depth = 0;  // finite components of D - X_depth
};

/// Threads to the given depth with a periodic continuation, sorted by the
/// smallest vertex (vertex kind) or edge (edge kind) of the last choice.
ThreadSet direction_threads(const Presentation& p, const TailPattern& tp, std::size_t depth,
                            DirectionThread::Kind kind);

struct BijectionReport {
  bool ok = false;
  std::size_t depth = 0;
  std::size_t objects = 0;  // ends, or limit edges
  std::size_t threads = 0;
  std::vector<std::pair<std::size_t, std::size_t>> matching;  // (object, thread)
  std::vector<std::string> failures;
};

/// Ends against vertex-direction threads: each end induces a compatible
/// thread, distinct ends induce distinct threads, every thread is induced.
BijectionReport check_end_direction_bijection(const Presentation& p, const TailPattern& tp,
                                              std::size_t depth);
/// Limit edges against edge-direction threads, including vertex-end bundles.
BijectionReport check_limit_edge_direction_bijection(const Presentation& p,
                                                     const TailPattern& tp, std::size_t depth);

enum class Pointing { towards, away };

/// Orientation of a finite-order separation relative to the vertex-direction
/// of an end. Throws Error(invalid_argument) if s is no finite-order
/// separation.
Pointing separation_points(const Presentation& p, const TailPattern& tp,
                           const PresentedSeparation& s, std::size_t end);
/// As above for a vertex thread; throws Error(invalid_argument) when the
/// separator is not inside X_depth or the thread is an edge thread.
Pointing separation_points(const Presentation& p, const ThreadSet& threads,
                           const PresentedSeparation& s, std::size_t thread);

/// Fan from a core vertex: `path` runs from v into the end's tail component
/// (towards v for reverse fans); shifting its block part up by j * shift
/// for j = 0, 1, ... gives paths pairwise meeting only in v.
struct Fan {
  std::vector<VertexRef> path;
  std::size_t shift = 0;
  bool reverse = false;
};
std::vector<std::vector<VertexRef>> fan_paths(const Fan& f, std::size_t count);

struct Dominates {
  Vertex vertex = 0;
  Fan fan;
};
/// A finite-order separation pointing away from the end (towards it for
/// reverse domination) with the vertex in B - A (A - B for reverse).
struct NotDominates {
  PresentedSeparation separation;
  std::vector<VertexRef> separator;
};

std::variant<Dominates, NotDominates> dominates(const Presentation& p, const TailPattern& tp,
                                                Vertex core_vertex, std::size_t end,
                                                bool reverse = false);

enum class Orientation { away, towards };

struct SeparationSequence {
  Orientation orientation = Orientation::away;
  std::vector<PresentedSeparation> separations;
  std::vector<std::vector<VertexRef>> separators;
};

/// Descending (away) or ascending (towards) sequence of `count` separations
/// with pairwise disjoint separators pointing away from (towards) the
/// vertex-direction of `end`, or a vertex that (reverse) dominates it.
/// Requires D strongly connected.
std::variant<SeparationSequence, Dominates> descending_separation_sequence(
    const Presentation& p, const TailPattern& tp, std::size_t end, std::size_t count,
    Orientation orientation);

/// Separation checks used by the sequence construction and by callers:
/// empty string when valid.
std::string check_separation_sequence(const Presentation& p, const TailPattern& tp,
                                      std::size_t end, const SeparationSequence& s);

/// For an end that no vertex dominates: U holds one vertex of f(A_i cap B_i)
/// for each separation of its descending sequence, sampled until the
/// separators pass X_depth; the check is that the end's thread is the only
/// vertex thread whose choices X_0..X_depth all meet U.
struct ClosureUniqueness {
  bool ok = false;
  std::size_t thread = npos;  // thread induced by the end
  std::vector<VertexRef> u;
  std::vector<std::size_t> in_closure;
  std::string failure;
};

/// Throws Error(invalid_argument) when a vertex dominates the end or D is
/// not strongly connected.
ClosureUniqueness sequence_closure_uniqueness(const Presentation& p, const TailPattern& tp,
                                              std::size_t end, std::size_t depth);

/// Random finite-order separation: X is a random subset of X_levels and one
/// side is X together with the closure in D - X of random sources (sometimes
/// a whole living component): the in-closure for A, or the out-closure for
/// B, with equal probability. The other side is the rest.
PresentedSeparation random_separation(const Presentation& p, const TailPattern& tp,
                                      std::mt19937_64& rng, std::size_t levels);

/// Vertices reachable from (reverse: reaching) `sources` in D - removed, as
/// an eventually periodic set certified from level `base` on.
PeriodicSet reach_set(const Presentation& p, const TailPattern& tp, const PeriodicSet& sources,
                      const std::vector<VertexRef>& removed, bool reverse, std::size_t base);

/// C(X_n, omega) as a periodic set.
PeriodicSet living_set(const Presentation& p, const TailPattern& tp, std::size_t end,
                       std::size_t n);

}  // namespace endspace
