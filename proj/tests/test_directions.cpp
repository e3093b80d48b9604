#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "endspace/directions.hpp"
#include "endspace/error.hpp"
#include "endspace/text_format.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace endspace;
using namespace endspace::testing;

namespace {

using Kind = DirectionThread::Kind;

bool edges_within(const std::vector<Edge>& edges, const VertexSet& vertices) {
  return std::all_of(edges.begin(), edges.end(), [&](const Edge& e) {
    return std::binary_search(vertices.begin(), vertices.end(), e.tail) &&
           std::binary_search(vertices.begin(), vertices.end(), e.head);
  });
}

bool subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool edge_subset(std::vector<Edge> a, std::vector<Edge> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// f(X) contains f(Y) for X a subset of Y.
bool compatible(const ThreadChoice& outer, const ThreadChoice& inner) {
  if (!outer.is_bundle && !inner.is_bundle) return subset(inner.vertices, outer.vertices);
  if (!outer.is_bundle) return edges_within(inner.edges, outer.vertices);
  if (!inner.is_bundle) return false;
  return edge_subset(inner.edges, outer.edges);
}

}  // namespace

TEST_SUITE("directions") {
  TEST_CASE("thread counts of the named examples") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    for (std::size_t depth = 1; depth <= 6; ++depth) {
      CAPTURE(depth);
      CHECK(direction_threads(ladder, tp, depth, Kind::vertex).threads.size() == 2);
      ThreadSet edge = direction_threads(ladder, tp, depth, Kind::edge);
      REQUIRE(edge.threads.size() == 1);
      // The vertical edges from the bottom ray to the top ray.
      for (const Edge& e : edge.threads[0].choices.back().edges) {
        CHECK(ladder.block[vertex_ref(ladder, e.tail).index] == "bottom");
        CHECK(ladder.block[vertex_ref(ladder, e.head).index] == "top");
      }
    }
    Presentation path = load("one_way_path");
    ThreadSet none = direction_threads(path, tail_stabilization(path), 5, Kind::vertex);
    CHECK(none.threads.empty());
    CHECK_FALSE(none.dead_ends.empty());
  }

  TEST_CASE("bijections of the named examples") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    BijectionReport a = check_end_direction_bijection(ladder, tp, 10);
    CHECK(a.ok);
    CHECK(a.objects == 2);
    CHECK(a.threads == 2);
    BijectionReport b = check_limit_edge_direction_bijection(ladder, tp, 10);
    CHECK(b.ok);
    CHECK(b.objects == 1);
    CHECK(b.threads == 1);

    Presentation fig = load("dominated_ray");
    TailPattern ftp = tail_stabilization(fig);
    BijectionReport c = check_end_direction_bijection(fig, ftp, 10);
    CHECK(c.ok);
    CHECK(c.objects == 1);
    BijectionReport d = check_limit_edge_direction_bijection(fig, ftp, 10);
    CHECK(d.ok);
    CHECK(d.threads == 1);
    ThreadSet edge = direction_threads(fig, ftp, 10, Kind::edge);
    REQUIRE(edge.threads.size() == 1);
    const ThreadChoice& last = edge.threads[0].choices.back();
    REQUIRE(last.is_bundle);
    CHECK(last.bundle.kind == Bundle::Kind::vertex_component);

    Presentation sym = load("symmetric_ray");
    BijectionReport e = check_limit_edge_direction_bijection(sym, tail_stabilization(sym), 10);
    CHECK(e.ok);
    CHECK(e.objects == 0);
    CHECK(e.threads == 0);
  }

  TEST_CASE("both bijections hold on the whole corpus at depth 8") {
    auto corpus = load_corpus();
    CHECK(corpus.size() >= 18);
    for (const auto& [name, p, tp] : corpus) {
      CAPTURE(name);
      BijectionReport a = check_end_direction_bijection(p, tp, 8);
      CHECK(a.ok);
      CHECK(a.objects == ends(p, tp).size());
      CHECK(a.threads == a.objects);
      BijectionReport b = check_limit_edge_direction_bijection(p, tp, 8);
      CHECK(b.ok);
      CHECK(b.objects == limit_edges(p, tp).size());
      CHECK(b.threads == b.objects);
    }
  }

  TEST_CASE("threads are compatible along the exhaustion") {
    for (const auto& [name, p, tp] : load_corpus()) {
      CAPTURE(name);
      for (Kind kind : {Kind::vertex, Kind::edge}) {
        ThreadSet ts = direction_threads(p, tp, 7, kind);
        std::set<std::vector<VertexRef>> distinct;
        for (const DirectionThread& t : ts.threads) {
          REQUIRE(t.choices.size() == 8);
          for (std::size_t n = 0; n + 1 < t.choices.size(); ++n) {
            CHECK(compatible(t.choices[n], t.choices[n + 1]));
            if (n + 2 < t.choices.size()) CHECK(compatible(t.choices[n], t.choices[n + 2]));
          }
          if (kind == Kind::edge) {
            auto first = std::find_if(t.choices.begin(), t.choices.end(),
                                      [](const ThreadChoice& c) { return c.is_bundle; });
            REQUIRE(first != t.choices.end());
            CHECK(std::all_of(first, t.choices.end(),
                              [](const ThreadChoice& c) { return c.is_bundle; }));
          } else {
            for (const ThreadChoice& c : t.choices) CHECK_FALSE(c.is_bundle);
          }
        }
      }
    }
  }

  TEST_CASE("pointing of simple separations") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    std::size_t n = ladder.core_size(), t = ladder.block_size();
    PeriodicSet x1 = PeriodicSet::of_members(n, t, {VertexRef::of_block(0, 0), VertexRef::of_block(1, 0)});
    PeriodicSet all = everything(ladder);
    PresentedSeparation towards{x1, all};
    PresentedSeparation away{all, x1};
    REQUIRE(is_separation(ladder, towards));
    REQUIRE(is_separation(ladder, away));
    for (std::size_t end = 0; end < 2; ++end) {
      CHECK(separation_points(ladder, tp, towards, end) == Pointing::towards);
      CHECK(separation_points(ladder, tp, away, end) == Pointing::away);
    }

    Presentation sym = load("symmetric_ray");
    TailPattern stp = tail_stabilization(sym);
    PeriodicSet empty(0, 1), full = everything(sym);
    CHECK(separation_points(sym, stp, PresentedSeparation{full, empty}, 0) == Pointing::away);
    CHECK(separation_points(sym, stp, PresentedSeparation{empty, full}, 0) == Pointing::towards);
    CHECK_THROWS_AS(separation_points(sym, stp, PresentedSeparation{empty, empty}, 0), Error);
  }

  TEST_CASE("supremum and infimum keep the orientation of sampled separation pairs") {
    std::mt19937_64 rng(41);
    std::size_t towards_pairs = 0, away_pairs = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      const std::size_t k = ends(p, tp).size();
      if (k == 0) continue;
      CAPTURE(name);
      ThreadSet ts = direction_threads(p, tp, 4, Kind::vertex);
      BijectionReport bij = check_end_direction_bijection(p, tp, 4);
      REQUIRE(bij.ok);
      for (std::size_t end = 0; end < k; ++end) {
        std::size_t thread = npos;
        for (auto [e, th] : bij.matching)
          if (e == end) thread = th;
        REQUIRE(thread != npos);
        std::vector<std::pair<PresentedSeparation, Pointing>> pool;
        for (int i = 0; i < 24; ++i) {
          PresentedSeparation s = random_separation(p, tp, rng, 1 + i % 3);
          REQUIRE(is_separation(p, s));
          Pointing o = oracle_points(p, tp, s, end);
          CHECK(separation_points(p, tp, s, end) == o);
          CHECK(separation_points(p, ts, s, thread) == o);
          pool.push_back({s, o});
        }
        for (std::size_t i = 0; i < pool.size(); ++i)
          for (std::size_t j = i + 1; j < pool.size(); ++j) {
            const auto& [s1, o1] = pool[i];
            const auto& [s2, o2] = pool[j];
            if (o1 != o2) continue;
            PresentedSeparation c = o1 == Pointing::towards ? sep_sup(s1, s2) : sep_inf(s1, s2);
            CHECK(is_separation(p, c));
            CHECK(oracle_points(p, tp, c, end) == o1);
            CHECK(separation_points(p, tp, c, end) == o1);
            (o1 == Pointing::towards ? towards_pairs : away_pairs) += 1;
          }
      }
    }
    CHECK(towards_pairs >= 250);
    CHECK(away_pairs >= 250);
  }

  TEST_CASE("domination of the named examples") {
    Presentation fig = load("dominated_ray");
    TailPattern tp = tail_stabilization(fig);
    Vertex v = *find_core(fig, "v");
    auto d = dominates(fig, tp, v, 0);
    REQUIRE(std::holds_alternative<Dominates>(d));
    const Fan& fan = std::get<Dominates>(d).fan;
    auto paths = fan_paths(fan, 6);
    REQUIRE(paths.size() == 6);
    std::set<VertexRef> used;
    for (const auto& path : paths) {
      REQUIRE(path.size() >= 2);
      CHECK(path.front() == VertexRef::of_core(v));
      for (std::size_t i = 0; i + 1 < path.size(); ++i) CHECK(has_edge(fig, path[i], path[i + 1]));
      for (std::size_t i = 1; i < path.size(); ++i) CHECK(used.insert(path[i]).second);
    }

    Presentation sub = load("subdivided_dominated_ray");
    CHECK(std::holds_alternative<Dominates>(
        dominates(sub, tail_stabilization(sub), *find_core(sub, "v"), 0)));

    Presentation pendant = load("pendant_ray");
    TailPattern ptp = tail_stabilization(pendant);
    Vertex pv = *find_core(pendant, "v");
    auto nd = dominates(pendant, ptp, pv, 0);
    REQUIRE(std::holds_alternative<NotDominates>(nd));
    const NotDominates& w = std::get<NotDominates>(nd);
    CHECK(is_separation(pendant, w.separation));
    CHECK(w.separator.size() <= 1);
    CHECK(separation_points(pendant, ptp, w.separation, 0) == Pointing::away);
    CHECK(w.separation.side_b.contains(VertexRef::of_core(pv)));
    CHECK_FALSE(w.separation.side_a.contains(VertexRef::of_core(pv)));
  }

  TEST_CASE("domination certificates on the corpus") {
    for (const auto& [name, p, tp] : load_corpus()) {
      CAPTURE(name);
      for (std::size_t end = 0; end < ends(p, tp).size(); ++end)
        for (Vertex v = 0; v < p.core_size(); ++v)
          for (bool reverse : {false, true}) {
            auto d = dominates(p, tp, v, end, reverse);
            if (auto* yes = std::get_if<Dominates>(&d)) {
              auto paths = fan_paths(yes->fan, 5);
              std::set<VertexRef> used;
              for (const auto& path : paths) {
                for (std::size_t i = 0; i + 1 < path.size(); ++i)
                  CHECK(has_edge(p, path[i], path[i + 1]));
                for (const VertexRef& x : path)
                  if (!(x == VertexRef::of_core(v))) CHECK(used.insert(x).second);
              }
            } else {
              const NotDominates& no = std::get<NotDominates>(d);
              CHECK(is_separation(p, no.separation));
              Pointing want = reverse ? Pointing::towards : Pointing::away;
              CHECK(oracle_points(p, tp, no.separation, end) == want);
              const PeriodicSet& side = reverse ? no.separation.side_a : no.separation.side_b;
              const PeriodicSet& other = reverse ? no.separation.side_b : no.separation.side_a;
              CHECK(side.contains(VertexRef::of_core(v)));
              CHECK_FALSE(other.contains(VertexRef::of_core(v)));
            }
          }
    }
  }

  TEST_CASE("separation sequences") {
    Presentation sym = load("symmetric_ray");
    TailPattern tp = tail_stabilization(sym);
    auto r = descending_separation_sequence(sym, tp, 0, 5, Orientation::away);
    REQUIRE(std::holds_alternative<SeparationSequence>(r));
    const SeparationSequence& s = std::get<SeparationSequence>(r);
    REQUIRE(s.separations.size() == 5);
    std::set<std::size_t> levels;
    for (const auto& sep : s.separators) {
      REQUIRE(sep.size() == 1);
      levels.insert(sep[0].level);
    }
    CHECK(levels.size() == 5);
    CHECK(check_separation_sequence(sym, tp, 0, s).empty());

    auto empty = descending_separation_sequence(sym, tp, 0, 0, Orientation::away);
    REQUIRE(std::holds_alternative<SeparationSequence>(empty));
    CHECK(std::get<SeparationSequence>(empty).separations.empty());

    Presentation fig = load("dominated_ray");
    auto w = descending_separation_sequence(fig, tail_stabilization(fig), 0, 5, Orientation::away);
    REQUIRE(std::holds_alternative<Dominates>(w));
    CHECK(std::get<Dominates>(w).vertex == *find_core(fig, "v"));
  }

  TEST_CASE("sequences and domination are complementary") {
    std::size_t checked = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      if (!strongly_connected_with_ends(p, tp)) continue;
      CAPTURE(name);
      for (std::size_t end = 0; end < ends(p, tp).size(); ++end)
        for (Orientation o : {Orientation::away, Orientation::towards}) {
          auto r = descending_separation_sequence(p, tp, end, 6, o);
          bool witness = std::holds_alternative<Dominates>(r);
          CHECK(witness == dominated(p, tp, end, o == Orientation::towards));
          if (!witness) {
            const SeparationSequence& s = std::get<SeparationSequence>(r);
            CHECK(s.separations.size() == 6);
            CHECK(check_separation_sequence(p, tp, end, s).empty());
            Pointing want = o == Orientation::away ? Pointing::away : Pointing::towards;
            for (std::size_t i = 0; i < s.separations.size(); ++i) {
              CHECK(oracle_points(p, tp, s.separations[i], end) == want);
              for (std::size_t j = i + 1; j < s.separations.size(); ++j) {
                bool monotone = o == Orientation::away
                                    ? separation_leq(s.separations[j], s.separations[i])
                                    : separation_leq(s.separations[i], s.separations[j]);
                CHECK(monotone);
                for (const VertexRef& v : s.separators[i])
                  CHECK(std::find(s.separators[j].begin(), s.separators[j].end(), v) ==
                        s.separators[j].end());
              }
            }
          }
          ++checked;
        }
    }
    CHECK(checked >= 8);
  }

  TEST_CASE("an undominated end is the only direction in the closure of its sequence vertices") {
    std::size_t checked = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      if (!strongly_connected_with_ends(p, tp)) continue;
      CAPTURE(name);
      for (std::size_t end = 0; end < ends(p, tp).size(); ++end) {
        if (dominated(p, tp, end, false)) {
          CHECK_THROWS_AS(sequence_closure_uniqueness(p, tp, end, 8), Error);
          continue;
        }
        ClosureUniqueness c = sequence_closure_uniqueness(p, tp, end, 8);
        CHECK(c.failure == "");
        CHECK(c.ok);
        CHECK(c.in_closure == std::vector<std::size_t>{c.thread});
        // Independent check through living components: only this end has
        // C(X_n, .) meeting U for every n <= 8.
        CHECK(only_end_in_closure(tp, ends(p, tp), end, c.u, 8));
        ++checked;
      }
    }
    CHECK(checked >= 4);
  }
}
