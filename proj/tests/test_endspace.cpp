#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "endspace/ends.hpp"
#include "endspace/error.hpp"
#include "endspace/text_format.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace endspace;
using namespace endspace::testing;

TEST_SUITE("endspace") {
  TEST_CASE("end counts of the named examples") {
    for (auto [name, count] : std::vector<std::pair<const char*, std::size_t>>{
             {"ladder", 2}, {"dominated_ray", 1}, {"one_way_path", 0}, {"symmetric_ray", 1},
             {"subdivided_ladder", 2}, {"strong_ladder", 1}, {"cofinal_star", 0}}) {
      CAPTURE(name);
      Presentation p = load(name);
      CHECK(ends(p, tail_stabilization(p)).size() == count);
    }
  }

  TEST_CASE("representative rays are solid and round trip") {
    for (const auto& [name, p, tp] : load_corpus()) {
      CAPTURE(name);
      std::set<std::size_t> components;
      for (const End& e : ends(p, tp)) {
        CHECK_NOTHROW(validate_ray(p, e.representative_ray));
        CHECK(tp.eventual[e.eventual_component].infinite);
        components.insert(e.eventual_component);
        auto back = end_of_ray(p, tp, e.representative_ray);
        REQUIRE(std::holds_alternative<End>(back));
        CHECK(std::get<End>(back).id == e.id);
        // Solid on truncations: the ray's vertices above X_n lie in C(X_n, end).
        for (std::size_t n = 0; n <= 6; ++n) {
          LivingComponent c = living_component(tp, n, e);
          for (const VertexRef& v : ray_prefix(e.representative_ray, 60))
            if (!v.core && v.level >= n + tp.head_levels + tp.window) CHECK(c.contains(tp, v));
        }
      }
      CHECK(components.size() == ends(p, tp).size());
    }
  }

  TEST_CASE("living components") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    auto es = ends(ladder, tp);
    std::size_t top = end_holding(ladder, tp, "top");
    LivingComponent c0 = living_component(tp, 0, es[top]);
    auto members = c0.members(tp, 5);
    CHECK(members.size() == 5);
    for (const VertexRef& v : members) CHECK(ladder.block[v.index] == "top");

    for (const auto& [name, p, tpc] : load_corpus()) {
      CAPTURE(name);
      for (const End& e : ends(p, tpc)) {
        if (p.core_size() == 0) {
          // With no core, C(X_0, end) is the end's whole eventual component.
          for (std::size_t l = tpc.head_levels; l < tpc.head_levels + 2 * tpc.period; ++l)
            for (Vertex t = 0; t < p.block_size(); ++t) {
              VertexRef v = VertexRef::of_block(t, l);
              TailSlot s = tpc.locate(t, l);
              bool in_eventual = s.kind == TailSlot::Kind::infinite && s.index == e.eventual_component;
              CHECK(living_component(tpc, 0, e).contains(tpc, v) == in_eventual);
            }
        }
        for (std::size_t n = 0; n < 10; ++n) {
          auto inner = living_component(tpc, n + 1, e).members(tpc, n + 16);
          LivingComponent outer = living_component(tpc, n, e);
          for (const VertexRef& v : inner) CHECK(outer.contains(tpc, v));
        }
      }
    }
  }

  TEST_CASE("closures of the named examples") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    auto es = ends(ladder, tp);
    const End& top = es[end_holding(ladder, tp, "top")];
    CHECK(is_in_closure(tp, {parse_vertex_set(ladder, "top")}, top));
    CHECK_FALSE(is_in_closure(tp, {parse_vertex_set(ladder, "bottom")}, top));

    Presentation sub = load("subdivided_ladder");
    TailPattern stp = tail_stabilization(sub);
    for (const End& e : ends(sub, stp))
      CHECK_FALSE(is_in_closure(stp, {parse_vertex_set(sub, "subdividers")}, e));
  }

  TEST_CASE("necklaces of the named examples") {
    Presentation sym = load("symmetric_ray");
    TailPattern stp = tail_stabilization(sym);
    UFamily all{everything(sym)};
    auto n = find_necklace(sym, stp, all, 5);
    REQUIRE(std::holds_alternative<Necklace>(n));
    CHECK(std::get<Necklace>(n).bead.size() == 1);

    Presentation ladder = load("ladder");
    TailPattern ltp = tail_stabilization(ladder);
    UFamily top{parse_vertex_set(ladder, "top")};
    auto ln = find_necklace(ladder, ltp, top, 5);
    REQUIRE(std::holds_alternative<Necklace>(ln));
    const Necklace& neck = std::get<Necklace>(ln);
    CHECK(neck.end == end_holding(ladder, ltp, "top"));
    NecklacePrefix prefix = materialize(neck, 5);
    CHECK(prefix.beads.size() == 5);
    CHECK(check_necklace(ladder, prefix, &top).empty());

    Presentation sub = load("subdivided_ladder");
    TailPattern sub_tp = tail_stabilization(sub);
    auto none = find_necklace(sub, sub_tp, {parse_vertex_set(sub, "subdividers")}, 5);
    CHECK(std::holds_alternative<NoNecklace>(none));
  }

  TEST_CASE("an end lies in the closure exactly when a necklace is attached") {
    std::size_t pairs = 0, positive = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      for (const auto& [fname, u] : families(p)) {
        CAPTURE(name);
        CAPTURE(fname);
        bool closure = false;
        for (const End& e : ends(p, tp)) closure = closure || is_in_closure(tp, u, e);
        auto n = find_necklace(p, tp, u, 4);
        bool found = std::holds_alternative<Necklace>(n);
        CHECK(closure == found);
        if (found) {
          const Necklace& neck = std::get<Necklace>(n);
          CHECK(is_in_closure(tp, u, ends(p, tp)[neck.end]));
          for (std::size_t beads : {1, 2, 6}) {
            CAPTURE(beads);
            CHECK(check_necklace(p, materialize(neck, beads), &u).empty());
          }
        }
        ++pairs;
        positive += found;
      }
    }
    CHECK(pairs >= 60);
    CHECK(positive > 0);
    CHECK(positive < pairs);
  }

  TEST_CASE("deleting a finite set from a necklace prefix leaves one necklace component") {
    std::mt19937_64 rng(21);
    std::size_t trials = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      UFamily u{everything(p)};
      auto n = find_necklace(p, tp, u, 3);
      if (!std::holds_alternative<Necklace>(n)) continue;
      CAPTURE(name);
      const std::size_t k = 7;
      NecklacePrefix prefix = materialize(std::get<Necklace>(n), k);
      std::vector<VertexRef> all;
      std::vector<std::vector<VertexRef>> part(k);  // bead i with the paths leaving it upwards
      for (std::size_t i = 0; i < k; ++i) {
        part[i] = prefix.beads[i];
        if (i + 1 < k) {
          part[i].insert(part[i].end(), prefix.forward[i].begin(), prefix.forward[i].end());
          part[i].insert(part[i].end(), prefix.backward[i].begin(), prefix.backward[i].end());
        }
        all.insert(all.end(), part[i].begin(), part[i].end());
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      FiniteDigraph host = truncate(p, prefix.levels);
      VertexSet ids;
      for (const VertexRef& v : all) ids.push_back(vertex_id(p, v));
      ids = normalized(ids);
      FiniteDigraph h = host.induced(ids);
      auto local = [&](const VertexRef& v) {
        return static_cast<Vertex>(std::lower_bound(ids.begin(), ids.end(), vertex_id(p, v)) -
                                   ids.begin());
      };
      for (std::size_t j = 1; j + 2 < k; ++j)
        for (int rep = 0; rep < 6; ++rep, ++trials) {
          // X: a random subset of the first j parts, always meeting bead 0.
          VertexMask removed(h.size(), false);
          std::bernoulli_distribution coin(0.5);
          removed[local(prefix.beads[0][0])] = true;
          for (std::size_t i = 0; i < j; ++i)
            for (const VertexRef& v : part[i])
              if (coin(rng)) removed[local(v)] = true;
          Condensation c = strong_components(h, removed);
          std::set<std::size_t> tail_components;
          NecklacePrefix rest;
          rest.levels = prefix.levels;
          for (std::size_t i = j + 1; i < k; ++i) {
            for (const VertexRef& v : prefix.beads[i]) {
              Vertex x = local(v);
              if (!removed[x]) tail_components.insert(c.component_of[x]);
            }
            rest.beads.push_back(prefix.beads[i]);
            if (i + 1 < k) {
              rest.forward.push_back(prefix.forward[i]);
              rest.backward.push_back(prefix.backward[i]);
            }
          }
          CHECK(tail_components.size() == 1);
          CHECK(check_necklace(p, rest, &u).empty());
        }
    }
    CHECK(trials >= 100);
  }

  TEST_CASE("star-combs") {
    Presentation sym = load("symmetric_ray");
    TailPattern stp = tail_stabilization(sym);
    UFamily all{everything(sym)};
    StarCombPair sc = star_comb(sym, stp, all, 4);
    CHECK(sc.forward.shape == StarComb::Shape::comb);
    CHECK(sc.backward.shape == StarComb::Shape::comb);
    CHECK(sc.backward.reverse);
    CHECK(sc.shared.size() == 4);

    for (const char* name : {"symmetric_ray", "strong_ladder", "necklace_host", "random_07"}) {
      CAPTURE(name);
      Presentation p = load(name);
      TailPattern tp = tail_stabilization(p);
      REQUIRE(is_strongly_connected(p, tp));
      UFamily u{name == std::string("strong_ladder") ? parse_vertex_set(p, "top") : everything(p)};
      for (std::size_t teeth : {1, 3, 5}) {
        StarCombPair s = star_comb(p, tp, u, teeth);
        CHECK(check_star_comb(p, s.levels, s.forward, u[0]).empty());
        CHECK(check_star_comb(p, s.levels, s.backward, u[0]).empty());
        CHECK(s.forward.attachment == s.backward.attachment);
        CHECK(s.shared == s.forward.attachment);
        CHECK(s.shared.size() == teeth);
        for (const VertexRef& v : s.shared) CHECK(u[0].contains(v));
      }
    }

    Presentation ladder = load("ladder");
    TailPattern ltp = tail_stabilization(ladder);
    CHECK_FALSE(is_strongly_connected(ladder, ltp));
    CHECK_THROWS_AS(star_comb(ladder, ltp, {everything(ladder)}, 3), Error);
  }

  TEST_CASE("ends of rays") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    Vertex top = *find_block(ladder, "top"), bottom = *find_block(ladder, "bottom");
    RaySpec top_ray{{VertexRef::of_block(top, 0)}, {{top, 1}}, false};
    auto a = end_of_ray(ladder, tp, top_ray);
    REQUIRE(std::holds_alternative<End>(a));
    CHECK(std::get<End>(a).id == end_holding(ladder, tp, "top"));

    RaySpec weave{{VertexRef::of_block(bottom, 0), VertexRef::of_block(bottom, 1),
                   VertexRef::of_block(top, 1)},
                  {{top, 1}},
                  false};
    CHECK_NOTHROW(validate_ray(ladder, weave));
    auto b = end_of_ray(ladder, tp, weave);
    REQUIRE(std::holds_alternative<End>(b));
    CHECK(std::get<End>(b).id == end_holding(ladder, tp, "top"));

    Presentation path = load("one_way_path");
    TailPattern ptp = tail_stabilization(path);
    RaySpec r{{VertexRef::of_block(0, 0)}, {{0, 1}}, false};
    auto c = end_of_ray(path, ptp, r);
    REQUIRE(std::holds_alternative<NotSolid>(c));
    CHECK(std::get<NotSolid>(c).witness == 0);
  }
}
