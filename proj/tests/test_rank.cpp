#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "endspace/error.hpp"
#include "endspace/rank.hpp"
#include "endspace/text_format.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace endspace;
using namespace endspace::testing;

namespace {

// Components of D_levels - X lying below the top slack that meet every set.
std::size_t components_meeting_all(const Presentation& p, const TailPattern& tp,
                                   const UFamily& u, const std::vector<VertexRef>& x,
                                   std::size_t levels) {
  FiniteDigraph g = truncate(p, levels);
  VertexMask removed(g.size(), false);
  for (const VertexRef& v : x)
    if (v.core || v.level < levels) removed[vertex_id(p, v)] = true;
  Condensation c = strong_components(g, removed);
  const std::size_t top = levels - (tp.margin + tp.window + p.span);
  std::size_t count = 0;
  for (const VertexSet& comp : c.components) {
    bool low = std::all_of(comp.begin(), comp.end(), [&](Vertex v) {
      VertexRef r = vertex_ref(p, v);
      return r.core || r.level < top;
    });
    bool all = std::all_of(u.begin(), u.end(), [&](const PeriodicSet& s) {
      return std::any_of(comp.begin(), comp.end(),
                         [&](Vertex v) { return s.contains(vertex_ref(p, v)); });
    });
    count += low && all;
  }
  return count;
}

// Presentations with exactly one rule or edge removed: spanning subdigraphs.
std::vector<Presentation> edge_deletions(const Presentation& p) {
  std::vector<Presentation> out;
  auto each = [&](auto member) {
    for (std::size_t i = 0; i < (p.*member).size(); ++i) {
      Presentation h = p;
      (h.*member).erase((h.*member).begin() + static_cast<std::ptrdiff_t>(i));
      out.push_back(std::move(h));
    }
  };
  each(&Presentation::core_edges);
  each(&Presentation::block_edges);
  each(&Presentation::block_rules);
  each(&Presentation::attach_edges);
  each(&Presentation::cofinal_rules);
  return out;
}

}  // namespace

TEST_SUITE("rank") {
  TEST_CASE("ordinals") {
    CHECK(to_string(OrdinalCNF::finite(0)) == "0");
    CHECK(to_string(OrdinalCNF::finite(3)) == "3");
    OrdinalCNF w{{0, 0, 1, 0}};
    CHECK(to_string(w) == "w");
    OrdinalCNF big{{0, 2, 1, 1}};
    CHECK(to_string(big) == "w^2*2 + w + 1");
    CHECK(parse_ordinal("w^2*2 + w + 1") == big);
    CHECK(parse_ordinal("omega") == w);
    CHECK(OrdinalCNF::finite(1000) < w);
    CHECK(w < w.successor());
    CHECK(big < OrdinalCNF{{1, 0, 0, 0}});
    CHECK(OrdinalCNF::finite(0).is_zero());
    CHECK(big <= OrdinalCNF::max());
    CHECK_THROWS_AS(parse_ordinal("w^5"), ParseError);
    for (const OrdinalCNF& o : {OrdinalCNF::finite(7), w, big, OrdinalCNF{{3, 0, 4, 0}}})
      CHECK(parse_ordinal(to_string(o)) == o);
  }

  TEST_CASE("ranks of finite digraphs") {
    FiniteDigraph g(3, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(u_rank(g, {VertexSet{0}}).rank == OrdinalCNF::finite(0));
    RankResult r = u_rank(g, {});
    CHECK(r.rank == OrdinalCNF::finite(1));
    CHECK(r.witness.x.size() == 3);
  }

  TEST_CASE("ranks of the named examples") {
    Presentation path = load("one_way_path");
    TailPattern ptp = tail_stabilization(path);
    UFamily all{everything(path)};
    auto r = u_rank(path, ptp, all);
    REQUIRE(std::holds_alternative<RankResult>(r));
    CHECK(std::get<RankResult>(r).rank == OrdinalCNF::finite(1));
    CHECK(std::get<RankResult>(r).witness.x.empty());
    CHECK(check_rank_witness(path, ptp, all, std::get<RankResult>(r)).empty());

    Presentation sub = load("subdivided_ladder");
    TailPattern stp = tail_stabilization(sub);
    UFamily subdividers{parse_vertex_set(sub, "subdividers")};
    auto s = u_rank(sub, stp, subdividers);
    REQUIRE(std::holds_alternative<RankResult>(s));
    CHECK(std::get<RankResult>(s).rank == OrdinalCNF::finite(1));
    CHECK(check_rank_witness(sub, stp, subdividers, std::get<RankResult>(s)).empty());
    CHECK(oracle_rank(sub, stp, subdividers) == 1);

    auto none = u_rank(sub, stp, {everything(sub)});
    CHECK(std::holds_alternative<NoRank>(none));

    Presentation star = load("cofinal_star");
    TailPattern ctp = tail_stabilization(star);
    auto empty = u_rank(star, ctp, {});
    REQUIRE(std::holds_alternative<RankResult>(empty));
    CHECK(std::get<RankResult>(empty).rank == OrdinalCNF::finite(2));
    CHECK(check_rank_witness(star, ctp, {}, std::get<RankResult>(empty)).empty());
    CHECK_THROWS_AS(u_rank(star, ctp, {}, OrdinalCNF::finite(1)), BudgetExceeded);
  }

  TEST_CASE("ranks agree with the exhaustive small-X oracle on the corpus") {
    std::size_t compared = 0;
    for (const auto& [name, p, tp] : load_corpus())
      for (const auto& [fname, u] : families(p)) {
        CAPTURE(name);
        CAPTURE(fname);
        auto r = u_rank(p, tp, u);
        std::size_t want = oracle_rank(p, tp, u);
        if (auto* rr = std::get_if<RankResult>(&r)) {
          CHECK(oracle_value(rr->rank) == want);
          CHECK(check_rank_witness(p, tp, u, *rr).empty());
        } else {
          CHECK(want == 2);
        }
        ++compared;
      }
    CHECK(compared >= 60);
  }

  TEST_CASE("dichotomy on the named examples") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    DichotomyReport a = dichotomy(ladder, tp, {parse_vertex_set(ladder, "top")});
    CHECK(a.conclusive);
    CHECK(a.necklace_found);
    CHECK_FALSE(a.rank_found);
    REQUIRE(a.necklace);

    Presentation sub = load("subdivided_ladder");
    DichotomyReport b = dichotomy(sub, tail_stabilization(sub), {parse_vertex_set(sub, "subdividers")});
    CHECK(b.conclusive);
    CHECK(b.rank_found);
    CHECK_FALSE(b.necklace_found);
    REQUIRE(b.rank);
    CHECK(b.rank->rank == OrdinalCNF::finite(1));
    REQUIRE(b.no_necklace);
  }

  TEST_CASE("exactly one branch of the dichotomy on every corpus family") {
    std::size_t conclusive = 0, necklaces = 0;
    for (const auto& [name, p, tp] : load_corpus())
      for (const auto& [fname, u] : families(p)) {
        CAPTURE(name);
        CAPTURE(fname);
        DichotomyReport d = dichotomy(p, tp, u);
        CHECK(d.conclusive);
        if (!d.conclusive) continue;
        ++conclusive;
        CHECK(d.necklace_found != d.rank_found);
        CHECK(d.necklace_found == d.necklace.has_value());
        CHECK(d.rank_found == d.rank.has_value());
        necklaces += d.necklace_found;
      }
    CHECK(conclusive >= 60);
    CHECK(necklaces > 0);
    CHECK(necklaces < conclusive);
  }

  TEST_CASE("a positive rank leaves infinitely many components meeting every set") {
    std::size_t checked = 0;
    for (const auto& [name, p, tp] : load_corpus())
      for (const auto& [fname, u] : families(p)) {
        auto r = u_rank(p, tp, u);
        auto* rr = std::get_if<RankResult>(&r);
        if (!rr || rr->rank.is_zero() || u.size() > 1) continue;
        CAPTURE(name);
        CAPTURE(fname);
        const std::size_t base = tp.head_levels + tp.margin + tp.window + p.span + 8 * tp.period;
        const auto& x = rr->witness.x;
        std::size_t few = components_meeting_all(p, tp, u, x, base);
        std::size_t many = components_meeting_all(p, tp, u, x, base + 16 * tp.period);
        CHECK(few < many);
        ++checked;
      }
    CHECK(checked >= 10);
  }

  TEST_CASE("with two sets a positive rank may leave no component meeting both") {
    Presentation ladder = load("ladder");
    TailPattern tp = tail_stabilization(ladder);
    UFamily pair = parse_vertex_family(ladder, {"top", "bottom"});
    auto r = u_rank(ladder, tp, pair);
    REQUIRE(std::holds_alternative<RankResult>(r));
    const RankResult& rr = std::get<RankResult>(r);
    CHECK(rr.rank == OrdinalCNF::finite(1));
    CHECK(check_rank_witness(ladder, tp, pair, rr).empty());
    CHECK(components_meeting_all(ladder, tp, pair, rr.witness.x, 64) == 0);
  }

  TEST_CASE("subdigraphs have no larger rank") {
    std::size_t checked = 0;
    for (const auto& [name, p, tp] : load_corpus())
      for (const auto& [fname, u] : families(p)) {
        auto r = u_rank(p, tp, u);
        auto* rr = std::get_if<RankResult>(&r);
        if (!rr) continue;
        for (const Presentation& h : edge_deletions(p)) {
          CAPTURE(name);
          CAPTURE(fname);
          TailPattern htp = tail_stabilization(h);
          auto hr = u_rank(h, htp, u);
          REQUIRE(std::holds_alternative<RankResult>(hr));
          CHECK(std::get<RankResult>(hr).rank <= rr->rank);
          ++checked;
        }
      }
    CHECK(checked >= 50);
  }

  TEST_CASE("dichromatic partitions") {
    Presentation path = load("one_way_path");
    TailPattern ptp = tail_stabilization(path);
    DichromaticPartition d = dichromatic_partition(path, ptp);
    CHECK(d.class_count() == 1);
    CHECK(verify_acyclic(path, ptp, d, 12).empty());

    Presentation sub = load("subdivided_ladder");
    CHECK_THROWS_AS(dichromatic_partition(sub, tail_stabilization(sub)), Error);
  }

  TEST_CASE("dichromatic classes are acyclic on every rankable corpus digraph") {
    std::size_t checked = 0;
    for (const auto& [name, p, tp] : load_corpus()) {
      if (std::holds_alternative<NoRank>(u_rank(p, tp, {everything(p)}))) {
        CHECK_THROWS_AS(dichromatic_partition(p, tp), Error);
        continue;
      }
      CAPTURE(name);
      DichromaticPartition d = dichromatic_partition(p, tp);
      CHECK(verify_acyclic(p, tp, d, 12).empty());
      for (std::size_t levels = 1; levels <= 12; ++levels) {
        FiniteDigraph g = truncate(p, levels);
        std::map<std::size_t, VertexSet> classes;
        for (Vertex v = 0; v < g.size(); ++v) {
          std::size_t k = class_of(p, tp, d, vertex_ref(p, v));
          CHECK(k < d.class_count());
          classes[k].push_back(v);
        }
        for (const auto& [k, members] : classes) {
          Condensation c = strong_components(g.induced(members));
          CHECK(c.size() == members.size());
        }
      }
      ++checked;
    }
    CHECK(checked >= 8);
  }
}
