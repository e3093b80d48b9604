// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Each check recomputes its evidence, using
// the brute-force oracles for the derived quantities.

#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "endspace/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace endspace;
using namespace endspace::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using Loaded = endspace::testing::Loaded;

const std::vector<Loaded>& corpus() {
  static const std::vector<Loaded> c = load_corpus();
  return c;
}

Outcome ladder_analysis() {
  Outcome o;
  Presentation p = load("ladder");
  TailPattern tp = tail_stabilization(p);
  auto es = ends(p, tp);
  auto le = limit_edges(p, tp);
  o.require(es.size() == 2, "expected 2 ends, got " + std::to_string(es.size()));
  o.require(le.size() == 1, "expected 1 limit edge, got " + std::to_string(le.size()));
  if (o.ok) {
    o.require(le[0].kind == LimitEdge::Kind::end_end, "limit edge is not between ends");
    o.require(le[0].first == end_holding(p, tp, "bottom") && le[0].second == end_holding(p, tp, "top"),
              "limit edge does not run from the bottom end to the top end");
  }
  if (o.ok) o.detail = "2 ends, limit edge bottom -> top";
  return o;
}

Outcome dominated_ray() {
  Outcome o;
  Presentation p = load("dominated_ray");
  TailPattern tp = tail_stabilization(p);
  auto es = ends(p, tp);
  auto le = limit_edges(p, tp);
  Vertex v = *find_core(p, "v");
  o.require(es.size() == 1, "expected 1 end, got " + std::to_string(es.size()));
  o.require(le.size() == 1 && le[0].kind == LimitEdge::Kind::vertex_end && le[0].first == v,
            "expected the single limit edge F.v -> end 0");
  o.require(std::holds_alternative<Dominates>(dominates(p, tp, v, 0)), "F.v does not dominate end 0");
  if (o.ok) o.detail = "1 end, limit edge F.v -> end 0, dominates = yes";
  return o;
}

Outcome bijections() {
  Outcome o;
  o.require(corpus().size() >= 18, "corpus has only " + std::to_string(corpus().size()) + " files");
  for (const auto& [name, p, tp] : corpus()) {
    BijectionReport a = check_end_direction_bijection(p, tp, 8);
    BijectionReport b = check_limit_edge_direction_bijection(p, tp, 8);
    o.require(a.ok && a.objects == ends(p, tp).size(), name + ": ends vs vertex directions");
    o.require(b.ok && b.objects == limit_edges(p, tp).size(), name + ": limit edges vs edge directions");
  }
  if (o.ok) o.detail = "both bijections at depth 8 on " + std::to_string(corpus().size()) + " files";
  return o;
}

Outcome dichotomy_and_rank() {
  Outcome o;
  std::size_t pairs = 0;
  for (const auto& [name, p, tp] : corpus())
    for (const auto& [fname, u] : families(p)) {
      DichotomyReport d = dichotomy(p, tp, u);
      if (!d.conclusive) continue;
      ++pairs;
      o.require(d.necklace_found != d.rank_found, name + " / " + fname + ": not exactly one outcome");
    }
  Presentation sub = load("subdivided_ladder");
  TailPattern tp = tail_stabilization(sub);
  UFamily u{parse_vertex_set(sub, "subdividers")};
  auto r = u_rank(sub, tp, u);
  auto* rr = std::get_if<RankResult>(&r);
  o.require(rr && rr->rank == OrdinalCNF::finite(1), "subdivided_ladder rank is not 1");
  o.require(rr && check_rank_witness(sub, tp, u, *rr).empty(), "rank witness rejected");
  o.require(oracle_rank(sub, tp, u) == 1, "exhaustive-X oracle disagrees on rank 1");
  if (o.ok) o.detail = std::to_string(pairs) + " conclusive pairs; subdivided_ladder rank 1 confirmed";
  return o;
}

Outcome counterexamples() {
  Outcome o;
  Presentation sub = load("subdivided_ladder");
  TailPattern tp = tail_stabilization(sub);
  std::size_t bottom = end_holding(sub, tp, "bottom"), top = end_holding(sub, tp, "top");
  o.require(end_order_leq(sub, tp, bottom, top).leq, "subdivided_ladder: bottom end not below top end");
  o.require(limit_edges(sub, tp).empty(), "subdivided_ladder has a limit edge");

  Presentation ray = load("subdivided_dominated_ray");
  TailPattern rtp = tail_stabilization(ray);
  o.require(std::holds_alternative<Dominates>(dominates(ray, rtp, *find_core(ray, "v"), 0)),
            "subdivided_dominated_ray: F.v does not dominate");
  for (const LimitEdge& e : limit_edges(ray, rtp))
    o.require(e.kind == LimitEdge::Kind::end_end, "subdivided_dominated_ray has a vertex-end limit edge");
  if (o.ok) o.detail = "order without limit edge; domination without vertex-end limit edge";
  return o;
}

Outcome core_oracles() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::size_t graphs = 0;
  for (std::size_t n = 1; n <= 7; ++n)
    for (int rep = 0; rep < 30; ++rep, ++graphs) {
      FiniteDigraph g = random_digraph(rng, n, rep % 2 ? 0.25 : 0.45);
      const std::string tag = "n=" + std::to_string(n) + " rep=" + std::to_string(rep);
      // Strong components.
      Condensation c = strong_components(g);
      std::vector<VertexSet> got = c.components;
      std::sort(got.begin(), got.end());
      o.require(got == closure_components(g), tag + ": strong components");
      // Bundles for one random deleted set.
      VertexMask x(n, false);
      std::bernoulli_distribution coin(0.3);
      VertexSet xs;
      for (Vertex v = 0; v < n; ++v)
        if ((x[v] = coin(rng))) xs.push_back(v);
      std::vector<Edge> bundled;
      for (const Bundle& b : bundles(g, xs)) bundled.insert(bundled.end(), b.edges.begin(), b.edges.end());
      std::sort(bundled.begin(), bundled.end());
      o.require(bundled == expected_bundle_edges(g, x), tag + ": bundles");
      // Lattice laws against every separation (n <= 5) or a sample.
      std::vector<Separation> all = n <= 5 ? all_separations(g) : std::vector<Separation>{};
      if (!all.empty()) {
        std::uniform_int_distribution<std::size_t> any(0, all.size() - 1);
        for (int k = 0; k < 10; ++k) {
          const Separation& s1 = all[any(rng)];
          const Separation& s2 = all[any(rng)];
          Separation sup = sep_sup(g, s1, s2), inf = sep_inf(g, s1, s2);
          bool laws = brute_is_separation(g, sup) && brute_is_separation(g, inf) &&
                      sup == sep_sup(s2, s1) && inf == sep_inf(s2, s1) &&
                      sep_sup(s1, sep_inf(s1, s2)) == s1 && sep_inf(s1, sep_sup(s1, s2)) == s1;
          for (const Separation& t : all) {
            if (separation_leq(s1, t) && separation_leq(s2, t)) laws = laws && separation_leq(sup, t);
            if (separation_leq(t, s1) && separation_leq(t, s2)) laws = laws && separation_leq(t, inf);
          }
          o.require(laws, tag + ": lattice laws");
        }
      }
      // Maximum fans.
      if (n >= 2) {
        std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
        Vertex v = pick(rng);
        VertexSet b;
        for (Vertex y = 0; y < n; ++y)
          if (y != v && coin(rng)) b.push_back(y);
        for (bool reverse : {false, true}) {
          FanResult f = max_disjoint_fan(g, v, b, reverse);
          o.require(f.count == brute_max_fan(g, v, b, reverse) && f.count == brute_min_cut(g, v, b, reverse),
                    tag + ": maximum fan");
        }
      }
    }
  o.require(graphs >= 200, "too few random digraphs");
  if (o.ok) o.detail = std::to_string(graphs) + " random digraphs on at most 7 vertices";
  return o;
}

Outcome sup_inf() {
  Outcome o;
  std::mt19937_64 rng(41);
  std::size_t towards = 0, away = 0;
  for (const auto& [name, p, tp] : corpus())
    for (std::size_t end = 0; end < ends(p, tp).size(); ++end) {
      std::vector<std::pair<PresentedSeparation, Pointing>> pool;
      for (int i = 0; i < 24; ++i) {
        PresentedSeparation s = random_separation(p, tp, rng, 1 + i % 3);
        pool.push_back({s, oracle_points(p, tp, s, end)});
      }
      for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
          const auto& [s1, o1] = pool[i];
          const auto& [s2, o2] = pool[j];
          if (o1 != o2) continue;
          PresentedSeparation c = o1 == Pointing::towards ? sep_sup(s1, s2) : sep_inf(s1, s2);
          o.require(is_separation(p, c) && oracle_points(p, tp, c, end) == o1 &&
                        separation_points(p, tp, c, end) == o1,
                    name + ": combined separation changed orientation");
          (o1 == Pointing::towards ? towards : away) += 1;
        }
    }
  o.require(towards + away >= 500, "only " + std::to_string(towards + away) + " pairs");
  o.require(towards > 0 && away > 0, "one orientation never sampled");
  if (o.ok)
    o.detail = std::to_string(towards) + " towards pairs, " + std::to_string(away) + " away pairs";
  return o;
}

Outcome closure_uniqueness() {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& [name, p, tp] : corpus()) {
    if (!strongly_connected_with_ends(p, tp)) continue;
    auto es = ends(p, tp);
    for (std::size_t end = 0; end < es.size(); ++end) {
      if (dominated(p, tp, end, false)) continue;
      ClosureUniqueness c = sequence_closure_uniqueness(p, tp, end, 8);
      o.require(c.ok && c.in_closure == std::vector<std::size_t>{c.thread},
                name + ": closure holds other threads");
      o.require(only_end_in_closure(tp, es, end, c.u, 8), name + ": living-component check");
      ++checked;
    }
  }
  o.require(checked > 0, "no undominated thread in the corpus");
  if (o.ok) o.detail = std::to_string(checked) + " undominated threads unique at depth 8";
  return o;
}

Outcome dichromatic() {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& [name, p, tp] : corpus()) {
    if (std::holds_alternative<NoRank>(u_rank(p, tp, {everything(p)}))) continue;
    DichromaticPartition d = dichromatic_partition(p, tp);
    o.require(verify_acyclic(p, tp, d, 12).empty(), name + ": a class spans a cycle");
    ++checked;
  }
  o.require(checked > 0, "no rankable instance in the corpus");
  if (o.ok) o.detail = std::to_string(checked) + " rankable instances acyclic to depth 12";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ladder analysis", ladder_analysis},
      {"dominated ray", dominated_ray},
      {"direction bijections", bijections},
      {"dichotomy and rank", dichotomy_and_rank},
      {"counterexamples", counterexamples},
      {"core oracles", core_oracles},
      {"separation sup/inf", sup_inf},
      {"closure uniqueness", closure_uniqueness},
      {"dichromatic classes", dichromatic},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.ok;
    std::printf("%s  %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  return all ? 0 : 1;
}
