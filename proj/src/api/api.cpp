// extern "C" surface: opaque presentation handles, JSON reports, status
// codes. Every exception is caught here and turned into a status.

#include "endspace/endspace.h"

#include <openssl/evp.h>

#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>
#include <string>

#include "endspace/directions.hpp"
#include "endspace/dot.hpp"
#include "endspace/error.hpp"
#include "endspace/limits.hpp"
#include "endspace/rank.hpp"
#include "endspace/text_format.hpp"
#include "json.hpp"

#ifndef ENDSPACE_VERSION
#define ENDSPACE_VERSION "0.0.0"
#endif

struct es_presentation {
  endspace::Presentation p;
};

namespace {

using nlohmann::json;
using namespace endspace;

struct LastError {
  std::string message;
  std::size_t line = 0;
  std::size_t column = 0;
};
thread_local LastError last_error;

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Thrown for bad commands and options.
struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error(ErrorCode::invalid_argument, m) {}
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Options

struct Options {
  std::size_t depth = 8;
  bool depth_given = false;
  std::size_t beads = 3;
  std::size_t teeth = 3;
  std::vector<std::string> u;
  bool u_given = false;
  std::string vertex;
  std::size_t end = 0;
  bool reverse = false;
  std::string kind = "vertex";
  std::string budget;
  std::uint64_t seed = 0;
  bool dot = false;
  Budget limits;
  OrdinalCNF rank_budget = OrdinalCNF::max();
};

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != value.size() || value.empty() || value[0] == '-')
    throw UsageError("budget key '" + key + "' needs a nonnegative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

// "period=8,onset=16,margin=64,rank=w^2"
void parse_budget(Options& o) {
  std::stringstream ss(o.budget);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("budget item '" + item + "' is not key=value");
    std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "period")
      o.limits.max_period = parse_count(key, value);
    else if (key == "onset")
      o.limits.max_onset = parse_count(key, value);
    else if (key == "margin")
      o.limits.max_margin = parse_count(key, value);
    else if (key == "rank")
      o.rank_budget = parse_ordinal(value);
    else
      throw UsageError("unknown budget key '" + key + "' (period, onset, margin, rank)");
  }
}

Options parse_options(const char* text) {
  Options o;
  if (!text || !*text) return o;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("options must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    auto count = [&]() -> std::size_t {
      if (!v.is_number_unsigned()) throw UsageError("option '" + k + "' needs a nonnegative integer");
      return v.get<std::size_t>();
    };
    auto text_value = [&]() -> std::string {
      if (!v.is_string()) throw UsageError("option '" + k + "' needs a string");
      return v.get<std::string>();
    };
    if (k == "depth") {
      o.depth = count();
      o.depth_given = true;
    } else if (k == "beads") {
      o.beads = count();
    } else if (k == "teeth") {
      o.teeth = count();
    } else if (k == "end") {
      o.end = count();
    } else if (k == "seed") {
      o.seed = count();
    } else if (k == "vertex") {
      o.vertex = text_value();
    } else if (k == "kind") {
      o.kind = text_value();
    } else if (k == "budget") {
      o.budget = text_value();
    } else if (k == "reverse" || k == "dot") {
      if (!v.is_boolean()) throw UsageError("option '" + k + "' needs true or false");
      (k == "dot" ? o.dot : o.reverse) = v.get<bool>();
    } else if (k == "u") {
      if (!v.is_array()) throw UsageError("option 'u' needs an array of set specs");
      for (const json& s : v) {
        if (!s.is_string()) throw UsageError("option 'u' needs an array of set specs");
        o.u.push_back(s.get<std::string>());
      }
      o.u_given = true;
    } else {
      throw UsageError("unknown option '" + k + "'");
    }
  }
  if (o.kind != "vertex" && o.kind != "edge") throw UsageError("kind must be 'vertex' or 'edge'");
  if (o.beads == 0) throw UsageError("beads must be positive");
  if (o.teeth == 0) throw UsageError("teeth must be positive");
  parse_budget(o);
  return o;
}

// ---------------------------------------------------------------------------
// JSON builders

json names(const Presentation& p, const std::vector<VertexRef>& vs) {
  json a = json::array();
  for (const VertexRef& v : vs) a.push_back(vertex_name(p, v));
  return a;
}

json name_lists(const Presentation& p, const std::vector<std::vector<VertexRef>>& vss) {
  json a = json::array();
  for (const auto& vs : vss) a.push_back(names(p, vs));
  return a;
}

json id_names(const Presentation& p, const VertexSet& ids) {
  json a = json::array();
  for (Vertex v : ids) a.push_back(vertex_name(p, v));
  return a;
}

json separation_json(const Presentation& p, const PresentedSeparation& s) {
  return {{"side_a", describe_vertex_set(p, s.side_a)},
          {"side_b", describe_vertex_set(p, s.side_b)},
          {"separator", names(p, separator(s))}};
}

json ray_json(const Presentation& p, const RaySpec& r) {
  json cycle = json::array();
  for (const RayStep& s : r.cycle) cycle.push_back({{"block", p.block.at(s.block)}, {"level_delta", s.level_delta}});
  return {{"preperiod", names(p, r.preperiod)}, {"cycle", cycle}, {"reverse", r.reverse},
          {"prefix", names(p, ray_prefix(r, 8))}};
}

json ends_json(const Presentation& p, const TailPattern& tp) {
  json a = json::array();
  for (const End& e : ends(p, tp)) {
    json residues = json::array();
    for (auto [t, r] : tp.eventual[e.eventual_component].residues)
      residues.push_back(p.block.at(t) + "@" + std::to_string(r) + "%" + std::to_string(tp.period));
    a.push_back({{"id", e.id}, {"residues", residues}, {"representative_ray", ray_json(p, e.representative_ray)}});
  }
  return a;
}

std::string kind_name(LimitEdge::Kind k) {
  switch (k) {
    case LimitEdge::Kind::end_end: return "end-end";
    case LimitEdge::Kind::vertex_end: return "vertex-end";
    case LimitEdge::Kind::end_vertex: return "end-vertex";
  }
  return "";
}

std::string source_name(LimitEdge::Source s) {
  switch (s) {
    case LimitEdge::Source::block_edge: return "block-edge";
    case LimitEdge::Source::block_rule: return "block-rule";
    case LimitEdge::Source::cofinal_rule: return "cofinal-rule";
  }
  return "";
}

json limit_edge_json(const Presentation& p, const LimitEdge& e) {
  return {{"kind", kind_name(e.kind)},
          {"first", e.first},
          {"second", e.second},
          {"text", describe(p, e)},
          {"source", source_name(e.source)},
          {"source_index", e.source_index}};
}

json necklace_json(const Presentation& p, const Necklace& n, const NecklacePrefix& prefix,
                   const std::string& check) {
  return {{"end", n.end},
          {"shift", n.shift},
          {"bead", names(p, n.bead)},
          {"forward", names(p, n.forward)},
          {"backward", names(p, n.backward)},
          {"prefix", {{"levels", prefix.levels}, {"beads", name_lists(p, prefix.beads)}}},
          {"check", check.empty() ? "ok" : check}};
}

json bijection_json(const BijectionReport& r) {
  json m = json::array();
  for (auto [a, b] : r.matching) m.push_back({a, b});
  return {{"ok", r.ok}, {"depth", r.depth}, {"objects", r.objects}, {"threads", r.threads},
          {"matching", m}, {"failures", r.failures}};
}

json star_comb_json(const Presentation& p, const StarComb& s) {
  json j = {{"shape", s.shape == StarComb::Shape::star ? "star" : "comb"},
            {"reverse", s.reverse},
            {"spine", names(p, s.spine)},
            {"teeth", name_lists(p, s.teeth)},
            {"attachment", names(p, s.attachment)}};
  if (s.shape == StarComb::Shape::star) j["centre"] = vertex_name(p, s.centre);
  return j;
}

json rank_node_json(const Presentation& p, const RankNode& n) {
  json children = json::array();
  for (const RankNode& c : n.children) children.push_back(rank_node_json(p, c));
  json j = {{"descriptor", n.descriptor}, {"rank", to_string(n.rank)}, {"x", names(p, n.x)},
            {"children", children}};
  if (n.finite_set) {
    j["finite_set"] = *n.finite_set;
    j["intersection"] = names(p, n.intersection);
  }
  return j;
}

json fan_json(const Presentation& p, const Fan& f) {
  return {{"path", names(p, f.path)}, {"shift", f.shift}, {"reverse", f.reverse},
          {"first_paths", name_lists(p, fan_paths(f, 3))}};
}

// ---------------------------------------------------------------------------
// Commands

struct Outcome {
  es_status status = ES_OK;
  json report = json::object();
  std::string dot;
  bool has_dot = false;
};

struct Context {
  const Presentation& p;
  Options o;
  TailPattern tp;
  Outcome out;
};

UFamily family(const Context& c, const char* command) {
  if (!c.o.u_given || c.o.u.empty())
    throw UsageError(std::string(command) + " needs --u (a named set or a vertex-set spec)");
  return parse_vertex_family(c.p, c.o.u);
}

std::size_t checked_end(const Context& c) {
  if (c.o.end >= c.tp.infinite_count())
    throw UsageError("no end " + std::to_string(c.o.end) + " (there are " +
                     std::to_string(c.tp.infinite_count()) + ")");
  return c.o.end;
}

void maybe_dot(Context& c, const NecklacePrefix* prefix = nullptr) {
  if (!c.o.dot) return;
  DotOptions d;
  d.necklace = prefix;
  c.out.dot = to_dot(c.p, c.tp, d);
  c.out.has_dot = true;
}

void run_ends(Context& c) {
  c.out.report["ends"] = ends_json(c.p, c.tp);
  c.out.report["summary"] = "ends=" + std::to_string(c.tp.infinite_count());
  maybe_dot(c);
}

void run_limit_edges(Context& c) {
  json a = json::array();
  std::size_t bad = 0;
  for (const LimitEdge& e : limit_edges(c.p, c.tp)) {
    json j = limit_edge_json(c.p, e);
    LimitWitness w = witness_necklaces(c.p, c.tp, e);
    std::string err = check_limit_witness(c.p, w, c.o.beads);
    json wj = {{"first", {{"end", w.first.end}, {"shift", w.first.shift}, {"bead", names(c.p, w.first.bead)}}}};
    if (w.second)
      wj["second"] = {{"end", w.second->end}, {"shift", w.second->shift}, {"bead", names(c.p, w.second->bead)}};
    wj["check"] = err.empty() ? "ok" : err;
    if (!err.empty()) ++bad;
    j["witness"] = wj;
    a.push_back(j);
  }
  c.out.report["limit_edges"] = a;
  c.out.report["summary"] = "limit_edges=" + std::to_string(a.size());
  if (bad) {
    c.out.status = ES_CONSISTENCY_ERROR;
    c.out.report["summary"] = c.out.report["summary"].get<std::string>() + " witness_failures=" + std::to_string(bad);
  }
  maybe_dot(c);
}

json end_order_json(const Context& c) {
  json a = json::array();
  for (std::size_t x = 0; x < c.tp.infinite_count(); ++x)
    for (std::size_t y = 0; y < c.tp.infinite_count(); ++y) {
      if (x == y) continue;
      EndOrder r = end_order_leq(c.p, c.tp, x, y);
      json j = {{"first", x}, {"second", y}, {"leq", r.leq}};
      if (r.leq) {
        j["path"] = names(c.p, r.path);
        j["shift"] = r.shift;
      } else {
        j["closed"] = r.closed;
      }
      a.push_back(j);
    }
  return a;
}

json domination_json(const Context& c) {
  json a = json::array();
  for (Vertex v = 0; v < c.p.core_size(); ++v)
    for (std::size_t e = 0; e < c.tp.infinite_count(); ++e) {
      json j = {{"vertex", vertex_name(c.p, VertexRef::of_core(v))}, {"end", e}};
      for (bool rev : {false, true}) {
        auto r = dominates(c.p, c.tp, v, e, rev);
        j[rev ? "reverse_dominates" : "dominates"] = std::holds_alternative<Dominates>(r);
      }
      a.push_back(j);
    }
  return a;
}

json dichotomy_json(const Presentation& p, const DichotomyReport& d, std::size_t beads) {
  json j = {{"conclusive", d.conclusive}, {"necklace_found", d.necklace_found},
            {"rank_found", d.rank_found}, {"log", d.log}};
  if (d.necklace) {
    NecklacePrefix prefix = materialize(*d.necklace, beads);
    j["necklace"] = necklace_json(p, *d.necklace, prefix, check_necklace(p, prefix));
  }
  if (d.no_necklace) {
    j["no_necklace"] = {{"reason", d.no_necklace->reason}};
    if (d.no_necklace->finite_set) j["no_necklace"]["finite_set"] = *d.no_necklace->finite_set;
  }
  if (d.rank) {
    j["rank"] = to_string(d.rank->rank);
    j["witness"] = rank_node_json(p, d.rank->witness);
    j["exact"] = true;
  }
  return j;
}

void run_analyze(Context& c) {
  json& r = c.out.report;
  r["ends"] = ends_json(c.p, c.tp);
  json le = json::array();
  for (const LimitEdge& e : limit_edges(c.p, c.tp)) le.push_back(limit_edge_json(c.p, e));
  r["limit_edges"] = le;
  r["end_order"] = end_order_json(c);
  BijectionReport b1 = check_end_direction_bijection(c.p, c.tp, c.o.depth);
  BijectionReport b2 = check_limit_edge_direction_bijection(c.p, c.tp, c.o.depth);
  r["bijections"] = {{"ends", bijection_json(b1)}, {"limit_edges", bijection_json(b2)}};
  bool strong = is_strongly_connected(c.p, c.tp);
  r["strongly_connected"] = strong;
  r["domination"] = domination_json(c);

  // Sup/inf orientation check on sampled separation pairs, rng seeded by --seed.
  std::mt19937_64 rng(c.o.seed);
  std::size_t pairs = 0, violations = 0;
  for (std::size_t e = 0; e < c.tp.infinite_count(); ++e)
    for (std::size_t i = 0; i < 8; ++i) {
      PresentedSeparation s1 = random_separation(c.p, c.tp, rng, 2);
      PresentedSeparation s2 = random_separation(c.p, c.tp, rng, 2);
      Pointing a = separation_points(c.p, c.tp, s1, e), b = separation_points(c.p, c.tp, s2, e);
      if (a != b) continue;
      ++pairs;
      PresentedSeparation m = a == Pointing::towards ? sep_sup(s1, s2) : sep_inf(s1, s2);
      if (separation_points(c.p, c.tp, m, e) != a) ++violations;
    }
  r["pointing_samples"] = {{"pairs", pairs}, {"violations", violations}};

  if (c.o.u_given) {
    UFamily u = family(c, "analyze");
    r["dichotomy"] = dichotomy_json(c.p, dichotomy(c.p, c.tp, u), c.o.beads);
  }
  bool pass = b1.ok && b2.ok && violations == 0;
  r["summary"] = "ends=" + std::to_string(c.tp.infinite_count()) +
                 " limit_edges=" + std::to_string(le.size()) +
                 " bijections=" + (b1.ok && b2.ok ? "pass" : "FAIL") +
                 " strongly_connected=" + (strong ? "yes" : "no");
  if (!pass) c.out.status = ES_CONSISTENCY_ERROR;
  maybe_dot(c);
}

void run_necklace(Context& c) {
  UFamily u = family(c, "necklace");
  auto r = find_necklace(c.p, c.tp, u, c.o.beads);
  if (auto* n = std::get_if<Necklace>(&r)) {
    NecklacePrefix prefix = materialize(*n, c.o.beads);
    c.out.report["necklace"] = necklace_json(c.p, *n, prefix, check_necklace(c.p, prefix, &u));
    c.out.report["found"] = true;
    c.out.report["summary"] = "necklace on end " + std::to_string(n->end) + " with shift " +
                              std::to_string(n->shift) + ", " + std::to_string(c.o.beads) +
                              " beads checked";
    maybe_dot(c, &prefix);
    return;
  }
  const NoNecklace& none = std::get<NoNecklace>(r);
  json j = {{"reason", none.reason}};
  if (none.finite_set) j["finite_set"] = *none.finite_set;
  c.out.report["no_necklace"] = j;
  c.out.report["found"] = false;
  c.out.report["summary"] = "no necklace: " + none.reason;
  c.out.status = ES_NEGATIVE;
  maybe_dot(c);
}

void run_starcomb(Context& c) {
  UFamily u = family(c, "starcomb");
  StarCombPair s = star_comb(c.p, c.tp, u, c.o.teeth);
  PeriodicSet target;
  for (const PeriodicSet& x : u)
    if (!x.is_finite()) {
      target = x;
      break;
    }
  std::string e1 = check_star_comb(c.p, s.levels, s.forward, target);
  std::string e2 = check_star_comb(c.p, s.levels, s.backward, target);
  c.out.report["star_comb"] = {{"levels", s.levels},
                               {"forward", star_comb_json(c.p, s.forward)},
                               {"backward", star_comb_json(c.p, s.backward)},
                               {"shared", names(c.p, s.shared)},
                               {"check", e1.empty() && e2.empty() ? "ok" : e1 + e2}};
  auto shape = [](const StarComb& x) {
    return std::string(x.reverse ? "reverse " : "") + (x.shape == StarComb::Shape::star ? "star" : "comb");
  };
  c.out.report["summary"] = shape(s.forward) + " and " + shape(s.backward) + " sharing " +
                            std::to_string(s.shared.size()) + " attachment vertices";
  if (!e1.empty() || !e2.empty()) c.out.status = ES_CONSISTENCY_ERROR;
  maybe_dot(c);
}

void run_rank(Context& c) {
  UFamily u = family(c, "rank");
  auto r = u_rank(c.p, c.tp, u, c.o.rank_budget);
  if (auto* rr = std::get_if<RankResult>(&r)) {
    std::string err = check_rank_witness(c.p, c.tp, u, *rr);
    c.out.report["rank"] = to_string(rr->rank);
    c.out.report["exact"] = true;
    c.out.report["cuts_tried"] = rr->cuts_tried;
    c.out.report["witness"] = rank_node_json(c.p, rr->witness);
    c.out.report["check"] = err.empty() ? "ok" : err;
    c.out.report["summary"] = "rank " + to_string(rr->rank);
    if (!err.empty()) c.out.status = ES_CONSISTENCY_ERROR;
  } else {
    const Necklace& n = std::get<NoRank>(r).necklace;
    NecklacePrefix prefix = materialize(n, c.o.beads);
    c.out.report["rank"] = nullptr;
    c.out.report["necklace"] = necklace_json(c.p, n, prefix, check_necklace(c.p, prefix, &u));
    c.out.report["summary"] = "no rank: necklace on end " + std::to_string(n.end);
    c.out.status = ES_NEGATIVE;
  }
  maybe_dot(c);
}

void run_dichotomy(Context& c) {
  UFamily u = family(c, "dichotomy");
  DichotomyReport d = dichotomy(c.p, c.tp, u);
  c.out.report["dichotomy"] = dichotomy_json(c.p, d, c.o.beads);
  if (!d.conclusive) {
    c.out.report["summary"] = "inconclusive within the budget";
    c.out.status = ES_BUDGET_EXCEEDED;
  } else if (d.rank_found) {
    c.out.report["summary"] = "rank branch, rank " + to_string(d.rank->rank);
  } else {
    c.out.report["summary"] = "necklace branch, end " + std::to_string(d.necklace->end);
  }
  maybe_dot(c);
}

void run_dichromatic(Context& c) {
  std::size_t depth = c.o.depth_given ? c.o.depth : 12;
  if (c.tp.infinite_count() > 0) {
    c.out.report["summary"] = "no rank for {V}: the digraph has " +
                              std::to_string(c.tp.infinite_count()) +
                              " end(s); run dichotomy --u all for a necklace";
    c.out.status = ES_NEGATIVE;
    return;
  }
  DichromaticPartition d = dichromatic_partition(c.p, c.tp);
  std::string err = verify_acyclic(c.p, c.tp, d, depth);
  json sample = json::object();
  FiniteDigraph g = truncate(c.p, std::min<std::size_t>(depth, 4));
  for (Vertex v = 0; v < g.size(); ++v)
    sample[vertex_name(c.p, v)] = class_of(c.p, c.tp, d, vertex_ref(c.p, v));
  c.out.report["partition"] = {
      {"classes", d.class_count()},
      {"singletons", names(c.p, d.singletons)},
      {"merged_classes", d.merged_classes},
      {"x_levels", d.x_levels},
      {"rule", "class i < |X| is the i-th vertex of X; class |X| + j holds the j-th vertex by id of "
               "every strong component of D - X"},
      {"sample", sample},
      {"acyclic_check", {{"depth", depth}, {"result", err.empty() ? "ok" : err}}}};
  c.out.report["summary"] = std::to_string(d.class_count()) + " acyclic classes, checked to depth " +
                            std::to_string(depth);
  if (!err.empty()) c.out.status = ES_CONSISTENCY_ERROR;
}

void run_dominates(Context& c) {
  if (c.o.vertex.empty()) throw UsageError("dominates needs --vertex F.<label>");
  auto v = parse_vertex_name(c.p, c.o.vertex);
  if (!v) throw UsageError("no vertex named '" + c.o.vertex + "'");
  if (!v->core) throw UsageError("dominating vertices must be core vertices");
  std::size_t e = checked_end(c);
  auto r = dominates(c.p, c.tp, v->index, e, c.o.reverse);
  const std::string what = c.o.reverse ? "reverse dominates" : "dominates";
  c.out.report["vertex"] = c.o.vertex;
  c.out.report["end"] = e;
  c.out.report["reverse"] = c.o.reverse;
  if (auto* d = std::get_if<Dominates>(&r)) {
    c.out.report["dominates"] = true;
    c.out.report["fan"] = fan_json(c.p, d->fan);
    c.out.report["summary"] = c.o.vertex + " " + what + " end " + std::to_string(e);
  } else {
    const NotDominates& n = std::get<NotDominates>(r);
    c.out.report["dominates"] = false;
    c.out.report["separation"] = separation_json(c.p, n.separation);
    c.out.report["summary"] = c.o.vertex + " does not " + (c.o.reverse ? "reverse dominate" : "dominate") +
                              " end " + std::to_string(e);
    c.out.status = ES_NEGATIVE;
  }
}

void run_directions(Context& c) {
  auto kind = c.o.kind == "edge" ? DirectionThread::Kind::edge : DirectionThread::Kind::vertex;
  ThreadSet ts = direction_threads(c.p, c.tp, c.o.depth, kind);
  json threads = json::array();
  for (const DirectionThread& t : ts.threads) {
    json choices = json::array();
    for (std::size_t n = 0; n < t.choices.size(); ++n) {
      const ThreadChoice& ch = t.choices[n];
      json j = {{"n", n}, {"bundle", ch.is_bundle}};
      if (ch.is_bundle) {
        json es = json::array();
        for (const Edge& e : ch.edges) es.push_back(vertex_name(c.p, e.tail) + " -> " + vertex_name(c.p, e.head));
        j["edges"] = es;
      } else {
        j["vertices"] = id_names(c.p, ch.vertices);
      }
      choices.push_back(j);
    }
    threads.push_back({{"choices", choices}, {"certificate", names(c.p, t.certificate)}});
  }
  BijectionReport b = kind == DirectionThread::Kind::vertex
                          ? check_end_direction_bijection(c.p, c.tp, c.o.depth)
                          : check_limit_edge_direction_bijection(c.p, c.tp, c.o.depth);
  c.out.report["kind"] = c.o.kind;
  c.out.report["depth"] = ts.depth;
  c.out.report["bound"] = ts.bound;
  c.out.report["threads"] = threads;
  c.out.report["finite_at_depth"] = ts.finite_at_depth;
  c.out.report["bijection"] = bijection_json(b);
  c.out.report["summary"] = std::to_string(ts.threads.size()) + " " + c.o.kind +
                            "-direction threads at depth " + std::to_string(ts.depth) +
                            ", bijection " + (b.ok ? "pass" : "FAIL");
  if (!b.ok) c.out.status = ES_CONSISTENCY_ERROR;
}

void run_dot(Context& c) {
  std::optional<NecklacePrefix> prefix;
  if (c.o.u_given) {
    auto r = find_necklace(c.p, c.tp, family(c, "dot"), c.o.beads);
    if (auto* n = std::get_if<Necklace>(&r)) prefix = materialize(*n, c.o.beads);
  }
  DotOptions d;
  d.necklace = prefix ? &*prefix : nullptr;
  c.out.dot = to_dot(c.p, c.tp, d);
  c.out.has_dot = true;
  c.out.report["summary"] = prefix ? "DOT with " + std::to_string(prefix->beads.size()) + " bead clusters"
                                   : std::string("DOT of the truncation with strong-component clusters");
}

using Runner = void (*)(Context&);

Runner find_command(const std::string& name) {
  static const std::vector<std::pair<std::string, Runner>> table = {
      {"analyze", run_analyze},         {"ends", run_ends},
      {"limit-edges", run_limit_edges}, {"necklace", run_necklace},
      {"starcomb", run_starcomb},       {"rank", run_rank},
      {"dichotomy", run_dichotomy},     {"dichromatic", run_dichromatic},
      {"dominates", run_dominates},     {"directions", run_directions},
      {"dot", run_dot}};
  for (const auto& [n, r] : table)
    if (n == name) return r;
  return nullptr;
}

es_status status_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::invalid_argument: return ES_USAGE_ERROR;
    case ErrorCode::parse_error: return ES_PARSE_ERROR;
    case ErrorCode::validation_error: return ES_VALIDATION_ERROR;
    case ErrorCode::budget_exceeded: return ES_BUDGET_EXCEEDED;
    case ErrorCode::unreachable_vertex: return ES_USAGE_ERROR;
    case ErrorCode::consistency_failure: return ES_CONSISTENCY_ERROR;
  }
  return ES_INTERNAL_ERROR;
}

const char* status_name(es_status s) {
  switch (s) {
    case ES_OK: return "ok";
    case ES_NEGATIVE: return "negative";
    case ES_BUDGET_EXCEEDED: return "budget_exceeded";
    case ES_USAGE_ERROR: return "usage_error";
    case ES_PARSE_ERROR: return "parse_error";
    case ES_VALIDATION_ERROR: return "validation_error";
    case ES_CONSISTENCY_ERROR: return "consistency_error";
    case ES_INTERNAL_ERROR: return "internal_error";
  }
  return "internal_error";
}

es_status fail(es_status s, const std::string& message, std::size_t line = 0, std::size_t column = 0) {
  last_error = {message, line, column};
  return s;
}

// Runs f, mapping exceptions to a status and the thread's last error.
template <class F>
es_status guarded(F&& f, json* report = nullptr) {
  auto record = [&](es_status s, const std::string& msg, std::size_t line, std::size_t col) {
    if (report) {
      (*report)["error"] = {{"status", status_name(s)}, {"message", msg}};
      if (line) {
        (*report)["error"]["line"] = line;
        (*report)["error"]["column"] = col;
      }
      (*report)["summary"] = "error: " + msg;
    }
    return fail(s, msg, line, col);
  };
  try {
    return f();
  } catch (const ParseError& e) {
    return record(ES_PARSE_ERROR, e.what(), e.line(), e.column());
  } catch (const Error& e) {
    return record(status_of(e), e.what(), 0, 0);
  } catch (const std::bad_alloc&) {
    return record(ES_INTERNAL_ERROR, "out of memory", 0, 0);
  } catch (const std::exception& e) {
    return record(ES_INTERNAL_ERROR, e.what(), 0, 0);
  }
}

}  // namespace

extern "C" {

const char* es_version(void) { return ENDSPACE_VERSION; }

const char* es_last_error(void) { return last_error.message.c_str(); }
size_t es_last_error_line(void) { return last_error.line; }
size_t es_last_error_column(void) { return last_error.column; }

es_status es_presentation_parse(const char* text, size_t length, es_presentation** out) {
  if (!out) return fail(ES_USAGE_ERROR, "null output handle");
  *out = nullptr;
  if (!text && length) return fail(ES_USAGE_ERROR, "null text");
  return guarded([&] {
    auto* h = new es_presentation{parse_presentation(std::string_view(text ? text : "", length))};
    *out = h;
    return ES_OK;
  });
}

void es_presentation_destroy(es_presentation* p) { delete p; }

es_status es_presentation_serialize(const es_presentation* p, char** out) {
  if (!p || !out) return fail(ES_USAGE_ERROR, "null argument");
  return guarded([&] {
    *out = copy_out(serialize_presentation(p->p));
    return *out ? ES_OK : fail(ES_INTERNAL_ERROR, "out of memory");
  });
}

es_status es_presentation_digest(const es_presentation* p, char** out) {
  if (!p || !out) return fail(ES_USAGE_ERROR, "null argument");
  return guarded([&] {
    *out = copy_out(sha256_hex(serialize_presentation(p->p)));
    return *out ? ES_OK : fail(ES_INTERNAL_ERROR, "out of memory");
  });
}

es_status es_run(const es_presentation* p, const char* command, const char* options_json,
                 char** report_json, char** dot) {
  if (report_json) *report_json = nullptr;
  if (dot) *dot = nullptr;
  if (!p || !command || !report_json) return fail(ES_USAGE_ERROR, "null argument");
  json report = json::object();
  report["command"] = command;
  report["tool_version"] = ENDSPACE_VERSION;
  std::string dot_text;
  bool has_dot = false;
  es_status s = guarded(
      [&] {
        Runner run = find_command(command);
        if (!run) throw UsageError(std::string("unknown command '") + command + "'");
        Options o = parse_options(options_json);
        const std::string text = serialize_presentation(p->p);
        report["presentation"] = {{"digest", sha256_hex(text)},
                                  {"core_size", p->p.core_size()},
                                  {"block_size", p->p.block_size()},
                                  {"span", p->p.span}};
        report["budgets"] = {{"max_period", o.limits.max_period},
                             {"max_onset", o.limits.max_onset},
                             {"max_margin", o.limits.max_margin},
                             {"rank", o.rank_budget == OrdinalCNF::max() ? std::string("default")
                                                                         : to_string(o.rank_budget)},
                             {"depth", o.depth}};
        report["seed"] = o.seed;
        Context c{p->p, o, tail_stabilization(p->p, o.limits), {}};
        report["tail"] = {{"period", c.tp.period},
                          {"onset", c.tp.onset},
                          {"head_levels", c.tp.head_levels},
                          {"window", c.tp.window},
                          {"margin", c.tp.margin}};
        run(c);
        report.update(c.out.report);
        dot_text = std::move(c.out.dot);
        has_dot = c.out.has_dot;
        if (c.out.status == ES_NEGATIVE) last_error = {report["summary"].get<std::string>(), 0, 0};
        if (c.out.status == ES_CONSISTENCY_ERROR || c.out.status == ES_BUDGET_EXCEEDED)
          last_error = {report["summary"].get<std::string>(), 0, 0};
        return c.out.status;
      },
      &report);
  report["status"] = status_name(s);
  *report_json = copy_out(report.dump(2) + "\n");
  if (dot && has_dot) *dot = copy_out(dot_text);
  return s;
}

void es_free(void* ptr) { std::free(ptr); }

}  // extern "C"
