#include "endspace/rank.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

#include "endspace/directions.hpp"
#include "endspace/error.hpp"

namespace endspace {

// ---------------------------------------------------------------------------
// Ordinals

OrdinalCNF OrdinalCNF::max() {
  constexpr std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
  return {{m, m, m, m}};
}

OrdinalCNF OrdinalCNF::successor() const {
  OrdinalCNF o = *this;
  if (o.c[3] == std::numeric_limits<std::uint64_t>::max())
    throw BudgetExceeded("ordinal successor overflows");
  ++o.c[3];
  return o;
}

std::string to_string(const OrdinalCNF& o) {
  static const char* powers[] = {"w^3", "w^2", "w", ""};
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (o.c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (i == 3) {
      out += std::to_string(o.c[i]);
    } else {
      out += powers[i];
      if (o.c[i] != 1) out += "*" + std::to_string(o.c[i]);
    }
  }
  return out.empty() ? "0" : out;
}

OrdinalCNF parse_ordinal(std::string_view text) {
  auto fail = [&](const std::string& why) -> OrdinalCNF {
    throw ParseError(ErrorCode::parse_error, 0, 0,
                     "bad ordinal '" + std::string(text) + "': " + why);
  };
  std::string s;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) continue;
    if (text.substr(i, 5) == "omega") {
      s += 'w';
      i += 4;
    } else {
      s += text[i];
    }
  }
  if (s.empty()) return fail("empty");
  auto number = [&](std::size_t& i) -> std::uint64_t {
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail("expected a number");
    std::uint64_t v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::uint64_t d = static_cast<std::uint64_t>(s[i] - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10) fail("coefficient overflows");
      v = v * 10 + d;
      ++i;
    }
    return v;
  };
  OrdinalCNF o;
  int last = -1;
  std::size_t i = 0;
  while (true) {
    int slot = 3;
    std::uint64_t coeff = 1;
    if (s[i] == 'w') {
      ++i;
      std::uint64_t power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        power = number(i);
      }
      if (power < 1 || power > 3) fail("exponent must be 1, 2 or 3");
      slot = 3 - static_cast<int>(power);
      if (i < s.size() && s[i] == '*') {
        ++i;
        coeff = number(i);
      }
    } else {
      coeff = number(i);
    }
    if (slot <= last) fail("terms must have strictly decreasing exponents");
    last = slot;
    o.c[static_cast<std::size_t>(slot)] = coeff;
    if (i == s.size()) break;
    if (s[i] != '+') fail("unexpected '" + std::string(1, s[i]) + "'");
    if (++i == s.size()) fail("dangling '+'");
  }
  return o;
}

// ---------------------------------------------------------------------------
// Ranks of presented digraphs

namespace {

std::size_t family_period(const TailPattern& tp, const UFamily& u) {
  std::size_t q = tp.period;
  for (const PeriodicSet& s : u) q = std::lcm(q, s.period());
  return q;
}

std::vector<VertexRef> shifted_up(std::vector<VertexRef> vs, std::size_t n) {
  for (VertexRef& v : vs)
    if (!v.core) v.level += n;
  return vs;
}

std::vector<VertexRef> prefix_refs(const Presentation& p, std::size_t n) {
  std::vector<VertexRef> out;
  for (Vertex f = 0; f < p.core_size(); ++f) out.push_back(VertexRef::of_core(f));
  for (std::size_t l = 0; l < n; ++l)
    for (Vertex t = 0; t < p.block_size(); ++t) out.push_back(VertexRef::of_block(t, l));
  return out;
}

// Lowest copy of a finite template at or above the head.
std::vector<VertexRef> template_copy(const TailPattern& tp, std::size_t k) {
  const EventualComponent& c = tp.eventual.at(k);
  std::size_t a = tp.head_levels;
  while (a % tp.period != c.anchor_residue % tp.period) ++a;
  std::vector<VertexRef> out;
  for (auto [t, off] : c.cells) out.push_back(VertexRef::of_block(t, a + off));
  return out;
}

OrdinalCNF node_rank(const std::vector<RankNode>& children) {
  OrdinalCNF r = OrdinalCNF::finite(1);
  for (const RankNode& c : children) r = std::max(r, c.rank.successor());
  return r;
}

class Solver {
 public:
  Solver(const Presentation& p, const TailPattern& tp, const UFamily& u)
      : p_(p), tp_(tp), u_(u), q_(family_period(tp, u)) {}

  std::size_t cuts() const { return cuts_; }

  // Index and members of a set of u meeting s finitely.
  std::optional<std::pair<std::size_t, std::vector<VertexRef>>> finite_meet(
      const PeriodicSet& s) const {
    for (std::size_t i = 0; i < u_.size(); ++i) {
      PeriodicSet x = s.intersected(u_[i]);
      if (x.is_finite()) return std::pair(i, x.finite_members());
    }
    return std::nullopt;
  }

  // A finite component has rank 0 when u is nonempty and rank 1 otherwise
  // (X = its vertex set leaves nothing).
  RankNode finite_component(RankNode::Kind kind, std::size_t index, std::size_t cut,
                            std::string descriptor,
                            const std::vector<VertexRef>& members) const {
    RankNode n;
    n.kind = kind;
    n.index = index;
    n.cut = cut;
    n.descriptor = std::move(descriptor);
    if (!u_.empty()) {
      n.finite_set = 0;
      for (const VertexRef& v : members)
        if (u_[0].contains(v)) n.intersection.push_back(v);
    } else {
      n.rank = OrdinalCNF::finite(1);
      n.x = members;
    }
    return n;
  }

  // C(X_n, omega_end). If every set of u meets it infinitely, so does every
  // infinite component of C - X for finite X; that component contains a copy
  // of C shifted by a multiple of q with the same trace on u, and subdigraph
  // monotonicity gives rank(C) <= rank(copy) < rank(C). So the component has
  // rank 0 or none.
  std::optional<RankNode> infinite(std::size_t end, std::size_t n) const {
    auto meet = finite_meet(living_set(p_, tp_, end, n));
    if (!meet) return std::nullopt;
    RankNode leaf;
    leaf.kind = RankNode::Kind::end_component;
    leaf.index = end;
    leaf.cut = n;
    leaf.descriptor = "C(X_" + std::to_string(n) + ", end " + std::to_string(end) + ")";
    leaf.finite_set = meet->first;
    leaf.intersection = meet->second;
    return leaf;
  }

  // Prefix cuts suffice: a working X lies in some X_n, and each component of
  // D - X_n is a subdigraph of a component of D - X. Cuts with equal residue
  // mod q give isomorphic children.
  std::optional<RankNode> whole() {
    RankNode root;
    root.descriptor = "D";
    if (auto meet = finite_meet(PeriodicSet::everything(p_.core_size(), p_.block_size()))) {
      root.finite_set = meet->first;
      root.intersection = meet->second;
      return root;
    }
    std::optional<RankNode> best;
    for (std::size_t m = 0; m < q_; ++m) {
      ++cuts_;
      RankNode node = root;
      node.x = prefix_refs(p_, m);
      bool ok = true;
      for (std::size_t e = 0; e < tp_.infinite_count() && ok; ++e) {
        std::optional<RankNode> c = infinite(e, m);
        if (c)
          node.children.push_back(*c);
        else
          ok = false;
      }
      if (!ok) continue;
      for (std::size_t j = 0; j < tp_.head_components.size(); ++j)
        node.children.push_back(finite_component(
            RankNode::Kind::head_component, j, m,
            "head component " + std::to_string(j) + " of D - X_" + std::to_string(m),
            shifted_up(tp_.head_components[j], m)));
      for (std::size_t k = tp_.infinite_count(); k < tp_.eventual.size(); ++k)
        node.children.push_back(finite_component(
            RankNode::Kind::template_copies, k, m,
            "copies of template " + std::to_string(k) + " in D - X_" + std::to_string(m),
            shifted_up(template_copy(tp_, k), m)));
      node.rank = node_rank(node.children);
      if (!best || node.rank < best->rank) best = std::move(node);
    }
    return best;
  }

 private:
  const Presentation& p_;
  const TailPattern& tp_;
  const UFamily& u_;
  std::size_t q_;
  std::size_t cuts_ = 0;
};

}  // namespace

std::variant<RankResult, NoRank> u_rank(const Presentation& p, const TailPattern& tp,
                                        const UFamily& u, const OrdinalCNF& budget) {
  Solver solver(p, tp, u);
  std::optional<RankNode> root = solver.whole();
  if (!root) {
    auto n = find_necklace(p, tp, u, 2);
    if (auto* neck = std::get_if<Necklace>(&n)) return NoRank{*neck};
    consistency_failure("no rank and no necklace: " + std::get<NoNecklace>(n).reason);
  }
  if (root->rank > budget)
    throw BudgetExceeded("rank " + to_string(root->rank) + " exceeds " + to_string(budget));
  RankResult r;
  r.rank = root->rank;
  r.witness = std::move(*root);
  r.cuts_tried = solver.cuts();
  return r;
}

RankResult u_rank(const FiniteDigraph& g, const std::vector<VertexSet>& u) {
  RankResult r;
  r.witness.descriptor = "D";
  if (!u.empty()) {
    r.witness.finite_set = 0;
    for (Vertex v : u[0])
      if (v < g.size()) r.witness.intersection.push_back(VertexRef::of_core(v));
    return r;
  }
  for (Vertex v = 0; v < g.size(); ++v) r.witness.x.push_back(VertexRef::of_core(v));
  r.rank = r.witness.rank = OrdinalCNF::finite(1);
  return r;
}

namespace {

std::string check_node(const Presentation& p, const TailPattern& tp, const UFamily& u,
                       const RankNode& n, const PeriodicSet& vertices) {
  const std::string at = n.descriptor + ": ";
  if (n.rank.is_zero()) {
    if (!n.finite_set || *n.finite_set >= u.size()) return at + "rank 0 without a finite set";
    if (n.kind == RankNode::Kind::head_component || n.kind == RankNode::Kind::template_copies)
      return "";  // finite digraphs meet every set finitely
    PeriodicSet x = vertices.intersected(u[*n.finite_set]);
    if (!x.is_finite()) return at + "intersection with set " + std::to_string(*n.finite_set) + " is infinite";
    if (x.finite_members() != n.intersection) return at + "listed intersection differs";
    return "";
  }
  if (n.finite_set) return at + "positive rank with a finite set";
  if (n.kind == RankNode::Kind::head_component || n.kind == RankNode::Kind::template_copies) {
    if (!u.empty()) return at + "finite component listed with positive rank";
    if (n.rank != OrdinalCNF::finite(1) || !n.children.empty()) return at + "finite component must have rank 1";
    return "";
  }
  if (!u.empty() && vertices.intersected(u[0]).is_finite() && n.kind == RankNode::Kind::end_component)
    return at + "rank 0 was available";
  for (const RankNode& c : n.children)
    if (!(c.rank < n.rank)) return at + "child " + c.descriptor + " does not have smaller rank";
  for (const RankNode& c : n.children) {
    PeriodicSet cv = c.kind == RankNode::Kind::end_component
                         ? living_set(p, tp, c.index, c.cut)
                         : PeriodicSet(p.core_size(), p.block_size());
    if (auto err = check_node(p, tp, u, c, cv); !err.empty()) return err;
  }
  return "";
}

}  // namespace

std::string check_rank_witness(const Presentation& p, const TailPattern& tp, const UFamily& u,
                               const RankResult& r) {
  const RankNode& root = r.witness;
  if (root.rank != r.rank) return "root rank differs from the result";
  PeriodicSet all = PeriodicSet::everything(p.core_size(), p.block_size());
  if (root.rank.is_zero()) return check_node(p, tp, u, root, all);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i].is_finite()) return "set " + std::to_string(i) + " is finite, so the rank is 0";
  if (p.block_size() == 0) return "";
  if ((root.x.size() < p.core_size()) || (root.x.size() - p.core_size()) % p.block_size() != 0)
    return "X is not a prefix cut";
  const std::size_t m = (root.x.size() - p.core_size()) / p.block_size();
  if (root.x != prefix_refs(p, m)) return "X is not X_" + std::to_string(m);

  // Components of D - X_m from a truncation, independently of the pattern:
  // a component touching the top band is infinite; others are finite.
  const std::size_t slack = tp.margin + tp.window + p.span;
  const std::size_t check_top = m + tp.head_levels + 2 * (tp.window + tp.period + p.span);
  const std::size_t levels = check_top + 2 * slack + tp.period;
  FiniteDigraph g = truncate(p, levels);
  VertexMask cut(g.size(), false);
  for (const VertexRef& v : root.x) cut[vertex_id(p, v)] = true;
  Condensation c = strong_components(g, cut);
  std::set<std::size_t> ends_seen;
  bool finite_seen = false;
  for (std::size_t k = 0; k < c.size(); ++k) {
    bool top = false;
    std::size_t low = npos;
    for (Vertex id : c.components[k]) {
      VertexRef v = vertex_ref(p, id);
      top = top || v.level + slack >= levels;
      low = std::min(low, v.level);
    }
    if (low >= check_top) continue;
    if (!top) {
      finite_seen = true;
      continue;
    }
    VertexRef v = vertex_ref(p, c.components[k].front());
    std::optional<std::size_t> end;
    for (std::size_t e = 0; e < tp.infinite_count(); ++e)
      if (tp.in_living_component(e, m, v)) end = e;
    if (!end) return "infinite component at " + vertex_name(p, v) + " matches no end";
    for (Vertex id : c.components[k]) {
      VertexRef w = vertex_ref(p, id);
      if (w.level + slack < levels && !tp.in_living_component(*end, m, w))
        return "component of end " + std::to_string(*end) + " is split";
    }
    ends_seen.insert(*end);
  }
  std::set<std::size_t> ends_listed;
  bool finite_listed = false;
  for (const RankNode& ch : root.children) {
    if (ch.kind == RankNode::Kind::end_component) {
      if (ch.cut != m) return ch.descriptor + ": wrong cut";
      ends_listed.insert(ch.index);
    } else {
      finite_listed = true;
    }
  }
  if (ends_seen != ends_listed) return "listed ends differ from the components of D - X";
  if (finite_seen && !finite_listed) return "finite components of D - X are not listed";
  return check_node(p, tp, u, root, all);
}

DichotomyReport dichotomy(const Presentation& p, const TailPattern& tp, const UFamily& u) {
  DichotomyReport out;
  auto neck = find_necklace(p, tp, u, 3);
  if (auto* n = std::get_if<Necklace>(&neck)) {
    out.necklace_found = true;
    out.necklace = *n;
    out.log.push_back("necklace found on end " + std::to_string(n->end) + " with shift " +
                      std::to_string(n->shift));
  } else {
    out.no_necklace = std::get<NoNecklace>(neck);
    out.log.push_back("no necklace: " + out.no_necklace->reason);
  }
  try {
    auto r = u_rank(p, tp, u);
    if (auto* rr = std::get_if<RankResult>(&r)) {
      if (auto err = check_rank_witness(p, tp, u, *rr); !err.empty())
        consistency_failure("rank witness rejected: " + err);
      out.rank_found = true;
      out.rank = *rr;
      out.log.push_back("rank " + to_string(rr->rank) + " after " + std::to_string(rr->cuts_tried) +
                        " prefix cuts");
    } else {
      out.log.push_back("no rank: a living component meets every set infinitely");
    }
  } catch (const BudgetExceeded& e) {
    out.log.push_back(e.what());
    return out;
  }
  if (out.necklace_found == out.rank_found)
    consistency_failure(out.rank_found ? "both a necklace and a rank exist"
                                       : "neither a necklace nor a rank exists");
  out.conclusive = true;
  return out;
}

// ---------------------------------------------------------------------------
// Acyclic partitions

namespace {

// The component of D - X_0 holding block vertex v, sorted by vertex id.
std::vector<VertexRef> component_of(const Presentation& p, const TailPattern& tp, VertexRef v) {
  TailSlot s = tp.locate(v.index, v.level);
  if (s.kind == TailSlot::Kind::infinite) consistency_failure("vertex in an infinite component");
  std::size_t top = tp.head_levels;
  if (s.kind == TailSlot::Kind::instance)
    for (auto [t, off] : tp.eventual.at(s.index).cells) top = std::max(top, s.anchor + off + 1);
  std::vector<VertexRef> ms = tp.members(s, 0, top);
  std::sort(ms.begin(), ms.end(), [&](const VertexRef& a, const VertexRef& b) {
    return vertex_id(p, a) < vertex_id(p, b);
  });
  return ms;
}

}  // namespace

DichromaticPartition dichromatic_partition(const Presentation& p, const TailPattern& tp) {
  if (tp.infinite_count() > 0)
    throw Error(ErrorCode::invalid_argument,
                "the digraph has " + std::to_string(tp.infinite_count()) +
                    " end(s), so it has no rank for the family {V}");
  DichromaticPartition d;
  for (Vertex f = 0; f < p.core_size(); ++f) d.singletons.push_back(VertexRef::of_core(f));
  for (const auto& h : tp.head_components) d.merged_classes = std::max(d.merged_classes, h.size());
  for (const auto& e : tp.eventual) d.merged_classes = std::max(d.merged_classes, e.cells.size());
  return d;
}

std::size_t class_of(const Presentation& p, const TailPattern& tp, const DichromaticPartition& d,
                     VertexRef v) {
  auto it = std::find(d.singletons.begin(), d.singletons.end(), v);
  if (it != d.singletons.end()) return static_cast<std::size_t>(it - d.singletons.begin());
  if (v.core) throw Error(ErrorCode::invalid_argument, "core vertex outside X");
  std::vector<VertexRef> comp = component_of(p, tp, v);
  auto pos = std::find(comp.begin(), comp.end(), v);
  if (pos == comp.end()) consistency_failure("vertex missing from its component");
  return d.singletons.size() + static_cast<std::size_t>(pos - comp.begin());
}

std::string verify_acyclic(const Presentation& p, const TailPattern& tp,
                           const DichromaticPartition& d, std::size_t depth) {
  FiniteDigraph full = truncate(p, depth);
  std::vector<std::size_t> cls(full.size());
  for (Vertex id = 0; id < full.size(); ++id) cls[id] = class_of(p, tp, d, vertex_ref(p, id));
  for (std::size_t levels = 1; levels <= depth; ++levels) {
    FiniteDigraph g = truncate(p, levels);
    for (std::size_t k = 0; k < d.class_count(); ++k) {
      VertexMask removed(g.size(), true);
      for (Vertex id = 0; id < g.size(); ++id)
        if (cls[id] == k) removed[id] = false;
      Condensation c = strong_components(g, removed);
      for (const VertexSet& comp : c.components)
        if (comp.size() > 1)
          return "class " + std::to_string(k) + " has a cycle through " +
                 vertex_name(p, vertex_ref(p, comp.front())) + " in D_" + std::to_string(levels);
    }
  }
  return "";
}

}  // namespace endspace
