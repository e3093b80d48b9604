#include "endspace/presentation.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "endspace/error.hpp"

namespace endspace {

namespace {

using Item = ValidationIssue::Item;

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

template <class T>
void check_duplicates(const std::vector<T>& items, Item kind, const char* what,
                      std::vector<ValidationIssue>& issues) {
  std::set<T> seen;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!seen.insert(items[i]).second)
      issues.push_back({kind, i, std::string("duplicate ") + what});
}

}  // namespace

std::vector<ValidationIssue> validate(const Presentation& p) {
  std::vector<ValidationIssue> issues;
  const std::size_t nf = p.core.size(), nt = p.block.size();
  if (nt == 0) issues.push_back({Item::presentation, 0, "block has no vertices"});
  if (p.span < 1) issues.push_back({Item::presentation, 0, "span must be at least 1"});

  auto check_labels = [&](const std::vector<std::string>& labels, Item kind) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!valid_label(labels[i]))
        issues.push_back({kind, i, "invalid label '" + labels[i] + "'"});
      else if (!seen.insert(labels[i]).second)
        issues.push_back({kind, i, "duplicate label '" + labels[i] + "'"});
    }
  };
  check_labels(p.core, Item::core_label);
  check_labels(p.block, Item::block_label);

  for (std::size_t i = 0; i < p.core_edges.size(); ++i) {
    const Edge& e = p.core_edges[i];
    if (e.tail >= nf || e.head >= nf)
      issues.push_back({Item::core_edge, i, "core edge endpoint out of range"});
    else if (e.tail == e.head)
      issues.push_back({Item::core_edge, i, "loop on a core vertex"});
  }
  check_duplicates(p.core_edges, Item::core_edge, "core edge", issues);

  for (std::size_t i = 0; i < p.block_edges.size(); ++i) {
    const Edge& e = p.block_edges[i];
    if (e.tail >= nt || e.head >= nt)
      issues.push_back({Item::block_edge, i, "block edge endpoint out of range"});
    else if (e.tail == e.head)
      issues.push_back({Item::block_edge, i, "loop on a block vertex"});
  }
  check_duplicates(p.block_edges, Item::block_edge, "block edge", issues);

  for (std::size_t i = 0; i < p.block_rules.size(); ++i) {
    const BlockRule& r = p.block_rules[i];
    if (r.from >= nt || r.to >= nt)
      issues.push_back({Item::block_rule, i, "block rule endpoint out of range"});
    if (r.offset == 0)
      issues.push_back({Item::block_rule, i, "block rule offset must be nonzero"});
    else if (static_cast<std::size_t>(r.offset < 0 ? -r.offset : r.offset) > p.span)
      issues.push_back({Item::block_rule, i,
                        "offset " + std::to_string(r.offset) + " exceeds span " +
                            std::to_string(p.span)});
  }
  check_duplicates(p.block_rules, Item::block_rule, "block rule", issues);

  auto check_links = [&](const std::vector<CoreLink>& links, Item kind) {
    for (std::size_t i = 0; i < links.size(); ++i)
      if (links[i].core >= nf || links[i].block >= nt)
        issues.push_back({kind, i, "endpoint out of range"});
  };
  check_links(p.attach_edges, Item::attach_edge);
  check_links(p.cofinal_rules, Item::cofinal_rule);
  check_duplicates(p.attach_edges, Item::attach_edge, "attach edge", issues);
  check_duplicates(p.cofinal_rules, Item::cofinal_rule, "cofinal rule", issues);
  // An attach edge that repeats a cofinal rule would be a multi-edge at level 0.
  std::set<CoreLink> cofinal(p.cofinal_rules.begin(), p.cofinal_rules.end());
  for (std::size_t i = 0; i < p.attach_edges.size(); ++i)
    if (cofinal.count(p.attach_edges[i]))
      issues.push_back({Item::attach_edge, i, "attach edge duplicates a cofinal rule"});

  std::set<std::string> names;
  for (std::size_t i = 0; i < p.named_sets.size(); ++i) {
    if (!valid_label(p.named_sets[i].name))
      issues.push_back({Item::named_set, i, "invalid set name"});
    else if (!names.insert(p.named_sets[i].name).second)
      issues.push_back({Item::named_set, i, "duplicate set name"});
  }
  return issues;
}

void require_valid(const Presentation& p) {
  auto issues = validate(p);
  if (!issues.empty())
    throw Error(ErrorCode::validation_error, issues.front().message);
}

Vertex vertex_id(const Presentation& p, VertexRef v) {
  if (v.core) return v.index;
  return static_cast<Vertex>(p.core.size() + v.level * p.block.size() + v.index);
}

VertexRef vertex_ref(const Presentation& p, Vertex id) {
  if (id < p.core.size()) return VertexRef::of_core(id);
  std::size_t r = id - p.core.size();
  return VertexRef::of_block(static_cast<Vertex>(r % p.block.size()),
                             r / p.block.size());
}

std::string vertex_name(const Presentation& p, VertexRef v) {
  if (v.core) return "F." + p.core.at(v.index);
  return p.block.at(v.index) + "@" + std::to_string(v.level);
}

std::string vertex_name(const Presentation& p, Vertex id) {
  return vertex_name(p, vertex_ref(p, id));
}

std::optional<Vertex> find_core(const Presentation& p, std::string_view label) {
  for (std::size_t i = 0; i < p.core.size(); ++i)
    if (p.core[i] == label) return static_cast<Vertex>(i);
  return std::nullopt;
}

std::optional<Vertex> find_block(const Presentation& p, std::string_view label) {
  for (std::size_t i = 0; i < p.block.size(); ++i)
    if (p.block[i] == label) return static_cast<Vertex>(i);
  return std::nullopt;
}

std::optional<VertexRef> parse_vertex_name(const Presentation& p,
                                           std::string_view name) {
  if (name.substr(0, 2) == "F.") {
    auto f = find_core(p, name.substr(2));
    if (!f) return std::nullopt;
    return VertexRef::of_core(*f);
  }
  auto at = name.find('@');
  if (at == std::string_view::npos) return std::nullopt;
  auto t = find_block(p, name.substr(0, at));
  if (!t) return std::nullopt;
  std::string_view digits = name.substr(at + 1);
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  std::size_t level = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    level = level * 10 + static_cast<std::size_t>(c - '0');
  }
  return VertexRef::of_block(*t, level);
}

bool has_edge(const Presentation& p, VertexRef a, VertexRef b) {
  if (a.core && b.core)
    return std::find(p.core_edges.begin(), p.core_edges.end(),
                     Edge{a.index, b.index}) != p.core_edges.end();
  if (a.core || b.core) {
    VertexRef c = a.core ? a : b, t = a.core ? b : a;
    LinkDirection dir = a.core ? LinkDirection::core_to_block : LinkDirection::block_to_core;
    CoreLink link{c.index, t.index, dir};
    if (std::find(p.cofinal_rules.begin(), p.cofinal_rules.end(), link) != p.cofinal_rules.end())
      return true;
    return t.level == 0 && std::find(p.attach_edges.begin(), p.attach_edges.end(), link) !=
                               p.attach_edges.end();
  }
  if (a.level == b.level)
    return std::find(p.block_edges.begin(), p.block_edges.end(),
                     Edge{a.index, b.index}) != p.block_edges.end();
  long delta = static_cast<long>(b.level) - static_cast<long>(a.level);
  return std::find(p.block_rules.begin(), p.block_rules.end(),
                   BlockRule{a.index, b.index, static_cast<int>(delta)}) != p.block_rules.end();
}

std::vector<VertexRef> block_neighbours(const Presentation& p, VertexRef v,
                                        bool reverse) {
  std::vector<VertexRef> out;
  for (const Edge& e : p.block_edges) {
    if (!reverse && e.tail == v.index) out.push_back(VertexRef::of_block(e.head, v.level));
    if (reverse && e.head == v.index) out.push_back(VertexRef::of_block(e.tail, v.level));
  }
  for (const BlockRule& r : p.block_rules) {
    Vertex self = reverse ? r.to : r.from, other = reverse ? r.from : r.to;
    if (self != v.index) continue;
    long level = static_cast<long>(v.level) + (reverse ? -r.offset : r.offset);
    if (level < 0) continue;
    out.push_back(VertexRef::of_block(other, static_cast<std::size_t>(level)));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t prefix_size(const Presentation& p, std::size_t n) {
  return p.core.size() + n * p.block.size();
}

FiniteDigraph truncate(const Presentation& p, std::size_t levels) {
  const std::size_t nf = p.core.size(), nt = p.block.size();
  const std::size_t n = prefix_size(p, levels);
  std::vector<Edge> edges = p.core_edges;
  auto id = [&](Vertex t, std::size_t level) {
    return static_cast<Vertex>(nf + level * nt + t);
  };
  for (std::size_t level = 0; level < levels; ++level) {
    for (const Edge& e : p.block_edges) edges.push_back({id(e.tail, level), id(e.head, level)});
    for (const BlockRule& r : p.block_rules) {
      long target = static_cast<long>(level) + r.offset;
      if (target < 0 || target >= static_cast<long>(levels)) continue;
      edges.push_back({id(r.from, level), id(r.to, static_cast<std::size_t>(target))});
    }
    for (const CoreLink& c : p.cofinal_rules) {
      if (c.direction == LinkDirection::core_to_block)
        edges.push_back({c.core, id(c.block, level)});
      else
        edges.push_back({id(c.block, level), c.core});
    }
  }
  if (levels > 0)
    for (const CoreLink& c : p.attach_edges) {
      if (c.direction == LinkDirection::core_to_block)
        edges.push_back({c.core, id(c.block, 0)});
      else
        edges.push_back({id(c.block, 0), c.core});
    }
  std::vector<std::string> labels;
  labels.reserve(n);
  for (Vertex v = 0; v < n; ++v) labels.push_back(vertex_name(p, v));
  return FiniteDigraph(n, std::move(edges), std::move(labels));
}

VertexSet exhaustion(const Presentation& p, std::size_t n) {
  VertexSet x(prefix_size(p, n));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<Vertex>(i);
  return x;
}

Presentation reversed(const Presentation& p) {
  Presentation r = p;
  for (Edge& e : r.core_edges) std::swap(e.tail, e.head);
  for (Edge& e : r.block_edges) std::swap(e.tail, e.head);
  for (BlockRule& b : r.block_rules) {
    std::swap(b.from, b.to);
    b.offset = -b.offset;
  }
  auto flip = [](CoreLink& c) {
    c.direction = c.direction == LinkDirection::core_to_block
                      ? LinkDirection::block_to_core
                      : LinkDirection::core_to_block;
  };
  for (CoreLink& c : r.attach_edges) flip(c);
  for (CoreLink& c : r.cofinal_rules) flip(c);
  return r;
}

std::size_t cycle_gain(const RaySpec& r) {
  long gain = 0;
  for (const RayStep& s : r.cycle) gain += s.level_delta;
  return gain > 0 ? static_cast<std::size_t>(gain) : 0;
}

std::vector<VertexRef> ray_prefix(const RaySpec& r, std::size_t count) {
  std::vector<VertexRef> out;
  for (std::size_t i = 0; i < r.preperiod.size() && out.size() < count; ++i)
    out.push_back(r.preperiod[i]);
  if (r.preperiod.empty() || r.cycle.empty()) return out;
  VertexRef cur = r.preperiod.back();
  while (out.size() < count) {
    for (const RayStep& s : r.cycle) {
      if (out.size() >= count) break;
      long level = static_cast<long>(cur.level) + s.level_delta;
      if (level < 0) return out;
      cur = VertexRef::of_block(s.block, static_cast<std::size_t>(level));
      out.push_back(cur);
    }
  }
  return out;
}

void validate_ray(const Presentation& p, const RaySpec& r) {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::validation_error, "ray: " + m); };
  if (r.preperiod.empty()) fail("empty preperiod");
  if (r.cycle.empty()) fail("empty cycle");
  if (r.preperiod.back().core) fail("preperiod must end in a block vertex");
  for (const VertexRef& v : r.preperiod)
    if ((v.core && v.index >= p.core.size()) || (!v.core && v.index >= p.block.size()))
      fail("vertex out of range");
  long gain = 0, low = 0, high = 0;
  for (const RayStep& s : r.cycle) {
    if (s.block >= p.block.size()) fail("cycle vertex out of range");
    gain += s.level_delta;
    low = std::min(low, gain);
    high = std::max(high, gain);
  }
  if (gain <= 0) fail("cycle does not gain levels");
  if (r.cycle.back().block != r.preperiod.back().index)
    fail("cycle does not return to its starting block vertex");
  if (static_cast<long>(r.preperiod.back().level) + low < 0) fail("cycle drops below level 0");

  // Repetitions can only occur between copies at most (span / gain) cycles
  // apart, and the preperiod sits below a bounded level.
  std::size_t max_pre = 0;
  for (const VertexRef& v : r.preperiod) max_pre = std::max(max_pre, v.level);
  std::size_t copies = static_cast<std::size_t>((high - low) / gain) +
                       (max_pre + static_cast<std::size_t>(high - low)) / static_cast<std::size_t>(gain) + 3;
  auto prefix = ray_prefix(r, r.preperiod.size() + copies * r.cycle.size());
  std::set<VertexRef> seen;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!seen.insert(prefix[i]).second) fail("ray repeats vertex " + vertex_name(p, prefix[i]));
    if (i == 0) continue;
    bool ok = r.reverse ? has_edge(p, prefix[i], prefix[i - 1]) : has_edge(p, prefix[i - 1], prefix[i]);
    if (!ok)
      fail("missing edge between " + vertex_name(p, prefix[i - 1]) + " and " +
           vertex_name(p, prefix[i]));
  }
}

}  // namespace endspace
