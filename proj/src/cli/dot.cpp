#include "endspace/dot.hpp"

#include <algorithm>
#include <sstream>

#include "endspace/limits.hpp"

namespace endspace {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string end_node(std::size_t e) { return quoted("end " + std::to_string(e)); }

}  // namespace

std::string to_dot(const Presentation& p, const TailPattern& tp, const DotOptions& o) {
  std::size_t levels = o.levels ? o.levels : tp.head_levels + 2 * tp.period + p.span;
  if (o.necklace) levels = std::max(levels, o.necklace->levels);
  FiniteDigraph g = truncate(p, levels);
  std::vector<std::size_t> cluster(g.size(), npos);
  std::vector<std::string> cluster_labels;
  std::vector<std::string> cluster_names;
  if (o.necklace) {
    for (std::size_t i = 0; i < o.necklace->beads.size(); ++i) {
      cluster_names.push_back("cluster_bead_" + std::to_string(i));
      cluster_labels.push_back("bead " + std::to_string(i));
      for (const VertexRef& v : o.necklace->beads[i])
        if (v.core || v.level < levels) cluster[vertex_id(p, v)] = i;
    }
  } else {
    Condensation c = strong_components(g);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c.components[k].size() < 2) continue;
      for (Vertex v : c.components[k]) cluster[v] = cluster_names.size();
      cluster_names.push_back("cluster_scc_" + std::to_string(k));
      cluster_labels.push_back("strong component " + std::to_string(k));
    }
  }

  std::ostringstream out;
  out << "digraph endspace {\n";
  out << "  graph [rankdir=LR, fontsize=10];\n";
  out << "  node [shape=circle, fontsize=10];\n";
  for (std::size_t k = 0; k < cluster_names.size(); ++k) {
    out << "  subgraph " << cluster_names[k] << " {\n";
    out << "    label=" << quoted(cluster_labels[k]) << ";\n    style=rounded;\n";
    for (Vertex v = 0; v < g.size(); ++v)
      if (cluster[v] == k) out << "    " << quoted(g.label(v)) << ";\n";
    out << "  }\n";
  }
  for (Vertex v = 0; v < g.size(); ++v)
    if (cluster[v] == npos) out << "  " << quoted(g.label(v)) << ";\n";
  for (const Edge& e : g.edges())
    out << "  " << quoted(g.label(e.tail)) << " -> " << quoted(g.label(e.head)) << ";\n";

  // Each end hangs off the top class vertices of its tail component.
  for (std::size_t e = 0; e < tp.infinite_count(); ++e) {
    out << "  " << end_node(e) << " [shape=point, width=0.12, xlabel="
        << quoted("end " + std::to_string(e)) << "];\n";
    for (Vertex t = 0; t < p.block_size(); ++t) {
      VertexRef v = VertexRef::of_block(t, levels - 1);
      TailSlot s = tp.locate(t, levels - 1);
      if (s.kind == TailSlot::Kind::infinite && s.index == e)
        out << "  " << quoted(vertex_name(p, v)) << " -> " << end_node(e)
            << " [style=dotted, arrowhead=none];\n";
    }
  }
  for (const LimitEdge& le : limit_edges(p, tp)) {
    auto core = [&](std::size_t f) {
      return quoted(vertex_name(p, VertexRef::of_core(static_cast<Vertex>(f))));
    };
    std::string a, b;
    switch (le.kind) {
      case LimitEdge::Kind::end_end: a = end_node(le.first); b = end_node(le.second); break;
      case LimitEdge::Kind::vertex_end: a = core(le.first); b = end_node(le.second); break;
      case LimitEdge::Kind::end_vertex: a = end_node(le.first); b = core(le.second); break;
    }
    out << "  " << a << " -> " << b << " [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace endspace
