#include <algorithm>
#include <iterator>

#include "endspace/core.hpp"
#include "endspace/error.hpp"

namespace endspace {

namespace {

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

bool is_separation(const FiniteDigraph& g, const Separation& s) {
  VertexMask a(g.size(), false), b(g.size(), false);
  for (Vertex v : s.side_a) {
    if (v >= g.size()) return false;
    a[v] = true;
  }
  for (Vertex v : s.side_b) {
    if (v >= g.size()) return false;
    b[v] = true;
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!a[v] && !b[v]) return false;
  for (const Edge& e : g.edges()) {
    bool from_b_only = b[e.tail] && !a[e.tail];
    bool to_a_only = a[e.head] && !b[e.head];
    if (from_b_only && to_a_only) return false;
  }
  return true;
}

VertexSet separator(const Separation& s) {
  return set_intersection(s.side_a, s.side_b);
}

bool separation_leq(const Separation& s1, const Separation& s2) {
  return std::includes(s2.side_a.begin(), s2.side_a.end(), s1.side_a.begin(),
                       s1.side_a.end()) &&
         std::includes(s1.side_b.begin(), s1.side_b.end(), s2.side_b.begin(),
                       s2.side_b.end());
}

Separation sep_sup(const Separation& s1, const Separation& s2) {
  return {set_union(s1.side_a, s2.side_a), set_intersection(s1.side_b, s2.side_b)};
}

Separation sep_inf(const Separation& s1, const Separation& s2) {
  return {set_intersection(s1.side_a, s2.side_a), set_union(s1.side_b, s2.side_b)};
}

Separation sep_sup(const FiniteDigraph& g, const Separation& s1,
                   const Separation& s2) {
  ENDSPACE_ENSURE(is_separation(g, s1) && is_separation(g, s2));
  Separation s = sep_sup(s1, s2);
  ENDSPACE_ENSURE(is_separation(g, s));
  return s;
}

Separation sep_inf(const FiniteDigraph& g, const Separation& s1,
                   const Separation& s2) {
  ENDSPACE_ENSURE(is_separation(g, s1) && is_separation(g, s2));
  Separation s = sep_inf(s1, s2);
  ENDSPACE_ENSURE(is_separation(g, s));
  return s;
}

}  // namespace endspace
