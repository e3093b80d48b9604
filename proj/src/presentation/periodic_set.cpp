#include "endspace/periodic_set.hpp"

#include <algorithm>
#include <numeric>

#include "endspace/error.hpp"

namespace endspace {

PeriodicSet::PeriodicSet(std::size_t core_size, std::size_t block_size)
    : block_size_(block_size),
      core_(core_size, false),
      pattern_(block_size, false) {}

PeriodicSet PeriodicSet::everything(std::size_t core_size, std::size_t block_size) {
  PeriodicSet s(core_size, block_size);
  s.core_.assign(core_size, true);
  s.pattern_.assign(block_size, true);
  return s;
}

PeriodicSet PeriodicSet::of_members(std::size_t core_size, std::size_t block_size,
                                    const std::vector<VertexRef>& members) {
  PeriodicSet s(core_size, block_size);
  std::size_t top = 0;
  for (const VertexRef& v : members)
    if (!v.core) top = std::max(top, v.level + 1);
  s.base_ = top;
  s.explicit_.assign(top * block_size, false);
  for (const VertexRef& v : members) {
    if (v.core)
      s.core_.at(v.index) = true;
    else
      s.explicit_.at(v.level * block_size + v.index) = true;
  }
  s.normalize();
  return s;
}

PeriodicSet PeriodicSet::of_residues(std::size_t core_size, std::size_t block_size,
                                     std::size_t period,
                                     const std::vector<std::pair<Vertex, std::size_t>>& residues,
                                     std::size_t from_level) {
  if (period == 0) throw Error(ErrorCode::invalid_argument, "period must be positive");
  PeriodicSet s(core_size, block_size);
  s.base_ = from_level;
  s.explicit_.assign(from_level * block_size, false);
  s.period_ = period;
  s.pattern_.assign(period * block_size, false);
  for (auto [t, r] : residues) {
    if (t >= block_size) throw Error(ErrorCode::invalid_argument, "block vertex out of range");
    s.pattern_[(r % period) * block_size + t] = true;
  }
  s.normalize();
  return s;
}

PeriodicSet PeriodicSet::sample(std::size_t core_size, std::size_t block_size,
                                std::size_t base, std::size_t period,
                                const std::function<bool(VertexRef)>& member) {
  if (period == 0) throw Error(ErrorCode::invalid_argument, "period must be positive");
  PeriodicSet s(core_size, block_size);
  for (Vertex f = 0; f < core_size; ++f) s.core_[f] = member(VertexRef::of_core(f));
  s.base_ = base;
  s.explicit_.assign(base * block_size, false);
  for (std::size_t l = 0; l < base; ++l)
    for (Vertex t = 0; t < block_size; ++t)
      s.explicit_[l * block_size + t] = member(VertexRef::of_block(t, l));
  s.period_ = period;
  s.pattern_.assign(period * block_size, false);
  for (std::size_t l = base; l < base + period; ++l)
    for (Vertex t = 0; t < block_size; ++t)
      s.pattern_[(l % period) * block_size + t] = member(VertexRef::of_block(t, l));
  s.normalize();
  return s;
}

bool PeriodicSet::contains(VertexRef v) const {
  if (v.core) return v.index < core_.size() && core_[v.index];
  if (v.index >= block_size_) return false;
  if (v.level < base_) return explicit_[v.level * block_size_ + v.index];
  return pattern_[(v.level % period_) * block_size_ + v.index];
}

bool PeriodicSet::empty() const {
  return std::none_of(core_.begin(), core_.end(), [](bool b) { return b; }) &&
         std::none_of(explicit_.begin(), explicit_.end(), [](bool b) { return b; }) &&
         std::none_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; });
}

bool PeriodicSet::is_finite() const {
  return std::none_of(pattern_.begin(), pattern_.end(), [](bool b) { return b; });
}

bool PeriodicSet::repeats(Vertex t) const {
  for (std::size_t r = 0; r < period_; ++r)
    if (pattern_[r * block_size_ + t]) return true;
  return false;
}

std::vector<VertexRef> PeriodicSet::members_below(std::size_t levels) const {
  std::vector<VertexRef> out;
  for (Vertex f = 0; f < core_.size(); ++f)
    if (core_[f]) out.push_back(VertexRef::of_core(f));
  for (std::size_t l = 0; l < levels; ++l)
    for (Vertex t = 0; t < block_size_; ++t)
      if (contains(VertexRef::of_block(t, l))) out.push_back(VertexRef::of_block(t, l));
  return out;
}

std::vector<VertexRef> PeriodicSet::finite_members() const {
  if (!is_finite()) throw Error(ErrorCode::invalid_argument, "set is infinite");
  return members_below(base_);
}

std::vector<std::pair<Vertex, std::size_t>> PeriodicSet::pattern() const {
  std::vector<std::pair<Vertex, std::size_t>> out;
  for (std::size_t r = 0; r < period_; ++r)
    for (Vertex t = 0; t < block_size_; ++t)
      if (pattern_[r * block_size_ + t]) out.push_back({t, r});
  return out;
}

PeriodicSet PeriodicSet::aligned(std::size_t b, std::size_t q) const {
  if (q == 0) throw Error(ErrorCode::invalid_argument, "period must be positive");
  PeriodicSet s(core_.size(), block_size_);
  s.core_ = core_;
  s.base_ = std::max(b, base_);
  s.period_ = std::lcm(q, period_);
  s.explicit_.assign(s.base_ * block_size_, false);
  for (std::size_t l = 0; l < s.base_; ++l)
    for (Vertex t = 0; t < block_size_; ++t)
      s.explicit_[l * block_size_ + t] = contains(VertexRef::of_block(t, l));
  s.pattern_.assign(s.period_ * block_size_, false);
  // Row r of the new pattern describes levels = r mod new period at or above
  // the new base; pick such a level to sample.
  for (std::size_t r = 0; r < s.period_; ++r) {
    std::size_t level = s.base_ + ((r + s.period_ - s.base_ % s.period_) % s.period_);
    for (Vertex t = 0; t < block_size_; ++t)
      s.pattern_[r * block_size_ + t] = contains(VertexRef::of_block(t, level));
  }
  return s;
}

void PeriodicSet::normalize() {
  // Smallest period dividing the current one.
  for (std::size_t q = 1; q < period_; ++q) {
    if (period_ % q) continue;
    bool ok = true;
    for (std::size_t r = 0; r < period_ && ok; ++r)
      for (Vertex t = 0; t < block_size_ && ok; ++t)
        ok = pattern_[r * block_size_ + t] == pattern_[(r % q) * block_size_ + t];
    if (!ok) continue;
    std::vector<bool> reduced(q * block_size_);
    for (std::size_t r = 0; r < q; ++r)
      for (Vertex t = 0; t < block_size_; ++t)
        reduced[r * block_size_ + t] = pattern_[r * block_size_ + t];
    pattern_ = std::move(reduced);
    period_ = q;
    break;
  }
  // Lower the base while the last explicit row agrees with the pattern.
  while (base_ > 0) {
    std::size_t l = base_ - 1;
    bool same = true;
    for (Vertex t = 0; t < block_size_ && same; ++t)
      same = explicit_[l * block_size_ + t] == pattern_[(l % period_) * block_size_ + t];
    if (!same) break;
    --base_;
    explicit_.resize(base_ * block_size_);
  }
}

template <class Op>
PeriodicSet PeriodicSet::combine(const PeriodicSet& o, Op op) const {
  if (o.core_.size() != core_.size() || o.block_size_ != block_size_)
    throw Error(ErrorCode::invalid_argument, "sets of different presentations");
  std::size_t b = std::max(base_, o.base_), q = std::lcm(period_, o.period_);
  PeriodicSet x = aligned(b, q), y = o.aligned(b, q);
  for (std::size_t i = 0; i < x.core_.size(); ++i) x.core_[i] = op(x.core_[i], y.core_[i]);
  for (std::size_t i = 0; i < x.explicit_.size(); ++i)
    x.explicit_[i] = op(x.explicit_[i], y.explicit_[i]);
  for (std::size_t i = 0; i < x.pattern_.size(); ++i)
    x.pattern_[i] = op(x.pattern_[i], y.pattern_[i]);
  x.normalize();
  return x;
}

PeriodicSet PeriodicSet::united(const PeriodicSet& o) const {
  return combine(o, [](bool a, bool b) { return a || b; });
}

PeriodicSet PeriodicSet::intersected(const PeriodicSet& o) const {
  return combine(o, [](bool a, bool b) { return a && b; });
}

PeriodicSet PeriodicSet::minus(const PeriodicSet& o) const {
  return combine(o, [](bool a, bool b) { return a && !b; });
}

PeriodicSet PeriodicSet::complement() const {
  return everything(core_.size(), block_size_).minus(*this);
}

bool PeriodicSet::subset_of(const PeriodicSet& o) const { return minus(o).empty(); }

bool operator==(const PeriodicSet& a, const PeriodicSet& b) {
  if (a.core_.size() != b.core_.size() || a.block_size_ != b.block_size_) return false;
  return a.minus(b).empty() && b.minus(a).empty();
}

bool is_separation(const Presentation& p, const PresentedSeparation& s) {
  const std::size_t nf = p.core_size(), nt = p.block_size();
  if (s.side_a.core_size() != nf || s.side_a.block_size() != nt ||
      s.side_b.core_size() != nf || s.side_b.block_size() != nt)
    return false;
  if (!s.side_a.united(s.side_b).complement().empty()) return false;
  if (!s.side_a.intersected(s.side_b).is_finite()) return false;
  PeriodicSet from = s.side_b.minus(s.side_a), to = s.side_a.minus(s.side_b);

  for (const Edge& e : p.core_edges)
    if (from.contains(VertexRef::of_core(e.tail)) && to.contains(VertexRef::of_core(e.head)))
      return false;
  auto link_violates = [&](const CoreLink& c, std::size_t level) {
    VertexRef core = VertexRef::of_core(c.core), block = VertexRef::of_block(c.block, level);
    if (c.direction == LinkDirection::core_to_block)
      return from.contains(core) && to.contains(block);
    return from.contains(block) && to.contains(core);
  };
  for (const CoreLink& c : p.attach_edges)
    if (link_violates(c, 0)) return false;

  // Beyond base + period + span every membership repeats with the period, so
  // the levels below that bound cover every edge type.
  std::size_t q = std::lcm(from.period(), to.period());
  std::size_t top = std::max(from.base(), to.base()) + q + p.span + 1;
  for (const CoreLink& c : p.cofinal_rules)
    for (std::size_t l = 0; l < top; ++l)
      if (link_violates(c, l)) return false;
  for (std::size_t l = 0; l < top; ++l) {
    for (const Edge& e : p.block_edges)
      if (from.contains(VertexRef::of_block(e.tail, l)) && to.contains(VertexRef::of_block(e.head, l)))
        return false;
    for (const BlockRule& r : p.block_rules) {
      long target = static_cast<long>(l) + r.offset;
      if (target < 0) continue;
      if (from.contains(VertexRef::of_block(r.from, l)) &&
          to.contains(VertexRef::of_block(r.to, static_cast<std::size_t>(target))))
        return false;
    }
  }
  return true;
}

std::vector<VertexRef> separator(const PresentedSeparation& s) {
  return s.side_a.intersected(s.side_b).finite_members();
}

bool separation_leq(const PresentedSeparation& s1, const PresentedSeparation& s2) {
  return s1.side_a.subset_of(s2.side_a) && s2.side_b.subset_of(s1.side_b);
}

PresentedSeparation sep_sup(const PresentedSeparation& s1, const PresentedSeparation& s2) {
  return {s1.side_a.united(s2.side_a), s1.side_b.intersected(s2.side_b)};
}

PresentedSeparation sep_inf(const PresentedSeparation& s1, const PresentedSeparation& s2) {
  return {s1.side_a.intersected(s2.side_a), s1.side_b.united(s2.side_b)};
}

PresentedSeparation swapped(const PresentedSeparation& s) { return {s.side_b, s.side_a}; }

}  // namespace endspace
