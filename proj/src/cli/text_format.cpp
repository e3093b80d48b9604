#include "endspace/text_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>

#include "endspace/error.hpp"

namespace endspace {

namespace {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_words(std::string_view line, std::size_t column_offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ','))
      ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ',')
      ++i;
    out.push_back({std::string(line.substr(start, i - start)), column_offset + start + 1});
  }
  return out;
}

[[noreturn]] void syntax(std::size_t line, std::size_t column, const std::string& msg) {
  throw ParseError(ErrorCode::parse_error, line, column, msg);
}

bool parse_uint(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Endpoint {
  bool core;
  Vertex index;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Presentation run() {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t end = text_.find('\n', pos);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view line = text_.substr(pos, end - pos);
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      handle_line(line, line_no);
      if (end == text_.size()) break;
      pos = end + 1;
    }
    if (!have_block_) syntax(0, 0, "missing block section");
    check_valid();
    return p_;
  }

 private:
  void handle_line(std::string_view line, std::size_t line_no) {
    std::size_t first = 0;
    while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
    if (first == line.size()) return;
    std::size_t colon = line.find(':');
    std::size_t arrow = line.find("->");
    if (arrow != std::string_view::npos && (colon == std::string_view::npos || colon > arrow)) {
      if (!have_block_) syntax(line_no, first + 1, "missing block section");
      edge_line(line, line_no);
      return;
    }
    if (colon == std::string_view::npos) syntax(line_no, first + 1, "expected a section header or an edge");
    std::string_view head = line.substr(first, colon - first);
    while (!head.empty() && std::isspace(static_cast<unsigned char>(head.back()))) head.remove_suffix(1);
    std::string_view rest = line.substr(colon + 1);
    std::size_t rest_col = colon + 1;
    if (head == "core" || head == "block" || head == "span") {
      if (edges_seen_) syntax(line_no, first + 1, "section header after edge lines");
    }
    if (head == "core") {
      if (have_core_) syntax(line_no, first + 1, "duplicate core section");
      have_core_ = true;
      for (const Token& t : split_words(rest, rest_col)) {
        p_.core.push_back(t.text);
        core_lines_.push_back({line_no, t.column});
      }
    } else if (head == "block") {
      if (have_block_) syntax(line_no, first + 1, "duplicate block section");
      have_block_ = true;
      for (const Token& t : split_words(rest, rest_col)) {
        p_.block.push_back(t.text);
        block_lines_.push_back({line_no, t.column});
      }
    } else if (head == "span") {
      auto words = split_words(rest, rest_col);
      std::size_t k = 0;
      if (words.size() != 1 || !parse_uint(words[0].text, k))
        syntax(line_no, words.empty() ? rest_col + 1 : words[0].column, "span expects one integer");
      p_.span = k;
      span_line_ = {line_no, words[0].column};
    } else if (head.substr(0, 4) == "set " || head.substr(0, 4) == "set\t") {
      std::string_view name = head.substr(4);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
      std::string spec(rest);
      auto b = spec.find_first_not_of(" \t");
      spec = b == std::string::npos ? std::string() : spec.substr(b);
      while (!spec.empty() && std::isspace(static_cast<unsigned char>(spec.back()))) spec.pop_back();
      p_.named_sets.push_back({std::string(name), spec});
      set_lines_.push_back({line_no, first + 1});
    } else {
      syntax(line_no, first + 1, "unknown section '" + std::string(head) + "'");
    }
  }

  Endpoint resolve(const Token& t, std::size_t line_no) const {
    if (t.text.rfind("F.", 0) == 0) {
      auto f = find_core(p_, std::string_view(t.text).substr(2));
      if (!f) syntax(line_no, t.column, "unknown core vertex '" + t.text + "'");
      return {true, *f};
    }
    if (auto b = find_block(p_, t.text)) return {false, *b};
    if (auto f = find_core(p_, t.text)) return {true, *f};
    syntax(line_no, t.column, "unknown vertex '" + t.text + "'");
  }

  void edge_line(std::string_view line, std::size_t line_no) {
    edges_seen_ = true;
    std::size_t arrow = line.find("->");
    auto lhs = split_words(line.substr(0, arrow), 0);
    std::string_view right = line.substr(arrow + 2);
    std::size_t at = right.find('@');
    auto rhs = split_words(right.substr(0, at == std::string_view::npos ? right.size() : at), arrow + 2);
    if (lhs.size() != 1) syntax(line_no, lhs.empty() ? 1 : lhs[1].column, "expected one tail vertex");
    if (rhs.size() != 1)
      syntax(line_no, rhs.empty() ? arrow + 3 : rhs[1].column, "expected one head vertex");
    Endpoint a = resolve(lhs[0], line_no), b = resolve(rhs[0], line_no);

    enum class Mod { none, offset, attach, cofinal } mod = Mod::none;
    int offset = 0;
    std::size_t mod_col = 0;
    if (at != std::string_view::npos) {
      std::size_t base = arrow + 2 + at + 1;
      auto words = split_words(right.substr(at + 1), base);
      std::string joined;
      for (auto& w : words) joined += w.text;
      mod_col = words.empty() ? base : words[0].column;
      if (words.empty()) syntax(line_no, base, "missing annotation after '@'");
      if (words.size() > 2 || (words.size() == 2 && words[0].text != "+" && words[0].text != "-"))
        syntax(line_no, words.back().column, "unexpected token");
      if (joined == "*") {
        mod = Mod::cofinal;
      } else if (joined == "0") {
        mod = Mod::attach;
      } else if (joined[0] == '+' || joined[0] == '-') {
        std::size_t d = 0;
        if (!parse_uint(std::string_view(joined).substr(1), d) || d == 0 || d > 1000000)
          syntax(line_no, mod_col, "bad offset '" + joined + "'");
        offset = joined[0] == '+' ? static_cast<int>(d) : -static_cast<int>(d);
        mod = Mod::offset;
      } else {
        syntax(line_no, mod_col, "bad annotation '" + joined + "'");
      }
    }

    Location loc{line_no, lhs[0].column};
    if (a.core && b.core) {
      if (mod != Mod::none) syntax(line_no, mod_col, "core edges take no annotation");
      p_.core_edges.push_back({a.index, b.index});
      core_edge_lines_.push_back(loc);
    } else if (!a.core && !b.core) {
      if (mod == Mod::cofinal) syntax(line_no, mod_col, "cofinal rules need a core endpoint");
      if (mod == Mod::offset) {
        p_.block_rules.push_back({a.index, b.index, offset});
        rule_lines_.push_back(loc);
      } else {
        p_.block_edges.push_back({a.index, b.index});
        block_edge_lines_.push_back(loc);
      }
    } else {
      CoreLink link{a.core ? a.index : b.index, a.core ? b.index : a.index,
                    a.core ? LinkDirection::core_to_block : LinkDirection::block_to_core};
      if (mod == Mod::cofinal) {
        p_.cofinal_rules.push_back(link);
        cofinal_lines_.push_back(loc);
      } else if (mod == Mod::attach) {
        p_.attach_edges.push_back(link);
        attach_lines_.push_back(loc);
      } else {
        syntax(line_no, mod == Mod::none ? rhs[0].column : mod_col,
               "edges between core and block need '@0' or '@*'");
      }
    }
  }

  struct Location {
    std::size_t line = 0, column = 0;
  };

  void check_valid() const {
    auto issues = validate(p_);
    if (issues.empty()) return;
    const ValidationIssue& i = issues.front();
    Location loc;
    using Item = ValidationIssue::Item;
    auto pick = [&](const std::vector<Location>& v) {
      if (i.index < v.size()) loc = v[i.index];
    };
    switch (i.item) {
      case Item::presentation: loc = span_line_; break;
      case Item::core_label: pick(core_lines_); break;
      case Item::block_label: pick(block_lines_); break;
      case Item::core_edge: pick(core_edge_lines_); break;
      case Item::block_edge: pick(block_edge_lines_); break;
      case Item::block_rule: pick(rule_lines_); break;
      case Item::attach_edge: pick(attach_lines_); break;
      case Item::cofinal_rule: pick(cofinal_lines_); break;
      case Item::named_set: pick(set_lines_); break;
    }
    throw ParseError(ErrorCode::validation_error, loc.line, loc.column, i.message);
  }

  std::string_view text_;
  Presentation p_;
  bool have_core_ = false, have_block_ = false, edges_seen_ = false;
  Location span_line_;
  std::vector<Location> core_lines_, block_lines_, core_edge_lines_, block_edge_lines_,
      rule_lines_, attach_lines_, cofinal_lines_, set_lines_;
};

std::string join_labels(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += " " + s;
  return out;
}

}  // namespace

Presentation parse_presentation(std::string_view text) { return Parser(text).run(); }

std::string serialize_presentation(const Presentation& p) {
  std::ostringstream out;
  if (!p.core.empty()) out << "core:" << join_labels(p.core) << "\n";
  out << "block:" << join_labels(p.block) << "\n";
  out << "span: " << p.span << "\n";
  for (const NamedSet& s : p.named_sets) out << "set " << s.name << ": " << s.spec << "\n";
  auto core = [&](Vertex f) { return "F." + p.core[f]; };
  for (const Edge& e : p.core_edges) out << core(e.tail) << " -> " << core(e.head) << "\n";
  for (const Edge& e : p.block_edges) out << p.block[e.tail] << " -> " << p.block[e.head] << "\n";
  for (const BlockRule& r : p.block_rules)
    out << p.block[r.from] << " -> " << p.block[r.to] << " @ " << (r.offset > 0 ? "+" : "-")
        << std::abs(r.offset) << "\n";
  auto link = [&](const CoreLink& c, const char* mark) {
    if (c.direction == LinkDirection::core_to_block)
      out << core(c.core) << " -> " << p.block[c.block] << " " << mark << "\n";
    else
      out << p.block[c.block] << " -> " << core(c.core) << " " << mark << "\n";
  };
  for (const CoreLink& c : p.attach_edges) link(c, "@0");
  for (const CoreLink& c : p.cofinal_rules) link(c, "@*");
  return out.str();
}

namespace {

PeriodicSet parse_set_depth(const Presentation& p, std::string_view spec, int depth) {
  const std::size_t nf = p.core_size(), nt = p.block_size();
  PeriodicSet out(nf, nt);
  auto bad = [](const Token& t, const std::string& why) -> PeriodicSet {
    throw ParseError(ErrorCode::parse_error, 1, t.column, why + " '" + t.text + "'");
  };
  for (const Token& tok : split_words(spec, 0)) {
    const std::string& w = tok.text;
    if (w == "all") {
      out = out.united(PeriodicSet::everything(nf, nt));
      continue;
    }
    if (w.rfind("F.", 0) == 0) {
      auto f = find_core(p, std::string_view(w).substr(2));
      if (!f) return bad(tok, "unknown core vertex");
      out = out.united(PeriodicSet::of_members(nf, nt, {VertexRef::of_core(*f)}));
      continue;
    }
    auto at = w.find('@');
    std::string label = w.substr(0, at);
    auto t = find_block(p, label);
    if (at == std::string::npos) {
      if (t) {
        out = out.united(PeriodicSet::of_residues(nf, nt, 1, {{*t, 0}}));
        continue;
      }
      auto named = std::find_if(p.named_sets.begin(), p.named_sets.end(),
                                [&](const NamedSet& s) { return s.name == w; });
      if (named == p.named_sets.end()) return bad(tok, "unknown vertex or set");
      if (depth > 8) return bad(tok, "named sets nest too deeply");
      out = out.united(parse_set_depth(p, named->spec, depth + 1));
      continue;
    }
    if (!t) return bad(tok, "unknown block vertex");
    std::string rest = w.substr(at + 1);
    std::size_t from = 0;
    auto colon = rest.find(':');
    if (colon != std::string::npos) {
      if (!parse_uint(std::string_view(rest).substr(colon + 1), from)) return bad(tok, "bad level bound");
      rest = rest.substr(0, colon);
    }
    if (rest == "*") {
      out = out.united(PeriodicSet::of_residues(nf, nt, 1, {{*t, 0}}, from));
      continue;
    }
    auto pct = rest.find('%');
    if (pct != std::string::npos) {
      std::size_t r = 0, q = 0;
      if (!parse_uint(std::string_view(rest).substr(0, pct), r) ||
          !parse_uint(std::string_view(rest).substr(pct + 1), q) || q == 0 || r >= q || q > 4096)
        return bad(tok, "bad residue");
      out = out.united(PeriodicSet::of_residues(nf, nt, q, {{*t, r}}, from));
      continue;
    }
    std::size_t level = 0;
    if (colon != std::string::npos || !parse_uint(rest, level) || level > 1000000)
      return bad(tok, "bad level");
    out = out.united(PeriodicSet::of_members(nf, nt, {VertexRef::of_block(*t, level)}));
  }
  return out;
}

}  // namespace

PeriodicSet parse_vertex_set(const Presentation& p, std::string_view spec) {
  return parse_set_depth(p, spec, 0);
}

std::vector<PeriodicSet> parse_vertex_family(const Presentation& p,
                                             const std::vector<std::string>& specs) {
  std::vector<PeriodicSet> out;
  for (const std::string& s : specs) {
    std::size_t pos = 0;
    for (;;) {
      std::size_t semi = s.find(';', pos);
      std::string part = s.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
      if (part.find_first_not_of(" \t") != std::string::npos) out.push_back(parse_vertex_set(p, part));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
  }
  return out;
}

std::string describe_vertex_set(const Presentation& p, const PeriodicSet& s) {
  std::vector<std::string> items;
  for (const VertexRef& v : s.members_below(s.base()))
    items.push_back(vertex_name(p, v));
  std::string suffix = s.base() ? ":" + std::to_string(s.base()) : "";
  for (auto [t, r] : s.pattern()) {
    if (s.period() == 1)
      items.push_back(p.block[t] + "@*" + suffix);
    else
      items.push_back(p.block[t] + "@" + std::to_string(r) + "%" + std::to_string(s.period()) + suffix);
  }
  if (items.empty()) return "";
  return std::accumulate(std::next(items.begin()), items.end(), items.front(),
                         [](std::string a, const std::string& b) { return a + " " + b; });
}

}  // namespace endspace
