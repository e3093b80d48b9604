// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 mathematically negative answer with certificate,
// 2 usage, parse, validation or budget errors, 3 internal consistency
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "endspace/endspace.h"
#include "json.hpp"

namespace {

struct Flags {
  std::string file;
  std::size_t depth = 8;
  std::string budget;
  std::string json_path;
  std::string dot_path;
  std::uint64_t seed = 0;
  std::vector<std::string> u;
  std::size_t beads = 3;
  std::size_t teeth = 3;
  std::string vertex;
  std::size_t end = 0;
  bool reverse = false;
  std::string kind = "vertex";
};

struct Freer {
  void operator()(char* p) const { es_free(p); }
};
using Owned = std::unique_ptr<char, Freer>;

int exit_code(es_status s) {
  switch (s) {
    case ES_OK: return 0;
    case ES_NEGATIVE: return 1;
    case ES_CONSISTENCY_ERROR:
    case ES_INTERNAL_ERROR: return 3;
    default: return 2;
  }
}

bool read_input(const std::string& path, std::string& out) {
  if (path == "-") {
    out.assign(std::istreambuf_iterator<char>(std::cin), {});
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), {});
  return true;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return bool(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return bool(out);
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("file", f.file, "presentation file, or - for standard input")->required();
  sub->add_option("--depth", f.depth, "exhaustion depth for threads and checks");
  sub->add_option("--budget", f.budget, "search limits: period=N,onset=N,margin=N,rank=ORDINAL");
  sub->add_option("--json", f.json_path, "write the JSON report to this path (- for stdout)");
  sub->add_option("--dot", f.dot_path, "write a DOT drawing to this path (- for stdout)");
  sub->add_option("--seed", f.seed, "seed for sampled checks");
  sub->add_option("--u", f.u, "vertex set of the family: NAME or a set spec (repeatable)")
      ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sub->add_option("--beads", f.beads, "necklace beads to materialize and check");
  sub->add_option("--teeth", f.teeth, "teeth of each star-comb");
  sub->add_option("--vertex", f.vertex, "core vertex, e.g. F.v");
  sub->add_option("--end", f.end, "end index");
  sub->add_flag("--reverse", f.reverse, "reverse domination");
  sub->add_option("--kind", f.kind, "direction kind")->check(CLI::IsMember({"vertex", "edge"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ends, limit edges, necklaces and ranks of periodic digraphs"};
  app.set_version_flag("--version", std::string(es_version()));
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "ends, limit edges, end order, bijection checks and domination"},
      {"ends", "ends with representative rays"},
      {"limit-edges", "limit edges with witness necklaces"},
      {"necklace", "a necklace attached to --u, or why none exists"},
      {"starcomb", "star-comb pair attached to the first infinite set of --u"},
      {"rank", "U-rank for the family --u"},
      {"dichotomy", "necklace attached to --u, or a U-rank"},
      {"dichromatic", "acyclic partition of a digraph without ends"},
      {"dominates", "whether --vertex (reverse) dominates --end"},
      {"directions", "direction threads of --kind to --depth"},
      {"dot", "Graphviz drawing (with necklace beads when --u is given)"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "endspace: " << e.what() << "\n";
    if (auto subs = app.get_subcommands(); !subs.empty())
      std::cerr << subs.front()->help();
    else
      std::cerr << app.help();
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::string text;
  if (!read_input(f.file, text)) {
    std::cerr << "endspace: cannot read '" << f.file << "'\n";
    return 2;
  }
  es_presentation* raw = nullptr;
  if (es_status s = es_presentation_parse(text.data(), text.size(), &raw); s != ES_OK) {
    std::cerr << "endspace: " << f.file << ": " << es_last_error() << "\n";
    return exit_code(s);
  }
  std::unique_ptr<es_presentation, void (*)(es_presentation*)> pres(raw, es_presentation_destroy);

  nlohmann::json options = nlohmann::json::object();
  auto* sub = app.get_subcommands().front();
  if (sub->count("--depth")) options["depth"] = f.depth;
  if (!f.budget.empty()) options["budget"] = f.budget;
  options["seed"] = f.seed;
  if (!f.u.empty()) options["u"] = f.u;
  options["beads"] = f.beads;
  options["teeth"] = f.teeth;
  if (!f.vertex.empty()) options["vertex"] = f.vertex;
  options["end"] = f.end;
  options["reverse"] = f.reverse;
  options["kind"] = f.kind;
  options["dot"] = !f.dot_path.empty() || command == "dot";

  char* report_raw = nullptr;
  char* dot_raw = nullptr;
  es_status s = es_run(pres.get(), command.c_str(), options.dump().c_str(), &report_raw, &dot_raw);
  Owned report(report_raw), dot(dot_raw);

  std::string summary;
  if (report) {
    auto j = nlohmann::json::parse(report.get(), nullptr, false);
    if (!j.is_discarded() && j.contains("summary") && j["summary"].is_string())
      summary = j["summary"].get<std::string>();
  }
  if (s == ES_OK || s == ES_NEGATIVE) {
    if (f.json_path != "-" && !(command == "dot" && f.dot_path.empty()))
      std::cout << command << ": " << summary << "\n";
  } else {
    std::cerr << "endspace: " << command << ": " << es_last_error() << "\n";
  }
  if (!f.json_path.empty() && report && !write_output(f.json_path, report.get())) {
    std::cerr << "endspace: cannot write '" << f.json_path << "'\n";
    return 2;
  }
  if (dot) {
    const std::string path = f.dot_path.empty() ? "-" : f.dot_path;
    if (!write_output(path, dot.get())) {
      std::cerr << "endspace: cannot write '" << path << "'\n";
      return 2;
    }
  }
  return exit_code(s);
}
