// Writes random_NN.pres: random periodic presentations from fixed seeds,
// kept only when they validate and their tail pattern stabilizes within the
// default budget. Usage: corpus_gen OUTDIR [COUNT]

#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include "endspace/error.hpp"
#include "endspace/tail_pattern.hpp"
#include "endspace/text_format.hpp"

using namespace endspace;

namespace {

Presentation draw(std::mt19937_64& rng) {
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution coin(0.5), rare(0.2);
  Presentation p;
  std::size_t nf = uniform(0, 2), nt = uniform(1, 3);
  p.span = uniform(1, 2);
  for (std::size_t i = 0; i < nf; ++i) p.core.push_back(std::string(1, char('u' + i)));
  for (std::size_t i = 0; i < nt; ++i) p.block.push_back(std::string(1, char('a' + i)));
  for (Vertex a = 0; a < nf; ++a)
    for (Vertex b = 0; b < nf; ++b)
      if (a != b && coin(rng)) p.core_edges.push_back({a, b});
  for (Vertex a = 0; a < nt; ++a)
    for (Vertex b = 0; b < nt; ++b)
      if (a != b && rare(rng)) p.block_edges.push_back({a, b});
  std::set<BlockRule> rules;
  const bool long_only = p.span == 2 && coin(rng);  // favours period 2
  for (std::size_t k = uniform(nt, 2 * nt + 2); k > 0; --k) {
    int d = static_cast<int>(long_only ? p.span : uniform(1, p.span));
    rules.insert({static_cast<Vertex>(uniform(0, nt - 1)), static_cast<Vertex>(uniform(0, nt - 1)),
                  coin(rng) ? d : -d});
  }
  p.block_rules.assign(rules.begin(), rules.end());
  std::set<CoreLink> attach, cofinal;
  for (Vertex f = 0; f < nf; ++f) {
    for (int k = 0; k < 2; ++k) {
      CoreLink c{f, static_cast<Vertex>(uniform(0, nt - 1)),
                 coin(rng) ? LinkDirection::core_to_block : LinkDirection::block_to_core};
      (rare(rng) ? cofinal : attach).insert(c);
    }
  }
  p.attach_edges.assign(attach.begin(), attach.end());
  p.cofinal_rules.assign(cofinal.begin(), cofinal.end());
  std::size_t t = uniform(0, nt - 1), q = uniform(1, 2);
  p.named_sets.push_back({"sample", p.block[t] + "@" + std::to_string(uniform(0, q - 1)) + "%" +
                                        std::to_string(q)});
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: corpus_gen OUTDIR [COUNT]\n";
    return 2;
  }
  const std::string dir = argv[1];
  const std::size_t count = argc > 2 ? std::stoul(argv[2]) : 14;
  for (std::size_t i = 1; i <= count; ++i) {
    std::mt19937_64 rng(1000 + i);
    for (std::size_t attempt = 0;; ++attempt) {
      Presentation p = draw(rng);
      try {
        require_valid(p);
        TailPattern tp = tail_stabilization(p);
        std::string name = (i < 10 ? "random_0" : "random_") + std::to_string(i) + ".pres";
        std::ofstream out(dir + "/" + name);
        out << "# Random periodic presentation, seed " << 1000 + i << ", draw " << attempt
            << ".\n# Tail period " << tp.period << ", " << tp.infinite_count() << " end(s).\n"
            << serialize_presentation(p);
        std::cout << name << ": period " << tp.period << ", ends " << tp.infinite_count() << "\n";
        break;
      } catch (const Error&) {
        if (attempt > 1000) {
          std::cerr << "seed " << 1000 + i << " gave no usable presentation\n";
          return 1;
        }
      }
    }
  }
  return 0;
}
