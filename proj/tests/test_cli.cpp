#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using endspace::testing::corpus_dir;
using endspace::testing::corpus_files;
using endspace::testing::read_file;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string command = std::string(ENDSPACE_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string file(const char* name) { return (corpus_dir() / (std::string(name) + ".pres")).string(); }

std::string scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "endspace_cli_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t k = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++k;
  return k;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("analyze summarizes the ladder") {
    Run r = run("analyze " + file("ladder"));
    CHECK(r.code == 0);
    CHECK(r.out.find("ends=2 limit_edges=1 bijections=pass") != std::string::npos);
  }

  TEST_CASE("dichotomy takes the rank branch on the subdivided ladder") {
    Run r = run("dichotomy " + file("subdivided_ladder") + " --u subdividers");
    CHECK(r.code == 0);
    CHECK(r.out.find("rank branch, rank 1") != std::string::npos);

    std::string json = scratch("dichotomy.json");
    CHECK(run("dichotomy " + file("subdivided_ladder") + " --u subdividers --json " + json).code == 0);
    auto report = nlohmann::json::parse(read_file(json));
    CHECK(report.dump().find("\"rank\"") != std::string::npos);
  }

  TEST_CASE("necklace drawing matches the golden file") {
    std::string dot = scratch("necklace5.dot");
    Run r = run("necklace " + file("ladder") + " --u top --beads 5 --dot " + dot);
    CHECK(r.code == 0);
    std::string drawn = read_file(dot);
    CHECK(count(drawn, "subgraph cluster_bead_") == 5);
    CHECK(drawn == read_file(std::string(ENDSPACE_GOLDEN_DIR) + "/ladder_necklace5.dot"));
  }

  TEST_CASE("exit codes") {
    CHECK(run("analyze --no-such-flag " + file("ladder")).code == 2);
    CHECK(run("no-such-command " + file("ladder")).code == 2);
    CHECK(run("analyze " + (corpus_dir() / "missing.pres").string()).code == 2);
    CHECK(run("starcomb " + file("ladder")).code == 2);
    CHECK(run("necklace " + file("subdivided_ladder") + " --u subdividers").code == 1);
    CHECK(run("rank " + file("subdivided_ladder") + " --u all").code == 1);
    CHECK(run("necklace " + file("ladder") + " --u top").code == 0);
  }

  TEST_CASE("reports are byte-identical across runs") {
    std::size_t files = 0;
    for (const auto& entry : corpus_files()) {
      std::string path = entry.string();
      CAPTURE(path);
      std::string a = scratch("a.json"), b = scratch("b.json");
      Run first = run("analyze " + path + " --json " + a);
      Run second = run("analyze " + path + " --json " + b);
      CHECK(first.code == second.code);
      CHECK(first.out == second.out);
      std::string ja = read_file(a);
      CHECK(ja == read_file(b));
      CHECK(nlohmann::json::accept(ja));
      ++files;
    }
    CHECK(files >= 18);
  }
}
