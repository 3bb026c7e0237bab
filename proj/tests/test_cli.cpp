#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(IMBAUG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Workspace {
  fs::path root = fs::temp_directory_path() / "imbaug_cli_test";
  Workspace() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string path(const std::string& name) const { return (root / name).string(); }
};

const std::string kFast =
    " --set mapping=none --set level.scarce_min_ir=10 --set level.rare_min_ir=50"
    " --set san.epochs=2 --set scgan.epochs=5 --set clf.epochs=2";

}  // namespace

TEST_CASE("cli synthbench, run-all and compare") {
  Workspace ws;
  REQUIRE(run("synthbench --counts 400,20,5 --dim 4 --seed 3 -o " + ws.path("bench.csv")) == 0);
  const auto text = slurp(ws.path("bench.csv"));
  CHECK(text.rfind("f0,f1,f2,f3,Label\n", 0) == 0);

  const std::string common = " --data " + ws.path("bench.csv") + " --seed 1 --out " + ws.path("runs") + kFast;
  REQUIRE(run("run-all --method baseline --run-name base" + common) == 0);
  REQUIRE(run("run-all --method s2cgan --run-name aug" + common) == 0);
  CHECK(fs::exists(ws.root / "runs/aug/summary.txt"));
  CHECK(slurp(ws.root / "runs/aug/config.txt").find("method = s2cgan") != std::string::npos);

  REQUIRE(run("compare " + ws.path("runs/aug") + " " + ws.path("runs/base") + " -o " + ws.path("cmp")) == 0);
  CHECK(fs::exists(ws.root / "cmp/delta.csv"));
  CHECK(slurp(ws.root / "cmp/delta.csv").find("s2cgan") != std::string::npos);
}

TEST_CASE("cli stage commands reproduce run-all") {
  Workspace ws;
  REQUIRE(run("synthbench --counts 300,20,4 --dim 3 --seed 5 -o " + ws.path("bench.csv")) == 0);
  const std::string common = " --data " + ws.path("bench.csv") + " --seed 2 --out " + ws.path("runs") + kFast;
  REQUIRE(run("run-all --run-name whole" + common) == 0);
  for (const char* stage : {"preprocess", "levels", "train-san", "train-scgan", "augment", "train-clf", "eval"}) {
    CAPTURE(stage);
    REQUIRE(run(std::string(stage) + " --run-name staged" + common) == 0);
  }
  for (const char* f : {"augmented.csv", "metrics/per_class.csv", "metrics/confusion.csv"}) {
    CAPTURE(f);
    CHECK(slurp(ws.root / "runs/whole" / f) == slurp(ws.root / "runs/staged" / f));
  }
}

TEST_CASE("cli exit codes") {
  Workspace ws;
  const std::string out = " --out " + ws.path("runs");
  CHECK(run("run-all --data " + ws.path("missing.csv") + out) == 2);
  CHECK(run("run-all --set train_ratio=1.5 --data x.csv" + out) == 2);
  CHECK(run("run-all --set no.such.key=1" + out) == 2);
  CHECK(run("synthbench --counts 10 -o " + ws.path("one.csv")) == 2);
  CHECK(run("compare " + ws.path("a")) != 0);
  CHECK(run("no-such-command") != 0);
  CHECK(run("--help") == 0);
}
