#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ceg/errors.hpp"
#include "ceg/pipeline.hpp"
#include "fixtures.hpp"

using namespace ceg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ceg_pipeline_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(CEGTOOL_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kData = fixture::data_path("falls_synthetic.csv");
const std::string kZeros = fixture::data_path("falls_sampling_zeros.json");
const std::string kEvidence = fixture::data_path("evidence_w5.json");

}  // namespace

TEST_CASE("pipeline equals the subcommands in sequence") {
  const auto dir = scratch("compose");
  const auto log = dir / "log.txt";
  const auto run_dir = dir / "run";
  REQUIRE(run("pipeline --data " + q(kData) + " --sampling-zeros " + q(kZeros) + " --evidence " + q(kEvidence) +
                  " --threads 3 --out " + q(run_dir),
              log) == 0);

  const auto step = dir / "steps";
  fs::create_directories(step);
  REQUIRE(run("build --data " + q(kData) + " --sampling-zeros " + q(kZeros) + " --out " + q(step / "tree.json"), log) == 0);
  REQUIRE(run("fit --tree " + q(step / "tree.json") + " --threads 1 --out " + q(step / "staged.json"), log) == 0);
  REQUIRE(run("toceg --staged " + q(step / "staged.json") + " --out " + q(step / "ceg.json"), log) == 0);
  REQUIRE(run("reduce --ceg " + q(step / "ceg.json") + " --evidence " + q(kEvidence) + " --out " +
                  q(step / "reduced.json"),
              log) == 0);
  for (const char* name : {"tree", "staged", "ceg", "reduced"}) {
    CAPTURE(name);
    REQUIRE(run("render --model " + q(step / (std::string(name) + ".json")) + " --out " +
                    q(step / (std::string(name) + ".dot")),
                log) == 0);
    for (const char* ext : {".json", ".dot"}) {
      const std::string file = std::string(name) + ext;
      CAPTURE(file);
      CHECK(fs::exists(run_dir / file));
      CHECK(slurp(run_dir / file) == slurp(step / file));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("pipeline reads a config file") {
  const auto dir = scratch("config");
  const auto config = dir / "run.ini";
  std::ofstream(config) << "data=" << kData << "\nsampling-zeros=" << kZeros << "\nalpha=4\nout=" << (dir / "out").string()
                        << "\n";
  CHECK(run("pipeline --config " + q(config), dir / "log.txt") == 0);
  CHECK(fs::exists(dir / "out" / "ceg.dot"));
  CHECK_FALSE(fs::exists(dir / "out" / "reduced.json"));

  PipelineConfig direct;
  direct.build.data = kData;
  direct.build.sampling_zeros = kZeros;
  direct.out_dir = (dir / "lib").string();
  run_pipeline(direct);
  CHECK(slurp(dir / "out" / "staged.json") == slurp(dir / "lib" / "staged.json"));
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const auto log = dir / "log.txt";
  SUBCASE("usage errors") {
    CHECK(run("", log) == 1);
    CHECK(run("frobnicate", log) == 1);
    CHECK(run("build --out x.json", log) == 1);
    CHECK(run("fit --tree t.json --alpha 2 --prior p.json --out s.json", log) == 1);
    CHECK(run("build --data " + q(kData) + " --delimiter ab --out " + q(dir / "t.json"), log) == 1);
  }
  SUBCASE("missing data file") {
    CHECK(run("pipeline --data " + q(dir / "absent.csv") + " --out " + q(dir / "o"), log) == 2);
    CHECK(slurp(log).find("absent.csv") != std::string::npos);
  }
  SUBCASE("bad alpha") {
    REQUIRE(run("build --data " + q(kData) + " --out " + q(dir / "t.json"), log) == 0);
    CHECK(run("fit --tree " + q(dir / "t.json") + " --alpha 0 --out " + q(dir / "s.json"), log) == 2);
    CHECK(run("fit --tree " + q(dir / "t.json") + " --alpha x --out " + q(dir / "s.json"), log) == 2);
    CHECK(run("fit --tree " + q(dir / "t.json") + " --alpha 7/2 --out " + q(dir / "s.json"), log) == 0);
  }
  SUBCASE("evidence naming an unknown node") {
    const auto ev = dir / "ev.json";
    std::ofstream(ev) << R"({"certain_nodes": ["w99"]})";
    CHECK(run("pipeline --data " + q(kData) + " --evidence " + q(ev) + " --out " + q(dir / "o"), log) == 2);
    CHECK(slurp(log).find("w99") != std::string::npos);
  }
  SUBCASE("contradictory evidence") {
    const auto ev = dir / "ev.json";
    std::ofstream(ev) << R"({"certain_nodes": ["w1", "w2"]})";
    CHECK(run("pipeline --data " + q(kData) + " --sampling-zeros " + q(kZeros) + " --evidence " + q(ev) +
                  " --out " + q(dir / "o"),
              log) == 3);
  }
  SUBCASE("model of the wrong kind") {
    REQUIRE(run("build --data " + q(kData) + " --out " + q(dir / "t.json"), log) == 0);
    CHECK(run("toceg --staged " + q(dir / "t.json") + " --out " + q(dir / "c.json"), log) == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("library options") {
  BuildOptions build;
  build.data = fixture::data_path("sample_records.csv");
  const auto tree = build_tree(build);
  CHECK(tree == fixture::sample_tree());

  FitOptions both;
  both.alpha = "2";
  both.prior_file = "p.json";
  CHECK_THROWS_AS(fit(tree, both), ValidationError);

  FitOptions alpha;
  alpha.alpha = "3/2";
  const auto staged = fit(tree, alpha);
  CHECK(staged.spec().at(0).prior == std::vector<Rational>{Rational(3, 4), Rational(3, 4)});

  const auto dir = scratch("tsv");
  {
    std::ofstream out(dir / "t.tsv");
    out << "a\tb\nx, y\tz\n";
  }
  BuildOptions tsv;
  tsv.data = (dir / "t.tsv").string();
  CHECK(build_tree(tsv).out_labels(0) == std::vector<std::string>{"x, y"});
  fs::remove_all(dir);
}
