#include <filesystem>
#include <random>

#include "doctest.h"

#include "ceg/errors.hpp"
#include "ceg/serialize.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ceg;

namespace {

StagedTree falls_staged() {
  const auto tree = fixture::falls_tree();
  return assign_colours(run_ahc(tree, mass_conservation_prior(tree, 4), default_hyperstage(tree)).staged,
                        default_palette());
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

bool same_reduced(const ReducedCeg& a, const ReducedCeg& b) {
  if (!(a.ceg == b.ceg) || a.lambda != b.lambda || a.updated_exact != b.updated_exact) return false;
  const auto keep = a.retained_nodes();
  for (std::size_t n = 0; n < keep.size(); ++n) {
    if (keep[n] && a.occupancy[n] != b.occupancy[n]) return false;
  }
  for (std::size_t e = 0; e < a.lambda.size(); ++e) {
    if (a.lambda[e] && a.updated[e] != b.updated[e]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("round trips are exact") {
  const auto staged = falls_staged();
  const auto tree = staged.tree();
  const auto graph = build_ceg(staged);

  CHECK(event_tree_from_json(to_json(tree)) == tree);
  CHECK(staged_tree_from_json(to_json(staged)) == staged);
  CHECK(ceg_from_json(to_json(graph)) == graph);

  // text level: dump -> parse -> dump is stable
  const std::string text = dump(to_json(staged));
  CHECK(dump(to_json(staged_tree_from_json(Json::parse(text)))) == text);
  CHECK(text.back() == '\n');

  EvidenceSpec ev;
  ev.certain_nodes = {"w5"};
  for (bool exact : {false, true}) {
    const auto reduced = reduce(graph, ev, PropagateOptions{exact});
    const auto back = reduced_ceg_from_json(to_json(reduced));
    CHECK(same_reduced(back, reduced));
    CHECK(dump(to_json(back)) == dump(to_json(reduced)));
  }
}

TEST_CASE("random staged trees round trip") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 30; ++i) {
    const auto tree = oracle::random_tree(rng, 20);
    const auto spec = mass_conservation_prior(tree, oracle::random_rational(rng));
    const auto hyper = default_hyperstage(tree);
    const auto staged = oracle::staged_with_partition(tree, spec, hyper, oracle::random_partition(rng, hyper));
    CHECK(staged_tree_from_json(to_json(staged)) == staged);
    const auto graph = build_ceg(staged);
    CHECK(ceg_from_json(to_json(graph)) == graph);
  }
}

TEST_CASE("save and load through files") {
  const auto dir = std::filesystem::temp_directory_path() / "ceg_serialize_test";
  std::filesystem::create_directories(dir);
  const auto staged = falls_staged();
  const std::string path = (dir / "staged.json").string();
  save_model(staged, path);
  const Model loaded = load_model(path);
  REQUIRE(std::holds_alternative<StagedTree>(loaded));
  CHECK(std::get<StagedTree>(loaded) == staged);
  CHECK_THROWS_AS(load_model((dir / "absent.json").string()), ValidationError);
  write_text_file(path, "{not json");
  CHECK_THROWS_AS(load_model(path), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("schema violations carry a JSON pointer") {
  const auto staged = falls_staged();
  SUBCASE("zero prior entry") {
    auto j = to_json(staged);
    j["stages"][0]["prior"][0] = "0/1";
    CHECK(error_of([&] { staged_tree_from_json(j); }).find("/stages/0/prior/0") != std::string::npos);
    auto p = to_json(staged);
    p["prior"]["s3"][1] = "0/1";
    CHECK(error_of([&] { staged_tree_from_json(p); }).find("/prior/s3") != std::string::npos);
  }
  SUBCASE("probabilities not summing to one") {
    auto j = to_json(build_ceg(staged));
    j["edges"][0]["probability"] = "9/10";
    j["edges"][1]["probability"] = "0";
    j["edges"][2]["probability"] = "0";
    j["edges"][3]["probability"] = "0";
    CHECK_THROWS_AS(ceg_from_json(j), ValidationError);
    auto k = to_json(build_ceg(staged));
    k["edges"][0]["probability"] = "1/100";
    CHECK_THROWS_AS(ceg_from_json(k), ValidationError);
  }
  SUBCASE("wrong kind and missing members") {
    auto j = to_json(staged.tree());
    CHECK_THROWS_AS(ceg_from_json(j), ValidationError);
    j.erase("edges");
    CHECK(error_of([&] { event_tree_from_json(j); }).find("/edges") != std::string::npos);
    CHECK_THROWS_AS(model_from_json(Json{{"kind", "nonsense"}}), ValidationError);
  }
  SUBCASE("tampered counts") {
    auto j = to_json(staged.tree());
    j["edges"][0]["count"] = 1;
    CHECK_THROWS_AS(event_tree_from_json(j), ValidationError);
  }
  SUBCASE("tampered score") {
    auto j = to_json(staged);
    j["score"] = 0.0;
    CHECK_THROWS_AS(staged_tree_from_json(j), ValidationError);
  }
}

TEST_CASE("input files") {
  const auto prior = prior_from_json(Json::parse(R"({"s0": ["1", "3/2"], "s1": ["1/6"]})"));
  CHECK(prior.at(0) == std::vector<Rational>{1, Rational(3, 2)});
  CHECK(prior.at(1) == std::vector<Rational>{Rational(1, 6)});
  CHECK_THROWS_AS(prior_from_json(Json::parse(R"({"x1": ["1"]})")), ValidationError);
  CHECK_THROWS_AS(prior_from_json(Json::parse(R"({"s0": ["abc"]})")), ValidationError);

  CHECK(hyperstage_from_json(Json::parse(R"([["s1", "s2"], ["s5"]])")) == Hyperstage{{{1, 2}, {5}}});
  CHECK_THROWS_AS(hyperstage_from_json(Json::parse(R"({"a": 1})")), ValidationError);

  CHECK(palette_from_json(Json::parse(R"(["#fff", "red"])")) == std::vector<std::string>{"#fff", "red"});
  CHECK(paths_from_json(Json::parse(R"([["a", "b"]])")) == std::vector<Path>{{"a", "b"}});

  const auto ev = evidence_from_json(read_json_file(fixture::data_path("evidence_treated_fall.json")));
  CHECK(ev.uncertain_edge_sets.size() == 2);
  CHECK(evidence_from_json(to_json(ev)) == ev);
  CHECK_THROWS_AS(evidence_from_json(Json::parse(R"({"certain_node": ["w1"]})")), ValidationError);
  CHECK_THROWS_AS(evidence_from_json(Json::parse(R"({"certain_edges": [["w0", "w1"]]})")), ValidationError);
}
