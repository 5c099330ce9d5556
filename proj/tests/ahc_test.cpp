#include <cmath>
#include <random>

#include "doctest.h"

#include "ceg/ahc.hpp"
#include "ceg/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ceg;
using fixture::path;

namespace {

Stage stage(std::vector<Rational> prior, std::vector<Count> counts, NodeIndex member = 0) {
  Stage s;
  s.members = {member};
  for (std::size_t j = 0; j < prior.size(); ++j) s.labels.push_back("l" + std::to_string(j));
  s.posterior = prior;
  for (std::size_t j = 0; j < prior.size(); ++j) s.posterior[j] += counts[j];
  s.prior = std::move(prior);
  s.counts = std::move(counts);
  return s;
}

// Root with one edge per entry of `counts`, each child a situation with
// edges x/y carrying the given counts.
EventTree two_level(const std::vector<std::pair<Count, Count>>& counts) {
  PathCountTable table;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string c = "c" + std::to_string(i);
    table.add_path(path({c.c_str(), "x"}), counts[i].first);
    table.add_path(path({c.c_str(), "y"}), counts[i].second);
  }
  return build_event_tree(table);
}

DirichletSpec half_priors(const EventTree& tree) {
  PriorMap prior;
  for (NodeIndex n : tree.situations()) {
    prior[n] = std::vector<Rational>(tree.out_degree(n), n == 0 ? Rational(1) : Rational(1, 2));
  }
  return validate_user_prior(tree, prior);
}

}  // namespace

TEST_CASE("stage score examples") {
  CHECK(log_marginal_score(stage({1, 1}, {0, 0})) == doctest::Approx(0.0));
  CHECK(log_marginal_score(stage({1, 1}, {1, 0})) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(log_marginal_score(stage({Rational(1, 2), Rational(1, 2)}, {1, 0})) ==
        doctest::Approx(-0.693147).epsilon(1e-6));
  CHECK(log_gamma(Rational(3, 2)) - log_gamma(Rational(1, 2)) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("stage score matches the urn oracle") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
    std::vector<Rational> prior;
    std::vector<Count> counts;
    for (std::size_t j = 0; j < k; ++j) {
      prior.push_back(oracle::random_rational(rng));
      counts.push_back(std::uniform_int_distribution<Count>(0, 50)(rng));
    }
    const auto s = stage(prior, counts);
    const double expected = oracle::stage_score(s);
    CHECK(std::abs(log_marginal_score(s) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("one-nested log Bayes factor") {
  const auto a = stage({Rational(1, 2), Rational(1, 2)}, {1, 0}, 1);
  const auto b = stage({Rational(1, 2), Rational(1, 2)}, {1, 0}, 2);
  CHECK(one_nested_log_bf(a, b) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(one_nested_log_bf(a, b) == doctest::Approx(0.287682).epsilon(1e-6));
  CHECK(one_nested_log_bf(a, b) == one_nested_log_bf(b, a));

  const auto merged = merge_stages(a, b);
  CHECK(merged.members == fixture::nodes({1, 2}));
  CHECK(merged.counts == std::vector<Count>{2, 0});
  CHECK(merged.prior == std::vector<Rational>{1, 1});
  const double q_diff = oracle::stage_score(merged) - oracle::stage_score(a) - oracle::stage_score(b);
  CHECK(one_nested_log_bf(a, b) == doctest::Approx(q_diff).epsilon(1e-9));

  SUBCASE("empty partner") {
    const auto empty = stage({Rational(1, 3), Rational(2, 3)}, {0, 0}, 3);
    const double q = log_marginal_score(merge_stages(a, empty)) - log_marginal_score(a);
    CHECK(one_nested_log_bf(a, empty) == doctest::Approx(q).epsilon(1e-9));
  }
  SUBCASE("mismatched labels") {
    auto c = stage({1, 1}, {0, 0}, 4);
    c.labels = {"p", "q"};
    CHECK_THROWS_AS(one_nested_log_bf(a, c), ValidationError);
    CHECK_THROWS_AS(one_nested_log_bf(a, stage({1, 1, 1}, {0, 0, 0}, 5)), ValidationError);
  }
}

TEST_CASE("log BF equals the score difference on random pairs") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<Rational> pa, pb;
    std::vector<Count> ya, yb;
    for (std::size_t j = 0; j < k; ++j) {
      pa.push_back(oracle::random_rational(rng));
      pb.push_back(oracle::random_rational(rng));
      ya.push_back(std::uniform_int_distribution<Count>(0, 30)(rng));
      yb.push_back(std::uniform_int_distribution<Count>(0, 30)(rng));
    }
    const auto a = stage(pa, ya, 1), b = stage(pb, yb, 2);
    const double expected =
        oracle::stage_score(merge_stages(a, b)) - oracle::stage_score(a) - oracle::stage_score(b);
    CHECK(std::abs(one_nested_log_bf(a, b) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("two matching situations merge") {
  const auto tree = two_level({{1, 0}, {1, 0}});
  const auto spec = half_priors(tree);
  const auto result = run_ahc(tree, spec, default_hyperstage(tree));
  REQUIRE(result.merges.size() == 1);
  CHECK(result.staged.stage_of(1) == result.staged.stage_of(2));
  CHECK(result.staged.score() == doctest::Approx(result.initial_score + std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("opposite situations do not merge") {
  const auto tree = two_level({{100, 0}, {0, 100}});
  const auto spec = half_priors(tree);
  const auto result = run_ahc(tree, spec, default_hyperstage(tree));
  CHECK(result.merges.empty());
  CHECK(result.staged.stage_of(1) != result.staged.stage_of(2));
  auto s1 = singleton_stage(tree, spec, 1), s2 = singleton_stage(tree, spec, 2);
  CHECK(oracle::stage_score(merge_stages(s1, s2)) < oracle::stage_score(s1) + oracle::stage_score(s2));
}

TEST_CASE("singleton hyperstage gives singleton stages") {
  const auto tree = two_level({{1, 0}, {1, 0}, {2, 3}});
  const auto spec = half_priors(tree);
  Hyperstage singletons;
  for (NodeIndex n : tree.situations()) singletons.sets.push_back({n});
  const auto result = run_ahc(tree, spec, singletons);
  CHECK(result.merges.empty());
  CHECK(result.staged.stages().size() == tree.situations().size());
  std::vector<Stage> stages;
  for (NodeIndex n : tree.situations()) stages.push_back(singleton_stage(tree, spec, n));
  CHECK(result.staged.score() == doctest::Approx(oracle::partition_score(stages)).epsilon(1e-9));
  // omitted situations are singletons too
  const auto implicit = run_ahc(tree, spec, Hyperstage{});
  CHECK(implicit.staged.stages() == result.staged.stages());
}

TEST_CASE("AHC invariants on random trees") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 40; ++i) {
    const auto tree = oracle::random_tree(rng, 30);
    const auto spec = mass_conservation_prior(tree, default_alpha(tree));
    const auto hyper = default_hyperstage(tree);
    const auto result = run_ahc(tree, spec, hyper, AhcOptions{1});
    double running = result.initial_score;
    for (const auto& m : result.merges) {
      CHECK(m.log_bf > 0);
      CHECK(m.score_after > running);
      CHECK(m.score_after - running == doctest::Approx(m.log_bf).epsilon(1e-9));
      running = m.score_after;
    }
    const auto& staged = result.staged;
    const double fresh = oracle::partition_score(staged.stages());
    CHECK(std::abs(staged.score() - fresh) <= 1e-9 * std::max(1.0, std::abs(fresh)));
    for (const auto& s : staged.stages()) {
      bool inside = s.members.size() == 1;
      for (const auto& set : hyper.sets) {
        inside = inside || std::includes(set.begin(), set.end(), s.members.begin(), s.members.end());
      }
      CHECK(inside);
    }
    const auto parallel = run_ahc(tree, spec, hyper, AhcOptions{4});
    CHECK(parallel.staged == staged);
    CHECK(parallel.merges.size() == result.merges.size());
  }
}

TEST_CASE("ties go to the smallest member pair") {
  // three identical situations: every pair ties, so s1 and s2 merge first
  const auto tree = two_level({{1, 0}, {1, 0}, {1, 0}});
  const auto result = run_ahc(tree, half_priors(tree), default_hyperstage(tree));
  REQUIRE(!result.merges.empty());
  CHECK(result.merges[0].first == fixture::nodes({1}));
  CHECK(result.merges[0].second == fixture::nodes({2}));
}

TEST_CASE("staged tree validation") {
  const auto tree = two_level({{1, 0}, {1, 0}});
  const auto spec = half_priors(tree);
  const auto hyper = default_hyperstage(tree);
  std::vector<Stage> stages;
  for (NodeIndex n : tree.situations()) stages.push_back(singleton_stage(tree, spec, n));
  const double score = log_marginal_score(stages);
  CHECK_NOTHROW(StagedTree(tree, spec, hyper, stages, score));
  CHECK_THROWS_AS(StagedTree(tree, spec, hyper, stages, score + 1.0), ValidationError);
  auto missing = stages;
  missing.pop_back();
  CHECK_THROWS_AS(StagedTree(tree, spec, hyper, missing, log_marginal_score(missing)), ValidationError);
  // a merge outside the hyperstage
  Hyperstage apart{{{1}, {2}}};
  auto merged = std::vector<Stage>{stages[0], merge_stages(stages[1], stages[2])};
  CHECK_THROWS_AS(StagedTree(tree, spec, apart, merged, log_marginal_score(merged)), ValidationError);
}

TEST_CASE("colours") {
  const auto tree = fixture::falls_tree();
  const auto spec = mass_conservation_prior(tree, 4);
  auto staged = run_ahc(tree, spec, default_hyperstage(tree), AhcOptions{2}).staged;
  const auto palette = default_palette();
  CHECK(palette == std::vector<std::string>{"#BBCC33", "#77AADD", "#EE8866", "#EEDD88", "#FFAABB", "#44BB99"});
  staged = assign_colours(staged, palette);
  std::size_t coloured = 0;
  for (const auto& s : staged.stages()) {
    if (s.members.size() == 1) {
      CHECK(s.colour == kSingletonColour);
    } else {
      CHECK(s.colour == palette[coloured++ % palette.size()]);
    }
  }
  CHECK(coloured > 0);
  CHECK(staged.colour_of(18) == kLeafColour);
  CHECK_THROWS_AS(assign_colours(staged, {}), ValidationError);

  SUBCASE("all singletons are white") {
    Hyperstage none;
    auto plain = assign_colours(run_ahc(tree, spec, none).staged, palette);
    for (NodeIndex n : tree.situations()) CHECK(plain.colour_of(n) == kSingletonColour);
  }
  SUBCASE("one merged stage uses the first colour once") {
    const auto small = two_level({{1, 0}, {1, 0}});
    auto one = assign_colours(run_ahc(small, half_priors(small), default_hyperstage(small)).staged, palette);
    std::size_t first = 0;
    for (const auto& s : one.stages()) first += s.colour == palette[0];
    CHECK(first == 1);
  }
}
