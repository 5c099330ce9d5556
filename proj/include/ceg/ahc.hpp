#pragma once

// Bayesian stage selection by agglomerative hierarchical clustering.
//
// Every situation starts as its own stage. Each round scores all pairs of
// stages that share a hyperstage set with the one-nested log Bayes factor and
// merges the best pair if its factor is strictly positive. Pair scoring runs
// in parallel; the merge itself is serial, so results do not depend on the
// thread count. Ties on the factor go to the pair whose (smaller, larger)
// minimal member ids compare lexicographically smallest.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ceg/event_tree.hpp"
#include "ceg/prior.hpp"
#include "ceg/rational.hpp"

namespace ceg {

inline constexpr const char* kSingletonColour = "white";
inline constexpr const char* kLeafColour = "lightgrey";

std::vector<std::string> default_palette();

struct Stage {
  std::vector<NodeIndex> members;  // ascending
  std::vector<std::string> labels;
  std::vector<Rational> prior;
  std::vector<Count> counts;
  std::vector<Rational> posterior;
  std::string colour;

  friend bool operator==(const Stage&, const Stage&) = default;
};

Stage singleton_stage(const EventTree& tree, const DirichletSpec& spec, NodeIndex situation);

// Pools two label-compatible stages entrywise. The result has no colour.
Stage merge_stages(const Stage& a, const Stage& b);

// log Gamma of an exact rational, evaluated in double precision.
double log_gamma(const Rational& x);

// Contribution of one stage to the log marginal likelihood:
// g(sum prior) - g(sum posterior) + sum_j [g(posterior_j) - g(prior_j)].
double log_marginal_score(const Stage& stage);
double log_marginal_score(std::span<const Stage> stages);

// Log Bayes factor of merging two stages against keeping them apart, from the
// hyperparameters of the two stages alone. Throws ValidationError when the
// label sets differ.
double one_nested_log_bf(const Stage& a, const Stage& b);

class StagedTree {
 public:
  StagedTree() = default;
  // Validates that `stages` partitions the situations, refines the hyperstage
  // and pools the per-situation hyperparameters, and that `score` matches the
  // recomputed log marginal likelihood (1e-9 relative). Stages are stored in
  // order of their smallest member.
  StagedTree(EventTree tree, DirichletSpec spec, Hyperstage hyperstage, std::vector<Stage> stages,
             double score);

  const EventTree& tree() const { return tree_; }
  const DirichletSpec& spec() const { return spec_; }
  const Hyperstage& hyperstage() const { return hyperstage_; }
  const std::vector<Stage>& stages() const { return stages_; }
  double score() const { return score_; }

  // Index into stages() of a situation's stage.
  std::size_t stage_of(NodeIndex situation) const;
  // Stage colour for situations, leaf colour for leaves.
  std::string colour_of(NodeIndex node) const;

  void set_stage_colour(std::size_t stage, std::string colour);

  friend bool operator==(const StagedTree&, const StagedTree&) = default;

 private:
  EventTree tree_;
  DirichletSpec spec_;
  Hyperstage hyperstage_;
  std::vector<Stage> stages_;
  double score_ = 0.0;
  std::vector<std::size_t> stage_of_;  // per node; npos for leaves
};

struct MergeRecord {
  std::vector<NodeIndex> first;
  std::vector<NodeIndex> second;
  double log_bf = 0.0;
  double score_after = 0.0;
};

struct AhcOptions {
  unsigned threads = 1;
};

struct AhcResult {
  StagedTree staged;
  double initial_score = 0.0;
  std::vector<MergeRecord> merges;
};

AhcResult run_ahc(const EventTree& tree, const DirichletSpec& spec, const Hyperstage& hyperstage,
                  const AhcOptions& options = {});

// Multi-member stages take palette colours in stage order, cycling when the
// palette runs out; singleton stages are white.
StagedTree assign_colours(StagedTree staged, const std::vector<std::string>& palette);

}  // namespace ceg
