#include "ceg/ahc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

Rational sum(const std::vector<Rational>& v) {
  Rational total = 0;
  for (const auto& x : v) total += x;
  return total;
}

constexpr std::size_t kNoStage = std::numeric_limits<std::size_t>::max();

}  // namespace

std::vector<std::string> default_palette() {
  return {"#BBCC33", "#77AADD", "#EE8866", "#EEDD88", "#FFAABB", "#44BB99"};
}

Stage singleton_stage(const EventTree& tree, const DirichletSpec& spec, NodeIndex situation) {
  const auto& params = spec.at(situation);
  Stage stage;
  stage.members = {situation};
  stage.labels = tree.out_labels(situation);
  stage.prior = params.prior;
  stage.counts = params.counts;
  stage.posterior = params.posterior;
  stage.colour = kSingletonColour;
  return stage;
}

Stage merge_stages(const Stage& a, const Stage& b) {
  if (a.labels != b.labels) {
    throw ValidationError("cannot merge stages with different edge labels");
  }
  Stage out;
  std::merge(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
             std::back_inserter(out.members));
  out.labels = a.labels;
  for (std::size_t j = 0; j < a.labels.size(); ++j) {
    out.prior.push_back(a.prior[j] + b.prior[j]);
    out.counts.push_back(a.counts[j] + b.counts[j]);
    out.posterior.push_back(a.posterior[j] + b.posterior[j]);
  }
  return out;
}

double log_gamma(const Rational& x) { return boost::math::lgamma(to_double(x)); }

double log_marginal_score(const Stage& stage) {
  double score = log_gamma(sum(stage.prior)) - log_gamma(sum(stage.posterior));
  for (std::size_t j = 0; j < stage.prior.size(); ++j) {
    score += log_gamma(stage.posterior[j]) - log_gamma(stage.prior[j]);
  }
  return score;
}

double log_marginal_score(std::span<const Stage> stages) {
  double score = 0.0;
  for (const auto& stage : stages) score += log_marginal_score(stage);
  return score;
}

double one_nested_log_bf(const Stage& a, const Stage& b) {
  if (a.labels != b.labels) {
    throw ValidationError("one-nested comparison of stages with different edge labels");
  }
  const Rational prior_a = sum(a.prior), prior_b = sum(b.prior);
  const Rational post_a = sum(a.posterior), post_b = sum(b.posterior);
  double bf = log_gamma(prior_a + prior_b) - log_gamma(prior_a) - log_gamma(prior_b) -
              log_gamma(post_a + post_b) + log_gamma(post_a) + log_gamma(post_b);
  for (std::size_t l = 0; l < a.labels.size(); ++l) {
    bf += log_gamma(a.posterior[l] + b.posterior[l]) - log_gamma(a.posterior[l]) -
          log_gamma(b.posterior[l]) - log_gamma(a.prior[l] + b.prior[l]) +
          log_gamma(a.prior[l]) + log_gamma(b.prior[l]);
  }
  return bf;
}

StagedTree::StagedTree(EventTree tree, DirichletSpec spec, Hyperstage hyperstage,
                       std::vector<Stage> stages, double score)
    : tree_(std::move(tree)),
      spec_(std::move(spec)),
      hyperstage_(std::move(hyperstage)),
      stages_(std::move(stages)),
      score_(score) {
  for (auto& stage : stages_) {
    if (stage.members.empty()) throw ValidationError("empty stage");
    std::sort(stage.members.begin(), stage.members.end());
  }
  std::sort(stages_.begin(), stages_.end(),
            [](const Stage& a, const Stage& b) { return a.members.front() < b.members.front(); });

  stage_of_.assign(tree_.node_count(), kNoStage);
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (NodeIndex node : stages_[s].members) {
      const std::string name = EventTree::node_name(node);
      if (node >= tree_.node_count() || tree_.is_leaf(node)) {
        throw ValidationError("stage member " + name + " is not a situation");
      }
      if (stage_of_[node] != kNoStage) {
        throw ValidationError("situation " + name + " is in more than one stage");
      }
      stage_of_[node] = s;
    }
  }
  for (NodeIndex node : tree_.situations()) {
    if (stage_of_[node] == kNoStage) {
      throw ValidationError("situation " + EventTree::node_name(node) + " has no stage");
    }
  }

  std::vector<std::size_t> set_of(tree_.node_count(), kNoStage);
  for (std::size_t h = 0; h < hyperstage_.sets.size(); ++h) {
    for (NodeIndex node : hyperstage_.sets[h]) {
      if (node >= tree_.node_count()) throw ValidationError("hyperstage names unknown node");
      set_of[node] = h;
    }
  }
  for (const auto& stage : stages_) {
    if (stage.members.size() < 2) continue;
    const std::size_t h = set_of[stage.members.front()];
    for (NodeIndex node : stage.members) {
      if (h == kNoStage || set_of[node] != h) {
        throw ValidationError("stage containing " + EventTree::node_name(node) +
                              " is not within one hyperstage set");
      }
    }
  }

  for (const auto& stage : stages_) {
    Stage pooled = singleton_stage(tree_, spec_, stage.members.front());
    for (std::size_t i = 1; i < stage.members.size(); ++i) {
      pooled = merge_stages(pooled, singleton_stage(tree_, spec_, stage.members[i]));
    }
    if (pooled.labels != stage.labels || pooled.prior != stage.prior ||
        pooled.counts != stage.counts || pooled.posterior != stage.posterior) {
      throw ValidationError("stage containing " + EventTree::node_name(stage.members.front()) +
                            " does not pool its members' hyperparameters");
    }
  }

  const double expected = log_marginal_score(stages_);
  if (std::abs(expected - score_) > 1e-9 * std::max(1.0, std::abs(expected))) {
    throw ValidationError("score does not match the stage partition");
  }
}

std::size_t StagedTree::stage_of(NodeIndex situation) const {
  if (situation >= stage_of_.size() || stage_of_[situation] == kNoStage) {
    throw ValidationError(EventTree::node_name(situation) + " is not a situation");
  }
  return stage_of_[situation];
}

std::string StagedTree::colour_of(NodeIndex node) const {
  if (tree_.is_leaf(node)) return kLeafColour;
  return stages_[stage_of(node)].colour;
}

void StagedTree::set_stage_colour(std::size_t stage, std::string colour) {
  stages_.at(stage).colour = std::move(colour);
}

AhcResult run_ahc(const EventTree& tree, const DirichletSpec& spec, const Hyperstage& hyperstage,
                  const AhcOptions& options) {
  const Hyperstage checked = validate_hyperstage(tree, hyperstage);

  struct Slot {
    Stage stage;
    std::size_t set = kNoStage;
    bool active = true;
  };
  std::vector<Slot> slots;
  std::vector<std::size_t> set_of(tree.node_count(), kNoStage);
  for (std::size_t h = 0; h < checked.sets.size(); ++h) {
    for (NodeIndex node : checked.sets[h]) set_of[node] = h;
  }
  for (NodeIndex node : tree.situations()) {
    slots.push_back({singleton_stage(tree, spec, node), set_of[node], true});
  }

  AhcResult result;
  {
    std::vector<Stage> initial;
    for (const auto& slot : slots) initial.push_back(slot.stage);
    result.initial_score = log_marginal_score(initial);
  }
  double score = result.initial_score;
  const unsigned threads = std::max(1u, options.threads);

  while (true) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].active || slots[i].set == kNoStage) continue;
      for (std::size_t j = i + 1; j < slots.size(); ++j) {
        if (slots[j].active && slots[j].set == slots[i].set) pairs.emplace_back(i, j);
      }
    }
    if (pairs.empty()) break;

    std::vector<double> bf(pairs.size());
    auto score_range = [&](std::size_t offset, std::size_t stride) {
      for (std::size_t k = offset; k < pairs.size(); k += stride) {
        bf[k] = one_nested_log_bf(slots[pairs[k].first].stage, slots[pairs[k].second].stage);
      }
    };
    const std::size_t workers = std::min<std::size_t>(threads, pairs.size());
    if (workers <= 1) {
      score_range(0, 1);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(score_range, t, workers);
    }

    auto tie_key = [&](std::size_t k) {
      const NodeIndex a = slots[pairs[k].first].stage.members.front();
      const NodeIndex b = slots[pairs[k].second].stage.members.front();
      return std::make_pair(std::min(a, b), std::max(a, b));
    };
    std::size_t best = 0;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      if (bf[k] > bf[best] || (bf[k] == bf[best] && tie_key(k) < tie_key(best))) best = k;
    }
    if (!(bf[best] > 0.0)) break;

    auto& first = slots[pairs[best].first];
    auto& second = slots[pairs[best].second];
    score += bf[best];
    result.merges.push_back({first.stage.members, second.stage.members, bf[best], score});
    Slot merged{merge_stages(first.stage, second.stage), first.set, true};
    first.active = false;
    second.active = false;
    slots.push_back(std::move(merged));
  }

  std::vector<Stage> stages;
  for (auto& slot : slots) {
    if (!slot.active) continue;
    slot.stage.colour = kSingletonColour;
    stages.push_back(std::move(slot.stage));
  }
  // The running score and the recomputed one agree to rounding; store the
  // recomputed value so reloading is exact.
  const double final_score = log_marginal_score(stages);
  result.staged = StagedTree(tree, spec, checked, std::move(stages), final_score);
  if (std::abs(final_score - score) > 1e-9 * std::max(1.0, std::abs(final_score))) {
    throw std::logic_error("running AHC score diverged from the recomputed score");
  }
  return result;
}

StagedTree assign_colours(StagedTree staged, const std::vector<std::string>& palette) {
  if (palette.empty()) throw ValidationError("colour palette is empty");
  std::size_t next = 0;
  for (std::size_t s = 0; s < staged.stages().size(); ++s) {
    if (staged.stages()[s].members.size() < 2) {
      staged.set_stage_colour(s, kSingletonColour);
    } else {
      staged.set_stage_colour(s, palette[next++ % palette.size()]);
    }
  }
  return staged;
}

}  // namespace ceg
