#pragma once

// Dirichlet priors over situation transition vectors and hyperstage
// constraints on which situations may share a stage.

#include <map>
#include <string>
#include <vector>

#include "ceg/event_tree.hpp"
#include "ceg/rational.hpp"

namespace ceg {

// Hyperparameters of one situation, entries aligned with the situation's
// outgoing edges in label order. posterior[j] == prior[j] + counts[j].
struct DirichletParams {
  std::vector<Rational> prior;
  std::vector<Count> counts;
  std::vector<Rational> posterior;

  friend bool operator==(const DirichletParams&, const DirichletParams&) = default;
};

using PriorMap = std::map<NodeIndex, std::vector<Rational>>;

class DirichletSpec {
 public:
  DirichletSpec() = default;

  const DirichletParams& at(NodeIndex situation) const;
  const std::map<NodeIndex, DirichletParams>& situations() const { return params_; }
  PriorMap priors() const;

  friend bool operator==(const DirichletSpec&, const DirichletSpec&) = default;

 private:
  friend DirichletSpec validate_user_prior(const EventTree& tree, const PriorMap& prior);

  std::map<NodeIndex, DirichletParams> params_;
};

// Largest out-degree over all situations.
Rational default_alpha(const EventTree& tree);

// Splits `alpha_bar_0` uniformly down the tree: each situation's mass is the
// mass of its incoming edge, shared equally among its outgoing edges.
DirichletSpec mass_conservation_prior(const EventTree& tree, const Rational& alpha_bar_0);

// Checks a prior for every situation (correct length, strictly positive
// entries) and attaches the tree's counts. Throws ValidationError naming the
// offending situation.
DirichletSpec validate_user_prior(const EventTree& tree, const PriorMap& prior);

// Disjoint sets of situations. Only situations in a common set may be merged
// into one stage; situations in no set stay singletons.
struct Hyperstage {
  std::vector<std::vector<NodeIndex>> sets;

  friend bool operator==(const Hyperstage&, const Hyperstage&) = default;
};

// Groups situations by their outgoing label set. Sets are ordered by their
// smallest member, members ascending.
Hyperstage default_hyperstage(const EventTree& tree);

// Checks that a user hyperstage only names situations, has disjoint sets and
// only groups situations with identical outgoing label sets. Returns it in
// canonical order.
Hyperstage validate_hyperstage(const EventTree& tree, const Hyperstage& hyperstage);

}  // namespace ceg
