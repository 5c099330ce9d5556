#include "ceg/prior.hpp"

#include <algorithm>
#include <set>

#include "ceg/errors.hpp"

namespace ceg {

const DirichletParams& DirichletSpec::at(NodeIndex situation) const {
  const auto it = params_.find(situation);
  if (it == params_.end()) {
    throw ValidationError("no prior for situation " + EventTree::node_name(situation));
  }
  return it->second;
}

PriorMap DirichletSpec::priors() const {
  PriorMap out;
  for (const auto& [node, p] : params_) out.emplace(node, p.prior);
  return out;
}

Rational default_alpha(const EventTree& tree) {
  if (tree.node_count() == 0) throw ValidationError("empty event tree");
  return Rational(tree.max_out_degree());
}

DirichletSpec mass_conservation_prior(const EventTree& tree, const Rational& alpha_bar_0) {
  if (alpha_bar_0 <= 0) {
    throw ValidationError("imaginary sample size must be positive, got " +
                          format_rational(alpha_bar_0));
  }
  if (tree.node_count() == 0) throw ValidationError("empty event tree");

  // Parents precede children in breadth-first numbering.
  std::vector<Rational> mass(tree.node_count());
  mass[EventTree::root()] = alpha_bar_0;
  PriorMap prior;
  for (NodeIndex node = 0; node < tree.node_count(); ++node) {
    if (tree.is_leaf(node)) continue;
    const Rational share = mass[node] / Rational(tree.out_degree(node));
    prior[node].assign(tree.out_degree(node), share);
    for (auto e : tree.out_edges(node)) mass[tree.edges()[e].target] = share;
  }
  return validate_user_prior(tree, prior);
}

DirichletSpec validate_user_prior(const EventTree& tree, const PriorMap& prior) {
  DirichletSpec spec;
  for (const auto& [node, alpha] : prior) {
    if (node >= tree.node_count() || tree.is_leaf(node)) {
      throw ValidationError("prior given for " + EventTree::node_name(node) +
                            ", which is not a situation");
    }
  }
  for (NodeIndex node : tree.situations()) {
    const auto it = prior.find(node);
    const std::string name = EventTree::node_name(node);
    if (it == prior.end()) throw ValidationError("no prior for situation " + name);
    const auto& alpha = it->second;
    if (alpha.size() != tree.out_degree(node)) {
      throw ValidationError("prior for " + name + " has " + std::to_string(alpha.size()) +
                            " entries, situation has " + std::to_string(tree.out_degree(node)) +
                            " edges");
    }
    DirichletParams params;
    params.prior = alpha;
    params.counts = tree.out_counts(node);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] <= 0) {
        throw ValidationError("prior for " + name + " has non-positive entry " +
                              format_rational(alpha[j]));
      }
      params.posterior.push_back(alpha[j] + Rational(params.counts[j]));
    }
    spec.params_.emplace(node, std::move(params));
  }
  return spec;
}

Hyperstage default_hyperstage(const EventTree& tree) {
  std::map<std::vector<std::string>, std::vector<NodeIndex>> groups;
  for (NodeIndex node : tree.situations()) groups[tree.out_labels(node)].push_back(node);
  Hyperstage out;
  for (auto& [labels, members] : groups) out.sets.push_back(std::move(members));
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

Hyperstage validate_hyperstage(const EventTree& tree, const Hyperstage& hyperstage) {
  Hyperstage out;
  std::set<NodeIndex> seen;
  for (const auto& set : hyperstage.sets) {
    if (set.empty()) throw ValidationError("hyperstage contains an empty set");
    std::vector<NodeIndex> members = set;
    std::sort(members.begin(), members.end());
    for (NodeIndex node : members) {
      const std::string name = EventTree::node_name(node);
      if (node >= tree.node_count() || tree.is_leaf(node)) {
        throw ValidationError("hyperstage names " + name + ", which is not a situation");
      }
      if (!seen.insert(node).second) {
        throw ValidationError("situation " + name + " appears in more than one hyperstage set");
      }
      if (tree.out_labels(node) != tree.out_labels(members.front())) {
        throw ValidationError("hyperstage set groups " + EventTree::node_name(members.front()) +
                              " and " + name + ", which have different edge labels");
      }
    }
    out.sets.push_back(std::move(members));
  }
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

}  // namespace ceg
