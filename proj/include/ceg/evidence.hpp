#pragma once

// Intrinsic evidence on a chain event graph and its propagation.
//
// Evidence is a conjunction of items. A certain node or edge item requires
// the path to visit it; an uncertain set requires the path to visit at least
// one of its members. Lambda(E) is the set of edges lying on some root-to-sink
// path that satisfies every item.
//
// Propagation is the two-pass backward-forward scheme: a backward pass from
// the sink accumulates, for every node, the probability Phi of reaching the
// sink along Lambda(E) edges; a forward pass renormalises each retained edge
// to p(e) Phi(target) / Phi(source). Edges outside Lambda(E) get probability 0.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ceg/ceg.hpp"
#include "ceg/rational.hpp"

namespace ceg {

struct EdgeRef {
  std::string source;
  std::string target;
  std::string label;

  auto operator<=>(const EdgeRef&) const = default;
};

struct EvidenceSpec {
  std::vector<std::string> certain_nodes;
  std::vector<EdgeRef> certain_edges;
  std::vector<std::vector<std::string>> uncertain_node_sets;
  std::vector<std::vector<EdgeRef>> uncertain_edge_sets;

  bool empty() const {
    return certain_nodes.empty() && certain_edges.empty() && uncertain_node_sets.empty() &&
           uncertain_edge_sets.empty();
  }
  friend bool operator==(const EvidenceSpec&, const EvidenceSpec&) = default;
};

// One conjunct, resolved against a graph: satisfied by visiting any of
// `nodes` or traversing any of `edges`.
struct EvidenceItem {
  std::string description;
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> edges;
};

// Items in order: certain nodes, certain edges, uncertain node sets,
// uncertain edge sets. Throws ValidationError for unknown nodes or edges,
// empty uncertain sets, or more than 64 items.
std::vector<EvidenceItem> resolve_evidence(const ChainEventGraph& ceg, const EvidenceSpec& ev);

// Lambda(E) as a per-edge membership vector. Throws ContradictoryEvidence
// naming the first item after which no consistent path remains.
std::vector<bool> lambda_edges(const ChainEventGraph& ceg, const EvidenceSpec& ev);

// True when every root-to-sink path that uses only `lambda` edges satisfies
// the evidence. This holds for certain evidence and for the usual uncertain
// sets; when it fails, conditioning is not a renormalisation over Lambda(E)
// alone and reduce() falls back to propagating over evidence states.
bool lambda_paths_consistent(const ChainEventGraph& ceg, const EvidenceSpec& ev,
                             const std::vector<bool>& lambda);

struct ReducedCeg {
  ChainEventGraph ceg;
  std::vector<bool> lambda;
  std::vector<double> updated;    // per edge of `ceg`; 0 outside Lambda(E)
  std::vector<double> occupancy;  // probability of visiting each node
  std::optional<std::vector<Rational>> updated_exact;
  std::optional<std::vector<Rational>> occupancy_exact;

  std::vector<bool> retained_nodes() const;
  // The reduced graph with exact updated probabilities on its edges; node ids
  // are kept. Requires exact values.
  ChainEventGraph graph() const;
};

struct PropagateOptions {
  bool exact = false;
};

// Backward-forward propagation over the given Lambda(E). Throws
// ContradictoryEvidence when the root cannot reach the sink within it.
ReducedCeg propagate(const ChainEventGraph& ceg, const std::vector<bool>& lambda,
                     const PropagateOptions& options = {});

// lambda_edges followed by propagate. Evidence whose Lambda(E) admits
// inconsistent paths is propagated over (node, satisfied-items) states and
// projected back to edges, which gives the conditional edge-traversal
// probabilities in every case.
ReducedCeg reduce(const ChainEventGraph& ceg, const EvidenceSpec& ev,
                  const PropagateOptions& options = {});

}  // namespace ceg
