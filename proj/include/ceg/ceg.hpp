#pragma once

// Chain event graphs: the quotient of a staged tree under positions, with all
// leaves fused into a single sink.
//
// Two situations share a position when their coloured subtrees are
// isomorphic. Positions are found bottom-up: a situation's signature is its
// stage together with the positions reached along each labelled edge, so
// equal signatures mean equal coloured subtrees.
//
// Nodes are named w0 (root), w1, w2, ... breadth-first over label-sorted
// edges, and w_inf for the sink. An edge carries the number of observed
// traversals through its position, and the Dirichlet prior and posterior
// entries of its source node's stage. Its probability is the posterior mean.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ceg/ahc.hpp"
#include "ceg/rational.hpp"

namespace ceg {

inline constexpr const char* kSinkName = "w_inf";

struct CegNode {
  std::string id;
  std::string colour;
  std::vector<NodeIndex> situations;  // tree nodes contracted here (leaves for the sink)
  std::optional<std::size_t> stage;   // index into the staged tree's stages

  friend bool operator==(const CegNode&, const CegNode&) = default;
};

struct CegEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  std::string label;
  Count count = 0;
  Rational prior;
  Rational posterior;
  Rational probability;

  friend bool operator==(const CegEdge&, const CegEdge&) = default;
};

class ChainEventGraph {
 public:
  ChainEventGraph() = default;
  // Validates: node 0 is the only source, the last node is the only sink and
  // is named w_inf, the graph is acyclic, ids are unique, labels out of a
  // node are distinct, every node lies on a root-to-sink path, and outgoing
  // probabilities of each non-sink node are positive and sum to exactly 1.
  // Edges are stored ordered by (source, label).
  ChainEventGraph(std::vector<CegNode> nodes, std::vector<CegEdge> edges);

  const std::vector<CegNode>& nodes() const { return nodes_; }
  const std::vector<CegEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t root() const { return 0; }
  std::size_t sink() const { return nodes_.size() - 1; }

  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_.at(node); }
  const std::vector<std::size_t>& in_edges(std::size_t node) const { return in_.at(node); }
  // Root first, sink last; ties broken by node index.
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  std::optional<std::size_t> find_node(const std::string& id) const;
  std::optional<std::size_t> find_edge(const std::string& source, const std::string& target,
                                       const std::string& label) const;

  friend bool operator==(const ChainEventGraph& a, const ChainEventGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<CegNode> nodes_;
  std::vector<CegEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> topo_;
};

struct PositionMap {
  // Position of every tree node; positions are numbered like the CEG nodes
  // they become (0 root, count - 1 sink).
  std::vector<std::size_t> position_of;
  std::size_t count = 0;

  std::size_t sink() const { return count - 1; }
};

PositionMap find_positions(const StagedTree& staged);

ChainEventGraph contract(const StagedTree& staged, const PositionMap& positions);

// Merges nodes of an existing graph that share a stage and identical labelled
// out-edges, repeating until no such pair remains. A graph produced from a
// staged tree is already fully contracted and comes back unchanged.
ChainEventGraph contract(const ChainEventGraph& ceg);

// Recomputes every edge probability as posterior / (sum of posteriors out of
// the source node).
ChainEventGraph edge_probabilities(const ChainEventGraph& ceg);

inline ChainEventGraph build_ceg(const StagedTree& staged) {
  return contract(staged, find_positions(staged));
}

}  // namespace ceg
