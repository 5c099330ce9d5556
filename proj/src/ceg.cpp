#include "ceg/ceg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <unordered_map>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

struct Signature {
  std::size_t stage = 0;
  std::vector<std::pair<std::string, std::size_t>> children;

  bool operator==(const Signature&) const = default;
};

struct SignatureHash {
  std::size_t operator()(const Signature& s) const {
    std::size_t h = std::hash<std::size_t>{}(s.stage);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    for (const auto& [label, child] : s.children) {
      mix(std::hash<std::string>{}(label));
      mix(child);
    }
    return h;
  }
};

// Breadth-first order from `root` over label-sorted out-edges, with `sink`
// forced last. Returns new index per old index.
std::vector<std::size_t> breadth_first_order(
    std::size_t node_count, std::size_t root, std::size_t sink,
    const std::vector<std::vector<std::pair<std::string, std::size_t>>>& children) {
  std::vector<std::size_t> order(node_count, kUnassigned);
  std::size_t next = 0;
  std::deque<std::size_t> queue{root};
  order[root] = next++;
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    for (const auto& [label, child] : children[node]) {
      if (child == sink || order[child] != kUnassigned) continue;
      order[child] = next++;
      queue.push_back(child);
    }
  }
  if (order[sink] == kUnassigned) order[sink] = next++;
  if (next != node_count) throw ValidationError("graph has nodes unreachable from the root");
  return order;
}

std::string position_name(std::size_t index, std::size_t count) {
  return index + 1 == count ? std::string(kSinkName) : "w" + std::to_string(index);
}

// Renumbers nodes breadth-first and renames them w0.. / w_inf.
ChainEventGraph relabel(std::vector<CegNode> nodes, std::vector<CegEdge> edges, std::size_t root,
                        std::size_t sink) {
  std::vector<std::vector<std::pair<std::string, std::size_t>>> children(nodes.size());
  for (const auto& e : edges) children[e.source].emplace_back(e.label, e.target);
  for (auto& c : children) std::sort(c.begin(), c.end());
  const auto order = breadth_first_order(nodes.size(), root, sink, children);

  std::vector<CegNode> renamed(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    renamed[order[i]] = std::move(nodes[i]);
    renamed[order[i]].id = position_name(order[i], nodes.size());
  }
  for (auto& e : edges) {
    e.source = order[e.source];
    e.target = order[e.target];
  }
  return ChainEventGraph(std::move(renamed), std::move(edges));
}

}  // namespace

ChainEventGraph::ChainEventGraph(std::vector<CegNode> nodes, std::vector<CegEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const std::size_t n = nodes_.size();
  if (n < 2) throw ValidationError("a chain event graph needs a root and a sink");
  if (nodes_.back().id != kSinkName) {
    throw ValidationError("last node must be the sink '" + std::string(kSinkName) + "'");
  }
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ids.emplace(nodes_[i].id, i).second) {
      throw ValidationError("duplicate node id '" + nodes_[i].id + "'");
    }
  }
  for (const auto& e : edges_) {
    if (e.source >= n || e.target >= n) throw ValidationError("edge references unknown node");
  }
  std::stable_sort(edges_.begin(), edges_.end(), [](const CegEdge& a, const CegEdge& b) {
    return std::tie(a.source, a.label) < std::tie(b.source, b.label);
  });

  out_.assign(n, {});
  in_.assign(n, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto& e = edges_[k];
    if (!out_[e.source].empty() && edges_[out_[e.source].back()].label == e.label) {
      throw ValidationError("node " + nodes_[e.source].id + " has two edges labelled '" +
                            e.label + "'");
    }
    out_[e.source].push_back(k);
    in_[e.target].push_back(k);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const bool is_root = i == 0, is_sink = i + 1 == n;
    if (is_root != in_[i].empty()) {
      throw ValidationError(is_root ? "root has incoming edges"
                                    : "node " + nodes_[i].id + " has no incoming edges");
    }
    if (is_sink != out_[i].empty()) {
      throw ValidationError(is_sink ? "sink has outgoing edges"
                                    : "node " + nodes_[i].id + " has no outgoing edges");
    }
  }

  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<std::size_t> pending(n);
  for (std::size_t i = 0; i < n; ++i) pending[i] = in_[i].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  ready.push(0);
  while (!ready.empty()) {
    const std::size_t node = ready.top();
    ready.pop();
    topo_.push_back(node);
    for (auto e : out_[node]) {
      if (--pending[edges_[e].target] == 0) ready.push(edges_[e].target);
    }
  }
  if (topo_.size() != n) throw ValidationError("graph contains a cycle");

  for (std::size_t i = 0; i + 1 < n; ++i) {
    Rational total = 0;
    for (auto e : out_[i]) {
      if (edges_[e].probability <= 0) {
        throw ValidationError("edge out of " + nodes_[i].id + " has non-positive probability");
      }
      total += edges_[e].probability;
    }
    if (total != 1) {
      throw ValidationError("probabilities out of " + nodes_[i].id + " sum to " +
                            format_rational(total));
    }
  }
}

std::optional<std::size_t> ChainEventGraph::find_node(const std::string& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ChainEventGraph::find_edge(const std::string& source,
                                                      const std::string& target,
                                                      const std::string& label) const {
  const auto src = find_node(source);
  const auto dst = find_node(target);
  if (!src || !dst) return std::nullopt;
  for (auto e : out_[*src]) {
    if (edges_[e].target == *dst && edges_[e].label == label) return e;
  }
  return std::nullopt;
}

PositionMap find_positions(const StagedTree& staged) {
  const EventTree& tree = staged.tree();
  const std::size_t n = tree.node_count();
  constexpr std::size_t kSinkClass = 0;

  // Children always carry larger indices than their parents.
  std::vector<std::size_t> raw(n, kSinkClass);
  std::unordered_map<Signature, std::size_t, SignatureHash> classes;
  std::size_t class_count = 1;
  for (std::size_t node = n; node-- > 0;) {
    if (tree.is_leaf(node)) continue;
    Signature sig;
    sig.stage = staged.stage_of(node);
    for (auto e : tree.out_edges(node)) {
      sig.children.emplace_back(tree.edges()[e].label, raw[tree.edges()[e].target]);
    }
    const auto [it, inserted] = classes.try_emplace(std::move(sig), class_count);
    if (inserted) ++class_count;
    raw[node] = it->second;
  }

  std::vector<std::vector<std::pair<std::string, std::size_t>>> children(class_count);
  std::vector<bool> filled(class_count, false);
  for (NodeIndex node = 0; node < n; ++node) {
    if (tree.is_leaf(node) || filled[raw[node]]) continue;
    filled[raw[node]] = true;
    for (auto e : tree.out_edges(node)) {
      children[raw[node]].emplace_back(tree.edges()[e].label, raw[tree.edges()[e].target]);
    }
  }
  const auto order =
      breadth_first_order(class_count, raw[EventTree::root()], kSinkClass, children);

  PositionMap out;
  out.count = class_count;
  out.position_of.resize(n);
  for (NodeIndex node = 0; node < n; ++node) out.position_of[node] = order[raw[node]];
  return out;
}

ChainEventGraph contract(const StagedTree& staged, const PositionMap& positions) {
  const EventTree& tree = staged.tree();
  if (positions.position_of.size() != tree.node_count()) {
    throw ValidationError("position map does not match the tree");
  }
  std::vector<CegNode> nodes(positions.count);
  std::vector<std::optional<NodeIndex>> representative(positions.count);
  for (NodeIndex node = 0; node < tree.node_count(); ++node) {
    const std::size_t w = positions.position_of[node];
    nodes[w].situations.push_back(node);
    if (!representative[w]) representative[w] = node;
  }

  std::vector<CegEdge> edges;
  for (std::size_t w = 0; w < positions.count; ++w) {
    nodes[w].id = position_name(w, positions.count);
    if (w == positions.sink()) {
      nodes[w].colour = kLeafColour;
      continue;
    }
    const NodeIndex rep = *representative[w];
    const std::size_t stage_index = staged.stage_of(rep);
    const Stage& stage = staged.stages()[stage_index];
    nodes[w].stage = stage_index;
    nodes[w].colour = stage.colour;

    Rational total = 0;
    for (const auto& p : stage.posterior) total += p;
    const auto& rep_edges = tree.out_edges(rep);
    for (std::size_t j = 0; j < rep_edges.size(); ++j) {
      const TreeEdge& te = tree.edges()[rep_edges[j]];
      CegEdge edge;
      edge.source = w;
      edge.target = positions.position_of[te.target];
      edge.label = te.label;
      for (NodeIndex member : nodes[w].situations) {
        edge.count += tree.edges()[tree.out_edges(member)[j]].count;
      }
      edge.prior = stage.prior[j];
      edge.posterior = stage.posterior[j];
      edge.probability = stage.posterior[j] / total;
      edges.push_back(std::move(edge));
    }
  }
  return ChainEventGraph(std::move(nodes), std::move(edges));
}

ChainEventGraph contract(const ChainEventGraph& ceg) {
  std::vector<CegNode> nodes = ceg.nodes();
  std::vector<CegEdge> edges = ceg.edges();
  const std::size_t sink = ceg.sink();

  // Union nodes bottom-up: visiting in reverse topological order means every
  // child's class is final before its parents are compared.
  std::vector<std::size_t> cls(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) cls[i] = i;
  std::map<std::pair<std::optional<std::size_t>, std::vector<std::pair<std::string, std::size_t>>>,
           std::size_t>
      seen;
  const auto& topo = ceg.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t node = *it;
    if (node == sink) continue;
    std::vector<std::pair<std::string, std::size_t>> out;
    for (auto e : ceg.out_edges(node)) out.emplace_back(edges[e].label, cls[edges[e].target]);
    const auto [pos, inserted] = seen.try_emplace({nodes[node].stage, out}, node);
    cls[node] = pos->second;
  }

  std::vector<std::size_t> new_index(nodes.size(), kUnassigned);
  std::vector<CegNode> merged_nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (cls[i] != i) continue;
    new_index[i] = merged_nodes.size();
    merged_nodes.push_back(nodes[i]);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (cls[i] == i) continue;
    auto& target = merged_nodes[new_index[cls[i]]];
    target.situations.insert(target.situations.end(), nodes[i].situations.begin(),
                             nodes[i].situations.end());
    std::sort(target.situations.begin(), target.situations.end());
  }

  std::map<std::tuple<std::size_t, std::size_t, std::string>, CegEdge> merged_edges;
  for (const auto& e : edges) {
    const std::size_t src = new_index[cls[e.source]];
    const std::size_t dst = new_index[cls[e.target]];
    auto [it, inserted] = merged_edges.try_emplace({src, dst, e.label}, e);
    if (inserted) {
      it->second.source = src;
      it->second.target = dst;
    } else {
      it->second.count += e.count;
    }
  }
  std::vector<CegEdge> out_edges;
  for (auto& [key, e] : merged_edges) out_edges.push_back(std::move(e));
  return relabel(std::move(merged_nodes), std::move(out_edges), new_index[cls[ceg.root()]],
                 new_index[cls[sink]]);
}

ChainEventGraph edge_probabilities(const ChainEventGraph& ceg) {
  std::vector<CegEdge> edges = ceg.edges();
  std::vector<Rational> totals(ceg.node_count());
  for (const auto& e : edges) totals[e.source] += e.posterior;
  for (auto& e : edges) e.probability = e.posterior / totals[e.source];
  return ChainEventGraph(ceg.nodes(), std::move(edges));
}

}  // namespace ceg
