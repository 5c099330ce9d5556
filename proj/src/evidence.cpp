#include "ceg/evidence.hpp"

#include <cstdint>
#include <map>
#include <set>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

using Mask = std::uint64_t;
using MaskSet = std::set<Mask>;

std::string describe(const EdgeRef& e) {
  return "(" + e.source + ", " + e.target + ", '" + e.label + "')";
}

std::size_t resolve_node(const ChainEventGraph& ceg, const std::string& id) {
  const auto node = ceg.find_node(id);
  if (!node) throw ValidationError("evidence names unknown node '" + id + "'");
  return *node;
}

std::size_t resolve_edge(const ChainEventGraph& ceg, const EdgeRef& ref) {
  const auto edge = ceg.find_edge(ref.source, ref.target, ref.label);
  if (!edge) throw ValidationError("evidence names unknown edge " + describe(ref));
  return *edge;
}

struct ItemMasks {
  std::vector<Mask> node;
  std::vector<Mask> edge;
  Mask full = 0;
};

ItemMasks item_masks(const ChainEventGraph& ceg, const std::vector<EvidenceItem>& items) {
  ItemMasks m;
  m.node.assign(ceg.node_count(), 0);
  m.edge.assign(ceg.edges().size(), 0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Mask bit = Mask{1} << i;
    for (auto n : items[i].nodes) m.node[n] |= bit;
    for (auto e : items[i].edges) m.edge[e] |= bit;
    m.full |= bit;
  }
  return m;
}

// Sets of satisfied-item masks on arrival at each node (including the node's
// own items), over edges allowed by `use`.
std::vector<MaskSet> forward_masks(const ChainEventGraph& ceg, const ItemMasks& m,
                                   const std::vector<bool>* use) {
  std::vector<MaskSet> fwd(ceg.node_count());
  fwd[ceg.root()].insert(m.node[ceg.root()]);
  for (auto u : ceg.topological_order()) {
    for (auto e : ceg.out_edges(u)) {
      if (use && !(*use)[e]) continue;
      const auto v = ceg.edges()[e].target;
      for (Mask a : fwd[u]) fwd[v].insert(a | m.edge[e] | m.node[v]);
    }
  }
  return fwd;
}

// Masks collected from each node (including its own items) to the sink.
std::vector<MaskSet> backward_masks(const ChainEventGraph& ceg, const ItemMasks& m) {
  std::vector<MaskSet> bwd(ceg.node_count());
  bwd[ceg.sink()].insert(m.node[ceg.sink()]);
  const auto& topo = ceg.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto u = *it;
    for (auto e : ceg.out_edges(u)) {
      const auto v = ceg.edges()[e].target;
      for (Mask b : bwd[v]) bwd[u].insert(m.node[u] | m.edge[e] | b);
    }
  }
  return bwd;
}

template <typename T>
T edge_probability(const CegEdge& e);

template <>
double edge_probability<double>(const CegEdge& e) {
  return to_double(e.probability);
}

template <>
Rational edge_probability<Rational>(const CegEdge& e) {
  return e.probability;
}

template <typename T>
struct Propagated {
  std::vector<T> updated;
  std::vector<T> occupancy;
};

template <typename T>
std::vector<T> forward_occupancy(const ChainEventGraph& ceg, const std::vector<T>& updated) {
  std::vector<T> occ(ceg.node_count(), T(0));
  occ[ceg.root()] = T(1);
  for (auto u : ceg.topological_order()) {
    for (auto e : ceg.out_edges(u)) occ[ceg.edges()[e].target] += occ[u] * updated[e];
  }
  return occ;
}

template <typename T>
Propagated<T> backward_forward(const ChainEventGraph& ceg, const std::vector<bool>& lambda) {
  const auto& edges = ceg.edges();
  std::vector<T> phi(ceg.node_count(), T(0));
  std::vector<T> tau(edges.size(), T(0));
  phi[ceg.sink()] = T(1);
  const auto& topo = ceg.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto u = *it;
    if (u == ceg.sink()) continue;
    T total(0);
    for (auto e : ceg.out_edges(u)) {
      tau[e] = lambda[e] ? edge_probability<T>(edges[e]) * phi[edges[e].target] : T(0);
      total += tau[e];
    }
    phi[u] = total;
  }
  if (phi[ceg.root()] == T(0)) {
    throw ContradictoryEvidence("contradictory evidence: the evidence has probability zero");
  }
  Propagated<T> out;
  out.updated.assign(edges.size(), T(0));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (lambda[e] && phi[edges[e].source] != T(0)) out.updated[e] = tau[e] / phi[edges[e].source];
  }
  out.occupancy = forward_occupancy(ceg, out.updated);
  return out;
}

// Conditioning over (node, satisfied-items) states, projected to edges.
template <typename T>
Propagated<T> propagate_states(const ChainEventGraph& ceg, const ItemMasks& m) {
  const auto& edges = ceg.edges();
  const auto fwd = forward_masks(ceg, m, nullptr);
  const auto& topo = ceg.topological_order();

  std::vector<std::map<Mask, T>> phi(ceg.node_count());
  for (Mask a : fwd[ceg.sink()]) phi[ceg.sink()][a] = a == m.full ? T(1) : T(0);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto u = *it;
    if (u == ceg.sink()) continue;
    for (Mask a : fwd[u]) {
      T total(0);
      for (auto e : ceg.out_edges(u)) {
        const auto v = edges[e].target;
        total += edge_probability<T>(edges[e]) * phi[v].at(a | m.edge[e] | m.node[v]);
      }
      phi[u][a] = total;
    }
  }
  const T evidence = phi[ceg.root()].at(m.node[ceg.root()]);
  if (evidence == T(0)) {
    throw ContradictoryEvidence("contradictory evidence: the evidence has probability zero");
  }

  std::vector<std::map<Mask, T>> reach(ceg.node_count());
  reach[ceg.root()][m.node[ceg.root()]] = T(1);
  std::vector<T> edge_mass(edges.size(), T(0));
  std::vector<T> node_mass(ceg.node_count(), T(0));
  for (auto u : topo) {
    for (const auto& [a, pa] : reach[u]) {
      node_mass[u] += pa * phi[u].at(a);
      for (auto e : ceg.out_edges(u)) {
        const auto v = edges[e].target;
        const Mask b = a | m.edge[e] | m.node[v];
        const T step = pa * edge_probability<T>(edges[e]);
        edge_mass[e] += step * phi[v].at(b);
        reach[v][b] += step;
      }
    }
  }
  Propagated<T> out;
  out.updated.assign(edges.size(), T(0));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& mass = node_mass[edges[e].source];
    if (mass != T(0)) out.updated[e] = edge_mass[e] / mass;
  }
  out.occupancy.resize(ceg.node_count());
  for (std::size_t n = 0; n < ceg.node_count(); ++n) out.occupancy[n] = node_mass[n] / evidence;
  return out;
}

void store(ReducedCeg& out, Propagated<double> values) {
  out.updated = std::move(values.updated);
  out.occupancy = std::move(values.occupancy);
}

void store(ReducedCeg& out, Propagated<Rational> values) {
  out.updated.clear();
  out.occupancy.clear();
  for (const auto& v : values.updated) out.updated.push_back(to_double(v));
  for (const auto& v : values.occupancy) out.occupancy.push_back(to_double(v));
  out.updated_exact = std::move(values.updated);
  out.occupancy_exact = std::move(values.occupancy);
}

}  // namespace

std::vector<EvidenceItem> resolve_evidence(const ChainEventGraph& ceg, const EvidenceSpec& ev) {
  std::vector<EvidenceItem> items;
  for (const auto& id : ev.certain_nodes) {
    items.push_back({"certain node " + id, {resolve_node(ceg, id)}, {}});
  }
  for (const auto& ref : ev.certain_edges) {
    items.push_back({"certain edge " + describe(ref), {}, {resolve_edge(ceg, ref)}});
  }
  for (std::size_t i = 0; i < ev.uncertain_node_sets.size(); ++i) {
    const auto& set = ev.uncertain_node_sets[i];
    if (set.empty()) throw ValidationError("uncertain node set " + std::to_string(i) + " is empty");
    EvidenceItem item{"uncertain node set {", {}, {}};
    for (std::size_t k = 0; k < set.size(); ++k) {
      item.description += (k ? ", " : "") + set[k];
      item.nodes.push_back(resolve_node(ceg, set[k]));
    }
    item.description += "}";
    items.push_back(std::move(item));
  }
  for (std::size_t i = 0; i < ev.uncertain_edge_sets.size(); ++i) {
    const auto& set = ev.uncertain_edge_sets[i];
    if (set.empty()) throw ValidationError("uncertain edge set " + std::to_string(i) + " is empty");
    EvidenceItem item{"uncertain edge set {", {}, {}};
    for (std::size_t k = 0; k < set.size(); ++k) {
      item.description += (k ? ", " : "") + describe(set[k]);
      item.edges.push_back(resolve_edge(ceg, set[k]));
    }
    item.description += "}";
    items.push_back(std::move(item));
  }
  if (items.size() > 64) throw ValidationError("at most 64 evidence items are supported");
  return items;
}

std::vector<bool> lambda_edges(const ChainEventGraph& ceg, const EvidenceSpec& ev) {
  const auto items = resolve_evidence(ceg, ev);
  const auto m = item_masks(ceg, items);
  const auto fwd = forward_masks(ceg, m, nullptr);

  Mask prefix = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    prefix |= Mask{1} << i;
    bool reachable = false;
    for (Mask a : fwd[ceg.sink()]) reachable = reachable || (a & prefix) == prefix;
    if (!reachable) {
      throw ContradictoryEvidence("contradictory evidence: no path remains after " +
                                  items[i].description);
    }
  }

  const auto bwd = backward_masks(ceg, m);
  std::vector<bool> lambda(ceg.edges().size(), false);
  for (std::size_t e = 0; e < ceg.edges().size(); ++e) {
    const auto& edge = ceg.edges()[e];
    for (Mask a : fwd[edge.source]) {
      for (Mask b : bwd[edge.target]) {
        if ((a | m.edge[e] | b) == m.full) {
          lambda[e] = true;
          break;
        }
      }
      if (lambda[e]) break;
    }
  }
  return lambda;
}

bool lambda_paths_consistent(const ChainEventGraph& ceg, const EvidenceSpec& ev,
                             const std::vector<bool>& lambda) {
  const auto m = item_masks(ceg, resolve_evidence(ceg, ev));
  const auto fwd = forward_masks(ceg, m, &lambda);
  for (Mask a : fwd[ceg.sink()]) {
    if (a != m.full) return false;
  }
  return true;
}

std::vector<bool> ReducedCeg::retained_nodes() const {
  std::vector<bool> keep(ceg.node_count(), false);
  for (std::size_t e = 0; e < ceg.edges().size(); ++e) {
    if (!lambda[e]) continue;
    keep[ceg.edges()[e].source] = true;
    keep[ceg.edges()[e].target] = true;
  }
  return keep;
}

ChainEventGraph ReducedCeg::graph() const {
  if (!updated_exact) {
    throw std::logic_error("reduced graph requires exact propagation");
  }
  const auto keep = retained_nodes();
  std::vector<std::size_t> index(ceg.node_count(), 0);
  std::vector<CegNode> nodes;
  for (std::size_t n = 0; n < ceg.node_count(); ++n) {
    if (!keep[n]) continue;
    index[n] = nodes.size();
    nodes.push_back(ceg.nodes()[n]);
  }
  std::vector<CegEdge> edges;
  for (std::size_t e = 0; e < ceg.edges().size(); ++e) {
    if (!lambda[e] || (*updated_exact)[e] == 0) continue;
    CegEdge edge = ceg.edges()[e];
    edge.source = index[edge.source];
    edge.target = index[edge.target];
    edge.probability = (*updated_exact)[e];
    edges.push_back(std::move(edge));
  }
  return ChainEventGraph(std::move(nodes), std::move(edges));
}

ReducedCeg propagate(const ChainEventGraph& ceg, const std::vector<bool>& lambda,
                     const PropagateOptions& options) {
  if (lambda.size() != ceg.edges().size()) {
    throw std::invalid_argument("lambda does not match the graph's edges");
  }
  ReducedCeg out{ceg, lambda, {}, {}, std::nullopt, std::nullopt};
  if (options.exact) {
    store(out, backward_forward<Rational>(ceg, lambda));
  } else {
    store(out, backward_forward<double>(ceg, lambda));
  }
  return out;
}

ReducedCeg reduce(const ChainEventGraph& ceg, const EvidenceSpec& ev,
                  const PropagateOptions& options) {
  auto lambda = lambda_edges(ceg, ev);
  if (lambda_paths_consistent(ceg, ev, lambda)) return propagate(ceg, lambda, options);

  const auto m = item_masks(ceg, resolve_evidence(ceg, ev));
  ReducedCeg out{ceg, std::move(lambda), {}, {}, std::nullopt, std::nullopt};
  if (options.exact) {
    store(out, propagate_states<Rational>(ceg, m));
  } else {
    store(out, propagate_states<double>(ceg, m));
  }
  return out;
}

}  // namespace ceg
