#include "ceg/serialize.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

std::string escape_pointer_token(const std::string& token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// A JSON value together with its pointer, for error reporting.
class Cursor {
 public:
  Cursor(const Json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ValidationError("schema error at " + (pointer_.empty() ? "/" : pointer_) + ": " +
                          message);
  }

  const Json& value() const { return value_; }

  Cursor at(const std::string& key) const {
    if (!value_.is_object()) fail("expected an object");
    const auto it = value_.find(key);
    if (it == value_.end()) {
      Cursor(value_, pointer_ + "/" + escape_pointer_token(key)).fail("missing member");
    }
    return Cursor(*it, pointer_ + "/" + escape_pointer_token(key));
  }
  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

  std::size_t size() const {
    if (!value_.is_array()) fail("expected an array");
    return value_.size();
  }
  Cursor at(std::size_t index) const {
    return Cursor(value_.at(index), pointer_ + "/" + std::to_string(index));
  }
  std::vector<Cursor> items() const {
    std::vector<Cursor> out;
    for (std::size_t i = 0, n = size(); i < n; ++i) out.push_back(at(i));
    return out;
  }
  std::vector<std::pair<std::string, Cursor>> members() const {
    if (!value_.is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Cursor>> out;
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      out.emplace_back(it.key(), Cursor(it.value(), pointer_ + "/" + escape_pointer_token(it.key())));
    }
    return out;
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  Count count() const {
    if (!value_.is_number_unsigned() && !(value_.is_number_integer() && value_.get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return value_.get<Count>();
  }
  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }
  Rational rational() const {
    try {
      return parse_rational(str());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  Rational positive_rational() const {
    Rational r = rational();
    if (r <= 0) fail("expected a positive rational, got '" + str() + "'");
    return r;
  }
  NodeIndex situation() const {
    try {
      return EventTree::parse_node_name(str());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  void expect_kind(const std::string& kind) const {
    if (at("kind").str() != kind) at("kind").fail("expected kind '" + kind + "'");
  }

 private:
  const Json& value_;
  std::string pointer_;
};

Json rationals(const std::vector<Rational>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(format_rational(v));
  return out;
}

Json node_names(const std::vector<NodeIndex>& nodes) {
  Json out = Json::array();
  for (auto n : nodes) out.push_back(EventTree::node_name(n));
  return out;
}

std::vector<Rational> read_rationals(const Cursor& c, bool positive) {
  std::vector<Rational> out;
  for (const auto& item : c.items()) {
    out.push_back(positive ? item.positive_rational() : item.rational());
  }
  return out;
}

std::vector<NodeIndex> read_situations(const Cursor& c) {
  std::vector<NodeIndex> out;
  for (const auto& item : c.items()) out.push_back(item.situation());
  return out;
}

EdgeRef read_edge_ref(const Cursor& c) {
  if (c.size() != 3) c.fail("expected [source, target, label]");
  return {c.at(std::size_t{0}).str(), c.at(std::size_t{1}).str(), c.at(std::size_t{2}).str()};
}

Json edge_ref_json(const EdgeRef& e) { return Json::array({e.source, e.target, e.label}); }

PriorMap read_prior(const Cursor& c) {
  PriorMap out;
  for (const auto& [name, values] : c.members()) {
    NodeIndex node;
    try {
      node = EventTree::parse_node_name(name);
    } catch (const std::invalid_argument& e) {
      values.fail(e.what());
    }
    out.emplace(node, read_rationals(values, true));
  }
  return out;
}

Json prior_json(const PriorMap& prior) {
  Json out = Json::object();
  for (const auto& [node, values] : prior) out[EventTree::node_name(node)] = rationals(values);
  return out;
}

Hyperstage read_hyperstage(const Cursor& c) {
  Hyperstage out;
  for (const auto& set : c.items()) out.sets.push_back(read_situations(set));
  return out;
}

Json hyperstage_json(const Hyperstage& h) {
  Json out = Json::array();
  for (const auto& set : h.sets) out.push_back(node_names(set));
  return out;
}

EventTree read_event_tree(const Cursor& c) {
  c.expect_kind("event_tree");
  const Cursor nodes = c.at("nodes");
  const std::size_t n = nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes.at(i).str() != EventTree::node_name(i)) {
      nodes.at(i).fail("expected node id " + EventTree::node_name(i));
    }
  }
  const Cursor edges = c.at("edges");
  if (n == 0 || edges.size() + 1 != n) c.fail("a tree with n nodes needs n - 1 edges");

  std::vector<std::optional<std::pair<NodeIndex, std::string>>> parent(n);
  std::vector<Count> in_count(n, 0);
  for (const auto& e : edges.items()) {
    const NodeIndex src = e.at("source").situation();
    const NodeIndex dst = e.at("target").situation();
    if (src >= n || dst >= n || dst == 0) e.fail("edge references an unknown or root node");
    if (parent[dst]) e.fail("node " + EventTree::node_name(dst) + " has two parents");
    parent[dst] = std::make_pair(src, e.at("label").str());
    in_count[dst] = e.at("count").count();
  }

  PathCountTable::Map entries;
  std::vector<Path> paths(n);
  for (NodeIndex node = 1; node < n; ++node) {
    // Breadth-first numbering puts parents first.
    const auto& [src, label] = *parent[node];
    if (src >= node) c.at("edges").fail("nodes are not in breadth-first order");
    paths[node] = paths[src];
    paths[node].push_back(label);
    entries.emplace(paths[node], in_count[node]);
  }
  EventTree tree = build_event_tree(PathCountTable(std::move(entries)));
  if (tree.node_count() != n) c.at("edges").fail("duplicate sibling labels");
  for (NodeIndex node = 1; node < n; ++node) {
    if (tree.parent(node) != parent[node]->first ||
        tree.edges()[tree.in_edge(node)].label != parent[node]->second) {
      c.at("nodes").fail("node numbering is not canonical breadth-first order at " +
                         EventTree::node_name(node));
    }
  }
  for (NodeIndex node = 1; node < n; ++node) {
    if (!tree.is_leaf(node) && tree.throughput(node) != in_count[node]) {
      c.at("edges").fail("counts out of " + EventTree::node_name(node) +
                         " do not sum to its incoming count");
    }
  }
  return tree;
}

CegEdge read_ceg_edge(const Cursor& e, const std::map<std::string, std::size_t>& index) {
  CegEdge edge;
  auto node = [&](const Cursor& c) {
    const auto it = index.find(c.str());
    if (it == index.end()) c.fail("unknown node '" + c.str() + "'");
    return it->second;
  };
  edge.source = node(e.at("source"));
  edge.target = node(e.at("target"));
  edge.label = e.at("label").str();
  edge.count = e.at("count").count();
  edge.prior = e.at("prior").positive_rational();
  edge.posterior = e.at("posterior").positive_rational();
  edge.probability = e.at("probability").positive_rational();
  e.at("probability_decimal").number();
  return edge;
}

ChainEventGraph read_ceg(const Cursor& c) {
  c.expect_kind("ceg");
  std::vector<CegNode> nodes;
  std::map<std::string, std::size_t> index;
  for (const auto& item : c.at("nodes").items()) {
    CegNode node;
    node.id = item.at("id").str();
    node.colour = item.at("colour").str();
    node.situations = read_situations(item.at("situations"));
    const Cursor stage = item.at("stage");
    if (!stage.value().is_null()) node.stage = stage.count();
    index.emplace(node.id, nodes.size());
    nodes.push_back(std::move(node));
  }
  std::vector<CegEdge> edges;
  for (const auto& item : c.at("edges").items()) edges.push_back(read_ceg_edge(item, index));
  try {
    return ChainEventGraph(std::move(nodes), std::move(edges));
  } catch (const ValidationError& e) {
    c.fail(e.what());
  }
}

}  // namespace

Json to_json(const EventTree& tree) {
  Json nodes = Json::array();
  for (NodeIndex n = 0; n < tree.node_count(); ++n) nodes.push_back(EventTree::node_name(n));
  Json edges = Json::array();
  for (const auto& e : tree.edges()) {
    edges.push_back({{"source", EventTree::node_name(e.source)},
                     {"target", EventTree::node_name(e.target)},
                     {"label", e.label},
                     {"count", e.count}});
  }
  return {{"kind", "event_tree"}, {"nodes", nodes}, {"edges", edges}};
}

Json to_json(const StagedTree& staged) {
  Json stages = Json::array();
  for (const auto& s : staged.stages()) {
    stages.push_back({{"members", node_names(s.members)},
                      {"labels", s.labels},
                      {"prior", rationals(s.prior)},
                      {"counts", s.counts},
                      {"posterior", rationals(s.posterior)},
                      {"colour", s.colour}});
  }
  Json colours = Json::object();
  for (NodeIndex n = 0; n < staged.tree().node_count(); ++n) {
    colours[EventTree::node_name(n)] = staged.colour_of(n);
  }
  return {{"kind", "staged_tree"},
          {"tree", to_json(staged.tree())},
          {"prior", prior_json(staged.spec().priors())},
          {"hyperstage", hyperstage_json(staged.hyperstage())},
          {"stages", stages},
          {"score", staged.score()},
          {"colours", colours}};
}

Json to_json(const ChainEventGraph& ceg) {
  Json nodes = Json::array();
  for (const auto& n : ceg.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"colour", n.colour},
                     {"situations", node_names(n.situations)},
                     {"stage", n.stage ? Json(*n.stage) : Json(nullptr)}});
  }
  Json edges = Json::array();
  for (const auto& e : ceg.edges()) {
    edges.push_back({{"source", ceg.nodes()[e.source].id},
                     {"target", ceg.nodes()[e.target].id},
                     {"label", e.label},
                     {"count", e.count},
                     {"prior", format_rational(e.prior)},
                     {"posterior", format_rational(e.posterior)},
                     {"probability", format_rational(e.probability)},
                     {"probability_decimal", to_double(e.probability)}});
  }
  return {{"kind", "ceg"}, {"nodes", nodes}, {"edges", edges}};
}

Json to_json(const ReducedCeg& reduced) {
  const auto& ceg = reduced.ceg;
  const auto keep = reduced.retained_nodes();
  Json nodes = Json::array();
  for (std::size_t n = 0; n < ceg.node_count(); ++n) {
    if (!keep[n]) continue;
    Json node = {{"id", ceg.nodes()[n].id}, {"occupancy", reduced.occupancy[n]}};
    if (reduced.occupancy_exact) node["occupancy_exact"] = format_rational((*reduced.occupancy_exact)[n]);
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (std::size_t e = 0; e < ceg.edges().size(); ++e) {
    if (!reduced.lambda[e]) continue;
    const auto& edge = ceg.edges()[e];
    Json item = {{"source", ceg.nodes()[edge.source].id},
                 {"target", ceg.nodes()[edge.target].id},
                 {"label", edge.label},
                 {"updated_probability", reduced.updated[e]}};
    if (reduced.updated_exact) item["updated_exact"] = format_rational((*reduced.updated_exact)[e]);
    edges.push_back(std::move(item));
  }
  return {{"kind", "reduced_ceg"},
          {"ceg", to_json(ceg)},
          {"exact", reduced.updated_exact.has_value()},
          {"nodes", nodes},
          {"edges", edges}};
}

Json to_json(const Model& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

Json to_json(const EvidenceSpec& ev) {
  Json edges = Json::array();
  for (const auto& e : ev.certain_edges) edges.push_back(edge_ref_json(e));
  Json edge_sets = Json::array();
  for (const auto& set : ev.uncertain_edge_sets) {
    Json items = Json::array();
    for (const auto& e : set) items.push_back(edge_ref_json(e));
    edge_sets.push_back(std::move(items));
  }
  return {{"certain_nodes", ev.certain_nodes},
          {"certain_edges", edges},
          {"uncertain_node_sets", ev.uncertain_node_sets},
          {"uncertain_edge_sets", edge_sets}};
}

EventTree event_tree_from_json(const Json& j) { return read_event_tree(Cursor(j, "")); }

StagedTree staged_tree_from_json(const Json& j) {
  const Cursor c(j, "");
  c.expect_kind("staged_tree");
  EventTree tree = read_event_tree(c.at("tree"));
  const PriorMap prior = read_prior(c.at("prior"));
  DirichletSpec spec;
  try {
    spec = validate_user_prior(tree, prior);
  } catch (const ValidationError& e) {
    c.at("prior").fail(e.what());
  }
  Hyperstage hyperstage;
  try {
    hyperstage = validate_hyperstage(tree, read_hyperstage(c.at("hyperstage")));
  } catch (const ValidationError& e) {
    c.at("hyperstage").fail(e.what());
  }

  std::vector<Stage> stages;
  for (const auto& item : c.at("stages").items()) {
    Stage s;
    s.members = read_situations(item.at("members"));
    for (const auto& label : item.at("labels").items()) s.labels.push_back(label.str());
    s.prior = read_rationals(item.at("prior"), true);
    for (const auto& count : item.at("counts").items()) s.counts.push_back(count.count());
    s.posterior = read_rationals(item.at("posterior"), true);
    s.colour = item.at("colour").str();
    stages.push_back(std::move(s));
  }
  const double score = c.at("score").number();
  StagedTree staged;
  try {
    staged = StagedTree(std::move(tree), std::move(spec), std::move(hyperstage), std::move(stages),
                        score);
  } catch (const ValidationError& e) {
    c.at("stages").fail(e.what());
  }
  for (const auto& [name, colour] : c.at("colours").members()) {
    NodeIndex node = 0;
    try {
      node = EventTree::parse_node_name(name);
    } catch (const std::invalid_argument& e) {
      colour.fail(e.what());
    }
    if (node >= staged.tree().node_count() || staged.colour_of(node) != colour.str()) {
      colour.fail("colour does not match the stage colouring");
    }
  }
  return staged;
}

ChainEventGraph ceg_from_json(const Json& j) { return read_ceg(Cursor(j, "")); }

ReducedCeg reduced_ceg_from_json(const Json& j) {
  const Cursor c(j, "");
  c.expect_kind("reduced_ceg");
  ReducedCeg out;
  out.ceg = read_ceg(c.at("ceg"));
  const auto& ceg = out.ceg;
  const bool exact = c.at("exact").value().is_boolean() && c.at("exact").value().get<bool>();
  out.lambda.assign(ceg.edges().size(), false);
  out.updated.assign(ceg.edges().size(), 0.0);
  out.occupancy.assign(ceg.node_count(), 0.0);
  if (exact) {
    out.updated_exact.emplace(ceg.edges().size(), Rational(0));
    out.occupancy_exact.emplace(ceg.node_count(), Rational(0));
  }
  for (const auto& item : c.at("nodes").items()) {
    const auto node = ceg.find_node(item.at("id").str());
    if (!node) item.at("id").fail("unknown node");
    out.occupancy[*node] = item.at("occupancy").number();
    if (exact) (*out.occupancy_exact)[*node] = item.at("occupancy_exact").rational();
  }
  for (const auto& item : c.at("edges").items()) {
    const auto edge = ceg.find_edge(item.at("source").str(), item.at("target").str(),
                                    item.at("label").str());
    if (!edge) item.fail("unknown edge");
    out.lambda[*edge] = true;
    out.updated[*edge] = item.at("updated_probability").number();
    if (exact) (*out.updated_exact)[*edge] = item.at("updated_exact").rational();
  }
  return out;
}

Model model_from_json(const Json& j) {
  const Cursor c(j, "");
  const std::string kind = c.at("kind").str();
  if (kind == "event_tree") return event_tree_from_json(j);
  if (kind == "staged_tree") return staged_tree_from_json(j);
  if (kind == "ceg") return ceg_from_json(j);
  if (kind == "reduced_ceg") return reduced_ceg_from_json(j);
  c.at("kind").fail("unknown model kind '" + kind + "'");
}

PriorMap prior_from_json(const Json& j) { return read_prior(Cursor(j, "")); }

Hyperstage hyperstage_from_json(const Json& j) { return read_hyperstage(Cursor(j, "")); }

std::vector<std::string> palette_from_json(const Json& j) {
  std::vector<std::string> out;
  for (const auto& item : Cursor(j, "").items()) out.push_back(item.str());
  return out;
}

std::vector<Path> paths_from_json(const Json& j) {
  std::vector<Path> out;
  for (const auto& path : Cursor(j, "").items()) {
    Path p;
    for (const auto& label : path.items()) p.push_back(label.str());
    out.push_back(std::move(p));
  }
  return out;
}

EvidenceSpec evidence_from_json(const Json& j) {
  const Cursor c(j, "");
  if (!j.is_object()) c.fail("expected an object");
  static const std::set<std::string> known = {"certain_nodes", "certain_edges",
                                              "uncertain_node_sets", "uncertain_edge_sets"};
  for (const auto& [key, value] : c.members()) {
    if (!known.count(key)) value.fail("unknown evidence member");
  }
  EvidenceSpec ev;
  if (c.has("certain_nodes")) {
    for (const auto& item : c.at("certain_nodes").items()) ev.certain_nodes.push_back(item.str());
  }
  if (c.has("certain_edges")) {
    for (const auto& item : c.at("certain_edges").items()) {
      ev.certain_edges.push_back(read_edge_ref(item));
    }
  }
  if (c.has("uncertain_node_sets")) {
    for (const auto& set : c.at("uncertain_node_sets").items()) {
      std::vector<std::string> nodes;
      for (const auto& item : set.items()) nodes.push_back(item.str());
      ev.uncertain_node_sets.push_back(std::move(nodes));
    }
  }
  if (c.has("uncertain_edge_sets")) {
    for (const auto& set : c.at("uncertain_edge_sets").items()) {
      std::vector<EdgeRef> edges;
      for (const auto& item : set.items()) edges.push_back(read_edge_ref(item));
      ev.uncertain_edge_sets.push_back(std::move(edges));
    }
  }
  return ev;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

Model load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

void save_model(const Model& model, const std::string& path) {
  write_text_file(path, dump(to_json(model)));
}

}  // namespace ceg
