#pragma once

// Ingestion of categorical event-sequence data and construction of the event
// tree.
//
// Each record is read left to right as one root-to-leaf path. Cells equal to
// the structural-missing label are dropped from the path, so asymmetric
// processes yield paths of differing lengths. Cells equal to the
// sampling-missing label are kept as an ordinary edge carrying that label.
//
// Tree nodes are numbered breadth-first with siblings in lexicographic label
// order: s0 is the root, then s1, s2, ... . Since the path table is ordered,
// numbering does not depend on the row order of the input.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace ceg {

using Count = std::uint64_t;
using NodeIndex = std::size_t;
using Path = std::vector<std::string>;

struct RecordTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Reads delimiter-separated text with a header row. Fields may be quoted with
// '"' (doubled quotes escape). Unquoted fields are trimmed of surrounding
// blanks.
RecordTable read_record_table(std::istream& in, char delimiter = ',');
RecordTable read_record_table_file(const std::string& path, char delimiter = ',');

struct MissingLabels {
  std::string structural;          // elided from paths
  std::string sampling = "missing";  // kept as an edge label
};

// Prefix-closed map from root paths to traversal counts.
class PathCountTable {
 public:
  using Map = std::map<Path, Count>;

  PathCountTable() = default;
  explicit PathCountTable(Map entries);

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(const Path& path) const { return entries_.count(path) != 0; }
  Count count(const Path& path) const;

  // Adds `amount` to the path and every prefix of it.
  void add_path(const Path& path, Count amount);
  // Inserts the path with count zero if absent. Its parent prefix must exist.
  bool insert_zero(const Path& path);

  friend bool operator==(const PathCountTable&, const PathCountTable&) = default;

 private:
  Map entries_;
};

PathCountTable ingest(const RecordTable& records, const MissingLabels& labels = {});

// Adds zero-count paths. Zero paths may chain off each other in any order;
// a path whose immediate prefix is neither in the table nor among the other
// zero paths is rejected.
PathCountTable add_sampling_zeros(PathCountTable table, const std::vector<Path>& zero_paths);

struct TreeEdge {
  NodeIndex source = 0;
  NodeIndex target = 0;
  std::string label;
  Count count = 0;

  friend bool operator==(const TreeEdge&, const TreeEdge&) = default;
};

class EventTree {
 public:
  EventTree() = default;

  std::size_t node_count() const { return children_.size(); }
  static constexpr NodeIndex root() { return 0; }
  static std::string node_name(NodeIndex node);
  // Inverse of node_name; throws std::invalid_argument.
  static NodeIndex parse_node_name(const std::string& name);

  const std::vector<TreeEdge>& edges() const { return edges_; }
  // Outgoing edge indices of a node, in label order.
  const std::vector<std::size_t>& out_edges(NodeIndex node) const { return children_.at(node); }
  std::size_t out_degree(NodeIndex node) const { return children_.at(node).size(); }
  bool is_leaf(NodeIndex node) const { return children_.at(node).empty(); }
  // Edge index entering a non-root node.
  std::size_t in_edge(NodeIndex node) const { return node - 1; }
  NodeIndex parent(NodeIndex node) const { return edges_.at(in_edge(node)).source; }

  std::vector<NodeIndex> situations() const;
  std::vector<NodeIndex> leaves() const;
  std::vector<std::string> out_labels(NodeIndex node) const;
  std::vector<Count> out_counts(NodeIndex node) const;
  // Total traversals out of a node (the root's is the number of records).
  Count throughput(NodeIndex node) const;
  Path path_to(NodeIndex node) const;
  std::size_t max_out_degree() const;

  // Enumerates edges back into root paths.
  PathCountTable flatten() const;

  friend bool operator==(const EventTree&, const EventTree&) = default;

 private:
  friend EventTree build_event_tree(const PathCountTable& table);

  // edges_[k] enters node k + 1.
  std::vector<TreeEdge> edges_;
  std::vector<std::vector<std::size_t>> children_;
};

EventTree build_event_tree(const PathCountTable& table);

}  // namespace ceg
