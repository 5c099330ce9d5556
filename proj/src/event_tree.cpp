#include "ceg/event_tree.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

std::string describe(const Path& path) {
  std::string out = "(";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + path[i] + "\"";
  }
  return out + ")";
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits one logical record; returns false at end of input. Quoted fields may
// span lines.
bool read_fields(std::istream& in, char delimiter, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (quoted) {
        std::string next;
        if (!std::getline(in, next)) throw ValidationError("unterminated quoted field");
        field += '\n';
        line = std::move(next);
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i++];
    if (quoted) {
      if (c == '"') {
        if (i < line.size() && line[i] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (was_quoted) {
      if (c == delimiter) {
        fields.push_back(field);
        field.clear();
        was_quoted = false;
      } else if (c != ' ' && c != '\t' && c != '\r') {
        throw ValidationError("unexpected text after a quoted field");
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  fields.push_back(was_quoted ? field : trim(field));
  return true;
}

}  // namespace

RecordTable read_record_table(std::istream& in, char delimiter) {
  RecordTable table;
  std::vector<std::string> fields;
  if (!read_fields(in, delimiter, fields)) return table;
  table.columns = fields;
  while (read_fields(in, delimiter, fields)) {
    if (fields.size() == 1 && fields.front().empty()) continue;  // blank line
    table.rows.push_back(fields);
  }
  return table;
}

RecordTable read_record_table_file(const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file '" + path + "'");
  return read_record_table(in, delimiter);
}

PathCountTable::PathCountTable(Map entries) : entries_(std::move(entries)) {
  for (const auto& [path, count] : entries_) {
    if (path.empty()) throw ValidationError("empty path in path table");
    if (path.size() > 1) {
      const Path prefix(path.begin(), path.end() - 1);
      if (!entries_.count(prefix)) {
        throw ValidationError("path table not prefix-closed at " + describe(path));
      }
    }
  }
}

Count PathCountTable::count(const Path& path) const {
  const auto it = entries_.find(path);
  return it == entries_.end() ? 0 : it->second;
}

void PathCountTable::add_path(const Path& path, Count amount) {
  Path prefix;
  prefix.reserve(path.size());
  for (const auto& label : path) {
    prefix.push_back(label);
    entries_[prefix] += amount;
  }
}

bool PathCountTable::insert_zero(const Path& path) {
  if (path.empty()) return false;
  if (path.size() > 1 && !entries_.count(Path(path.begin(), path.end() - 1))) return false;
  entries_.emplace(path, 0);
  return true;
}

PathCountTable ingest(const RecordTable& records, const MissingLabels& labels) {
  PathCountTable table;
  for (std::size_t r = 0; r < records.rows.size(); ++r) {
    const auto& row = records.rows[r];
    if (row.size() != records.columns.size()) {
      throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(records.columns.size()));
    }
    Path path;
    for (const auto& cell : row) {
      if (cell == labels.structural) continue;
      if (cell.empty()) {
        throw ValidationError("row " + std::to_string(r) + " has an empty label");
      }
      path.push_back(cell);
    }
    if (path.empty()) {
      throw ValidationError("row " + std::to_string(r) + " is entirely structurally missing");
    }
    table.add_path(path, 1);
  }
  return table;
}

PathCountTable add_sampling_zeros(PathCountTable table, const std::vector<Path>& zero_paths) {
  // Every prefix of a zero path is implicitly part of the request, so sorting
  // lets each path attach after its ancestors.
  std::set<Path> pending(zero_paths.begin(), zero_paths.end());
  for (const auto& path : pending) {
    if (path.empty()) throw ValidationError("empty sampling-zero path");
    if (table.contains(path)) continue;
    if (!table.insert_zero(path)) {
      throw ValidationError("sampling-zero path " + describe(path) + " has no parent path");
    }
  }
  return table;
}

std::string EventTree::node_name(NodeIndex node) { return "s" + std::to_string(node); }

NodeIndex EventTree::parse_node_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 's' ||
      name.find_first_not_of("0123456789", 1) != std::string::npos ||
      (name.size() > 2 && name[1] == '0')) {
    throw std::invalid_argument("invalid situation id '" + name + "'");
  }
  return static_cast<NodeIndex>(std::stoull(name.substr(1)));
}

std::vector<NodeIndex> EventTree::situations() const {
  std::vector<NodeIndex> out;
  for (NodeIndex n = 0; n < node_count(); ++n) {
    if (!is_leaf(n)) out.push_back(n);
  }
  return out;
}

std::vector<NodeIndex> EventTree::leaves() const {
  std::vector<NodeIndex> out;
  for (NodeIndex n = 0; n < node_count(); ++n) {
    if (is_leaf(n)) out.push_back(n);
  }
  return out;
}

std::vector<std::string> EventTree::out_labels(NodeIndex node) const {
  std::vector<std::string> out;
  for (auto e : out_edges(node)) out.push_back(edges_[e].label);
  return out;
}

std::vector<Count> EventTree::out_counts(NodeIndex node) const {
  std::vector<Count> out;
  for (auto e : out_edges(node)) out.push_back(edges_[e].count);
  return out;
}

Count EventTree::throughput(NodeIndex node) const {
  Count total = 0;
  for (auto e : out_edges(node)) total += edges_[e].count;
  return total;
}

Path EventTree::path_to(NodeIndex node) const {
  Path path;
  while (node != root()) {
    path.push_back(edges_[in_edge(node)].label);
    node = parent(node);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::size_t EventTree::max_out_degree() const {
  std::size_t best = 0;
  for (const auto& c : children_) best = std::max(best, c.size());
  return best;
}

PathCountTable EventTree::flatten() const {
  PathCountTable::Map entries;
  for (NodeIndex n = 1; n < node_count(); ++n) {
    entries.emplace(path_to(n), edges_[in_edge(n)].count);
  }
  return PathCountTable(std::move(entries));
}

EventTree build_event_tree(const PathCountTable& table) {
  if (table.empty()) throw ValidationError("cannot build an event tree from an empty path table");

  // Group entries by parent path; std::map iteration gives label order.
  std::map<Path, std::vector<std::pair<std::string, Count>>> children;
  for (const auto& [path, count] : table.entries()) {
    children[Path(path.begin(), path.end() - 1)].emplace_back(path.back(), count);
  }

  EventTree tree;
  tree.children_.emplace_back();
  std::deque<std::pair<NodeIndex, Path>> queue{{EventTree::root(), Path{}}};
  while (!queue.empty()) {
    auto [node, path] = std::move(queue.front());
    queue.pop_front();
    const auto it = children.find(path);
    if (it == children.end()) continue;
    for (const auto& [label, count] : it->second) {
      const NodeIndex child = tree.children_.size();
      tree.children_[node].push_back(tree.edges_.size());
      tree.edges_.push_back(TreeEdge{node, child, label, count});
      tree.children_.emplace_back();
      Path child_path = path;
      child_path.push_back(label);
      queue.emplace_back(child, std::move(child_path));
    }
  }
  return tree;
}

}  // namespace ceg
