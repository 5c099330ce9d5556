#include "ceg/render.hpp"

#include <map>
#include <sstream>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

void header(std::ostringstream& out, const std::string& name, const RenderStyle& style) {
  out << "digraph " << quote(name) << " {\n";
  out << "  graph [rankdir=" << style.rankdir << "];\n";
  out << "  node [shape=circle, style=filled, fontsize=10];\n";
  out << "  edge [fontsize=9];\n";
}

void node(std::ostringstream& out, const std::string& id, const std::string& colour) {
  out << "  " << quote(id) << " [label=" << quote(id) << ", fillcolor=" << quote(colour)
      << "];\n";
}

void edge(std::ostringstream& out, const std::string& src, const std::string& dst,
          const std::string& label) {
  out << "  " << quote(src) << " -> " << quote(dst) << " [label=" << quote(label) << "];\n";
}

std::string tree_dot(const EventTree& tree, const RenderStyle& style, const std::string& name,
                     const std::vector<std::string>& colours) {
  std::ostringstream out;
  header(out, name, style);
  for (NodeIndex n = 0; n < tree.node_count(); ++n) node(out, EventTree::node_name(n), colours[n]);
  for (const auto& e : tree.edges()) {
    edge(out, EventTree::node_name(e.source), EventTree::node_name(e.target),
         e.label + "\n" + std::to_string(e.count));
  }
  out << "}\n";
  return out.str();
}

std::string ceg_colour(const CegNode& n, std::size_t index, std::size_t sink,
                       const RenderStyle& style) {
  if (index == sink) return style.leaf_colour;
  return n.colour.empty() ? style.singleton_colour : n.colour;
}

}  // namespace

void validate_style(const RenderStyle& style) {
  if (style.palette.empty()) throw ValidationError("colour palette is empty");
  if (style.precision < 1) throw ValidationError("precision must be at least 1");
}

std::string to_dot(const EventTree& tree, const RenderStyle& style) {
  validate_style(style);
  std::vector<std::string> colours;
  for (NodeIndex n = 0; n < tree.node_count(); ++n) {
    colours.push_back(tree.is_leaf(n) ? style.leaf_colour : style.singleton_colour);
  }
  return tree_dot(tree, style, "event_tree", colours);
}

std::string to_dot(const StagedTree& staged, const RenderStyle& style) {
  validate_style(style);
  std::vector<std::string> colours;
  for (NodeIndex n = 0; n < staged.tree().node_count(); ++n) {
    colours.push_back(staged.tree().is_leaf(n) ? style.leaf_colour : staged.colour_of(n));
  }
  return tree_dot(staged.tree(), style, "staged_tree", colours);
}

std::string to_dot(const ChainEventGraph& ceg, const RenderStyle& style) {
  validate_style(style);
  std::ostringstream out;
  header(out, "ceg", style);
  for (std::size_t n = 0; n < ceg.node_count(); ++n) {
    node(out, ceg.nodes()[n].id, ceg_colour(ceg.nodes()[n], n, ceg.sink(), style));
  }
  for (const auto& e : ceg.edges()) {
    edge(out, ceg.nodes()[e.source].id, ceg.nodes()[e.target].id,
         e.label + "\n" + format_decimal(e.probability, style.precision));
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const ReducedCeg& reduced, const RenderStyle& style) {
  validate_style(style);
  const auto& ceg = reduced.ceg;
  const auto keep = reduced.retained_nodes();
  std::ostringstream out;
  header(out, "reduced_ceg", style);
  for (std::size_t n = 0; n < ceg.node_count(); ++n) {
    if (keep[n]) node(out, ceg.nodes()[n].id, ceg_colour(ceg.nodes()[n], n, ceg.sink(), style));
  }
  for (std::size_t k = 0; k < ceg.edges().size(); ++k) {
    if (!reduced.lambda[k]) continue;
    const auto& e = ceg.edges()[k];
    const std::string p = reduced.updated_exact
                              ? format_decimal((*reduced.updated_exact)[k], style.precision)
                              : format_decimal(reduced.updated[k], style.precision);
    edge(out, ceg.nodes()[e.source].id, ceg.nodes()[e.target].id, e.label + "\n" + p);
  }
  out << "}\n";
  return out.str();
}

std::string to_dot(const Model& model, const RenderStyle& style) {
  return std::visit([&](const auto& m) { return to_dot(m, style); }, model);
}

namespace {

ChainEventGraph recolour_graph(const ChainEventGraph& ceg,
                               const std::vector<std::string>& palette) {
  std::map<std::size_t, std::string> stage_colour;
  for (const auto& n : ceg.nodes()) {
    if (n.stage && n.colour != kSingletonColour) stage_colour.emplace(*n.stage, "");
  }
  std::size_t next = 0;
  for (auto& [stage, colour] : stage_colour) colour = palette[next++ % palette.size()];
  std::vector<CegNode> nodes = ceg.nodes();
  for (auto& n : nodes) {
    if (n.stage && stage_colour.count(*n.stage)) n.colour = stage_colour[*n.stage];
  }
  return ChainEventGraph(std::move(nodes), ceg.edges());
}

}  // namespace

Model recolour(const Model& model, const std::vector<std::string>& palette) {
  if (palette.empty()) throw ValidationError("colour palette is empty");
  struct Visitor {
    const std::vector<std::string>& palette;
    Model operator()(const EventTree& t) const { return t; }
    Model operator()(const StagedTree& s) const { return assign_colours(s, palette); }
    Model operator()(const ChainEventGraph& c) const { return recolour_graph(c, palette); }
    Model operator()(const ReducedCeg& r) const {
      ReducedCeg out = r;
      out.ceg = recolour_graph(r.ceg, palette);
      return out;
    }
  };
  return std::visit(Visitor{palette}, model);
}

}  // namespace ceg
