#pragma once

// Graphviz DOT output. Nodes are emitted in id order and edges in stored
// order, so identical models always render to identical text.

#include <string>
#include <vector>

#include "ceg/serialize.hpp"

namespace ceg {

struct RenderStyle {
  std::vector<std::string> palette = default_palette();
  std::string singleton_colour = kSingletonColour;
  std::string leaf_colour = kLeafColour;
  int precision = 2;  // decimal places for probabilities
  std::string rankdir = "LR";
};

// Throws ValidationError for an empty palette or precision below 1.
void validate_style(const RenderStyle& style);

std::string to_dot(const EventTree& tree, const RenderStyle& style = {});
std::string to_dot(const StagedTree& staged, const RenderStyle& style = {});
std::string to_dot(const ChainEventGraph& ceg, const RenderStyle& style = {});
// Only the retained part of the graph, labelled with updated probabilities.
std::string to_dot(const ReducedCeg& reduced, const RenderStyle& style = {});
std::string to_dot(const Model& model, const RenderStyle& style = {});

// Re-colours coloured stages from a new palette: staged trees via
// assign_colours, graphs by stage index in the same order.
Model recolour(const Model& model, const std::vector<std::string>& palette);

}  // namespace ceg
