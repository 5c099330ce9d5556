#pragma once

// JSON persistence for every model kind, plus the small input files the
// command line accepts (priors, hyperstages, palettes, sampling zeros and
// evidence). Rationals are stored as "p/q" strings so round trips are exact.
// Schema violations raise ValidationError with the JSON pointer of the
// offending value.

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ceg/ahc.hpp"
#include "ceg/ceg.hpp"
#include "ceg/event_tree.hpp"
#include "ceg/evidence.hpp"
#include "ceg/prior.hpp"

namespace ceg {

using Json = nlohmann::json;
using Model = std::variant<EventTree, StagedTree, ChainEventGraph, ReducedCeg>;

Json to_json(const EventTree& tree);
Json to_json(const StagedTree& staged);
Json to_json(const ChainEventGraph& ceg);
Json to_json(const ReducedCeg& reduced);
Json to_json(const Model& model);
Json to_json(const EvidenceSpec& ev);

EventTree event_tree_from_json(const Json& j);
StagedTree staged_tree_from_json(const Json& j);
ChainEventGraph ceg_from_json(const Json& j);
ReducedCeg reduced_ceg_from_json(const Json& j);
// Dispatches on the "kind" member.
Model model_from_json(const Json& j);

PriorMap prior_from_json(const Json& j);
Hyperstage hyperstage_from_json(const Json& j);
std::vector<std::string> palette_from_json(const Json& j);
std::vector<Path> paths_from_json(const Json& j);
EvidenceSpec evidence_from_json(const Json& j);

// Canonical text: two-space indentation, sorted keys, trailing newline.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Model load_model(const std::string& path);
void save_model(const Model& model, const std::string& path);

}  // namespace ceg
