#pragma once

// The steps behind each command-line subcommand, shared by the `pipeline`
// subcommand so that running it equals running the steps one by one.

#include <optional>
#include <string>
#include <vector>

#include "ceg/render.hpp"

namespace ceg {

struct BuildOptions {
  std::string data;
  char delimiter = 0;  // 0: tab for .tsv files, comma otherwise
  MissingLabels labels;
  std::optional<std::string> sampling_zeros;
};

EventTree build_tree(const BuildOptions& options);

struct FitOptions {
  std::optional<std::string> alpha;
  std::optional<std::string> prior_file;
  std::optional<std::string> hyperstage_file;
  std::optional<std::string> palette_file;
  unsigned threads = 1;
};

StagedTree fit(const EventTree& tree, const FitOptions& options);

std::vector<std::string> load_palette(const std::optional<std::string>& palette_file);

struct PipelineConfig {
  BuildOptions build;
  FitOptions fit;
  std::optional<std::string> evidence_file;
  bool exact = false;
  int precision = 2;
  std::string out_dir;
};

// Writes tree, staged and ceg JSON and DOT files (plus reduced ones when an
// evidence file is given) into out_dir. Returns the written paths.
std::vector<std::string> run_pipeline(const PipelineConfig& config);

}  // namespace ceg
