#include "ceg/pipeline.hpp"

#include <filesystem>

#include "ceg/errors.hpp"

namespace ceg {

namespace {

char pick_delimiter(const BuildOptions& options) {
  if (options.delimiter != 0) return options.delimiter;
  const auto ext = std::filesystem::path(options.data).extension().string();
  return ext == ".tsv" || ext == ".tab" ? '\t' : ',';
}

}  // namespace

EventTree build_tree(const BuildOptions& options) {
  const RecordTable records = read_record_table_file(options.data, pick_delimiter(options));
  PathCountTable table = ingest(records, options.labels);
  if (options.sampling_zeros) {
    table = add_sampling_zeros(std::move(table),
                               paths_from_json(read_json_file(*options.sampling_zeros)));
  }
  return build_event_tree(table);
}

std::vector<std::string> load_palette(const std::optional<std::string>& palette_file) {
  if (!palette_file) return default_palette();
  auto palette = palette_from_json(read_json_file(*palette_file));
  if (palette.empty()) throw ValidationError("colour palette is empty");
  return palette;
}

StagedTree fit(const EventTree& tree, const FitOptions& options) {
  if (options.alpha && options.prior_file) {
    throw ValidationError("--alpha and --prior are mutually exclusive");
  }
  DirichletSpec spec;
  if (options.prior_file) {
    spec = validate_user_prior(tree, prior_from_json(read_json_file(*options.prior_file)));
  } else {
    Rational alpha = default_alpha(tree);
    if (options.alpha) {
      try {
        alpha = parse_rational(*options.alpha);
      } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("--alpha: ") + e.what());
      }
    }
    spec = mass_conservation_prior(tree, alpha);
  }
  const Hyperstage hyperstage =
      options.hyperstage_file
          ? validate_hyperstage(tree, hyperstage_from_json(read_json_file(*options.hyperstage_file)))
          : default_hyperstage(tree);
  AhcResult result = run_ahc(tree, spec, hyperstage, AhcOptions{options.threads});
  return assign_colours(std::move(result.staged), load_palette(options.palette_file));
}

std::vector<std::string> run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + config.out_dir + "'");

  RenderStyle style;
  style.precision = config.precision;
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(config.out_dir) / name).string();
    write_text_file(path, text);
    written.push_back(path);
  };

  const EventTree tree = build_tree(config.build);
  emit("tree.json", dump(to_json(tree)));
  emit("tree.dot", to_dot(tree, style));

  const StagedTree staged = fit(tree, config.fit);
  emit("staged.json", dump(to_json(staged)));
  emit("staged.dot", to_dot(staged, style));

  const ChainEventGraph ceg = build_ceg(staged);
  emit("ceg.json", dump(to_json(ceg)));
  emit("ceg.dot", to_dot(ceg, style));

  if (config.evidence_file) {
    const EvidenceSpec ev = evidence_from_json(read_json_file(*config.evidence_file));
    const ReducedCeg reduced = reduce(ceg, ev, PropagateOptions{config.exact});
    emit("reduced.json", dump(to_json(reduced)));
    emit("reduced.dot", to_dot(reduced, style));
  }
  return written;
}

}  // namespace ceg
