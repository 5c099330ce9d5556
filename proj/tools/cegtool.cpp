// cegtool: learn staged trees and chain event graphs from categorical data,
// and propagate evidence through them.
//
//   cegtool build    --data falls.csv --out tree.json
//   cegtool fit      --tree tree.json --out staged.json
//   cegtool toceg    --staged staged.json --out ceg.json
//   cegtool reduce   --ceg ceg.json --evidence ev.json --out reduced.json
//   cegtool render   --model ceg.json --out ceg.dot
//   cegtool pipeline --data falls.csv --out run/
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 contradictory evidence.

#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "ceg/errors.hpp"
#include "ceg/pipeline.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kContradiction = 3;

char parse_delimiter(const std::string& text) {
  if (text.empty()) return 0;
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) throw CLI::ValidationError("--delimiter", "must be a single character");
  return text.front();
}

CLI::Option* add_build_flags(CLI::App* cmd, ceg::BuildOptions& build, std::string& delimiter) {
  auto* data = cmd->add_option("--data", build.data, "Delimited data file with a header row");
  cmd->add_option("--delimiter", delimiter, "Field delimiter (default: tab for .tsv, else comma)");
  cmd->add_option("--struct-missing-label", build.labels.structural,
                  "Cell value marking a structurally missing value (default: empty cell)");
  cmd->add_option("--missing-label", build.labels.sampling,
                  "Cell value marking a sampling-missing value, kept as an edge label");
  cmd->add_option("--sampling-zeros", build.sampling_zeros,
                  "JSON list of label paths to add with count zero");
  return data;
}

// Fills options of `cmd` not given on the command line from an INI/TOML
// file. Keys are option names without dashes, optionally under a section
// named after the subcommand.
void apply_config(CLI::App* cmd, const std::string& file) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(file);
  } catch (const CLI::FileError& e) {
    throw ceg::ValidationError(e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{cmd->get_name()}) {
      throw CLI::ValidationError("--config", "unknown section in " + file);
    }
    auto* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw CLI::ValidationError("--config", "unknown key '" + item.name + "' in " + file);
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_fit_flags(CLI::App* cmd, ceg::FitOptions& fit) {
  auto* alpha = cmd->add_option("--alpha", fit.alpha, "Root imaginary sample size, e.g. 4 or 7/2");
  auto* prior = cmd->add_option("--prior", fit.prior_file, "JSON prior file");
  alpha->excludes(prior);
  cmd->add_option("--hyperstage", fit.hyperstage_file, "JSON hyperstage file");
  cmd->add_option("--palette", fit.palette_file, "JSON list of stage colours");
  cmd->add_option("--threads", fit.threads, "Threads for AHC pair scoring")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain event graph modelling"};
  app.require_subcommand(1);

  ceg::BuildOptions build;
  ceg::FitOptions fit;
  fit.threads = std::max(1u, std::thread::hardware_concurrency());
  std::string delimiter;
  std::string out;
  std::string input;
  std::string evidence;
  std::optional<std::string> palette;
  bool exact = false;
  int precision = 2;

  auto* build_cmd = app.add_subcommand("build", "Ingest data into an event tree");
  add_build_flags(build_cmd, build, delimiter)->required();
  build_cmd->add_option("--out", out, "Output tree JSON")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Select stages with AHC");
  fit_cmd->add_option("--tree", input, "Event tree JSON")->required();
  add_fit_flags(fit_cmd, fit);
  fit_cmd->add_option("--out", out, "Output staged tree JSON")->required();

  auto* ceg_cmd = app.add_subcommand("toceg", "Contract a staged tree into a CEG");
  ceg_cmd->add_option("--staged", input, "Staged tree JSON")->required();
  ceg_cmd->add_option("--out", out, "Output CEG JSON")->required();

  auto* reduce_cmd = app.add_subcommand("reduce", "Propagate evidence through a CEG");
  reduce_cmd->add_option("--ceg", input, "CEG JSON")->required();
  reduce_cmd->add_option("--evidence", evidence, "Evidence JSON")
      ->required();
  reduce_cmd->add_flag("--exact", exact, "Propagate with exact rationals");
  reduce_cmd->add_option("--out", out, "Output reduced CEG JSON")->required();

  auto* render_cmd = app.add_subcommand("render", "Render any model file as DOT");
  render_cmd->add_option("--model", input, "Model JSON")->required();
  render_cmd->add_option("--palette", palette, "JSON list of stage colours");
  render_cmd->add_option("--precision", precision, "Decimal places for probabilities");
  render_cmd->add_option("--out", out, "Output DOT file")->required();

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run build, fit, toceg, reduce and render");
  std::string config_file;
  pipeline_cmd->add_option("--config", config_file, "INI/TOML file supplying any of these options");
  auto* pipeline_data = add_build_flags(pipeline_cmd, build, delimiter);
  add_fit_flags(pipeline_cmd, fit);
  pipeline_cmd->add_option("--evidence", evidence, "Evidence JSON (optional)");
  pipeline_cmd->add_flag("--exact", exact, "Propagate with exact rationals");
  pipeline_cmd->add_option("--precision", precision, "Decimal places for probabilities");
  auto* pipeline_out = pipeline_cmd->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
    if (*pipeline_cmd) {
      if (!config_file.empty()) apply_config(pipeline_cmd, config_file);
      if (pipeline_data->count() == 0) throw CLI::RequiredError("--data");
      if (pipeline_out->count() == 0) throw CLI::RequiredError("--out");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  } catch (const ceg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }

  try {
    build.delimiter = parse_delimiter(delimiter);
    if (*build_cmd) {
      ceg::save_model(ceg::build_tree(build), out);
    } else if (*fit_cmd) {
      ceg::save_model(ceg::fit(ceg::event_tree_from_json(ceg::read_json_file(input)), fit), out);
    } else if (*ceg_cmd) {
      ceg::save_model(ceg::build_ceg(ceg::staged_tree_from_json(ceg::read_json_file(input))), out);
    } else if (*reduce_cmd) {
      const auto graph = ceg::ceg_from_json(ceg::read_json_file(input));
      const auto ev = ceg::evidence_from_json(ceg::read_json_file(evidence));
      ceg::save_model(ceg::reduce(graph, ev, ceg::PropagateOptions{exact}), out);
    } else if (*render_cmd) {
      ceg::Model model = ceg::load_model(input);
      if (palette) model = ceg::recolour(model, ceg::load_palette(palette));
      ceg::RenderStyle style;
      style.precision = precision;
      ceg::write_text_file(out, ceg::to_dot(model, style));
    } else if (*pipeline_cmd) {
      ceg::PipelineConfig config;
      config.build = build;
      config.fit = fit;
      if (!evidence.empty()) config.evidence_file = evidence;
      config.exact = exact;
      config.precision = precision;
      config.out_dir = out;
      for (const auto& path : ceg::run_pipeline(config)) std::cout << path << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ceg::ContradictoryEvidence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContradiction;
  } catch (const ceg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return 0;
}
