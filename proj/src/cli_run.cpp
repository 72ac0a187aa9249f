#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fvq/cli.hpp"
#include "fvq/error.hpp"

namespace fvq::cli {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

struct Common {
  std::string config_path;
  std::string mode;
  std::string regressor;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sims;
  std::optional<double> split;
  std::optional<int> threads;

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) {
      c = load_config(config_path);
      if (!mode.empty()) c.mode = parse_mode(mode);
    } else {
      const AssessmentMode m = mode.empty() ? AssessmentMode::FullReference : parse_mode(mode);
      c = default_config(m, regressor == "nn" ? ModelKind::Nn : ModelKind::Svr);
    }
    if (!regressor.empty() && !config_path.empty()) {
      c.regressor.kind = regressor == "nn" ? ModelKind::Nn : ModelKind::Svr;
    }
    if (seed) c.seed = *seed;
    if (sims) c.sims = *sims;
    if (split) c.split_ratio = *split;
    if (threads) c.threads = *threads;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, Common& common, bool with_run_flags) {
  cmd->add_option("--config", common.config_path, "Run configuration (JSON, see `fvq config init`)");
  cmd->add_option("--mode", common.mode, "fr or nr (overrides the config)")
      ->check(CLI::IsMember({"fr", "nr"}));
  cmd->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  if (with_run_flags) {
    cmd->add_option("--regressor", common.regressor, "svr or nn")->check(CLI::IsMember({"svr", "nn"}));
    cmd->add_option("--seed", common.seed, "Seed for splits, folds and NN initialization");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fvq: full- and no-reference video quality features, regressors and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  std::string manifest_path, features_path, model_path, output_path, report_path, table_path,
      selected_path;
  std::optional<std::size_t> top;

  auto* extract = app.add_subcommand("extract", "Extract a feature CSV for every manifest entry");
  add_common(extract, common, false);
  extract->add_option("--manifest", manifest_path, "CSV with reference,processed,mos")->required();
  extract->add_option("-o,--output", output_path, "Feature CSV to write")->required();
  extract->footer(
      "Inputs ending in .y4m are parsed from their header; anything else is read as planar "
      "I420 (8-bit) or I420 10-bit little-endian, 2 bytes per sample with the value in the low "
      "10 bits, using raw_width/raw_height/raw_bit_depth from the config.");

  auto* train = app.add_subcommand("train", "Fit a regressor on extracted features");
  add_common(train, common, true);
  train->add_option("--features", features_path)->required();
  train->add_option("--manifest", manifest_path, "Supplies the MOS column")->required();
  train->add_option("--model", model_path, "Model JSON to write")->required();
  train->add_option("--report", report_path, "Training summary JSON");

  auto* predict = app.add_subcommand("predict", "Score a feature CSV with a trained model");
  predict->add_option("--model", model_path)->required();
  predict->add_option("--features", features_path)->required();
  predict->add_option("-o,--output", output_path, "Scores CSV (stdout if omitted)");

  auto* evaluate = app.add_subcommand("evaluate", "Repeated random train/test splits");
  add_common(evaluate, common, true);
  evaluate->add_option("--features", features_path)->required();
  evaluate->add_option("--manifest", manifest_path)->required();
  evaluate->add_option("--sims", common.sims, "Number of simulations")->check(CLI::PositiveNumber);
  evaluate->add_option("--split", common.split, "Training fraction")->check(CLI::Bound(0.0, 1.0));
  evaluate->add_option("--report", report_path, "Report JSON to write")->required();
  evaluate->add_option("--table", table_path, "Plain-text table to write");

  auto* rank = app.add_subcommand("rank-features", "Rank features by correlation with MOS");
  add_common(rank, common, false);
  rank->add_option("--features", features_path)->required();
  rank->add_option("--manifest", manifest_path)->required();
  rank->add_option("--top", top, "Keep the N best features")->check(CLI::PositiveNumber);
  rank->add_option("-o,--output", output_path, "Ranking CSV to write");
  rank->add_option("--selected", selected_path, "Feature CSV restricted to --top columns");

  auto* config = app.add_subcommand("config", "Configuration files");
  config->require_subcommand(1);
  auto* init = config->add_subcommand("init", "Write a config holding every default");
  std::string init_mode = "fr", init_regressor = "svr";
  init->add_option("--mode", init_mode)->check(CLI::IsMember({"fr", "nr"}));
  init->add_option("--regressor", init_regressor)->check(CLI::IsMember({"svr", "nn"}));
  init->add_option("-o,--output", output_path, "Destination (stdout if omitted)");
  auto* show = config->add_subcommand("show", "Print the effective configuration");
  show->add_option("--config", common.config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*extract) {
      const RunConfig cfg = common.resolve();
      const DatasetManifest manifest = read_manifest_file(manifest_path, cfg.mode);
      write_feature_csv_file(output_path, cmd_extract(manifest, cfg));
    } else if (*train) {
      const RunConfig cfg = common.resolve();
      const FeatureTable features = read_feature_csv_file(features_path);
      const DatasetManifest manifest = read_manifest_file(manifest_path, cfg.mode);
      const TrainOutput result = cmd_train(features, manifest, cfg);
      model_save_file(result.model, model_path);
      if (!report_path.empty()) write_text(report_path, result.report_json);
    } else if (*predict) {
      const TrainedModel model = model_load_file(model_path);
      std::ifstream in(features_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + features_path);
      if (output_path.empty()) {
        cmd_predict(model, in, out, features_path);
      } else {
        std::ofstream dst(output_path, std::ios::binary);
        if (!dst) throw Error(ErrorCode::IoError, "cannot write " + output_path);
        cmd_predict(model, in, dst, features_path);
      }
    } else if (*evaluate) {
      const RunConfig cfg = common.resolve();
      const FeatureTable features = read_feature_csv_file(features_path);
      const DatasetManifest manifest = read_manifest_file(manifest_path, cfg.mode);
      const EvaluationReport report = cmd_evaluate(features, manifest, cfg);
      write_text(report_path, report_to_json(report));
      if (!table_path.empty()) write_text(table_path, report_to_table(report));
      out << "median PCC " << report.median_pcc << "  median SRCC " << report.median_srcc << "  ("
          << report.sim_count << " sims)\n";
    } else if (*rank) {
      const RunConfig cfg = common.resolve();
      const FeatureTable features = read_feature_csv_file(features_path);
      const DatasetManifest manifest = read_manifest_file(manifest_path, cfg.mode);
      const RankOutput result = cmd_rank_features(features, manifest, top);
      out << result.table;
      if (!output_path.empty()) write_text(output_path, result.csv);
      if (!selected_path.empty()) {
        if (!result.selected) throw Error(ErrorCode::ConfigError, "--selected requires --top");
        write_feature_csv_file(selected_path, *result.selected);
      }
    } else if (*init) {
      const RunConfig cfg = default_config(parse_mode(init_mode),
                                           init_regressor == "nn" ? ModelKind::Nn : ModelKind::Svr);
      const std::string text = config_to_json(cfg);
      if (output_path.empty()) out << text;
      else write_text(output_path, text);
    } else if (*show) {
      out << config_to_json(load_config(common.config_path));
    }
  } catch (const Error& e) {
    err << "fvq: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "fvq: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fvq::cli
