#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fvq/cli.hpp"
#include "fvq/detail/parallel.hpp"
#include "fvq/error.hpp"
#include "json.hpp"

namespace fvq::cli {
namespace {

using nlohmann::json;

std::vector<double> mos_for(const FeatureTable& features, const DatasetManifest& manifest) {
  if (features.rows.rows() != manifest.entries.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "feature file has " + std::to_string(features.rows.rows()) + " rows but the manifest has " +
                    std::to_string(manifest.entries.size()) + " entries");
  }
  return manifest.mos();
}

std::vector<double> extract_entry(const ManifestEntry& entry, const RunConfig& config) {
  const VideoSequence processed = load_video(entry.processed, config.raw);
  if (config.mode == AssessmentMode::NoReference) {
    return extract_nr(processed, config.nr).values();
  }
  const VideoSequence original = load_video(*entry.reference, config.raw);
  return extract_fr(original, processed, config.fr).values();
}

}  // namespace

VideoSequence load_video(const std::filesystem::path& path, const RawFormat& raw) {
  try {
    if (path.extension() == ".y4m") return read_y4m_file(path);
    return read_raw_yuv_file(path, raw);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<std::string> feature_names(const RunConfig& config) {
  return config.mode == AssessmentMode::FullReference ? FrFeatureVector::names(config.fr.dm_l2)
                                                      : NrFeatureVector::names();
}

FeatureTable cmd_extract(const DatasetManifest& manifest, const RunConfig& config) {
  if (manifest.mode != config.mode) {
    throw Error(ErrorCode::ConfigError, "manifest mode " + to_string(manifest.mode) +
                                            " differs from configured mode " + to_string(config.mode));
  }
  FeatureTable table;
  table.names = feature_names(config);
  std::vector<std::vector<double>> rows(manifest.entries.size());
  // Entries run in parallel; each extraction is single-threaded, rows land
  // in manifest order.
  detail::parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    try {
      rows[i] = extract_entry(entry, config);
    } catch (const Error& e) {
      throw Error(e.code(), manifest.source + ":" + std::to_string(entry.line) + ": " + e.detail());
    }
  });
  table.rows = Matrix(0, table.names.size());
  for (const auto& r : rows) table.rows.append_row(r);
  return table;
}

TrainOutput cmd_train(const FeatureTable& features, const DatasetManifest& manifest,
                      const RunConfig& config) {
  const std::vector<double> mos = mos_for(features, manifest);
  const FitResult fit = fit_model(features.rows, mos, features.names, config.regressor, config.seed);

  std::vector<double> predictions(features.rows.rows());
  for (std::size_t r = 0; r < predictions.size(); ++r) predictions[r] = fit.model.predict(features.rows.row(r));

  json report{{"regressor", to_string(config.regressor.kind)},
              {"seed", config.seed},
              {"rows", features.rows.rows()},
              {"feature_names", features.names},
              {"in_sample", {{"pcc", pcc_or_zero(predictions, mos)}, {"srcc", srcc_or_zero(predictions, mos)}}},
              {"predictions", predictions}};
  if (const auto* svr = std::get_if<SvrModel>(&fit.model.payload)) {
    report["params"] = {{"c", svr->params.c},
                        {"gamma", svr->params.gamma},
                        {"epsilon", svr->params.epsilon},
                        {"support_vectors", svr->support_vectors.rows()}};
    if (fit.grid) {
      json scores = json::array();
      for (const GridPointScore& s : fit.grid->scores) {
        scores.push_back({{"c", s.params.c}, {"gamma", s.params.gamma}, {"epsilon", s.params.epsilon},
                          {"cv_srcc", s.cv_srcc}});
      }
      report["grid_search"] = {{"folds", config.regressor.grid_folds},
                               {"cv_srcc", fit.grid->cv_srcc},
                               {"scores", std::move(scores)}};
    }
  } else {
    report["params"] = {{"layers", config.regressor.nn_layers},
                        {"lr", config.regressor.nn.learning_rate},
                        {"batch", config.regressor.nn.batch},
                        {"epochs", config.regressor.nn.epochs}};
  }
  return TrainOutput{fit.model, report.dump(1) + "\n"};
}

void cmd_predict(const TrainedModel& model, std::istream& features, std::ostream& out,
                 const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  out << "score\n";
  while (std::getline(features, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (!have_header) {
      if (fields != model.feature_names) {
        std::string expected;
        for (const auto& n : model.feature_names) expected += (expected.empty() ? "" : ",") + n;
        throw Error(ErrorCode::FeatureNameMismatch,
                    source_name + ": header does not match the model's features (" + expected + ")");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != model.feature_names.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  source_name + ":" + std::to_string(line_no) + ": wrong number of fields");
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) row[i] = parse_double(fields[i]);
    out << format_double(model.predict(row)) << '\n';
  }
  if (!have_header) throw Error(ErrorCode::FeatureNameMismatch, source_name + ": missing header");
}

EvaluationReport cmd_evaluate(const FeatureTable& features, const DatasetManifest& manifest,
                              const RunConfig& config) {
  const std::vector<double> mos = mos_for(features, manifest);
  if (config.regressor.kind == ModelKind::Nn &&
      config.regressor.nn_layers.front() != features.rows.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "nn_layers input size does not match the feature columns");
  }
  return run_splits(features.rows, mos, config.regressor, config.split_ratio, config.sims, config.seed,
                    config.threads);
}

RankOutput cmd_rank_features(const FeatureTable& features, const DatasetManifest& manifest,
                             std::optional<std::size_t> top) {
  const std::vector<double> mos = mos_for(features, manifest);
  RankOutput out;
  out.ranking = feature_correlation_report(features.rows, mos, features.names);

  std::ostringstream table, csv;
  table << std::fixed << std::setprecision(4);
  table << "rank  feature              PCC      SRCC      mean|.|\n";
  csv << "rank,feature,pcc,srcc,mean_abs,zero_variance\n";
  for (std::size_t i = 0; i < out.ranking.size(); ++i) {
    const FeatureCorrelation& f = out.ranking[i];
    table << std::setw(4) << i + 1 << "  " << std::left << std::setw(16) << f.name << std::right
          << std::setw(9) << f.pcc << std::setw(10) << f.srcc << std::setw(11) << f.mean_abs
          << (f.zero_variance ? "  (constant)" : "") << "\n";
    csv << i + 1 << "," << f.name << "," << format_double(f.pcc) << "," << format_double(f.srcc) << ","
        << format_double(f.mean_abs) << "," << (f.zero_variance ? 1 : 0) << "\n";
  }
  out.table = table.str();
  out.csv = csv.str();

  if (top) {
    const std::size_t n = std::min(*top, out.ranking.size());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = std::find(features.names.begin(), features.names.end(), out.ranking[i].name);
      keep.push_back(static_cast<std::size_t>(it - features.names.begin()));
    }
    std::sort(keep.begin(), keep.end());
    FeatureTable selected;
    for (std::size_t c : keep) selected.names.push_back(features.names[c]);
    selected.rows = features.rows.select_cols(keep);
    out.selected = std::move(selected);
  }
  return out;
}

}  // namespace fvq::cli
