#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fvq/dataset.hpp"
#include "fvq/evaluation.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/nr_features.hpp"
#include "fvq/regression.hpp"
#include "fvq/video_io.hpp"

namespace fvq::cli {

/// Everything a run needs, stored as one flat JSON object.
struct RunConfig {
  AssessmentMode mode = AssessmentMode::FullReference;
  FrFeatureConfig fr;
  NrFeatureConfig nr;
  RegressorConfig regressor;
  double split_ratio = 0.8;
  std::size_t sims = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Geometry for headerless .yuv inputs.
  RawFormat raw;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Defaults for a mode/regressor pair: NN input width follows the mode's
/// feature count; NN runs use an 85/15 split and 50 sims, SVR 80/20 and 1000.
RunConfig default_config(AssessmentMode mode, ModelKind kind);

std::string config_to_json(const RunConfig& config);
/// Keys absent from the document keep their defaults; unknown keys are a
/// ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Decodes .y4m by header, anything else as raw planar YUV.
VideoSequence load_video(const std::filesystem::path& path, const RawFormat& raw);

std::vector<std::string> feature_names(const RunConfig& config);

FeatureTable cmd_extract(const DatasetManifest& manifest, const RunConfig& config);

struct TrainOutput {
  TrainedModel model;
  std::string report_json;
};
TrainOutput cmd_train(const FeatureTable& features, const DatasetManifest& manifest,
                      const RunConfig& config);

/// Streams rows from `features` to `out` as a one-column `score` CSV.
void cmd_predict(const TrainedModel& model, std::istream& features, std::ostream& out,
                 const std::string& source_name = "features");

EvaluationReport cmd_evaluate(const FeatureTable& features, const DatasetManifest& manifest,
                              const RunConfig& config);

struct RankOutput {
  std::vector<FeatureCorrelation> ranking;
  std::string table;
  std::string csv;
  /// Top-N columns in their original order, when requested.
  std::optional<FeatureTable> selected;
};
RankOutput cmd_rank_features(const FeatureTable& features, const DatasetManifest& manifest,
                             std::optional<std::size_t> top);

/// Entry point behind the `fvq` executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fvq::cli
