#include <fstream>
#include <set>
#include <sstream>

#include "fvq/cli.hpp"
#include "fvq/error.hpp"
#include "json.hpp"

namespace fvq::cli {
namespace {

using nlohmann::json;

std::string chroma_tag(ChromaFormat c) { return c == ChromaFormat::Mono ? "mono" : "420"; }

ChromaFormat parse_chroma(const std::string& s) {
  if (s == "420") return ChromaFormat::Yuv420;
  if (s == "mono") return ChromaFormat::Mono;
  throw Error(ErrorCode::ConfigError, "raw_chroma must be '420' or 'mono'");
}

ModelKind parse_kind(const std::string& s) {
  if (s == "svr") return ModelKind::Svr;
  if (s == "nn") return ModelKind::Nn;
  throw Error(ErrorCode::ConfigError, "regressor must be 'svr' or 'nn'");
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigError, what);
}

}  // namespace

void RunConfig::validate() const {
  require(nr.sigma > 0.0, "nr_sigma must be positive");
  require(nr.mscn_sigma > 0.0, "mscn_sigma must be positive");
  require(nr.mscn_radius >= 1, "mscn_radius must be at least 1");
  require(split_ratio > 0.0 && split_ratio < 1.0, "split_ratio must lie in (0, 1)");
  require(sims >= 1, "sims must be at least 1");
  require(threads >= 1, "threads must be at least 1");
  require(regressor.svr.c > 0.0 && regressor.svr.gamma > 0.0 && regressor.svr.epsilon >= 0.0,
          "svr_c and svr_gamma must be positive, svr_epsilon non-negative");
  require(!regressor.grid.c.empty() && !regressor.grid.gamma.empty() && !regressor.grid.epsilon.empty(),
          "grid lists must be non-empty");
  require(regressor.grid_folds >= 2, "grid_folds must be at least 2");
  require(regressor.nn_layers.size() >= 2 && regressor.nn_layers.back() == 1,
          "nn_layers needs an input layer and a single output unit");
  require(regressor.nn.learning_rate > 0.0, "nn_lr must be positive");
  require(regressor.nn.batch >= 1, "nn_batch must be at least 1");
  require(raw.bit_depth == 8 || raw.bit_depth == 10, "raw_bit_depth must be 8 or 10");
  require(raw.frame_rate > 0.0, "raw_fps must be positive");
}

RunConfig default_config(AssessmentMode mode, ModelKind kind) {
  RunConfig c;
  c.mode = mode;
  c.regressor.kind = kind;
  const std::size_t inputs = mode == AssessmentMode::FullReference
                                 ? FrFeatureVector::names(c.fr.dm_l2).size()
                                 : NrFeatureVector::kSize;
  c.regressor.nn_layers = {inputs, 120, 64, 16, 1};
  if (kind == ModelKind::Nn) {
    c.split_ratio = 0.85;
    c.sims = 50;
  }
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j{{"mode", to_string(c.mode)},
         {"dm_l2", c.fr.dm_l2},
         {"nr_sigma", c.nr.sigma},
         {"mscn_sigma", c.nr.mscn_sigma},
         {"mscn_radius", c.nr.mscn_radius},
         {"regressor", to_string(c.regressor.kind)},
         {"svr_c", c.regressor.svr.c},
         {"svr_gamma", c.regressor.svr.gamma},
         {"svr_epsilon", c.regressor.svr.epsilon},
         {"svr_grid_search", c.regressor.svr_grid_search},
         {"grid_c", c.regressor.grid.c},
         {"grid_gamma", c.regressor.grid.gamma},
         {"grid_epsilon", c.regressor.grid.epsilon},
         {"grid_folds", c.regressor.grid_folds},
         {"nn_layers", c.regressor.nn_layers},
         {"nn_lr", c.regressor.nn.learning_rate},
         {"nn_batch", c.regressor.nn.batch},
         {"nn_epochs", c.regressor.nn.epochs},
         {"split_ratio", c.split_ratio},
         {"sims", c.sims},
         {"seed", c.seed},
         {"threads", c.threads},
         {"raw_width", c.raw.width},
         {"raw_height", c.raw.height},
         {"raw_bit_depth", c.raw.bit_depth},
         {"raw_chroma", chroma_tag(c.raw.chroma)},
         {"raw_fps", c.raw.frame_rate}};
  return j.dump(1) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");

  const AssessmentMode mode = j.contains("mode") ? parse_mode(j["mode"].get<std::string>())
                                                 : AssessmentMode::FullReference;
  const ModelKind kind = j.contains("regressor") ? parse_kind(j["regressor"].get<std::string>())
                                                 : ModelKind::Svr;
  RunConfig c = default_config(mode, kind);

  static const std::set<std::string> known{
      "mode",        "dm_l2",     "nr_sigma",     "mscn_sigma", "mscn_radius", "regressor",
      "svr_c",       "svr_gamma", "svr_epsilon",  "svr_grid_search", "grid_c", "grid_gamma",
      "grid_epsilon", "grid_folds", "nn_layers",  "nn_lr",      "nn_batch",    "nn_epochs",
      "split_ratio", "sims",      "seed",         "threads",    "raw_width",   "raw_height",
      "raw_bit_depth", "raw_chroma", "raw_fps"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::remove_reference_t<decltype(field)>>();
    };
    get("dm_l2", c.fr.dm_l2);
    if (!j.contains("nn_layers") && mode == AssessmentMode::FullReference) {
      c.regressor.nn_layers.front() = FrFeatureVector::names(c.fr.dm_l2).size();
    }
    get("nr_sigma", c.nr.sigma);
    get("mscn_sigma", c.nr.mscn_sigma);
    get("mscn_radius", c.nr.mscn_radius);
    get("svr_c", c.regressor.svr.c);
    get("svr_gamma", c.regressor.svr.gamma);
    get("svr_epsilon", c.regressor.svr.epsilon);
    get("svr_grid_search", c.regressor.svr_grid_search);
    get("grid_c", c.regressor.grid.c);
    get("grid_gamma", c.regressor.grid.gamma);
    get("grid_epsilon", c.regressor.grid.epsilon);
    get("grid_folds", c.regressor.grid_folds);
    get("nn_layers", c.regressor.nn_layers);
    get("nn_lr", c.regressor.nn.learning_rate);
    get("nn_batch", c.regressor.nn.batch);
    get("nn_epochs", c.regressor.nn.epochs);
    get("split_ratio", c.split_ratio);
    get("sims", c.sims);
    get("seed", c.seed);
    get("threads", c.threads);
    get("raw_width", c.raw.width);
    get("raw_height", c.raw.height);
    get("raw_bit_depth", c.raw.bit_depth);
    get("raw_fps", c.raw.frame_rate);
    if (j.contains("raw_chroma")) c.raw.chroma = parse_chroma(j["raw_chroma"].get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config value has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return config_from_json(text.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace fvq::cli
