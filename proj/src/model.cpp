#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "fvq/error.hpp"
#include "fvq/regression.hpp"
#include "fvq/rng.hpp"

namespace fvq {
namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "fvq-model";

json svr_to_json(const SvrModel& m) {
  json sv = json::array();
  for (std::size_t r = 0; r < m.support_vectors.rows(); ++r) {
    auto row = m.support_vectors.row(r);
    sv.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return json{{"c", m.params.c},
              {"gamma", m.params.gamma},
              {"epsilon", m.params.epsilon},
              {"bias", m.bias},
              {"dim", m.support_vectors.cols()},
              {"dual_coefs", m.dual_coefs},
              {"support_vectors", std::move(sv)}};
}

SvrModel svr_from_json(const json& j) {
  SvrModel m;
  m.params.c = j.at("c").get<double>();
  m.params.gamma = j.at("gamma").get<double>();
  m.params.epsilon = j.at("epsilon").get<double>();
  m.bias = j.at("bias").get<double>();
  m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
  m.support_vectors = Matrix(0, j.at("dim").get<std::size_t>());
  for (const auto& row : j.at("support_vectors")) {
    m.support_vectors.append_row(row.get<std::vector<double>>());
  }
  if (m.support_vectors.rows() != m.dual_coefs.size()) {
    throw Error(ErrorCode::CorruptModel, "support vector and coefficient counts differ");
  }
  return m;
}

json nn_to_json(const NnModel& m) {
  json layers = json::array();
  for (const DenseLayer& l : m.layers) {
    layers.push_back(json{{"weights", l.weights}, {"biases", l.biases}});
  }
  return json{{"layer_sizes", m.layer_sizes}, {"layers", std::move(layers)}};
}

NnModel nn_from_json(const json& j) {
  NnModel m;
  m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  const auto& layers = j.at("layers");
  if (m.layer_sizes.size() < 2 || layers.size() != m.layer_sizes.size() - 1) {
    throw Error(ErrorCode::CorruptModel, "layer count does not match layer_sizes");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer layer{m.layer_sizes[l], m.layer_sizes[l + 1],
                     layers[l].at("weights").get<std::vector<double>>(),
                     layers[l].at("biases").get<std::vector<double>>()};
    if (layer.weights.size() != layer.inputs * layer.outputs || layer.biases.size() != layer.outputs) {
      throw Error(ErrorCode::CorruptModel, "layer " + std::to_string(l) + " has wrong shape");
    }
    m.layers.push_back(std::move(layer));
  }
  return m;
}

std::size_t payload_input_dim(const TrainedModel& m) {
  if (const auto* svr = std::get_if<SvrModel>(&m.payload)) return svr->input_dim();
  return std::get<NnModel>(m.payload).input_dim();
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::Svr ? "svr" : "nn"; }

double TrainedModel::predict(std::span<const double> raw_row) const {
  const auto row = normalize_apply(normalization, raw_row);
  if (const auto* svr = std::get_if<SvrModel>(&payload)) return svr_predict(*svr, row);
  return nn_predict(std::get<NnModel>(payload), row);
}

FitResult fit_model(const Matrix& raw_rows, std::span<const double> targets,
                    std::vector<std::string> feature_names, const RegressorConfig& config,
                    std::uint64_t seed) {
  if (feature_names.size() != raw_rows.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match columns");
  }
  if (config.kind == ModelKind::Nn &&
      (config.nn_layers.empty() || config.nn_layers.front() != raw_rows.cols())) {
    throw Error(ErrorCode::DimensionMismatch,
                "NN input layer size does not match the " + std::to_string(raw_rows.cols()) +
                    " feature columns");
  }
  FitResult out;
  TrainedModel& model = out.model;
  model.kind = config.kind;
  model.feature_names = std::move(feature_names);
  model.normalization = normalize_fit(raw_rows);
  const Matrix rows = normalize_apply(model.normalization, raw_rows);

  if (config.kind == ModelKind::Svr) {
    SvrParams params = config.svr;
    if (config.svr_grid_search) {
      out.grid = svr_grid_search(raw_rows, targets, config.grid, config.grid_folds, derive_seed(seed, 0));
      params = out.grid->best;
    }
    model.payload = svr_train(rows, targets, params);
  } else {
    NnHyper hyper = config.nn;
    hyper.seed = derive_seed(seed, 1);
    model.payload = nn_train(rows, targets, config.nn_layers, hyper).model;
  }
  return out;
}

void model_save(const TrainedModel& model, std::ostream& out) {
  json j{{"format", kFormatTag},
         {"version", model.version},
         {"kind", to_string(model.kind)},
         {"feature_names", model.feature_names},
         {"normalization", json{{"min", model.normalization.min}, {"max", model.normalization.max}}}};
  if (const auto* svr = std::get_if<SvrModel>(&model.payload)) {
    j["svr"] = svr_to_json(*svr);
  } else {
    j["nn"] = nn_to_json(std::get<NnModel>(model.payload));
  }
  out << j.dump(1) << '\n';
}

TrainedModel model_load(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("unreadable model document: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormatTag) {
      throw Error(ErrorCode::CorruptModel, "not an fvq model document");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, "model format version " + std::to_string(version) +
                                                  ", this build reads " +
                                                  std::to_string(kModelFormatVersion));
    }
    TrainedModel m;
    m.version = version;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.normalization.min = j.at("normalization").at("min").get<std::vector<double>>();
    m.normalization.max = j.at("normalization").at("max").get<std::vector<double>>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "svr") {
      m.kind = ModelKind::Svr;
      m.payload = svr_from_json(j.at("svr"));
    } else if (kind == "nn") {
      m.kind = ModelKind::Nn;
      m.payload = nn_from_json(j.at("nn"));
    } else {
      throw Error(ErrorCode::CorruptModel, "unknown model kind '" + kind + "'");
    }
    if (m.normalization.min.size() != m.feature_names.size() ||
        m.normalization.max.size() != m.feature_names.size() ||
        payload_input_dim(m) != m.feature_names.size()) {
      throw Error(ErrorCode::CorruptModel, "feature count disagrees between sections");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model document: ") + e.what());
  }
}

void model_save_file(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  model_save(model, out);
}

TrainedModel model_load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return model_load(in);
}

}  // namespace fvq
