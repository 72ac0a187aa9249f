#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fvq/matrix.hpp"

namespace fvq {

// ---------------------------------------------------------------------------
// Feature normalization

/// Per-feature min/max learned on a training split.
struct NormalizationStats {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const noexcept { return min.size(); }
};

inline constexpr double kNormalizedLow = -0.5;
inline constexpr double kNormalizedHigh = 1.5;

NormalizationStats normalize_fit(const Matrix& rows);
/// (x - min)/(max - min), clipped to [-0.5, 1.5]; constant features map to 0.
std::vector<double> normalize_apply(const NormalizationStats& stats, std::span<const double> row);
Matrix normalize_apply(const NormalizationStats& stats, const Matrix& rows);

// ---------------------------------------------------------------------------
// Epsilon-SVR with RBF kernel

struct SvrParams {
  double c = 10.0;
  double gamma = 0.1;
  double epsilon = 0.1;
};

struct SvrModel {
  Matrix support_vectors;
  std::vector<double> dual_coefs;  // alpha - alpha*, one per support vector
  double bias = 0.0;
  SvrParams params;

  std::size_t input_dim() const noexcept { return support_vectors.cols(); }
};

inline constexpr double kSvrTolerance = 1e-3;

struct SvrSolution {
  SvrModel model;
  /// alpha - alpha* per training row, in the caller's row order.
  std::vector<double> coefs;
  /// 1/2 b'Kb - z'b + eps*sum|b|, the minimized dual.
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// SMO with maximal-violating-pair selection, stopping when the KKT gap
/// falls below `tolerance`. Rows are visited in lexicographic order so the
/// result does not depend on how the caller ordered them. Identical targets
/// yield a bias-only model. Needs at least 4 rows.
SvrSolution svr_solve(const Matrix& rows, std::span<const double> targets, const SvrParams& params,
                      double tolerance = kSvrTolerance);
SvrModel svr_train(const Matrix& rows, std::span<const double> targets, const SvrParams& params);

double svr_predict(const SvrModel& model, std::span<const double> row);
std::vector<double> svr_predict(const SvrModel& model, const Matrix& rows);

struct SvrGrid {
  std::vector<double> c{1.0, 10.0, 100.0};
  std::vector<double> gamma{0.01, 0.1, 1.0};
  std::vector<double> epsilon{0.1};
};

struct GridPointScore {
  SvrParams params;
  double cv_srcc = 0.0;
};

struct GridSearchResult {
  SvrParams best;
  double cv_srcc = 0.0;
  std::vector<GridPointScore> scores;
};

/// K-fold cross-validated SRCC (pooled out-of-fold predictions) over the
/// grid. Rows are raw features; normalization is refit inside each fold.
/// Ties go to the smaller C, then the smaller gamma, then the smaller
/// epsilon.
GridSearchResult svr_grid_search(const Matrix& rows, std::span<const double> targets,
                                 const SvrGrid& grid, int folds, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Feedforward network, ReLU hidden layers, identity output

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> biases;
};

struct NnModel {
  std::vector<std::size_t> layer_sizes;
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  std::size_t parameter_count() const;
};

struct NnHyper {
  double learning_rate = 1e-3;
  std::size_t batch = 16;
  std::size_t epochs = 2000;
  std::uint64_t seed = 0;
  double rms_decay = 0.9;
  double rms_epsilon = 1e-8;
};

/// He-normal weights, zero biases. Throws InvalidArgument unless there are
/// at least two layers and the last has one unit.
NnModel nn_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

double nn_predict(const NnModel& model, std::span<const double> row);
std::vector<double> nn_predict(const NnModel& model, const Matrix& rows);

/// Mean squared error over all rows.
double nn_loss(const NnModel& model, const Matrix& rows, std::span<const double> targets);
/// Gradient of nn_loss, shaped like the model's layers.
std::vector<DenseLayer> nn_gradient(const NnModel& model, const Matrix& rows,
                                    std::span<const double> targets);

struct NnTrainResult {
  NnModel model;
  /// Full-data loss before training, then after every epoch.
  std::vector<double> loss_history;
};

/// Mini-batch RMSProp on mean squared error. Throws NonFiniteLoss if the
/// loss blows up, DimensionMismatch if layer_sizes[0] != rows.cols().
NnTrainResult nn_train(const Matrix& rows, std::span<const double> targets,
                       const std::vector<std::size_t>& layer_sizes, const NnHyper& hyper);

// ---------------------------------------------------------------------------
// Persisted model

enum class ModelKind { Svr, Nn };

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
  ModelKind kind = ModelKind::Svr;
  NormalizationStats normalization;
  std::variant<SvrModel, NnModel> payload;
  std::vector<std::string> feature_names;
  int version = kModelFormatVersion;

  /// Normalizes a raw feature row and runs the regressor.
  double predict(std::span<const double> raw_row) const;
};

struct RegressorConfig {
  ModelKind kind = ModelKind::Svr;
  SvrParams svr;
  /// When set, SVR parameters come from svr_grid_search on the training rows.
  bool svr_grid_search = false;
  SvrGrid grid;
  int grid_folds = 5;
  std::vector<std::size_t> nn_layers{13, 120, 64, 16, 1};
  NnHyper nn;
};

struct FitResult {
  TrainedModel model;
  /// Present when SVR parameters were chosen by grid search.
  std::optional<GridSearchResult> grid;
};

/// Fits normalization on raw_rows, then the configured regressor. `seed`
/// drives NN initialization/shuffling and grid-search folds.
FitResult fit_model(const Matrix& raw_rows, std::span<const double> targets,
                    std::vector<std::string> feature_names, const RegressorConfig& config,
                    std::uint64_t seed);

std::string to_string(ModelKind kind);

void model_save(const TrainedModel& model, std::ostream& out);
TrainedModel model_load(std::istream& in);
void model_save_file(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel model_load_file(const std::filesystem::path& path);

}  // namespace fvq
