#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fvq/matrix.hpp"
#include "fvq/regression.hpp"

namespace fvq {

/// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> rank(std::span<const double> x);

/// Sample Pearson correlation. Needs equal lengths >= 3 (LengthMismatch)
/// and non-zero variance in both inputs (ZeroVariance).
double pcc(std::span<const double> x, std::span<const double> y);
/// Pearson correlation of average ranks.
double srcc(std::span<const double> x, std::span<const double> y);

/// As pcc/srcc, but 0 when either input is constant.
double pcc_or_zero(std::span<const double> x, std::span<const double> y);
double srcc_or_zero(std::span<const double> x, std::span<const double> y);

struct SplitResult {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double pcc = 0.0;
  double srcc = 0.0;
};

struct EvaluationReport {
  std::string regressor;
  std::uint64_t seed = 0;
  double split_ratio = 0.0;
  std::size_t sim_count = 0;
  std::vector<SplitResult> splits;
  double median_pcc = 0.0;
  double median_srcc = 0.0;
  double mean_pcc = 0.0;
  double mean_srcc = 0.0;
};

/// Training-set size for a split: round(n * ratio).
std::size_t train_count(std::size_t n, double split_ratio);

/// One shuffled train/test split. Normalization and regressor are fit on
/// the training part only. Constant test predictions score 0.
SplitResult run_single_split(const Matrix& features, std::span<const double> mos,
                             const RegressorConfig& regressor, double split_ratio,
                             std::uint64_t split_seed);

/// `sims` independent splits; split i uses derive_seed(seed, i), so results
/// do not depend on `threads`. Throws TooFewEntries when fewer than 10
/// entries are given or the test part would hold fewer than 3 rows.
EvaluationReport run_splits(const Matrix& features, std::span<const double> mos,
                            const RegressorConfig& regressor, double split_ratio, std::size_t sims,
                            std::uint64_t seed, int threads = 1);

std::string report_to_json(const EvaluationReport& report);
std::string report_to_table(const EvaluationReport& report);

struct FeatureCorrelation {
  std::string name;
  double pcc = 0.0;
  double srcc = 0.0;
  /// Mean of |pcc| and |srcc|; the sort key.
  double mean_abs = 0.0;
  bool zero_variance = false;
};

/// Per-feature correlation with MOS, sorted by mean_abs descending (stable
/// in column order). Constant columns get 0 and zero_variance = true.
std::vector<FeatureCorrelation> feature_correlation_report(const Matrix& features,
                                                           std::span<const double> mos,
                                                           const std::vector<std::string>& names);

}  // namespace fvq
