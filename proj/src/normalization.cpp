#include <algorithm>
#include <string>

#include "fvq/error.hpp"
#include "fvq/regression.hpp"

namespace fvq {

NormalizationStats normalize_fit(const Matrix& rows) {
  if (rows.rows() < 2) {
    throw Error(ErrorCode::TooFewRows, "normalization needs at least 2 rows");
  }
  NormalizationStats stats;
  stats.min.assign(rows.row(0).begin(), rows.row(0).end());
  stats.max = stats.min;
  for (std::size_t r = 1; r < rows.rows(); ++r) {
    auto row = rows.row(r);
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      stats.min[c] = std::min(stats.min[c], row[c]);
      stats.max[c] = std::max(stats.max[c], row[c]);
    }
  }
  return stats;
}

std::vector<double> normalize_apply(const NormalizationStats& stats, std::span<const double> row) {
  if (row.size() != stats.size()) {
    throw Error(ErrorCode::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                                  " features, normalization expects " +
                                                  std::to_string(stats.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    const double span = stats.max[c] - stats.min[c];
    out[c] = span > 0.0
                 ? std::clamp((row[c] - stats.min[c]) / span, kNormalizedLow, kNormalizedHigh)
                 : 0.0;
  }
  return out;
}

Matrix normalize_apply(const NormalizationStats& stats, const Matrix& rows) {
  Matrix out(rows.rows(), rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto n = normalize_apply(stats, rows.row(r));
    std::copy(n.begin(), n.end(), out.row(r).begin());
  }
  if (rows.rows() == 0 && rows.cols() != stats.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix width does not match normalization");
  }
  return out;
}

}  // namespace fvq
