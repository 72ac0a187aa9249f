#include "fvq/matrix.hpp"

#include <algorithm>
#include <string>

#include "fvq/error.hpp"

namespace fvq {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw Error(ErrorCode::DimensionMismatch, "row has " + std::to_string(values.size()) +
                                                  " values, expected " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < indices.size(); ++c) out(r, c) = (*this)(r, indices[c]);
  return out;
}

}  // namespace fvq
