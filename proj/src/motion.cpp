#include <cmath>
#include <string>

#include "fvq/error.hpp"
#include "fvq/fr_features.hpp"

namespace fvq {
namespace {

double mean_abs_diff(const Frame& a, const Frame& b) {
  return sad(a, b) / static_cast<double>(a.size());
}

}  // namespace

double sad(std::span<const double> block_ref, std::span<const double> block_coded) {
  if (block_ref.size() != block_coded.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sad operands differ in size");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < block_ref.size(); ++i) sum += std::abs(block_ref[i] - block_coded[i]);
  return sum;
}

double sad(const Frame& block_ref, const Frame& block_coded) {
  if (!block_ref.same_shape(block_coded)) {
    throw Error(ErrorCode::DimensionMismatch, "sad operands differ in size");
  }
  return sad(block_ref.samples(), block_coded.samples());
}

MotionFeatures motion_features(const VideoSequence& original) {
  const std::size_t n = original.frame_count();
  if (n < 3) {
    throw Error(ErrorCode::TooFewFrames,
                "motion features need 3 frames, got " + std::to_string(n));
  }
  std::vector<double> diffs(n - 1);
  for (std::size_t k = 1; k < n; ++k) diffs[k - 1] = mean_abs_diff(original[k], original[k - 1]);

  MotionFeatures out;
  double plain = 0.0;
  for (double d : diffs) plain += d;
  out.plain = plain / static_cast<double>(diffs.size());

  double min_sum = 0.0;
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) min_sum += std::min(diffs[k], diffs[k + 1]);
  out.min = min_sum / static_cast<double>(diffs.size() - 1);
  return out;
}

double dm_feature(const VideoSequence& original, const VideoSequence& processed, DmNorm norm) {
  if (!original.same_shape(processed)) {
    throw Error(ErrorCode::DimensionMismatch, "dm_feature needs equally shaped sequences");
  }
  const std::size_t n = original.frame_count();
  if (n < 2) throw Error(ErrorCode::TooFewFrames, "dm_feature needs 2 frames");

  double total = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    auto f1 = original[k].samples();
    auto f0 = original[k - 1].samples();
    auto g1 = processed[k].samples();
    auto g0 = processed[k - 1].samples();
    double acc = 0.0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
      const double d = (f1[i] - f0[i]) - (g1[i] - g0[i]);
      acc += norm == DmNorm::L1 ? std::abs(d) : d * d;
    }
    const double per_pixel = acc / static_cast<double>(f1.size());
    total += norm == DmNorm::L1 ? per_pixel : std::sqrt(per_pixel);
  }
  return total / static_cast<double>(n - 1);
}

}  // namespace fvq
