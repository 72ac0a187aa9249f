#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fvq/frame.hpp"

namespace fvq {

enum class DmNorm { L1, L2 };

struct FrFeatureConfig {
  /// Adds the RMS variant of differential motion as a 13th column.
  bool dm_l2 = true;
  /// Worker threads for per-frame work; results do not depend on it.
  int threads = 1;
};

/// Full-reference features for one (original, processed) pair.
struct FrFeatureVector {
  std::array<double, 4> vif{};
  std::array<double, 4> dlm{};
  double dlm_combined = 0.0;
  double motion = 0.0;
  double motion_min = 0.0;
  double dm_l1 = 0.0;
  std::optional<double> dm_l2;

  std::size_t size() const noexcept { return dm_l2 ? 13 : 12; }
  std::vector<double> values() const;
  static std::vector<std::string> names(bool with_dm_l2);
};

struct MotionFeatures {
  double plain = 0.0;
  double min = 0.0;
};

/// Sum of absolute differences over two equally sized blocks.
double sad(std::span<const double> block_ref, std::span<const double> block_coded);
double sad(const Frame& block_ref, const Frame& block_coded);

/// Per-pixel mean absolute frame difference of the original sequence,
/// averaged over all consecutive pairs (plain) and over the pairwise minimum
/// of adjacent differences (min). Needs at least three frames.
MotionFeatures motion_features(const VideoSequence& original);

/// Differential motion: per-frame norm of the difference between the
/// original's and the processed video's frame differences, per-pixel
/// normalized (mean absolute value for L1, root mean square for L2) and
/// averaged over frame pairs.
double dm_feature(const VideoSequence& original, const VideoSequence& processed, DmNorm norm);

/// Numerator/denominator pair of a ratio-style per-scale index.
struct ScaleTerms {
  double num = 0.0;
  double den = 0.0;
};

/// Pixel-domain VIF terms for one frame at scales 0..3. Frames must be at
/// least 32x32.
std::array<ScaleTerms, 4> vif_frame_terms(const Frame& reference, const Frame& distorted);
/// Detail-loss terms for one frame at wavelet levels 0..3.
std::array<ScaleTerms, 4> dlm_frame_terms(const Frame& reference, const Frame& distorted);

/// VIF per scale, averaged over frames. Identical inputs give exactly 1.
std::array<double, 4> vif_scales(const VideoSequence& original, const VideoSequence& processed,
                                 int threads = 1);

struct DlmScores {
  std::array<double, 4> scale{};
  /// Summed numerators over summed denominators, averaged over frames.
  double combined = 0.0;
};

DlmScores dlm_scales(const VideoSequence& original, const VideoSequence& processed,
                     int threads = 1);

FrFeatureVector extract_fr(const VideoSequence& original, const VideoSequence& processed,
                           const FrFeatureConfig& config = {});

}  // namespace fvq
