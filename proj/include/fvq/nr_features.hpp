#pragma once

#include <span>
#include <string>
#include <vector>

#include "fvq/frame.hpp"

namespace fvq {

/// Symmetric generalized Gaussian, density proportional to
/// exp(-(|x|/scale)^shape).
struct GgdFit {
  double shape = 2.0;
  double scale = 0.0;
};

inline constexpr double kGgdMinShape = 0.05;
inline constexpr double kGgdMaxShape = 10.0;
/// Substituted for fits over flat content (zero variance).
inline constexpr GgdFit kGgdSentinel{2.0, 0.0};

/// Moment-matching GGD estimate. Needs at least 64 samples with non-zero
/// variance; throws TooFewSamples / DegenerateSamples otherwise. The shape is
/// read off a precomputed table of Gamma(1/b)Gamma(3/b)/Gamma(2/b)^2 over
/// [0.05, 10] and clamped to that range.
GgdFit fit_ggd(std::span<const double> samples);

/// Mean-subtracted contrast-normalized coefficients with Gaussian-weighted
/// local statistics: (f - mu) / (sigma + 1/255).
Frame mscn_transform(const Frame& f, double window_sigma, int window_radius = 3);

/// Every frame Gaussian-blurred; the comparator for no-reference features.
VideoSequence self_reference(const VideoSequence& processed, double sigma);

struct NrFeatureConfig {
  double sigma = 1.0;
  double mscn_sigma = 7.0 / 6.0;
  int mscn_radius = 3;
  int threads = 1;
};

struct NrFeatureVector {
  double spatial_shape = 0.0;
  double spatial_scale = 0.0;
  double temporal_shape = 0.0;
  double temporal_scale = 0.0;
  double selfsim_vif = 0.0;
  double selfsim_dlm = 0.0;
  double mscn_var = 0.0;
  double fdiff_energy = 0.0;
  double blur_dvif = 0.0;
  double blur_ddlm = 0.0;

  static constexpr std::size_t kSize = 10;
  std::vector<double> values() const;
  static std::vector<std::string> names();
};

/// Mean over frames of the variance of spatial MSCN coefficients.
double mscn_variance_mean(const VideoSequence& video, const NrFeatureConfig& config = {});

/// No-reference features of a processed video. Nothing but the processed
/// frames is consulted; flat content maps to kGgdSentinel fits.
NrFeatureVector extract_nr(const VideoSequence& processed, const NrFeatureConfig& config = {});

}  // namespace fvq
