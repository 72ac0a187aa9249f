#include "fvq/nr_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvq/detail/parallel.hpp"
#include "fvq/error.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/video_io.hpp"

namespace fvq {
namespace {

constexpr double kMscnStabilizer = 1.0 / 255.0;
constexpr double kShapeStep = 0.001;
constexpr std::size_t kMinGgdSamples = 64;

double log_moment_ratio(double shape) {
  return std::lgamma(1.0 / shape) + std::lgamma(3.0 / shape) - 2.0 * std::lgamma(2.0 / shape);
}

struct ShapeTable {
  std::vector<double> shape;
  std::vector<double> ratio;  // strictly decreasing
};

const ShapeTable& shape_table() {
  static const ShapeTable table = [] {
    ShapeTable t;
    const auto steps = static_cast<std::size_t>(std::lround((kGgdMaxShape - kGgdMinShape) / kShapeStep));
    t.shape.reserve(steps + 1);
    t.ratio.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
      const double b = i == steps ? kGgdMaxShape : kGgdMinShape + static_cast<double>(i) * kShapeStep;
      t.shape.push_back(b);
      t.ratio.push_back(std::exp(log_moment_ratio(b)));
    }
    return t;
  }();
  return table;
}

double shape_from_ratio(double r) {
  const ShapeTable& t = shape_table();
  if (r >= t.ratio.front()) return t.shape.front();
  if (r <= t.ratio.back()) return t.shape.back();
  // First entry with ratio < r; the bracket is [i-1, i].
  const auto it = std::upper_bound(t.ratio.begin(), t.ratio.end(), r, std::greater<>());
  const auto i = static_cast<std::size_t>(it - t.ratio.begin());
  const double r0 = t.ratio[i - 1];
  const double r1 = t.ratio[i];
  const double frac = (r0 - r) / (r0 - r1);
  return t.shape[i - 1] + frac * (t.shape[i] - t.shape[i - 1]);
}

GgdFit fit_or_sentinel(std::span<const double> samples) {
  try {
    return fit_ggd(samples);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateSamples) return kGgdSentinel;
    throw;
  }
}

double variance(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

double mean_square(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc / static_cast<double>(v.size());
}

struct SpatialStats {
  GgdFit fit;
  double var = 0.0;
};

struct TemporalStats {
  GgdFit fit;
  double energy = 0.0;
};

}  // namespace

GgdFit fit_ggd(std::span<const double> samples) {
  if (samples.size() < kMinGgdSamples) {
    throw Error(ErrorCode::TooFewSamples, "GGD fit needs at least 64 samples, got " +
                                              std::to_string(samples.size()));
  }
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (double x : samples) {
    sum_sq += x * x;
    sum_abs += std::abs(x);
  }
  const auto n = static_cast<double>(samples.size());
  const double second = sum_sq / n;
  const double first_abs = sum_abs / n;
  const bool constant = std::all_of(samples.begin(), samples.end(),
                                    [&](double x) { return x == samples.front(); });
  if (constant || second <= 0.0 || first_abs <= 0.0) {
    throw Error(ErrorCode::DegenerateSamples, "samples have zero variance");
  }
  const double shape = shape_from_ratio(second / (first_abs * first_abs));
  const double scale = std::sqrt(second * std::exp(std::lgamma(1.0 / shape) - std::lgamma(3.0 / shape)));
  return GgdFit{shape, scale};
}

Frame mscn_transform(const Frame& f, double window_sigma, int window_radius) {
  const auto kernel = gaussian_kernel(window_sigma, window_radius);
  // Shifting by one sample value leaves the coefficients unchanged in exact
  // arithmetic and makes flat frames come out as exact zeros.
  Frame shifted = f;
  const double pivot = f.empty() ? 0.0 : f.samples()[0];
  for (double& v : shifted.samples()) v -= pivot;
  Frame squared = shifted;
  for (double& v : squared.samples()) v *= v;

  const Frame mu = separable_filter(shifted, kernel);
  const Frame mu_sq = separable_filter(squared, kernel);
  Frame out(f.width(), f.height());
  auto o = out.samples();
  auto s = shifted.samples();
  auto m = mu.samples();
  auto m2 = mu_sq.samples();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double sigma = std::sqrt(std::max(0.0, m2[i] - m[i] * m[i]));
    o[i] = (s[i] - m[i]) / (sigma + kMscnStabilizer);
  }
  return out;
}

VideoSequence self_reference(const VideoSequence& processed, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "self-reference sigma must be positive");
  std::vector<Frame> frames;
  frames.reserve(processed.frame_count());
  for (const Frame& f : processed.frames()) frames.push_back(gaussian_blur(f, sigma));
  return VideoSequence(std::move(frames), processed.frame_rate(), processed.bit_depth());
}

std::vector<double> NrFeatureVector::values() const {
  return {spatial_shape, spatial_scale, temporal_shape, temporal_scale, selfsim_vif,
          selfsim_dlm,   mscn_var,      fdiff_energy,   blur_dvif,      blur_ddlm};
}

std::vector<std::string> NrFeatureVector::names() {
  return {"ggd_s_shape", "ggd_s_scale", "ggd_t_shape", "ggd_t_scale", "selfsim_vif",
          "selfsim_dlm", "mscn_var",    "fdiff_energy", "blur_dvif",  "blur_ddlm"};
}

double mscn_variance_mean(const VideoSequence& video, const NrFeatureConfig& config) {
  std::vector<double> per_frame(video.frame_count());
  detail::parallel_for(per_frame.size(), config.threads, [&](std::size_t k) {
    per_frame[k] = variance(mscn_transform(video[k], config.mscn_sigma, config.mscn_radius).samples());
  });
  double total = 0.0;
  for (double v : per_frame) total += v;
  return total / static_cast<double>(per_frame.size());
}

NrFeatureVector extract_nr(const VideoSequence& processed, const NrFeatureConfig& config) {
  const std::size_t n = processed.frame_count();
  if (n < 2) throw Error(ErrorCode::TooFewFrames, "no-reference features need 2 frames");

  std::vector<SpatialStats> spatial(n);
  detail::parallel_for(n, config.threads, [&](std::size_t k) {
    const Frame m = mscn_transform(processed[k], config.mscn_sigma, config.mscn_radius);
    spatial[k] = SpatialStats{fit_or_sentinel(m.samples()), variance(m.samples())};
  });
  std::vector<TemporalStats> temporal(n - 1);
  detail::parallel_for(n - 1, config.threads, [&](std::size_t k) {
    const Frame d = frame_diff(processed[k + 1], processed[k]);
    const Frame m = mscn_transform(d, config.mscn_sigma, config.mscn_radius);
    temporal[k] = TemporalStats{fit_or_sentinel(m.samples()), mean_square(d.samples())};
  });

  NrFeatureVector out;
  for (const SpatialStats& s : spatial) {
    out.spatial_shape += s.fit.shape;
    out.spatial_scale += s.fit.scale;
    out.mscn_var += s.var;
  }
  out.spatial_shape /= static_cast<double>(n);
  out.spatial_scale /= static_cast<double>(n);
  out.mscn_var /= static_cast<double>(n);
  for (const TemporalStats& t : temporal) {
    out.temporal_shape += t.fit.shape;
    out.temporal_scale += t.fit.scale;
    out.fdiff_energy += t.energy;
  }
  out.temporal_shape /= static_cast<double>(n - 1);
  out.temporal_scale /= static_cast<double>(n - 1);
  out.fdiff_energy /= static_cast<double>(n - 1);

  // The processed video is the reference here and its blurred copy the
  // distorted input, so both indices measure detail removed by the blur.
  const VideoSequence blurred = self_reference(processed, config.sigma);
  out.selfsim_vif = std::clamp(vif_scales(processed, blurred, config.threads)[0], 0.0, 1.0);
  out.selfsim_dlm = std::clamp(dlm_scales(processed, blurred, config.threads).scale[0], 0.0, 1.0);
  out.blur_dvif = 1.0 - out.selfsim_vif;
  out.blur_ddlm = 1.0 - out.selfsim_dlm;
  return out;
}

}  // namespace fvq
