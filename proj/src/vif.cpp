#include <cmath>

#include "fvq/error.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/video_io.hpp"

namespace fvq {
namespace {

// GSM model constants on the 8-bit code-value scale.
constexpr double kCodeScale = 255.0;
constexpr double kSigmaNsq = 2.0;
constexpr double kEps = 1e-10;
constexpr int kMinSize = 32;

Frame scaled(const Frame& f, double s) {
  Frame out = f;
  for (double& v : out.samples()) v *= s;
  return out;
}

Frame product(const Frame& a, const Frame& b) {
  Frame out(a.width(), a.height());
  auto d = out.samples();
  auto sa = a.samples();
  auto sb = b.samples();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = sa[i] * sb[i];
  return out;
}

ScaleTerms vif_single_scale(const Frame& ref, const Frame& dist, int scale) {
  const int window = (1 << (4 - scale)) + 1;  // 17, 9, 5, 3
  const auto kernel = gaussian_kernel(window / 5.0, window / 2);

  const Frame mu1 = separable_filter(ref, kernel);
  const Frame mu2 = separable_filter(dist, kernel);
  const Frame e11 = separable_filter(product(ref, ref), kernel);
  const Frame e22 = separable_filter(product(dist, dist), kernel);
  const Frame e12 = separable_filter(product(ref, dist), kernel);

  ScaleTerms t;
  auto m1 = mu1.samples();
  auto m2 = mu2.samples();
  auto s11 = e11.samples();
  auto s22 = e22.samples();
  auto s12 = e12.samples();
  for (std::size_t i = 0; i < m1.size(); ++i) {
    double sigma1_sq = std::max(0.0, s11[i] - m1[i] * m1[i]);
    double sigma2_sq = std::max(0.0, s22[i] - m2[i] * m2[i]);
    const double sigma12 = s12[i] - m1[i] * m2[i];

    double g = sigma12 / (sigma1_sq + kEps);
    double sv_sq = sigma2_sq - g * sigma12;
    if (sigma1_sq < kEps) {
      g = 0.0;
      sv_sq = sigma2_sq;
      sigma1_sq = 0.0;
    }
    if (sigma2_sq < kEps) {
      g = 0.0;
      sv_sq = 0.0;
    }
    if (g < 0.0) {
      sv_sq = sigma2_sq;
      g = 0.0;
    }
    sv_sq = std::max(sv_sq, kEps);

    t.num += std::log10(1.0 + g * g * sigma1_sq / (sv_sq + kSigmaNsq));
    t.den += std::log10(1.0 + sigma1_sq / kSigmaNsq);
  }
  return t;
}

}  // namespace

std::array<ScaleTerms, 4> vif_frame_terms(const Frame& reference, const Frame& distorted) {
  if (!reference.same_shape(distorted)) {
    throw Error(ErrorCode::DimensionMismatch, "VIF operands differ in size");
  }
  if (reference.width() < kMinSize || reference.height() < kMinSize) {
    throw Error(ErrorCode::FrameTooSmall, "VIF needs frames of at least 32x32");
  }
  std::array<ScaleTerms, 4> terms;
  Frame ref = scaled(reference, kCodeScale);
  Frame dist = scaled(distorted, kCodeScale);
  for (int s = 0; s < 4; ++s) {
    if (s > 0) {
      ref = downsample_2x(ref);
      dist = downsample_2x(dist);
    }
    terms[s] = vif_single_scale(ref, dist, s);
  }
  return terms;
}

}  // namespace fvq
