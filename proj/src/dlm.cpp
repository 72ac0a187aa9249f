#include <algorithm>
#include <cmath>
#include <numbers>

#include "fvq/error.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/video_io.hpp"

namespace fvq {
namespace {

constexpr double kCodeScale = 255.0;
constexpr int kMinSize = 32;
constexpr double kBorderFactor = 0.1;

// Daubechies-2 analysis filters.
constexpr std::array<double, 4> kLo{0.482962913144690, 0.836516303737469, 0.224143868041857,
                                    -0.129409522550921};
constexpr std::array<double, 4> kHi{-0.129409522550921, -0.224143868041857, 0.836516303737469,
                                    -0.482962913144690};

// Watson DWT quantisation model (luma), 9/7 basis amplitudes per level and
// orientation (0 approx, 1 horizontal, 2 diagonal, 3 vertical).
constexpr double kModelA = 0.495;
constexpr double kModelK = 0.466;
constexpr double kModelF0 = 0.401;
constexpr std::array<double, 4> kModelG{1.501, 1.0, 0.534, 1.0};
constexpr double kBasisAmplitude[4][4] = {
    {0.62171, 0.67234, 0.72709, 0.67234},
    {0.34537, 0.41317, 0.49428, 0.41317},
    {0.18004, 0.22727, 0.28688, 0.22727},
    {0.091401, 0.11792, 0.15214, 0.11792},
};
// Viewing distance of 3 picture heights on a 1080-line display.
constexpr double kViewDistance = 3.0;
constexpr double kDisplayHeight = 1080.0;

double csf_weight(int level, int orientation) {
  const double r = kViewDistance * kDisplayHeight * std::numbers::pi / 180.0;
  const double t = std::log10(std::pow(2.0, level + 1) * kModelF0 * kModelG[orientation] / r);
  const double q = 2.0 * kModelA * std::pow(10.0, kModelK * t * t) / kBasisAmplitude[level][orientation];
  return 1.0 / q;
}

struct Subbands {
  Frame ll, h, v, d;
};

// One level of the 2-D db2 transform with symmetric extension; each output
// dimension is ceil(n/2).
Subbands dwt2(const Frame& in) {
  const int w = in.width();
  const int h = in.height();
  const int hh = (h + 1) / 2;
  const int hw = (w + 1) / 2;

  Frame lo_v(w, hh), hi_v(w, hh);
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < w; ++x) {
      double lo = 0.0, hi = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double s = in.at(x, reflect_index(2 * y - 1 + k, h));
        lo += kLo[k] * s;
        hi += kHi[k] * s;
      }
      lo_v.at(x, y) = lo;
      hi_v.at(x, y) = hi;
    }
  }
  auto horizontal = [&](const Frame& src, Frame& lo_out, Frame& hi_out) {
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < hw; ++x) {
        double lo = 0.0, hi = 0.0;
        for (int k = 0; k < 4; ++k) {
          const double s = src.at(reflect_index(2 * x - 1 + k, w), y);
          lo += kLo[k] * s;
          hi += kHi[k] * s;
        }
        lo_out.at(x, y) = lo;
        hi_out.at(x, y) = hi;
      }
    }
  };
  Subbands out{Frame(hw, hh), Frame(hw, hh), Frame(hw, hh), Frame(hw, hh)};
  horizontal(lo_v, out.ll, out.h);
  horizontal(hi_v, out.v, out.d);
  return out;
}

struct DetailBands {
  std::array<Frame, 3> band;  // h, v, d
};

// Splits the test detail into a restored part (the share of original detail
// that survived) and an additive impairment (everything else).
void decouple(const DetailBands& orig, const DetailBands& test, DetailBands& restored,
              DetailBands& additive) {
  // cos^2 of one degree.
  const double cos1_sq = std::pow(std::cos(std::numbers::pi / 180.0), 2);
  const std::size_t n = orig.band[0].size();
  for (int b = 0; b < 3; ++b) {
    restored.band[b] = Frame(orig.band[b].width(), orig.band[b].height());
    additive.band[b] = Frame(orig.band[b].width(), orig.band[b].height());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double oh = orig.band[0].samples()[i];
    const double ov = orig.band[1].samples()[i];
    const double th = test.band[0].samples()[i];
    const double tv = test.band[1].samples()[i];
    const double ot_dp = oh * th + ov * tv;
    const double o_mag_sq = oh * oh + ov * ov;
    const double t_mag_sq = th * th + tv * tv;
    // Same orientation within one degree: treat as pure contrast change.
    const bool aligned = ot_dp >= 0.0 && ot_dp * ot_dp >= cos1_sq * o_mag_sq * t_mag_sq;
    for (int b = 0; b < 3; ++b) {
      const double o = orig.band[b].samples()[i];
      const double t = test.band[b].samples()[i];
      double r;
      if (aligned) {
        r = t;
      } else {
        const double k = std::clamp(t / (o + 1e-30), 0.0, 1.0);
        r = k * o;
      }
      restored.band[b].samples()[i] = r;
      additive.band[b].samples()[i] = t - r;
    }
  }
}

ScaleTerms dlm_level(const DetailBands& orig, const DetailBands& test, int level) {
  DetailBands restored, additive;
  decouple(orig, test, restored, additive);

  const int w = orig.band[0].width();
  const int h = orig.band[0].height();
  static constexpr int kOrientation[3] = {1, 3, 2};  // h, v, d

  std::array<double, 3> weight;
  for (int b = 0; b < 3; ++b) weight[b] = csf_weight(level, kOrientation[b]);

  // Masking threshold: 3x3 neighbourhood of CSF-weighted impairment over
  // all three orientations, centre weighted 1/15, neighbours 1/30.
  Frame threshold(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int b = 0; b < 3; ++b) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const double coef = (dx == 0 && dy == 0) ? 1.0 / 15.0 : 1.0 / 30.0;
            acc += coef * std::abs(weight[b] *
                                   additive.band[b].at(reflect_index(x + dx, w), reflect_index(y + dy, h)));
          }
        }
      }
      threshold.at(x, y) = acc;
    }
  }

  const int bx = static_cast<int>(w * kBorderFactor);
  const int by = static_cast<int>(h * kBorderFactor);
  const double area = static_cast<double>(w - 2 * bx) * (h - 2 * by);
  const double floor_term = std::cbrt(area / 32.0);

  ScaleTerms t;
  for (int b = 0; b < 3; ++b) {
    double num = 0.0, den = 0.0;
    for (int y = by; y < h - by; ++y) {
      for (int x = bx; x < w - bx; ++x) {
        const double r = std::max(std::abs(weight[b] * restored.band[b].at(x, y)) - threshold.at(x, y), 0.0);
        const double o = std::abs(weight[b] * orig.band[b].at(x, y));
        num += r * r * r;
        den += o * o * o;
      }
    }
    t.num += std::cbrt(num) + floor_term;
    t.den += std::cbrt(den) + floor_term;
  }
  return t;
}

}  // namespace

std::array<ScaleTerms, 4> dlm_frame_terms(const Frame& reference, const Frame& distorted) {
  if (!reference.same_shape(distorted)) {
    throw Error(ErrorCode::DimensionMismatch, "DLM operands differ in size");
  }
  if (reference.width() < kMinSize || reference.height() < kMinSize) {
    throw Error(ErrorCode::FrameTooSmall, "DLM needs frames of at least 32x32");
  }
  Frame ref = reference;
  Frame dist = distorted;
  for (double& v : ref.samples()) v *= kCodeScale;
  for (double& v : dist.samples()) v *= kCodeScale;

  std::array<ScaleTerms, 4> terms;
  for (int level = 0; level < 4; ++level) {
    Subbands o = dwt2(ref);
    Subbands t = dwt2(dist);
    terms[level] = dlm_level(DetailBands{{o.h, o.v, o.d}}, DetailBands{{t.h, t.v, t.d}}, level);
    ref = std::move(o.ll);
    dist = std::move(t.ll);
  }
  return terms;
}

}  // namespace fvq
