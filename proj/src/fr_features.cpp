#include "fvq/fr_features.hpp"

#include "fvq/detail/parallel.hpp"
#include "fvq/error.hpp"

namespace fvq {
namespace {

double ratio_or_one(const ScaleTerms& t) { return t.den > 0.0 ? t.num / t.den : 1.0; }

void check_pair(const VideoSequence& original, const VideoSequence& processed) {
  if (!original.same_shape(processed)) {
    throw Error(ErrorCode::DimensionMismatch,
                "original and processed videos differ in frame count or size");
  }
}

using FrameTerms = std::array<ScaleTerms, 4>;

template <class TermsFn>
std::vector<FrameTerms> per_frame(const VideoSequence& original, const VideoSequence& processed,
                                  int threads, TermsFn fn) {
  std::vector<FrameTerms> out(original.frame_count());
  detail::parallel_for(out.size(), threads,
                       [&](std::size_t k) { out[k] = fn(original[k], processed[k]); });
  return out;
}

std::array<double, 4> mean_ratios(const std::vector<FrameTerms>& frames) {
  std::array<double, 4> sum{};
  for (const FrameTerms& f : frames)
    for (int s = 0; s < 4; ++s) sum[s] += ratio_or_one(f[s]);
  for (double& v : sum) v /= static_cast<double>(frames.size());
  return sum;
}

double mean_combined(const std::vector<FrameTerms>& frames) {
  double total = 0.0;
  for (const FrameTerms& f : frames) {
    ScaleTerms all;
    for (const ScaleTerms& t : f) {
      all.num += t.num;
      all.den += t.den;
    }
    total += ratio_or_one(all);
  }
  return total / static_cast<double>(frames.size());
}

}  // namespace

std::vector<double> FrFeatureVector::values() const {
  std::vector<double> v(vif.begin(), vif.end());
  v.insert(v.end(), dlm.begin(), dlm.end());
  v.push_back(dlm_combined);
  v.push_back(motion);
  v.push_back(motion_min);
  v.push_back(dm_l1);
  if (dm_l2) v.push_back(*dm_l2);
  return v;
}

std::vector<std::string> FrFeatureVector::names(bool with_dm_l2) {
  std::vector<std::string> n{"vif0", "vif1", "vif2", "vif3", "dlm0",   "dlm1",       "dlm2",
                             "dlm3", "dlm",  "motion", "motion_min", "dm_l1"};
  if (with_dm_l2) n.emplace_back("dm_l2");
  return n;
}

std::array<double, 4> vif_scales(const VideoSequence& original, const VideoSequence& processed,
                                 int threads) {
  check_pair(original, processed);
  return mean_ratios(per_frame(original, processed, threads, vif_frame_terms));
}

DlmScores dlm_scales(const VideoSequence& original, const VideoSequence& processed, int threads) {
  check_pair(original, processed);
  const auto terms = per_frame(original, processed, threads, dlm_frame_terms);
  return DlmScores{mean_ratios(terms), mean_combined(terms)};
}

FrFeatureVector extract_fr(const VideoSequence& original, const VideoSequence& processed,
                           const FrFeatureConfig& config) {
  check_pair(original, processed);
  FrFeatureVector out;
  out.vif = vif_scales(original, processed, config.threads);
  const DlmScores dlm = dlm_scales(original, processed, config.threads);
  out.dlm = dlm.scale;
  out.dlm_combined = dlm.combined;
  const MotionFeatures motion = motion_features(original);
  out.motion = motion.plain;
  out.motion_min = motion.min;
  out.dm_l1 = dm_feature(original, processed, DmNorm::L1);
  if (config.dm_l2) out.dm_l2 = dm_feature(original, processed, DmNorm::L2);
  return out;
}

}  // namespace fvq
