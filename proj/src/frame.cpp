#include "fvq/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvq/error.hpp"

namespace fvq {

Frame::Frame(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative frame dimensions");
  }
  samples_.assign(static_cast<std::size_t>(width) * height, fill);
}

Frame::Frame(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::InvalidArgument, "negative frame dimensions");
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::DimensionMismatch,
                "sample count " + std::to_string(samples_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (!std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidArgument, "frame contains non-finite samples");
  }
}

VideoSequence::VideoSequence(std::vector<Frame> frames, double frame_rate, int bit_depth)
    : frames_(std::move(frames)), frame_rate_(frame_rate), bit_depth_(bit_depth) {
  if (frames_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "video sequence has no frames");
  }
  if (bit_depth != 8 && bit_depth != 10) {
    throw Error(ErrorCode::InvalidArgument, "bit depth must be 8 or 10");
  }
  for (std::size_t k = 1; k < frames_.size(); ++k) {
    if (!frames_[k].same_shape(frames_.front())) {
      throw Error(ErrorCode::DimensionMismatch,
                  "frame " + std::to_string(k) + " differs in size from frame 0");
    }
  }
}

}  // namespace fvq
