#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fvq {

/// One luma plane, row-major. Decoded frames hold samples in [0,1];
/// difference frames and filtered intermediates may leave that range.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, double fill = 0.0);
  /// Throws DimensionMismatch if samples.size() != width*height and
  /// InvalidArgument if any sample is not finite.
  Frame(int width, int height, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  double at(int x, int y) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }

  bool same_shape(const Frame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> samples_;
};

/// Ordered luma frames with shared geometry.
class VideoSequence {
 public:
  VideoSequence() = default;
  /// Throws DimensionMismatch if frames disagree in size, InvalidArgument
  /// if the list is empty or bit_depth is not 8 or 10.
  VideoSequence(std::vector<Frame> frames, double frame_rate = 25.0, int bit_depth = 8);

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& operator[](std::size_t k) const { return frames_[k]; }
  std::size_t frame_count() const noexcept { return frames_.size(); }
  int width() const noexcept { return frames_.empty() ? 0 : frames_.front().width(); }
  int height() const noexcept { return frames_.empty() ? 0 : frames_.front().height(); }
  double frame_rate() const noexcept { return frame_rate_; }
  int bit_depth() const noexcept { return bit_depth_; }

  bool same_shape(const VideoSequence& other) const noexcept {
    return frame_count() == other.frame_count() && width() == other.width() &&
           height() == other.height();
  }

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;

 private:
  std::vector<Frame> frames_;
  double frame_rate_ = 25.0;
  int bit_depth_ = 8;
};

}  // namespace fvq
