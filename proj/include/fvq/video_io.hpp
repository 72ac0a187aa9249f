#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fvq/frame.hpp"

namespace fvq {

enum class ChromaFormat { Yuv420, Mono };

struct RawFormat {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  ChromaFormat chroma = ChromaFormat::Yuv420;
  double frame_rate = 25.0;
};

/// Bytes occupied by one frame (luma plus chroma) in planar layout.
std::size_t raw_frame_bytes(const RawFormat& format);

/// Parses a YUV4MPEG2 stream. Accepted colour tags: 420, 420jpeg, 420paldv,
/// 420mpeg2, 420p10, mono, mono10 (420 when absent). Only luma is kept,
/// scaled by 1/(2^bit_depth - 1). 10-bit samples are 2 bytes little-endian.
VideoSequence read_y4m(std::istream& in);
VideoSequence read_y4m_file(const std::filesystem::path& path);

/// Planar I420 / I420-10LE (or luma-only for Mono) with caller geometry.
VideoSequence read_raw_yuv(std::istream& in, const RawFormat& format);
VideoSequence read_raw_yuv_file(const std::filesystem::path& path, const RawFormat& format);

/// Inverse of read_raw_yuv. Luma is rounded back to integer code values;
/// chroma planes are written at the neutral mid value.
void write_raw_yuv(std::ostream& out, const VideoSequence& video,
                   ChromaFormat chroma = ChromaFormat::Yuv420);
void write_y4m(std::ostream& out, const VideoSequence& video,
               ChromaFormat chroma = ChromaFormat::Yuv420);
void write_y4m_file(const std::filesystem::path& path, const VideoSequence& video,
                    ChromaFormat chroma = ChromaFormat::Yuv420);

// Pixel primitives. All filters use half-sample symmetric extension at the
// borders (d c b a | a b c d | d c b a), which keeps the frame mean intact
// under any normalized symmetric kernel.

/// Element-wise a - b.
Frame frame_diff(const Frame& a, const Frame& b);

/// Normalized sampled Gaussian of radius ceil(3*sigma).
std::vector<double> gaussian_kernel(double sigma);
/// Same with an explicit radius.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Separable convolution with a symmetric odd-length 1-D kernel.
Frame separable_filter(const Frame& f, const std::vector<double>& kernel);

Frame gaussian_blur(const Frame& f, double sigma);

/// [1 4 6 4 1]/16 low-pass then keep even rows/columns; floor(dim/2) output.
Frame downsample_2x(const Frame& f);

/// Maps any integer index onto [0, n) by symmetric reflection.
inline int reflect_index(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace fvq
