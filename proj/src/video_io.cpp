#include "fvq/video_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "fvq/error.hpp"

namespace fvq {
namespace {

constexpr std::size_t kMaxHeaderLength = 4096;

std::size_t luma_bytes(const RawFormat& f) {
  const std::size_t bytes_per_sample = f.bit_depth > 8 ? 2 : 1;
  return static_cast<std::size_t>(f.width) * f.height * bytes_per_sample;
}

std::size_t chroma_bytes(const RawFormat& f) {
  if (f.chroma == ChromaFormat::Mono) return 0;
  const std::size_t bytes_per_sample = f.bit_depth > 8 ? 2 : 1;
  const std::size_t cw = (static_cast<std::size_t>(f.width) + 1) / 2;
  const std::size_t ch = (static_cast<std::size_t>(f.height) + 1) / 2;
  return 2 * cw * ch * bytes_per_sample;
}

void validate(const RawFormat& f) {
  if (f.width <= 0 || f.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive");
  }
  if (f.bit_depth != 8 && f.bit_depth != 10) {
    throw Error(ErrorCode::UnsupportedFormat,
                "bit depth " + std::to_string(f.bit_depth) + " (expected 8 or 10)");
  }
}

Frame decode_luma(const std::vector<unsigned char>& buf, const RawFormat& f) {
  const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
  const double max_code = static_cast<double>((1 << f.bit_depth) - 1);
  std::vector<double> samples(n);
  if (f.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) samples[i] = buf[i] / max_code;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const unsigned v = static_cast<unsigned>(buf[2 * i]) | (static_cast<unsigned>(buf[2 * i + 1]) << 8);
      samples[i] = (v & 0x3FFu) / max_code;
    }
  }
  return Frame(f.width, f.height, std::move(samples));
}

// Reads one frame's payload; returns false on clean EOF before any byte.
bool read_frame_payload(std::istream& in, const RawFormat& f, std::vector<unsigned char>& luma,
                        std::size_t frame_index) {
  const std::size_t lb = luma_bytes(f);
  const std::size_t cb = chroma_bytes(f);
  luma.resize(lb);
  in.read(reinterpret_cast<char*>(luma.data()), static_cast<std::streamsize>(lb));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == 0 && in.eof()) return false;
  if (got != lb) {
    throw Error(ErrorCode::TruncatedFrame, "frame " + std::to_string(frame_index) + ": luma has " +
                                               std::to_string(got) + " of " + std::to_string(lb) +
                                               " bytes");
  }
  in.ignore(static_cast<std::streamsize>(cb));
  if (static_cast<std::size_t>(in.gcount()) != cb) {
    throw Error(ErrorCode::TruncatedFrame,
                "frame " + std::to_string(frame_index) + ": chroma payload is short");
  }
  return true;
}

int parse_positive_int(std::string_view text, std::string_view tag) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value <= 0) {
    throw Error(ErrorCode::MalformedHeader, "bad " + std::string(tag) + " value '" +
                                                std::string(text) + "'");
  }
  return value;
}

void apply_colour_tag(std::string_view tag, RawFormat& f) {
  if (tag == "420" || tag == "420jpeg" || tag == "420paldv" || tag == "420mpeg2") {
    f.chroma = ChromaFormat::Yuv420;
    f.bit_depth = 8;
  } else if (tag == "420p10") {
    f.chroma = ChromaFormat::Yuv420;
    f.bit_depth = 10;
  } else if (tag == "mono") {
    f.chroma = ChromaFormat::Mono;
    f.bit_depth = 8;
  } else if (tag == "mono10") {
    f.chroma = ChromaFormat::Mono;
    f.bit_depth = 10;
  } else {
    throw Error(ErrorCode::UnsupportedFormat, "colour space C" + std::string(tag));
  }
}

RawFormat parse_y4m_header(const std::string& line) {
  std::istringstream tokens(line);
  std::string magic;
  tokens >> magic;
  if (magic != "YUV4MPEG2") {
    throw Error(ErrorCode::MalformedHeader, "missing YUV4MPEG2 signature");
  }
  RawFormat f;
  f.width = 0;
  f.height = 0;
  std::string token;
  while (tokens >> token) {
    const char tag = token[0];
    const std::string_view value = std::string_view(token).substr(1);
    switch (tag) {
      case 'W': f.width = parse_positive_int(value, "W"); break;
      case 'H': f.height = parse_positive_int(value, "H"); break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) {
          throw Error(ErrorCode::MalformedHeader, "frame rate must be num:den");
        }
        const int num = parse_positive_int(value.substr(0, colon), "F");
        const int den = parse_positive_int(value.substr(colon + 1), "F");
        f.frame_rate = static_cast<double>(num) / den;
        break;
      }
      case 'C': apply_colour_tag(value, f); break;
      default: break;  // I, A, X and unknown tags carry nothing we use
    }
  }
  if (f.width == 0 || f.height == 0) {
    throw Error(ErrorCode::MalformedHeader, "header lacks W or H");
  }
  return f;
}

bool read_line(std::istream& in, std::string& line) {
  line.clear();
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return true;
    if (line.size() >= kMaxHeaderLength) {
      throw Error(ErrorCode::MalformedHeader, "header line too long");
    }
    line.push_back(c);
  }
  return !line.empty();
}

}  // namespace

std::size_t raw_frame_bytes(const RawFormat& format) {
  return luma_bytes(format) + chroma_bytes(format);
}

VideoSequence read_y4m(std::istream& in) {
  std::string line;
  if (!read_line(in, line)) {
    throw Error(ErrorCode::MalformedHeader, "empty stream");
  }
  const RawFormat format = parse_y4m_header(line);

  std::vector<Frame> frames;
  std::vector<unsigned char> luma;
  while (true) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    if (!read_line(in, line)) {
      throw Error(ErrorCode::TruncatedFrame,
                  "unterminated FRAME marker before frame " + std::to_string(frames.size()));
    }
    if (line.rfind("FRAME", 0) != 0) {
      throw Error(ErrorCode::MalformedHeader,
                  "expected FRAME marker before frame " + std::to_string(frames.size()));
    }
    if (!read_frame_payload(in, format, luma, frames.size())) {
      throw Error(ErrorCode::TruncatedFrame,
                  "frame " + std::to_string(frames.size()) + " has no payload");
    }
    frames.push_back(decode_luma(luma, format));
  }
  if (frames.empty()) {
    throw Error(ErrorCode::TruncatedFrame, "stream contains no frames");
  }
  return VideoSequence(std::move(frames), format.frame_rate, format.bit_depth);
}

VideoSequence read_y4m_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_y4m(in);
}

VideoSequence read_raw_yuv(std::istream& in, const RawFormat& format) {
  validate(format);
  const std::size_t frame_bytes = raw_frame_bytes(format);
  std::vector<unsigned char> buffer;
  std::vector<Frame> frames;
  const std::size_t lb = luma_bytes(format);
  std::size_t total = 0;
  while (true) {
    buffer.resize(frame_bytes);
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(frame_bytes));
    const auto got = static_cast<std::size_t>(in.gcount());
    total += got;
    if (got == 0) break;
    if (got != frame_bytes) {
      throw Error(ErrorCode::SizeMismatch, "stream length " + std::to_string(total) +
                                               " is not a multiple of the frame size " +
                                               std::to_string(frame_bytes));
    }
    buffer.resize(lb);
    frames.push_back(decode_luma(buffer, format));
  }
  if (frames.empty()) {
    throw Error(ErrorCode::SizeMismatch, "stream is empty");
  }
  return VideoSequence(std::move(frames), format.frame_rate, format.bit_depth);
}

VideoSequence read_raw_yuv_file(const std::filesystem::path& path, const RawFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_raw_yuv(in, format);
}

void write_raw_yuv(std::ostream& out, const VideoSequence& video, ChromaFormat chroma) {
  RawFormat format{video.width(), video.height(), video.bit_depth(), chroma, video.frame_rate()};
  const int max_code = (1 << format.bit_depth) - 1;
  const int neutral = 1 << (format.bit_depth - 1);
  const bool wide = format.bit_depth > 8;

  std::vector<unsigned char> bytes;
  auto push = [&](int code) {
    if (wide) {
      bytes.push_back(static_cast<unsigned char>(code & 0xFF));
      bytes.push_back(static_cast<unsigned char>(code >> 8));
    } else {
      bytes.push_back(static_cast<unsigned char>(code));
    }
  };
  const std::size_t chroma_samples = chroma_bytes(format) / (wide ? 2 : 1);
  for (const Frame& frame : video.frames()) {
    bytes.clear();
    for (double v : frame.samples()) {
      push(std::clamp(static_cast<int>(std::lround(v * max_code)), 0, max_code));
    }
    for (std::size_t i = 0; i < chroma_samples; ++i) push(neutral);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
}

void write_y4m(std::ostream& out, const VideoSequence& video, ChromaFormat chroma) {
  std::string colour;
  if (chroma == ChromaFormat::Mono) {
    colour = video.bit_depth() > 8 ? "mono10" : "mono";
  } else {
    colour = video.bit_depth() > 8 ? "420p10" : "420jpeg";
  }
  // Frame rate is stored as a rational with a millisecond-scale denominator.
  const long num = std::lround(video.frame_rate() * 1000.0);
  out << "YUV4MPEG2 W" << video.width() << " H" << video.height() << " F" << num << ":1000"
      << " Ip A1:1 C" << colour << "\n";
  for (std::size_t k = 0; k < video.frame_count(); ++k) {
    out << "FRAME\n";
    const VideoSequence single({video[k]}, video.frame_rate(), video.bit_depth());
    write_raw_yuv(out, single, chroma);
  }
}

void write_y4m_file(const std::filesystem::path& path, const VideoSequence& video,
                    ChromaFormat chroma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_y4m(out, video, chroma);
}

Frame frame_diff(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "frame_diff operands differ in size");
  }
  Frame out(a.width(), a.height());
  auto dst = out.samples();
  auto sa = a.samples();
  auto sb = b.samples();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = sa[i] - sb[i];
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  }
  return gaussian_kernel(sigma, static_cast<int>(std::ceil(3.0 * sigma)));
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  }
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "negative kernel radius");
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

Frame separable_filter(const Frame& f, const std::vector<double>& kernel) {
  if (kernel.size() % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "kernel length must be odd");
  }
  const int w = f.width();
  const int h = f.height();
  const int r = static_cast<int>(kernel.size() / 2);
  Frame tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * f.at(reflect_index(x + k, w), y);
      tmp.at(x, y) = acc;
    }
  }
  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * tmp.at(x, reflect_index(y + k, h));
      out.at(x, y) = acc;
    }
  }
  return out;
}

Frame gaussian_blur(const Frame& f, double sigma) {
  return separable_filter(f, gaussian_kernel(sigma));
}

Frame downsample_2x(const Frame& f) {
  if (f.width() < 2 || f.height() < 2) {
    throw Error(ErrorCode::FrameTooSmall, "downsample_2x needs at least 2x2");
  }
  static const std::vector<double> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  const Frame low = separable_filter(f, kBinomial);
  const int w = f.width() / 2;
  const int h = f.height() / 2;
  Frame out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = low.at(2 * x, 2 * y);
  return out;
}

}  // namespace fvq
