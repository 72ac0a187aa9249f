#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fvq/matrix.hpp"

namespace fvq {

enum class AssessmentMode { FullReference, NoReference };

std::string to_string(AssessmentMode mode);
/// "fr" or "nr"; anything else is a ConfigError.
AssessmentMode parse_mode(std::string_view text);

struct ManifestEntry {
  std::optional<std::filesystem::path> reference;
  std::filesystem::path processed;
  double mos = 0.0;
  std::size_t line = 0;  // 1-based line in the manifest file
};

/// CSV with header `reference,processed,mos`. Relative paths resolve
/// against the manifest's directory. FR rows need a reference, NR rows must
/// leave it empty (ConfigError otherwise, naming the line).
struct DatasetManifest {
  AssessmentMode mode = AssessmentMode::FullReference;
  std::vector<ManifestEntry> entries;
  /// Name used in error messages, usually the manifest path.
  std::string source = "manifest";

  std::vector<double> mos() const;
};

DatasetManifest read_manifest(std::istream& in, AssessmentMode mode,
                              const std::filesystem::path& base_dir = {},
                              const std::string& source_name = "manifest");
DatasetManifest read_manifest_file(const std::filesystem::path& path, AssessmentMode mode);

/// Named feature columns, one row per video.
struct FeatureTable {
  std::vector<std::string> names;
  Matrix rows;
};

FeatureTable read_feature_csv(std::istream& in, const std::string& source_name = "features");
FeatureTable read_feature_csv_file(const std::filesystem::path& path);
void write_feature_csv(std::ostream& out, const FeatureTable& table);
void write_feature_csv_file(const std::filesystem::path& path, const FeatureTable& table);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);
/// Parses a full-string floating-point number; InvalidArgument otherwise.
double parse_double(std::string_view text);

}  // namespace fvq
