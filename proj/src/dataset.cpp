#include "fvq/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "fvq/error.hpp"

namespace fvq {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::string to_string(AssessmentMode mode) {
  return mode == AssessmentMode::FullReference ? "fr" : "nr";
}

AssessmentMode parse_mode(std::string_view text) {
  if (text == "fr") return AssessmentMode::FullReference;
  if (text == "nr") return AssessmentMode::NoReference;
  throw Error(ErrorCode::ConfigError, "mode must be 'fr' or 'nr', got '" + std::string(text) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<double> DatasetManifest::mos() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const ManifestEntry& e : entries) out.push_back(e.mos);
  return out;
}

DatasetManifest read_manifest(std::istream& in, AssessmentMode mode,
                              const std::filesystem::path& base_dir, const std::string& source_name) {
  DatasetManifest manifest;
  manifest.mode = mode;
  manifest.source = source_name;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv_line(line);
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "reference" || fields[1] != "processed" || fields[2] != "mos") {
        throw Error(ErrorCode::ConfigError,
                    where(source_name, line_no) + "header must be 'reference,processed,mos'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::ConfigError, where(source_name, line_no) + "expected 3 fields");
    }
    ManifestEntry e;
    e.line = line_no;
    if (!fields[0].empty()) {
      if (mode == AssessmentMode::NoReference) {
        throw Error(ErrorCode::ConfigError,
                    where(source_name, line_no) + "reference given in no-reference mode");
      }
      e.reference = base_dir / fields[0];
    } else if (mode == AssessmentMode::FullReference) {
      throw Error(ErrorCode::ConfigError,
                  where(source_name, line_no) + "full-reference mode needs a reference path");
    }
    if (fields[1].empty()) {
      throw Error(ErrorCode::ConfigError, where(source_name, line_no) + "processed path is empty");
    }
    e.processed = base_dir / fields[1];
    try {
      e.mos = parse_double(fields[2]);
    } catch (const Error&) {
      throw Error(ErrorCode::ConfigError, where(source_name, line_no) + "bad mos '" + fields[2] + "'");
    }
    if (!std::isfinite(e.mos)) {
      throw Error(ErrorCode::ConfigError, where(source_name, line_no) + "mos must be finite");
    }
    manifest.entries.push_back(std::move(e));
  }
  if (!have_header) throw Error(ErrorCode::ConfigError, source_name + ": empty manifest");
  return manifest;
}

DatasetManifest read_manifest_file(const std::filesystem::path& path, AssessmentMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_manifest(in, mode, path.parent_path(), path.string());
}

FeatureTable read_feature_csv(std::istream& in, const std::string& source_name) {
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.names = std::move(fields);
      table.rows = Matrix(0, table.names.size());
      have_header = true;
      continue;
    }
    if (fields.size() != table.names.size()) {
      throw Error(ErrorCode::DimensionMismatch, where(source_name, line_no) + "expected " +
                                                    std::to_string(table.names.size()) + " fields");
    }
    std::vector<double> values(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        values[i] = parse_double(fields[i]);
      } catch (const Error& e) {
        throw Error(ErrorCode::InvalidArgument, where(source_name, line_no) + e.what());
      }
    }
    table.rows.append_row(values);
  }
  if (!have_header) throw Error(ErrorCode::InvalidArgument, source_name + ": missing header");
  return table;
}

FeatureTable read_feature_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_feature_csv(in, path.string());
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  for (std::size_t i = 0; i < table.names.size(); ++i) out << (i ? "," : "") << table.names[i];
  out << '\n';
  for (std::size_t r = 0; r < table.rows.rows(); ++r) {
    auto row = table.rows.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_feature_csv_file(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_feature_csv(out, table);
}

}  // namespace fvq
