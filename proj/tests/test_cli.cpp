#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fvq/cli.hpp"
#include "fvq/error.hpp"
#include "fvq/video_io.hpp"
#include "json.hpp"
#include "synthetic.hpp"

using namespace fvq;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fvq::Error");
  return ErrorCode::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Result {
  int code;
  std::string out, err;
};

Result fvq_run(std::vector<std::string> args) {
  args.insert(args.begin(), "fvq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// 4 sources x 3 distortion levels of 32x32, 4-frame clips on disk.
struct Corpus {
  fs::path dir;
  fs::path fr_manifest, nr_manifest;

  Corpus() {
    dir = fs::temp_directory_path() / "fvq_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir / "videos");
    std::string fr = "reference,processed,mos\n", nr = fr;
    for (int s = 0; s < 4; ++s) {
      const auto src = testing::make_source_clip(100 + s, 4, 32, 32);
      const std::string ref = "videos/src" + std::to_string(s) + ".y4m";
      write_y4m_file(dir / ref, src);
      for (int level = 0; level < 3; ++level) {
        const auto dist = testing::add_noise(testing::blur_video(src, 0.5 + level), 0.01 * level, 7 * s + level);
        const std::string p = "videos/src" + std::to_string(s) + "_d" + std::to_string(level) + ".y4m";
        write_y4m_file(dir / p, dist);
        const std::string mos = std::to_string(5.0 - level - 0.1 * s);
        fr += ref + "," + p + "," + mos + "\n";
        nr += "," + p + "," + mos + "\n";
      }
    }
    fr_manifest = dir / "fr.csv";
    nr_manifest = dir / "nr.csv";
    spit(fr_manifest, fr);
    spit(nr_manifest, nr);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

}  // namespace

TEST_CASE("config init, show and validation") {
  const auto& c = corpus();
  auto r = fvq_run({"config", "init", "--mode", "nr", "--regressor", "nn", "-o", (c / "nn.json").string()});
  REQUIRE(r.code == 0);
  const auto cfg = cli::load_config(c / "nn.json");
  CHECK(cfg.mode == AssessmentMode::NoReference);
  CHECK(cfg.regressor.kind == ModelKind::Nn);
  CHECK(cfg.regressor.nn_layers == std::vector<std::size_t>{10, 120, 64, 16, 1});
  CHECK(cfg.split_ratio == 0.85);
  CHECK(cfg.sims == 50);
  r = fvq_run({"config", "show", "--config", (c / "nn.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out == slurp(c / "nn.json"));

  CHECK(cli::default_config(AssessmentMode::FullReference, ModelKind::Svr).sims == 1000);
  CHECK(cli::default_config(AssessmentMode::FullReference, ModelKind::Nn).regressor.nn_layers.front() == 13);
  CHECK(code_of([] { cli::config_from_json(R"({"nonsense": 1})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { cli::config_from_json(R"({"split_ratio": 1.5})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { cli::config_from_json(R"({"mode": "xr"})"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { cli::config_from_json("{"); }) == ErrorCode::ConfigError);
  const auto round = cli::config_from_json(cli::config_to_json(cfg));
  CHECK(cli::config_to_json(round) == cli::config_to_json(cfg));
}

TEST_CASE("extract FR: row count, columns, determinism") {
  const auto& c = corpus();
  auto r = fvq_run({"extract", "--manifest", c.fr_manifest.string(), "-o", (c / "fr_a.csv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto table = read_feature_csv_file(c / "fr_a.csv");
  CHECK(table.rows.rows() == 12);
  CHECK(table.rows.cols() == 13);
  CHECK(table.names == FrFeatureVector::names(true));

  r = fvq_run({"extract", "--manifest", c.fr_manifest.string(), "-o", (c / "fr_b.csv").string(), "--threads", "3"});
  REQUIRE(r.code == 0);
  CHECK(slurp(c / "fr_a.csv") == slurp(c / "fr_b.csv"));

  spit(c / "fr12.json", R"({"mode": "fr", "dm_l2": false})");
  r = fvq_run({"extract", "--manifest", c.fr_manifest.string(), "--config", (c / "fr12.json").string(), "-o",
               (c / "fr12.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(read_feature_csv_file(c / "fr12.csv").rows.cols() == 12);
}

TEST_CASE("extract NR and mode mismatch") {
  const auto& c = corpus();
  auto r = fvq_run({"extract", "--mode", "nr", "--manifest", c.nr_manifest.string(), "-o", (c / "nr.csv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto t = read_feature_csv_file(c / "nr.csv");
  CHECK(t.rows.cols() == 10);
  CHECK(t.rows.rows() == 12);

  r = fvq_run({"extract", "--mode", "nr", "--manifest", c.fr_manifest.string(), "-o", (c / "bad.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("fr.csv:2") != std::string::npos);
  CHECK(code_of([&] { read_manifest_file(c.fr_manifest, AssessmentMode::NoReference); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { read_manifest_file(c.nr_manifest, AssessmentMode::FullReference); }) == ErrorCode::ConfigError);
}

TEST_CASE("extract names the failing entry") {
  const auto& c = corpus();
  spit(c / "broken.y4m", "YUV4MPEG2 W32 H32 F25:1 C420\nFRAME\nabc");
  spit(c / "broken.csv", "reference,processed,mos\nvideos/src0.y4m,videos/src0_d0.y4m,3\nvideos/src0.y4m,broken.y4m,2\n");
  const auto r = fvq_run({"extract", "--manifest", (c / "broken.csv").string(), "-o", (c / "x.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("broken.csv:3") != std::string::npos);
  CHECK(r.err.find("broken.y4m") != std::string::npos);
}

TEST_CASE("train, predict and report agree") {
  const auto& c = corpus();
  REQUIRE(fvq_run({"extract", "--manifest", c.fr_manifest.string(), "-o", (c / "fr_feat.csv").string()}).code == 0);
  const std::string features = (c / "fr_feat.csv").string();
  auto r = fvq_run({"train", "--features", features, "--manifest", c.fr_manifest.string(), "--model",
                    (c / "m1.json").string(), "--report", (c / "train1.json").string(), "--seed", "4"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  r = fvq_run({"train", "--features", features, "--manifest", c.fr_manifest.string(), "--model",
               (c / "m2.json").string(), "--report", (c / "train2.json").string(), "--seed", "4"});
  REQUIRE(r.code == 0);
  CHECK(slurp(c / "m1.json") == slurp(c / "m2.json"));
  CHECK(slurp(c / "train1.json") == slurp(c / "train2.json"));

  r = fvq_run({"predict", "--model", (c / "m1.json").string(), "--features", features, "-o", (c / "scores.csv").string()});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(c / "train1.json"));
  std::istringstream scores(slurp(c / "scores.csv"));
  std::string line;
  std::getline(scores, line);
  CHECK(line == "score");
  std::size_t i = 0;
  while (std::getline(scores, line)) CHECK(parse_double(line) == report["predictions"][i++].get<double>());
  CHECK(i == 12);

  r = fvq_run({"predict", "--model", (c / "m1.json").string(), "--features", features});
  CHECK(r.out == slurp(c / "scores.csv"));
}

TEST_CASE("train on a linear fixture") {
  const auto& c = corpus();
  std::string manifest = "reference,processed,mos\n", feats = "a,b\n";
  for (int i = 0; i < 20; ++i) {
    manifest += ",v" + std::to_string(i) + ".y4m," + std::to_string(1 + 0.2 * i) + "\n";
    feats += std::to_string(i * 0.05) + "," + std::to_string((i * 7) % 5) + "\n";
  }
  spit(c / "lin_manifest.csv", manifest);
  spit(c / "lin.csv", feats);
  auto r = fvq_run({"train", "--mode", "nr", "--features", (c / "lin.csv").string(), "--manifest",
                    (c / "lin_manifest.csv").string(), "--model", (c / "lin_model.json").string(), "--report",
                    (c / "lin_report.json").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto j = nlohmann::json::parse(slurp(c / "lin_report.json"));
  CHECK(j["in_sample"]["srcc"].get<double>() >= 0.99);

  spit(c / "nn_bad.json", R"({"mode": "nr", "regressor": "nn", "nn_layers": [5, 4, 1], "nn_epochs": 100000000})");
  r = fvq_run({"train", "--config", (c / "nn_bad.json").string(), "--features", (c / "lin.csv").string(), "--manifest",
               (c / "lin_manifest.csv").string(), "--model", (c / "nn_bad_model.json").string()});
  CHECK(r.code == 1);
  const auto cfg = cli::load_config(c / "nn_bad.json");
  CHECK(code_of([&] {
          cli::cmd_train(read_feature_csv_file(c / "lin.csv"), read_manifest_file(c / "lin_manifest.csv", AssessmentMode::NoReference), cfg);
        }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("predict edge cases") {
  const auto& c = corpus();
  std::string feats = "a,b\n";
  std::string manifest = "reference,processed,mos\n";
  for (int i = 0; i < 12; ++i) {
    feats += std::to_string(i) + "," + std::to_string(i % 3) + "\n";
    manifest += ",x" + std::to_string(i) + ".y4m," + std::to_string(i) + "\n";
  }
  spit(c / "p_feats.csv", feats);
  spit(c / "p_manifest.csv", manifest);
  REQUIRE(fvq_run({"train", "--mode", "nr", "--features", (c / "p_feats.csv").string(), "--manifest",
                   (c / "p_manifest.csv").string(), "--model", (c / "p_model.json").string()})
              .code == 0);
  spit(c / "header_only.csv", "a,b\n");
  auto r = fvq_run({"predict", "--model", (c / "p_model.json").string(), "--features", (c / "header_only.csv").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "score\n");

  spit(c / "shuffled.csv", "b,a\n1,2\n");
  r = fvq_run({"predict", "--model", (c / "p_model.json").string(), "--features", (c / "shuffled.csv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("shuffled.csv") != std::string::npos);
  const auto model = model_load_file(c / "p_model.json");
  std::istringstream in("b,a\n1,2\n");
  std::ostringstream out;
  CHECK(code_of([&] { cli::cmd_predict(model, in, out); }) == ErrorCode::FeatureNameMismatch);
}

TEST_CASE("evaluate and rank-features") {
  const auto& c = corpus();
  REQUIRE(fvq_run({"extract", "--manifest", c.fr_manifest.string(), "-o", (c / "fr_e.csv").string()}).code == 0);
  const std::string f = (c / "fr_e.csv").string();
  auto r = fvq_run({"evaluate", "--features", f, "--manifest", c.fr_manifest.string(), "--sims", "0", "--report",
                    (c / "rep0.json").string()});
  CHECK(r.code != 0);
  CHECK(!fs::exists(c / "rep0.json"));

  for (const char* name : {"rep1.json", "rep2.json"}) {
    r = fvq_run({"evaluate", "--features", f, "--manifest", c.fr_manifest.string(), "--sims", "20", "--seed", "3", "--split", "0.7",
                 "--report", (c / name).string(), "--table", (c / (std::string(name) + ".txt")).string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("median SRCC") != std::string::npos);
  }
  CHECK(slurp(c / "rep1.json") == slurp(c / "rep2.json"));
  CHECK(slurp(c / "rep1.json.txt") == slurp(c / "rep2.json.txt"));
  const auto j = nlohmann::json::parse(slurp(c / "rep1.json"));
  CHECK(j["sim_count"] == 20);
  CHECK(j["split_ratio"] == 0.7);
  CHECK(j["per_sim"]["n_test"][0] == 4);

  // Append the MOS itself as a feature column; it must rank first.
  const auto table = read_feature_csv_file(f);
  const auto manifest = read_manifest_file(c.fr_manifest, AssessmentMode::FullReference);
  FeatureTable with_mos{table.names, Matrix(0, table.rows.cols() + 1)};
  with_mos.names.push_back("oracle_mos");
  for (std::size_t i = 0; i < table.rows.rows(); ++i) {
    std::vector<double> row(table.rows.row(i).begin(), table.rows.row(i).end());
    row.push_back(manifest.entries[i].mos);
    with_mos.rows.append_row(row);
  }
  write_feature_csv_file(c / "with_mos.csv", with_mos);
  r = fvq_run({"rank-features", "--features", (c / "with_mos.csv").string(), "--manifest", c.fr_manifest.string(),
               "--top", "10", "-o", (c / "rank.csv").string(), "--selected", (c / "top10.csv").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto selected = read_feature_csv_file(c / "top10.csv");
  CHECK(selected.rows.cols() == 10);
  CHECK(selected.rows.rows() == 12);
  std::istringstream rank(slurp(c / "rank.csv"));
  std::string header, first;
  std::getline(rank, header);
  std::getline(rank, first);
  CHECK(first.rfind("1,oracle_mos,", 0) == 0);
  const auto again = fvq_run({"rank-features", "--features", (c / "with_mos.csv").string(), "--manifest",
                              c.fr_manifest.string(), "--top", "10"});
  CHECK(again.out == r.out);
}

TEST_CASE("usage errors") {
  CHECK(fvq_run({}).code != 0);
  CHECK(fvq_run({"frobnicate"}).code != 0);
  CHECK(fvq_run({"evaluate", "--features", "x.csv"}).code != 0);
  CHECK(fvq_run({"train", "--features", "missing.csv", "--manifest", "missing.csv", "--model", "m.json"}).code == 1);
}
