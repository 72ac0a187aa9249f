// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: fvq_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "fvq/cli.hpp"
#include "fvq/detail/parallel.hpp"
#include "fvq/evaluation.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/nr_features.hpp"
#include "fvq/regression.hpp"
#include "fvq/video_io.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace fvq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Correlation oracle equivalence

Outcome correlation_oracle() {
  Rng rng(1001);
  double worst = 0;
  int pairs = 0;
  while (pairs < 1000) {
    const std::size_t n = 3 + rng.below(48);
    const bool ties = pairs % 2 == 1;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? double(rng.below(4)) : rng.normal();
      y[i] = ties ? double(rng.below(4)) : rng.normal() + 0.5 * x[i];
    }
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
    };
    if (constant(x) || constant(y)) continue;
    worst = std::max(worst, std::fabs(pcc(x, y) - oracle::pcc(x, y)));
    worst = std::max(worst, std::fabs(srcc(x, y) - oracle::srcc(x, y)));
    ++pairs;
  }
  return {worst <= 1e-12, fmt("1000 pairs, max |diff| %.3g (limit 1e-12)", worst)};
}

// ---------------------------------------------------------------------------
// 2. Eq. 3/4/5 oracle equivalence

Outcome motion_oracle() {
  const VideoSequence ex({Frame(2, 2, 0.0), Frame(2, 2, 1.0), Frame(2, 2, 3.0)});
  const auto m = motion_features(ex);
  const bool example = m.plain == 1.5 && m.min == 1.0;

  Rng rng(1002);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const int w = 1 + int(rng.below(16)), h = 1 + int(rng.below(16)), k = 3 + int(rng.below(6));
    const auto f = testing::random_video(w, h, k, rng);
    const auto g = testing::random_video(w, h, k, rng);
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); };
    for (int i = 1; i < k; ++i) worst = std::max(worst, rel(sad(f[i], g[i]), oracle::sad(f[i], g[i])));
    const auto mf = motion_features(f);
    worst = std::max(worst, rel(mf.plain, oracle::motion_plain(f)));
    worst = std::max(worst, rel(mf.min, oracle::motion_min(f)));
    worst = std::max(worst, rel(dm_feature(f, g, DmNorm::L1), oracle::dm(f, g, false)));
    worst = std::max(worst, rel(dm_feature(f, g, DmNorm::L2), oracle::dm(f, g, true)));
  }
  return {example && worst <= 1e-9,
          fmt("worked example %s (plain %g, min %g); 100 sequences, max diff %.3g (limit 1e-9)",
              example ? "exact" : "WRONG", m.plain, m.min, worst)};
}

// ---------------------------------------------------------------------------
// 3. Identity sanity

Outcome identity() {
  std::vector<VideoSequence> fixtures;
  for (int s = 0; s < 3; ++s) fixtures.push_back(testing::make_source_clip(3000 + s, 6, 64, 64));
  Rng rng(1003);
  fixtures.push_back(testing::random_video(48, 40, 4, rng));
  fixtures.push_back(testing::constant_video(32, 32, 3, 0.0));
  fixtures.push_back(testing::constant_video(32, 32, 3, 1.0));
  double worst_index = 0, worst_dm = 0, worst_offset = 0;
  for (const auto& v : fixtures) {
    const auto f = extract_fr(v, v);
    for (int s = 0; s < 4; ++s) {
      worst_index = std::max({worst_index, std::fabs(f.vif[s] - 1), std::fabs(f.dlm[s] - 1)});
    }
    worst_dm = std::max({worst_dm, f.dm_l1, *f.dm_l2});
    const auto other = testing::add_noise(v, 0.05, 17);
    for (DmNorm n : {DmNorm::L1, DmNorm::L2}) {
      const double base = dm_feature(v, other, n);
      for (double c : {-0.3, 0.2, 0.7}) {
        const auto shifted = testing::offset_video(v, c);
        worst_offset = std::max(worst_offset, std::fabs(dm_feature(shifted, other, n) - base));
        worst_offset = std::max(worst_offset, std::fabs(dm_feature(other, shifted, n) - base));
        worst_offset = std::max(worst_offset, dm_feature(v, shifted, n));
      }
    }
  }
  const bool pass = worst_index <= 1e-9 && worst_dm == 0.0 && worst_offset <= 1e-9;
  return {pass, fmt("%zu fixtures: max |vif/dlm - 1| %.3g, max dm %.3g, offset drift %.3g", fixtures.size(),
                    worst_index, worst_dm, worst_offset)};
}

// ---------------------------------------------------------------------------
// 4. GGD estimator

Outcome ggd() {
  auto sample = [](std::uint64_t seed, auto gen) {
    Rng rng(seed);
    std::vector<double> x(100000);
    for (double& v : x) v = gen(rng);
    return fit_ggd(x).shape;
  };
  const double g = sample(4001, [](Rng& r) { return r.normal(); });
  const double l = sample(4002, [](Rng& r) { return r.laplace(1.0); });
  const double u = sample(4003, [](Rng& r) { return r.uniform(-1, 1); });
  const bool pass = std::fabs(g - 2) <= 0.1 && std::fabs(l - 1) <= 0.1 && u > 4;
  return {pass, fmt("shape gaussian %.4f, laplacian %.4f, uniform %.4f", g, l, u)};
}

// ---------------------------------------------------------------------------
// 5. NN gradient check

Outcome nn_gradients() {
  double worst = 0;
  std::size_t checked = 0;
  for (const std::vector<std::size_t>& arch : {std::vector<std::size_t>{3, 4, 1}, std::vector<std::size_t>{13, 120, 64, 16, 1}}) {
    for (std::uint64_t point = 0; point < 5; ++point) {
      Rng rng(5000 + 10 * arch.size() + point);
      NnModel m = nn_init(arch, rng.next_u64());
      for (auto& layer : m.layers)
        for (double& b : layer.biases) b = rng.normal(0, 0.1);
      Matrix x(4, arch[0]);
      std::vector<double> y(4);
      for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < arch[0]; ++j) x(i, j) = rng.uniform(-0.5, 1.5);
        y[i] = rng.normal();
      }
      const auto grad = nn_gradient(m, x, y);
      for (std::size_t l = 0; l < m.layers.size(); ++l) {
        auto probe = [&](std::size_t index, bool bias, double analytic) {
          const double numeric = oracle::nn_central_difference(m, x, y, l, index, bias, 1e-6L);
          worst = std::max(worst, std::fabs(analytic - numeric) / std::max(1e-7, std::fabs(analytic) + std::fabs(numeric)));
          ++checked;
        };
        for (std::size_t i = 0; i < m.layers[l].weights.size(); ++i) probe(i, false, grad[l].weights[i]);
        for (std::size_t i = 0; i < m.layers[l].biases.size(); ++i) probe(i, true, grad[l].biases[i]);
      }
    }
  }
  return {worst < 1e-4, fmt("3-4-1 and 13-120-64-16-1, 5 points each, %zu parameters: max rel err %.3g (limit 1e-4)",
                            checked, worst)};
}

// ---------------------------------------------------------------------------
// 6/7. Synthetic distortion ladder

struct Ladder {
  Matrix fr{0, 13}, nr{0, 10};
  std::vector<double> mos;
  double fr_seconds = 0, nr_seconds = 0;
};

/// 20 sources, 5 levels each. Even sources get additive Gaussian noise,
/// odd sources Gaussian blur; MOS depends on the level only.
const Ladder& ladder() {
  static const Ladder data = [] {
    const double noise[5] = {0.005, 0.01, 0.02, 0.04, 0.08};
    const double blur[5] = {0.6, 1.0, 1.5, 2.2, 3.2};
    struct Item {
      VideoSequence src, dist;
    };
    std::vector<Item> items;
    std::vector<double> mos;
    for (int s = 0; s < 20; ++s) {
      const auto src = testing::make_source_clip(derive_seed(2024, s), 32, 64, 64);
      for (int level = 0; level < 5; ++level) {
        items.push_back({src, s % 2 ? testing::blur_video(src, blur[level])
                                    : testing::add_noise(src, noise[level], derive_seed(99, s * 5 + level))});
        mos.push_back(5.0 - level);
      }
    }
    Ladder out;
    out.mos = mos;
    std::vector<std::vector<double>> fr(items.size()), nr(items.size());
    auto t0 = std::chrono::steady_clock::now();
    detail::parallel_for(items.size(), 4, [&](std::size_t i) { fr[i] = extract_fr(items[i].src, items[i].dist).values(); });
    auto t1 = std::chrono::steady_clock::now();
    detail::parallel_for(items.size(), 4, [&](std::size_t i) { nr[i] = extract_nr(items[i].dist).values(); });
    auto t2 = std::chrono::steady_clock::now();
    for (auto& r : fr) out.fr.append_row(r);
    for (auto& r : nr) out.nr.append_row(r);
    out.fr_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.nr_seconds = std::chrono::duration<double>(t2 - t1).count();
    return out;
  }();
  return data;
}

Outcome ladder_fr() {
  const auto& d = ladder();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_splits(d.fr, d.mos, RegressorConfig{}, 0.8, 100, 6006);
  const double secs = d.fr_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.median_srcc >= 0.90 && secs < 300,
          fmt("100 videos, 100 sims 80/20 SVR: median SRCC %.4f (>= 0.90), median PCC %.4f, %.1fs", r.median_srcc,
              r.median_pcc, secs)};
}

Outcome ladder_nr() {
  const auto& d = ladder();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_splits(d.nr, d.mos, RegressorConfig{}, 0.8, 100, 7007);
  const double secs = d.nr_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.median_srcc >= 0.75 && secs < 300,
          fmt("100 videos, 100 sims 80/20 SVR: median SRCC %.4f (>= 0.75), median PCC %.4f, %.1fs", r.median_srcc,
              r.median_pcc, secs)};
}

// ---------------------------------------------------------------------------
// 8. Simulation-harness cost

Outcome harness_cost() {
  Rng rng(8008);
  Matrix x(200, 13);
  std::vector<double> mos(200);
  for (std::size_t i = 0; i < 200; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < 13; ++j) {
      x(i, j) = rng.uniform();
      s += std::sin(3.0 * x(i, j) + double(j)) / double(j + 1);
    }
    mos[i] = 3.0 + s + rng.normal(0, 0.1);
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_splits(x, mos, RegressorConfig{}, 0.8, 1000, 8, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {secs <= 60.0 && r.sim_count == 1000,
          fmt("1000 SVR sims on 200x13, single thread: %.2fs (limit 60s), median SRCC %.3f", secs, r.median_srcc)};
}

// ---------------------------------------------------------------------------
// 9. Determinism of the command-line pipeline

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fvq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "fvq %s failed: %s", args[1].c_str(), err.str().c_str());
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "fvq_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string fr = "reference,processed,mos\n", nr = fr;
  for (int s = 0; s < 4; ++s) {
    const auto src = testing::make_source_clip(9000 + s, 5, 48, 48);
    const std::string ref = "src" + std::to_string(s) + ".y4m";
    write_y4m_file(dir / ref, src);
    for (int level = 0; level < 4; ++level) {
      const std::string p = "d" + std::to_string(s) + "_" + std::to_string(level) + ".y4m";
      write_y4m_file(dir / p, testing::add_noise(testing::blur_video(src, 0.5 + 0.5 * level), 0.01 * level, 31 * s + level));
      fr += ref + "," + p + "," + std::to_string(5 - level) + "\n";
      nr += "," + p + "," + std::to_string(5 - level) + "\n";
    }
  }
  std::ofstream(dir / "fr.csv") << fr;
  std::ofstream(dir / "nr.csv") << nr;
  std::ofstream(dir / "nn.json") << R"({"mode": "fr", "regressor": "nn", "nn_epochs": 50, "sims": 3, "split_ratio": 0.75})";

  std::vector<std::string> files;
  auto run_all = [&](const std::string& tag) {
    const auto p = [&](const std::string& name) { return (dir / (tag + "_" + name)).string(); };
    bool ok = true;
    ok &= cli({"extract", "--manifest", (dir / "fr.csv").string(), "-o", p("fr_features.csv"), "--threads", tag == "a" ? "1" : "4"}) == 0;
    ok &= cli({"extract", "--mode", "nr", "--manifest", (dir / "nr.csv").string(), "-o", p("nr_features.csv")}) == 0;
    ok &= cli({"train", "--features", p("fr_features.csv"), "--manifest", (dir / "fr.csv").string(), "--model",
               p("svr_model.json"), "--report", p("svr_train.json"), "--seed", "5"}) == 0;
    ok &= cli({"train", "--config", (dir / "nn.json").string(), "--features", p("fr_features.csv"), "--manifest",
               (dir / "fr.csv").string(), "--model", p("nn_model.json"), "--report", p("nn_train.json"), "--seed", "5"}) == 0;
    ok &= cli({"predict", "--model", p("svr_model.json"), "--features", p("fr_features.csv"), "-o", p("scores.csv")}) == 0;
    ok &= cli({"evaluate", "--features", p("fr_features.csv"), "--manifest", (dir / "fr.csv").string(), "--sims", "25",
               "--seed", "9", "--report", p("svr_eval.json"), "--table", p("svr_eval.txt")}) == 0;
    ok &= cli({"evaluate", "--mode", "nr", "--features", p("nr_features.csv"), "--manifest", (dir / "nr.csv").string(),
               "--sims", "25", "--seed", "9", "--report", p("nr_eval.json")}) == 0;
    ok &= cli({"evaluate", "--config", (dir / "nn.json").string(), "--features", p("fr_features.csv"), "--manifest",
               (dir / "fr.csv").string(), "--report", p("nn_eval.json")}) == 0;
    ok &= cli({"rank-features", "--features", p("fr_features.csv"), "--manifest", (dir / "fr.csv").string(), "--top", "5",
               "-o", p("rank.csv"), "--selected", p("top5.csv")}) == 0;
    return ok;
  };
  const bool ran = run_all("a") && run_all("b");
  int same = 0, total = 0;
  std::string diff;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("a_", 0) != 0) continue;
    ++total;
    if (slurp(entry.path()) == slurp(dir / ("b_" + name.substr(2)))) ++same;
    else diff += " " + name.substr(2);
  }
  return {ran && total == 13 && same == total,
          fmt("%d/%d output files byte-identical across two runs%s%s", same, total, ran ? "" : " (a command failed)",
              diff.empty() ? "" : (" differing:" + diff).c_str())};
}

// ---------------------------------------------------------------------------
// 10. SVR solver vs. dense QP oracle

Outcome svr_qp() {
  Rng rng(1010);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + rng.below(11);
    const std::size_t d = 1 + rng.below(5);
    Matrix x(n, d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform();
      y[i] = rng.uniform(-2, 2);
    }
    const SvrParams p{rng.uniform(0.1, 20), rng.uniform(0.05, 5), rng.uniform(0.01, 0.3)};
    const double smo = svr_solve(x, y, p).objective;
    const double qp = oracle::svr_dual_qp(x, y, p).objective;
    worst = std::max(worst, std::fabs(smo - qp));
  }
  return {worst <= 1e-3, fmt("20 problems (n <= 15): max |objective diff| %.3g (limit 1e-3)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"correlation oracle equivalence", correlation_oracle},
      {"SAD / motion / DM oracle equivalence", motion_oracle},
      {"identity sanity", identity},
      {"GGD estimator", ggd},
      {"NN gradient check", nn_gradients},
      {"FR distortion ladder", ladder_fr},
      {"NR distortion ladder", ladder_nr},
      {"simulation harness cost", harness_cost},
      {"pipeline determinism", determinism},
      {"SVR solver vs QP oracle", svr_qp},
  };
  const double budget[10] = {5, 5, 60, 10, 60, 300, 300, 60, 120, 60};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= budget[i];
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s [%2d] %s: %s; %.2fs (limit %gs)\n", pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), secs, budget[i]);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
