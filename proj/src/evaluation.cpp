#include "fvq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "fvq/detail/parallel.hpp"
#include "fvq/error.hpp"
#include "fvq/rng.hpp"
#include "json.hpp"

namespace fvq {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "correlation inputs have lengths " +
                                               std::to_string(x.size()) + " and " +
                                               std::to_string(y.size()));
  }
  if (x.size() < 3) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 3 values");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<std::string> placeholder_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = "f" + std::to_string(i);
  return names;
}

}  // namespace

std::vector<double> rank(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    // Positions i..j-1 hold equal values; ranks are 1-based.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double pcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorCode::ZeroVariance, "correlation input has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double srcc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  return pcc(rank(x), rank(y));
}

double pcc_or_zero(std::span<const double> x, std::span<const double> y) {
  try {
    return pcc(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance) return 0.0;
    throw;
  }
}

double srcc_or_zero(std::span<const double> x, std::span<const double> y) {
  try {
    return srcc(x, y);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroVariance) return 0.0;
    throw;
  }
}

std::size_t train_count(std::size_t n, double split_ratio) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * split_ratio));
}

SplitResult run_single_split(const Matrix& features, std::span<const double> mos,
                             const RegressorConfig& regressor, double split_ratio,
                             std::uint64_t split_seed) {
  if (features.rows() != mos.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and MOS values differ in count");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "split ratio must lie in (0, 1)");
  }
  const std::size_t n = features.rows();
  const std::size_t n_train = train_count(n, split_ratio);
  if (n_train > n || n - n_train < 3) {
    throw Error(ErrorCode::TooFewEntries, "test split would hold fewer than 3 rows");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(split_seed);
  rng.shuffle(std::span<std::size_t>(perm));
  const std::span<const std::size_t> train_idx(perm.data(), n_train);
  const std::span<const std::size_t> test_idx(perm.data() + n_train, n - n_train);

  std::vector<double> train_mos, test_mos;
  for (std::size_t i : train_idx) train_mos.push_back(mos[i]);
  for (std::size_t i : test_idx) test_mos.push_back(mos[i]);

  const FitResult fit = fit_model(features.select_rows(train_idx), train_mos,
                                  placeholder_names(features.cols()), regressor, derive_seed(split_seed, 1));
  const Matrix test = features.select_rows(test_idx);
  std::vector<double> predictions(test.rows());
  for (std::size_t r = 0; r < test.rows(); ++r) predictions[r] = fit.model.predict(test.row(r));

  SplitResult out;
  out.seed = split_seed;
  out.n_train = n_train;
  out.n_test = test.rows();
  out.pcc = pcc_or_zero(predictions, test_mos);
  out.srcc = srcc_or_zero(predictions, test_mos);
  return out;
}

EvaluationReport run_splits(const Matrix& features, std::span<const double> mos,
                            const RegressorConfig& regressor, double split_ratio, std::size_t sims,
                            std::uint64_t seed, int threads) {
  if (features.rows() != mos.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and MOS values differ in count");
  }
  if (features.rows() < 10) {
    throw Error(ErrorCode::TooFewEntries, "split protocol needs at least 10 entries, got " +
                                              std::to_string(features.rows()));
  }
  if (sims == 0) throw Error(ErrorCode::InvalidArgument, "sims must be at least 1");

  EvaluationReport report;
  report.regressor = to_string(regressor.kind);
  report.seed = seed;
  report.split_ratio = split_ratio;
  report.sim_count = sims;
  report.splits.resize(sims);
  detail::parallel_for(sims, threads, [&](std::size_t i) {
    report.splits[i] = run_single_split(features, mos, regressor, split_ratio, derive_seed(seed, i));
  });

  std::vector<double> p, s;
  for (const SplitResult& r : report.splits) {
    p.push_back(r.pcc);
    s.push_back(r.srcc);
  }
  report.median_pcc = median(p);
  report.median_srcc = median(s);
  report.mean_pcc = mean(p);
  report.mean_srcc = mean(s);
  return report;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::json per_sim{{"seed", nlohmann::json::array()},
                         {"n_train", nlohmann::json::array()},
                         {"n_test", nlohmann::json::array()},
                         {"pcc", nlohmann::json::array()},
                         {"srcc", nlohmann::json::array()}};
  for (const SplitResult& r : report.splits) {
    per_sim["seed"].push_back(r.seed);
    per_sim["n_train"].push_back(r.n_train);
    per_sim["n_test"].push_back(r.n_test);
    per_sim["pcc"].push_back(r.pcc);
    per_sim["srcc"].push_back(r.srcc);
  }
  nlohmann::json j{{"regressor", report.regressor},
                   {"seed", report.seed},
                   {"split_ratio", report.split_ratio},
                   {"sim_count", report.sim_count},
                   {"aggregate",
                    {{"median_pcc", report.median_pcc},
                     {"median_srcc", report.median_srcc},
                     {"mean_pcc", report.mean_pcc},
                     {"mean_srcc", report.mean_srcc}}},
                   {"per_sim", std::move(per_sim)}};
  return j.dump(1) + "\n";
}

std::string report_to_table(const EvaluationReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "regressor " << report.regressor << "  sims " << report.sim_count << "  split "
      << report.split_ratio << "  seed " << report.seed << "\n";
  out << "           PCC      SRCC\n";
  out << "median  " << std::setw(8) << report.median_pcc << "  " << std::setw(8) << report.median_srcc << "\n";
  out << "mean    " << std::setw(8) << report.mean_pcc << "  " << std::setw(8) << report.mean_srcc << "\n";
  out << "\n  sim  train  test       PCC      SRCC\n";
  for (std::size_t i = 0; i < report.splits.size(); ++i) {
    const SplitResult& r = report.splits[i];
    out << std::setw(5) << i << std::setw(7) << r.n_train << std::setw(6) << r.n_test << "  "
        << std::setw(8) << r.pcc << "  " << std::setw(8) << r.srcc << "\n";
  }
  return out.str();
}

std::vector<FeatureCorrelation> feature_correlation_report(const Matrix& features,
                                                           std::span<const double> mos,
                                                           const std::vector<std::string>& names) {
  if (features.rows() != mos.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature rows and MOS values differ in count");
  }
  if (features.rows() < 3) throw Error(ErrorCode::TooFewRows, "ranking needs at least 3 rows");
  if (names.size() != features.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match columns");
  }
  std::vector<FeatureCorrelation> out;
  for (std::size_t c = 0; c < features.cols(); ++c) {
    const auto column = features.column(c);
    FeatureCorrelation fc;
    fc.name = names[c];
    try {
      fc.pcc = pcc(column, mos);
      fc.srcc = srcc(column, mos);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
      fc.pcc = fc.srcc = 0.0;
      fc.zero_variance = true;
    }
    fc.mean_abs = 0.5 * (std::abs(fc.pcc) + std::abs(fc.srcc));
    out.push_back(std::move(fc));
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureCorrelation& a, const FeatureCorrelation& b) {
    return a.mean_abs > b.mean_abs;
  });
  return out;
}

}  // namespace fvq
