#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fvq/error.hpp"
#include "fvq/evaluation.hpp"
#include "fvq/regression.hpp"
#include "fvq/rng.hpp"

namespace fvq {
namespace {

constexpr double kTau = 1e-12;
// Selection values this close count as tied; the lower index wins.
constexpr double kTieBand = 1e-10;

bool clearly_greater(double a, double b) {
  return a - b > kTieBand * std::max({1.0, std::abs(a), std::abs(b)});
}

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return std::exp(-gamma * d);
}

// Kernel rows are computed on first use and kept.
class KernelCache {
 public:
  KernelCache(const Matrix& rows, double gamma) : rows_(rows), gamma_(gamma), cache_(rows.rows()) {}

  const std::vector<double>& row(std::size_t i) {
    auto& r = cache_[i];
    if (r.empty()) {
      r.resize(rows_.rows());
      for (std::size_t j = 0; j < rows_.rows(); ++j) r[j] = rbf(rows_.row(i), rows_.row(j), gamma_);
    }
    return r;
  }

 private:
  const Matrix& rows_;
  double gamma_;
  std::vector<std::vector<double>> cache_;
};

std::vector<std::size_t> canonical_order(const Matrix& rows, std::span<const double> targets) {
  std::vector<std::size_t> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto ra = rows.row(a);
    auto rb = rows.row(b);
    for (std::size_t c = 0; c < ra.size(); ++c) {
      if (ra[c] != rb[c]) return ra[c] < rb[c];
    }
    return targets[a] < targets[b];
  });
  return order;
}

void check_svr_inputs(const Matrix& rows, std::span<const double> targets, const SvrParams& p) {
  if (rows.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "SVR rows and targets differ in count");
  }
  if (rows.rows() < 4) throw Error(ErrorCode::TooFewRows, "SVR needs at least 4 rows");
  if (!(p.c > 0.0) || !(p.gamma > 0.0) || !(p.epsilon >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "SVR needs C > 0, gamma > 0, epsilon >= 0");
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite SVR target");
  }
}

}  // namespace

SvrSolution svr_solve(const Matrix& rows, std::span<const double> targets, const SvrParams& params,
                      double tolerance) {
  check_svr_inputs(rows, targets, params);
  const std::size_t n = rows.rows();

  SvrSolution out;
  out.coefs.assign(n, 0.0);
  out.model.params = params;
  out.model.support_vectors = Matrix(0, rows.cols());

  if (std::all_of(targets.begin(), targets.end(), [&](double t) { return t == targets[0]; })) {
    out.model.bias = targets[0];
    return out;
  }

  const auto order = canonical_order(rows, targets);
  const Matrix sorted = rows.select_rows(order);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = targets[order[i]];

  // Variables 0..n-1 are alpha (y=+1), n..2n-1 are alpha* (y=-1).
  const std::size_t m = 2 * n;
  const double c = params.c;
  std::vector<double> alpha(m, 0.0);
  std::vector<double> grad(m);
  std::vector<signed char> y(m);
  for (std::size_t t = 0; t < n; ++t) {
    y[t] = 1;
    y[t + n] = -1;
    grad[t] = params.epsilon - z[t];
    grad[t + n] = params.epsilon + z[t];
  }
  KernelCache kernel(sorted, params.gamma);
  auto in_up = [&](std::size_t t) { return y[t] > 0 ? alpha[t] < c : alpha[t] > 0.0; };
  auto in_low = [&](std::size_t t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c; };

  const std::size_t max_iter = std::max<std::size_t>(10'000'000, 100 * m);
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = m, j = m;
    for (std::size_t t = 0; t < m; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && (i == m || clearly_greater(v, gmax))) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && (j == m || clearly_greater(gmin, v))) {
        gmin = v;
        j = t;
      }
    }
    if (i == m || j == m || gmax - gmin < tolerance) break;

    const auto& ki = kernel.row(i % n);
    const auto& kj = kernel.row(j % n);
    const double qii = ki[i % n];
    const double qjj = kj[j % n];
    const double qij = y[i] * y[j] * ki[j % n];
    const double old_i = alpha[i];
    const double old_j = alpha[j];

    if (y[i] != y[j]) {
      const double quad = std::max(qii + qjj + 2.0 * qij, kTau);
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double quad = std::max(qii + qjj - 2.0 * qij, kTau);
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t r = t % n;
      grad[t] += y[t] * (y[i] * ki[r] * di + y[j] * kj[r] * dj);
    }
  }
  out.iterations = iter;

  // Bias from free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const double yg = y[t] * grad[t];
    const bool at_upper = alpha[t] >= c;
    const bool at_lower = alpha[t] <= 0.0;
    if (at_upper) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  out.model.bias = -rho;

  // Objective 1/2 a'Qa + p'a = 1/2 sum a_t (grad_t + p_t).
  double objective = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const double p = t < n ? params.epsilon - z[t] : params.epsilon + z[t - n];
    objective += alpha[t] * (grad[t] + p);
  }
  out.objective = objective / 2.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double beta = alpha[k] - alpha[k + n];
    out.coefs[order[k]] = beta;
    if (beta != 0.0) {
      out.model.support_vectors.append_row(sorted.row(k));
      out.model.dual_coefs.push_back(beta);
    }
  }
  return out;
}

SvrModel svr_train(const Matrix& rows, std::span<const double> targets, const SvrParams& params) {
  return svr_solve(rows, targets, params).model;
}

double svr_predict(const SvrModel& model, std::span<const double> row) {
  if (!model.dual_coefs.empty() && row.size() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "SVR input has " + std::to_string(row.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.input_dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < model.dual_coefs.size(); ++i) {
    sum += model.dual_coefs[i] * rbf(row, model.support_vectors.row(i), model.params.gamma);
  }
  return sum + model.bias;
}

std::vector<double> svr_predict(const SvrModel& model, const Matrix& rows) {
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = svr_predict(model, rows.row(r));
  return out;
}

GridSearchResult svr_grid_search(const Matrix& rows, std::span<const double> targets,
                                 const SvrGrid& grid, int folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "grid search needs at least 2 folds");
  if (grid.c.empty() || grid.gamma.empty() || grid.epsilon.empty()) {
    throw Error(ErrorCode::InvalidArgument, "grid search needs a non-empty grid");
  }
  if (rows.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "grid search rows and targets differ in count");
  }
  const std::size_t n = rows.rows();
  if (n < static_cast<std::size_t>(folds)) {
    throw Error(ErrorCode::TooFewRows, "fewer rows than folds");
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));

  struct Fold {
    Matrix train;
    std::vector<double> train_targets;
    Matrix test;
    std::vector<std::size_t> test_index;
  };
  std::vector<Fold> fold_data(folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t p = 0; p < n; ++p) {
      (static_cast<int>(p % folds) == f ? test_idx : train_idx).push_back(perm[p]);
    }
    Fold& fd = fold_data[f];
    const Matrix raw_train = rows.select_rows(train_idx);
    const NormalizationStats stats = normalize_fit(raw_train);
    fd.train = normalize_apply(stats, raw_train);
    for (std::size_t i : train_idx) fd.train_targets.push_back(targets[i]);
    fd.test = normalize_apply(stats, rows.select_rows(test_idx));
    fd.test_index = std::move(test_idx);
  }

  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto cs = sorted(grid.c);
  const auto gammas = sorted(grid.gamma);
  const auto epsilons = sorted(grid.epsilon);

  GridSearchResult result;
  bool have_best = false;
  for (double c : cs) {
    for (double gamma : gammas) {
      for (double eps : epsilons) {
        const SvrParams params{c, gamma, eps};
        std::vector<double> predictions(n);
        for (const Fold& fd : fold_data) {
          const SvrModel model = svr_train(fd.train, fd.train_targets, params);
          for (std::size_t i = 0; i < fd.test_index.size(); ++i) {
            predictions[fd.test_index[i]] = svr_predict(model, fd.test.row(i));
          }
        }
        const double score = srcc_or_zero(predictions, targets);
        result.scores.push_back({params, score});
        if (!have_best || score > result.cv_srcc) {
          result.best = params;
          result.cv_srcc = score;
          have_best = true;
        }
      }
    }
  }
  return result;
}

}  // namespace fvq
