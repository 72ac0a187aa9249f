#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fvq/error.hpp"
#include "fvq/regression.hpp"
#include "fvq/rng.hpp"

namespace fvq {
namespace {

// Pre-activation and activation values of every layer for one input.
struct Trace {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;  // act[0] is the input
};

void forward(const NnModel& model, std::span<const double> row, Trace& trace) {
  const std::size_t nl = model.layers.size();
  trace.pre.resize(nl);
  trace.act.resize(nl + 1);
  trace.act[0].assign(row.begin(), row.end());
  for (std::size_t l = 0; l < nl; ++l) {
    const DenseLayer& layer = model.layers[l];
    const auto& in = trace.act[l];
    auto& z = trace.pre[l];
    auto& a = trace.act[l + 1];
    z.resize(layer.outputs);
    a.resize(layer.outputs);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      double s = layer.biases[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) s += w[i] * in[i];
      z[o] = s;
      a[o] = (l + 1 < nl) ? std::max(s, 0.0) : s;
    }
  }
}

std::vector<DenseLayer> zero_like(const NnModel& model) {
  std::vector<DenseLayer> g;
  g.reserve(model.layers.size());
  for (const DenseLayer& l : model.layers) {
    g.push_back({l.inputs, l.outputs, std::vector<double>(l.weights.size(), 0.0),
                 std::vector<double>(l.biases.size(), 0.0)});
  }
  return g;
}

// Accumulates d(scale * (pred - y)^2)/dparams into grad.
void backward(const NnModel& model, const Trace& trace, double target, double scale,
              std::vector<DenseLayer>& grad, std::vector<std::vector<double>>& delta) {
  const std::size_t nl = model.layers.size();
  delta.resize(nl);
  delta[nl - 1].assign(1, 2.0 * scale * (trace.act[nl][0] - target));
  for (std::size_t l = nl; l-- > 0;) {
    const DenseLayer& layer = model.layers[l];
    const auto& in = trace.act[l];
    const auto& d = delta[l];
    DenseLayer& g = grad[l];
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      g.biases[o] += d[o];
      double* gw = g.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) gw[i] += d[o] * in[i];
    }
    if (l == 0) break;
    auto& prev = delta[l - 1];
    prev.assign(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += w[i] * d[o];
    }
    const auto& z = trace.pre[l - 1];
    for (std::size_t i = 0; i < layer.inputs; ++i) {
      if (z[i] <= 0.0) prev[i] = 0.0;
    }
  }
}

void check_rows(const NnModel& model, const Matrix& rows, std::span<const double> targets) {
  if (rows.rows() != targets.size()) {
    throw Error(ErrorCode::DimensionMismatch, "NN rows and targets differ in count");
  }
  if (rows.cols() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "NN input layer has " +
                                                  std::to_string(model.input_dim()) +
                                                  " units but rows have " +
                                                  std::to_string(rows.cols()) + " features");
  }
}

}  // namespace

std::size_t NnModel::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += l.weights.size() + l.biases.size();
  return n;
}

NnModel nn_init(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2 || layer_sizes.back() != 1 ||
      std::any_of(layer_sizes.begin(), layer_sizes.end(), [](std::size_t s) { return s == 0; })) {
    throw Error(ErrorCode::InvalidArgument,
                "NN layers need at least an input and a single-unit output layer");
  }
  Rng rng(seed);
  NnModel model;
  model.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    DenseLayer layer{layer_sizes[l], layer_sizes[l + 1], {}, {}};
    const double stddev = std::sqrt(2.0 / static_cast<double>(layer.inputs));
    layer.weights.resize(layer.inputs * layer.outputs);
    for (double& w : layer.weights) w = rng.normal(0.0, stddev);
    layer.biases.assign(layer.outputs, 0.0);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

double nn_predict(const NnModel& model, std::span<const double> row) {
  if (row.size() != model.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "NN input has " + std::to_string(row.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.input_dim()));
  }
  Trace trace;
  forward(model, row, trace);
  return trace.act.back()[0];
}

std::vector<double> nn_predict(const NnModel& model, const Matrix& rows) {
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = nn_predict(model, rows.row(r));
  return out;
}

double nn_loss(const NnModel& model, const Matrix& rows, std::span<const double> targets) {
  check_rows(model, rows, targets);
  if (rows.rows() == 0) return 0.0;
  Trace trace;
  double sum = 0.0;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    forward(model, rows.row(r), trace);
    const double e = trace.act.back()[0] - targets[r];
    sum += e * e;
  }
  return sum / static_cast<double>(rows.rows());
}

std::vector<DenseLayer> nn_gradient(const NnModel& model, const Matrix& rows,
                                    std::span<const double> targets) {
  check_rows(model, rows, targets);
  auto grad = zero_like(model);
  if (rows.rows() == 0) return grad;
  const double scale = 1.0 / static_cast<double>(rows.rows());
  Trace trace;
  std::vector<std::vector<double>> delta;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    forward(model, rows.row(r), trace);
    backward(model, trace, targets[r], scale, grad, delta);
  }
  return grad;
}

NnTrainResult nn_train(const Matrix& rows, std::span<const double> targets,
                       const std::vector<std::size_t>& layer_sizes, const NnHyper& hyper) {
  if (layer_sizes.empty() || layer_sizes.front() != rows.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "NN input layer does not match the feature count " + std::to_string(rows.cols()));
  }
  if (rows.rows() == 0) throw Error(ErrorCode::TooFewRows, "NN training needs rows");
  if (hyper.batch == 0 || !(hyper.learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "NN batch and learning rate must be positive");
  }
  Rng rng(hyper.seed);
  NnTrainResult result{nn_init(layer_sizes, rng.next_u64()), {}};
  NnModel& model = result.model;
  check_rows(model, rows, targets);

  auto mean_sq = zero_like(model);
  std::vector<std::size_t> order(rows.rows());
  std::iota(order.begin(), order.end(), 0);

  auto record_loss = [&](std::size_t epoch) {
    const double loss = nn_loss(model, rows, targets);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::NonFiniteLoss,
                  "training loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(loss);
  };
  record_loss(0);

  Trace trace;
  std::vector<std::vector<double>> delta;
  auto grad = zero_like(model);
  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch);
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (DenseLayer& g : grad) {
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.biases.begin(), g.biases.end(), 0.0);
      }
      for (std::size_t k = start; k < stop; ++k) {
        forward(model, rows.row(order[k]), trace);
        backward(model, trace, targets[order[k]], scale, grad, delta);
      }
      auto step = [&](std::vector<double>& param, const std::vector<double>& g,
                      std::vector<double>& v) {
        for (std::size_t i = 0; i < param.size(); ++i) {
          v[i] = hyper.rms_decay * v[i] + (1.0 - hyper.rms_decay) * g[i] * g[i];
          param[i] -= hyper.learning_rate * g[i] / (std::sqrt(v[i]) + hyper.rms_epsilon);
        }
      };
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        step(model.layers[l].weights, grad[l].weights, mean_sq[l].weights);
        step(model.layers[l].biases, grad[l].biases, mean_sq[l].biases);
      }
    }
    record_loss(epoch);
  }
  return result;
}

}  // namespace fvq
