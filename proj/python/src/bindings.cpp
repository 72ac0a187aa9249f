#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "fvq/error.hpp"
#include "fvq/evaluation.hpp"
#include "fvq/fr_features.hpp"
#include "fvq/nr_features.hpp"
#include "fvq/regression.hpp"
#include "fvq/video_io.hpp"

namespace py = pybind11;
using namespace fvq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

/// (frames, height, width) array -> sequence.
VideoSequence to_video(const Array& a, int bit_depth) {
  if (a.ndim() != 3) throw Error(ErrorCode::InvalidArgument, "video must have shape (frames, height, width)");
  const auto k = a.shape(0), h = a.shape(1), w = a.shape(2);
  std::vector<Frame> frames;
  frames.reserve(k);
  for (py::ssize_t i = 0; i < k; ++i) {
    const double* p = a.data() + i * h * w;
    frames.emplace_back(int(w), int(h), std::vector<double>(p, p + h * w));
  }
  return VideoSequence(std::move(frames), 25.0, bit_depth);
}

Array from_video(const VideoSequence& v) {
  Array out({py::ssize_t(v.frame_count()), py::ssize_t(v.height()), py::ssize_t(v.width())});
  double* p = out.mutable_data();
  for (const auto& f : v.frames()) {
    std::memcpy(p, f.samples().data(), f.size() * sizeof(double));
    p += f.size();
  }
  return out;
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::InvalidArgument, "features must be a 2-D array");
  Matrix m(a.shape(0), a.shape(1));
  for (py::ssize_t r = 0; r < a.shape(0); ++r) std::memcpy(m.row(r).data(), a.data() + r * a.shape(1), a.shape(1) * sizeof(double));
  return m;
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::InvalidArgument, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

py::dict named(const std::vector<std::string>& names, const std::vector<double>& values) {
  py::dict d;
  for (std::size_t i = 0; i < names.size(); ++i) d[py::str(names[i])] = values[i];
  return d;
}

RegressorConfig regressor_config(const std::string& kind, double c, double gamma, double epsilon, std::size_t epochs,
                                 std::size_t input_dim) {
  RegressorConfig cfg;
  if (kind == "svr") {
    cfg.kind = ModelKind::Svr;
  } else if (kind == "nn") {
    cfg.kind = ModelKind::Nn;
    cfg.nn_layers.front() = input_dim;
  } else {
    throw Error(ErrorCode::InvalidArgument, "regressor must be 'svr' or 'nn'");
  }
  cfg.svr = SvrParams{c, gamma, epsilon};
  cfg.nn.epochs = epochs;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Full- and no-reference video quality features and regressors";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("read_y4m", [](const std::string& path) { return from_video(read_y4m_file(path)); }, py::arg("path"),
        "Luma planes of a Y4M file as a (frames, height, width) array in [0, 1].");
  m.def(
      "read_raw",
      [](const std::string& path, int width, int height, int bit_depth) {
        return from_video(read_raw_yuv_file(path, RawFormat{width, height, bit_depth}));
      },
      py::arg("path"), py::arg("width"), py::arg("height"), py::arg("bit_depth") = 8);
  m.def(
      "write_y4m",
      [](const std::string& path, const Array& video, int bit_depth) {
        write_y4m_file(path, to_video(video, bit_depth));
      },
      py::arg("path"), py::arg("video"), py::arg("bit_depth") = 8);

  m.def("fr_feature_names", &FrFeatureVector::names, py::arg("dm_l2") = true);
  m.def("nr_feature_names", &NrFeatureVector::names);
  m.def(
      "extract_fr",
      [](const Array& original, const Array& processed, bool dm_l2, int threads) {
        const auto f = extract_fr(to_video(original, 8), to_video(processed, 8), FrFeatureConfig{dm_l2, threads});
        return named(FrFeatureVector::names(dm_l2), f.values());
      },
      py::arg("original"), py::arg("processed"), py::arg("dm_l2") = true, py::arg("threads") = 1);
  m.def(
      "extract_nr",
      [](const Array& processed) { return named(NrFeatureVector::names(), extract_nr(to_video(processed, 8)).values()); },
      py::arg("processed"));
  m.def(
      "fit_ggd",
      [](const Array& samples) {
        const auto v = to_vector(samples);
        const auto g = fit_ggd(v);
        return py::make_tuple(g.shape, g.scale);
      },
      py::arg("samples"), "Generalized Gaussian (shape, scale) by moment matching.");

  m.def("pcc", [](const Array& x, const Array& y) { return pcc(to_vector(x), to_vector(y)); });
  m.def("srcc", [](const Array& x, const Array& y) { return srcc(to_vector(x), to_vector(y)); });

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("kind", [](const TrainedModel& t) { return to_string(t.kind); })
      .def_readonly("feature_names", &TrainedModel::feature_names)
      .def("predict",
           [](const TrainedModel& t, const Array& rows) {
             const Matrix x = to_matrix(rows);
             std::vector<double> out(x.rows());
             for (std::size_t r = 0; r < x.rows(); ++r) out[r] = t.predict(x.row(r));
             return out;
           })
      .def("save", [](const TrainedModel& t, const std::string& path) { model_save_file(t, path); })
      .def_static("load", [](const std::string& path) { return model_load_file(path); });

  m.def(
      "train",
      [](const Array& features, const Array& mos, std::vector<std::string> names, const std::string& regressor,
         std::uint64_t seed, double c, double gamma, double epsilon, std::size_t epochs) {
        const Matrix x = to_matrix(features);
        if (names.empty())
          for (std::size_t j = 0; j < x.cols(); ++j) names.push_back("f" + std::to_string(j));
        const auto cfg = regressor_config(regressor, c, gamma, epsilon, epochs, x.cols());
        return fit_model(x, to_vector(mos), std::move(names), cfg, seed).model;
      },
      py::arg("features"), py::arg("mos"), py::arg("feature_names") = std::vector<std::string>{},
      py::arg("regressor") = "svr", py::arg("seed") = 0, py::arg("C") = SvrParams{}.c,
      py::arg("gamma") = SvrParams{}.gamma, py::arg("epsilon") = SvrParams{}.epsilon,
      py::arg("epochs") = NnHyper{}.epochs);

  m.def(
      "run_splits",
      [](const Array& features, const Array& mos, const std::string& regressor, double split_ratio, std::size_t sims,
         std::uint64_t seed, int threads, std::size_t epochs) {
        const Matrix x = to_matrix(features);
        const auto cfg = regressor_config(regressor, SvrParams{}.c, SvrParams{}.gamma, SvrParams{}.epsilon, epochs, x.cols());
        const auto r = run_splits(x, to_vector(mos), cfg, split_ratio, sims, seed, threads);
        py::dict d;
        d["median_pcc"] = r.median_pcc;
        d["median_srcc"] = r.median_srcc;
        d["mean_pcc"] = r.mean_pcc;
        d["mean_srcc"] = r.mean_srcc;
        std::vector<double> p, s;
        for (const auto& sp : r.splits) p.push_back(sp.pcc), s.push_back(sp.srcc);
        d["pcc"] = p;
        d["srcc"] = s;
        return d;
      },
      py::arg("features"), py::arg("mos"), py::arg("regressor") = "svr", py::arg("split_ratio") = 0.8,
      py::arg("sims") = 1000, py::arg("seed") = 0, py::arg("threads") = 1, py::arg("epochs") = NnHyper{}.epochs);
}
