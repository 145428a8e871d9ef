#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>

#include "sig2d/dataset.hpp"
#include "sig2d/forest.hpp"
#include "sig2d/image_io.hpp"
#include "sig2d/parallel.hpp"
#include "sig2d/pca.hpp"
#include "sig2d/sigcore.hpp"
#include "sig2d/symmetry.hpp"

namespace py = pybind11;
using namespace sig2d;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using WindowTuple = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

// (H, W) arrays become single-channel fields.
ImageField to_field(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("image must be (H, W) or (H, W, C)");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  const std::size_t d = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : 1;
  return ImageField(h, w, d, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ImageField& x) {
  Array out({x.height(), x.width(), x.channels()});
  std::copy(x.values().begin(), x.values().end(), out.mutable_data());
  return out;
}

Window window_or_full(const ImageField& x, const std::optional<WindowTuple>& w,
                      DifferenceScheme scheme) {
  if (!w) return full_window(x, scheme);
  const auto [a, b, c, d] = *w;
  return {a, b, c, d};
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("features must be a 2-d array");
  Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

}  // namespace

PYBIND11_MODULE(_sig2d, m) {
  m.doc() = "Discrete 2-d image signatures, D4 symmetrization and texture classification.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IndexError>(m, "WindowError", PyExc_IndexError);
  py::register_exception<MarginError>(m, "MarginError", PyExc_ValueError);
  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::enum_<DifferenceScheme>(m, "Scheme")
      .value("FORWARD", DifferenceScheme::Forward)
      .value("CENTRAL", DifferenceScheme::Central);

  py::enum_<SignatureKind>(m, "Kind")
      .value("BOX", SignatureKind::First12)
      .value("HAT", SignatureKind::FirstHat)
      .value("BOXBOX", SignatureKind::Second1122)
      .value("HATHAT", SignatureKind::SecondHatHat)
      .value("BOXHAT", SignatureKind::SecondMix1Hat)
      .value("HATBOX", SignatureKind::SecondMixHat1);

  py::enum_<D4Element>(m, "D4")
      .value("ID", D4Element::Id)
      .value("ROT90", D4Element::Rot90)
      .value("ROT180", D4Element::Rot180)
      .value("ROT270", D4Element::Rot270)
      .value("FLIP_H", D4Element::FlipH)
      .value("FLIP_V", D4Element::FlipV)
      .value("TRANSPOSE", D4Element::Transpose)
      .value("ANTI_TRANSPOSE", D4Element::AntiTranspose);

  m.def("full_window", [](const Array& img, DifferenceScheme scheme) {
        const Window w = full_window(to_field(img), scheme);
        return WindowTuple{w.row_begin, w.row_end, w.col_begin, w.col_end};
      }, py::arg("image"), py::arg("scheme") = DifferenceScheme::Forward);

  // Windows are (row_begin, row_end, col_begin, col_end) pixel indices.
  m.def("sig_first_12", [](const Array& img, std::size_t channel, std::optional<WindowTuple> w) {
        const ImageField x = to_field(img);
        return sig_first_12(x, channel, window_or_full(x, w, DifferenceScheme::Forward));
      }, py::arg("image"), py::arg("channel") = 0, py::arg("window") = py::none());

  m.def("sig_first_hat", [](const Array& img, std::size_t channel, std::optional<WindowTuple> w,
                            DifferenceScheme scheme) {
        const ImageField x = to_field(img);
        return sig_first_hat(x, channel, window_or_full(x, w, scheme), scheme);
      }, py::arg("image"), py::arg("channel") = 0, py::arg("window") = py::none(),
      py::arg("scheme") = DifferenceScheme::Forward);

  m.def("sig_second", [](const Array& img, SignatureKind kind, std::size_t inner, std::size_t outer,
                         std::optional<WindowTuple> w, DifferenceScheme scheme, bool brute_force) {
        const ImageField x = to_field(img);
        const Window win = window_or_full(x, w, scheme);
        return brute_force ? brute_force_second(x, kind, inner, outer, win, scheme)
                           : sig_second(x, kind, inner, outer, win, scheme);
      }, py::arg("image"), py::arg("kind"), py::arg("inner_channel") = 0,
      py::arg("outer_channel") = 0, py::arg("window") = py::none(),
      py::arg("scheme") = DifferenceScheme::Forward, py::arg("brute_force") = false);

  // Returned as (6, C): rows follow the Kind enum order.
  m.def("signature_vector", [](const Array& img, std::optional<WindowTuple> w,
                               DifferenceScheme scheme, bool symmetrize) {
        const ImageField x = to_field(img);
        const SignatureVector v = symmetrize ? symmetrized_signature(x, scheme)
                                             : signature_vector(x, window_or_full(x, w, scheme), scheme);
        Array out({std::size_t{6}, v.channels});
        std::copy(v.entries.begin(), v.entries.end(), out.mutable_data());
        return out;
      }, py::arg("image"), py::arg("window") = py::none(),
      py::arg("scheme") = DifferenceScheme::Forward, py::arg("symmetrize") = false);

  m.def("apply_d4", [](const Array& img, D4Element g) { return to_array(apply_d4(to_field(img), g)); },
        py::arg("image"), py::arg("element"));
  m.def("compose", &compose, py::arg("second"), py::arg("first"));
  m.def("inverse", &inverse);

  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("mean", &PcaModel::mean)
      .def_readonly("components", &PcaModel::components)
      .def_readonly("explained_variance_ratio", &PcaModel::explained_variance_ratio)
      .def_readonly("rank_deficient", &PcaModel::rank_deficient)
      .def_property_readonly("n_components", &PcaModel::n_components)
      .def("transform", [](const PcaModel& p, const Array& img) { return pca_transform(p, to_field(img)); })
      .def("reconstruct", [](const PcaModel& p, const std::vector<double>& c) {
        return to_array(pca_reconstruct(p, c));
      })
      .def("to_json", &pca_to_json)
      .def_static("from_json", &pca_from_json);

  m.def("pca_fit", [](const std::vector<Array>& images, std::size_t n) {
        std::vector<ImageField> fields;
        for (const auto& a : images) fields.push_back(to_field(a));
        return pca_fit(fields, n);
      }, py::arg("images"), py::arg("n_components"));

  py::class_<ForestModel>(m, "Forest")
      .def_readonly("classes", &ForestModel::classes)
      .def_readonly("feature_names", &ForestModel::feature_names)
      .def_property_readonly("n_trees", [](const ForestModel& f) { return f.trees.size(); })
      .def("predict", [](const ForestModel& f, const Array& x) {
        const Matrix q = to_matrix(x);
        py::gil_scoped_release release;
        return predict_batch(f, q).labels;
      })
      .def("predict_proba", [](const ForestModel& f, const Array& x) {
        const Matrix q = to_matrix(x);
        py::gil_scoped_release release;
        return predict_batch(f, q).vote_fractions;
      })
      .def("to_json", &forest_to_json)
      .def_static("from_json", &forest_from_json);

  m.def("train_forest", [](const Array& x, const std::vector<std::size_t>& labels,
                           std::vector<std::string> classes, std::size_t n_trees,
                           std::optional<std::size_t> max_depth, std::size_t min_leaf,
                           std::optional<std::size_t> mtry, std::uint64_t seed) {
        const Matrix f = to_matrix(x);
        ForestParams p{n_trees, max_depth, min_leaf, mtry, seed};
        py::gil_scoped_release release;
        return train_forest(f, labels, std::move(classes), p);
      }, py::arg("features"), py::arg("labels"), py::arg("classes"), py::arg("n_trees") = 100,
      py::arg("max_depth") = py::none(), py::arg("min_leaf") = 1, py::arg("mtry") = py::none(),
      py::arg("seed") = 0);

  m.def("synth_textures", [](std::size_t n, std::size_t size, std::uint64_t seed) {
        py::dict out;
        for (const auto& s : synth_textures(n, size, seed)) out[py::str(s.name)] = to_array(s.sheet);
        return out;
      }, py::arg("n_classes"), py::arg("sheet_size") = 256, py::arg("seed") = 1);

  m.def("sample_patches", [](const Array& sheet, std::size_t n, std::size_t size, std::uint64_t seed) {
        py::list out;
        for (const auto& p : sample_patches(to_field(sheet), n, size, seed)) out.append(to_array(p));
        return out;
      }, py::arg("sheet"), py::arg("n"), py::arg("size"), py::arg("seed"));

  m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); });
  m.def("save_ppm", [](const Array& img, const std::string& path) { save_ppm(to_field(img), path); });

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("num_threads", &num_threads);
}
