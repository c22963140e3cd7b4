#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstring>
#include <optional>

#include "ed4/assignment.hpp"
#include "ed4/clockmix.hpp"
#include "ed4/error.hpp"
#include "ed4/shuffle.hpp"

namespace py = pybind11;
using namespace ed4;

namespace {

using ByteArray = py::array_t<std::uint8_t>;

// H x W x 3 uint8, C-contiguous. Anything else is rejected rather than converted.
Image to_image(const py::array& arr, const char* what) {
  if (!arr.dtype().is(py::dtype::of<std::uint8_t>())) {
    throw DomainError(std::string(what) + ": expected dtype uint8");
  }
  if (arr.ndim() != 3 || arr.shape(2) != 3) {
    throw DomainError(std::string(what) + ": expected shape (H, W, 3)");
  }
  if (!(arr.flags() & py::array::c_style)) {
    throw DomainError(std::string(what) + ": array must be C-contiguous");
  }
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  std::vector<std::uint8_t> data(static_cast<std::size_t>(arr.nbytes()));
  std::memcpy(data.data(), arr.data(), data.size());
  return Image(h, w, std::move(data));
}

ByteArray to_array(const Image& image) {
  ByteArray out({image.height(), image.width(), Image::kChannels});
  std::memcpy(out.mutable_data(), image.data().data(), image.data().size());
  return out;
}

FaceCenter pick_center(const Image& image, std::optional<std::pair<int, int>> center) {
  if (!center) return grid_center({image.height(), image.width()});
  return {center->first, center->second};
}

py::tuple bound_clockmix(const std::vector<py::array>& arrays, const std::vector<int>& labels,
                         std::optional<std::vector<double>> angles, std::optional<double> base,
                         std::optional<std::uint64_t> seed,
                         std::optional<std::pair<int, int>> center) {
  if (arrays.empty()) throw DomainError("bound_clockmix needs at least one image");
  if (labels.size() != arrays.size()) throw DomainError("one label per image is required");
  std::vector<LabeledImage> images;
  for (std::size_t k = 0; k < arrays.size(); ++k) {
    images.push_back({to_image(arrays[k], "images"), labels[k], std::nullopt});
    if (!images[k].pixels.same_shape(images[0].pixels)) throw DomainError("image shapes differ");
  }
  MixRecipe recipe;
  if (angles) {
    recipe.sweep_angles = *angles;
    recipe.rho_base = base.value_or(0.0);
  } else {
    RandomStream rng(seed.value_or(0));
    recipe = sample_recipe(rng, static_cast<int>(images.size()), RecipeSampling{});
    if (base) recipe.rho_base = *base;
  }
  recipe.center = pick_center(images[0].pixels, center);
  LabeledImage out;
  {
    py::gil_scoped_release release;
    out = clockmix_n(images, recipe);
  }
  return py::make_tuple(to_array(out.pixels), out.label);
}

py::tuple bound_clockmix_pair(const py::array& a, const py::array& b, double rho, double base,
                              std::pair<int, int> labels,
                              std::optional<std::pair<int, int>> center) {
  const LabeledImage la{to_image(a, "a"), labels.first, std::nullopt};
  const LabeledImage lb{to_image(b, "b"), labels.second, std::nullopt};
  const LabeledImage out = clockmix_pair(la, lb, rho, base, pick_center(la.pixels, center));
  return py::make_tuple(to_array(out.pixels), out.label);
}

std::vector<int> bound_hungarian(const py::array_t<double, py::array::c_style | py::array::forcecast>& m) {
  if (m.ndim() != 2 || m.shape(0) != m.shape(1)) throw DomainError("score matrix must be square");
  const auto n = static_cast<std::size_t>(m.shape(0));
  SquareMatrix scores(n);
  const double* p = m.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) scores(i, j) = p[i * n + j];
  }
  return hungarian_assign(scores).mapping();
}

GridPermutation to_permutation(const std::vector<int>& mapping) {
  const int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mapping.size()))));
  if (g * g != static_cast<int>(mapping.size())) {
    throw DomainError("permutation length must be a perfect square");
  }
  return GridPermutation(g, mapping);
}

py::tuple bound_random_shuffle(const py::array& image, const std::vector<int>& granularities,
                               std::uint64_t seed) {
  RandomStream rng(seed);
  const ShuffleResult r = random_shuffle(rng, to_image(image, "image"), granularities);
  return py::make_tuple(to_array(r.image), r.permutation.granularity(), r.permutation.mapping());
}

ByteArray bound_apply_permutation(const py::array& image, const std::vector<int>& mapping) {
  return to_array(apply_permutation(to_image(image, "image"), to_permutation(mapping)));
}

}  // namespace

PYBIND11_MODULE(_ed4, m) {
  m.doc() = "ClockMix and patch-shuffle operations on uint8 RGB arrays";

  static py::handle error_type =
      py::exception<Error>(m, "Ed4Error", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("category") = e.category();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("bound_clockmix", &bound_clockmix, py::arg("images"), py::arg("labels"),
        py::arg("angles") = py::none(), py::arg("base") = py::none(), py::arg("seed") = py::none(),
        py::arg("center") = py::none(),
        "Fold of pairwise ClockMix over images. Without angles a recipe is sampled from seed.");
  m.def("clockmix_pair", &bound_clockmix_pair, py::arg("a"), py::arg("b"), py::arg("rho"),
        py::arg("base") = 0.0, py::arg("labels") = std::pair<int, int>{0, 0},
        py::arg("center") = py::none());
  m.def("bound_hungarian", &bound_hungarian, py::arg("m"),
        "Row -> column mapping maximising the total score.");
  m.def("mix_label_hard", [](const std::vector<int>& labels) { return mix_label_hard(labels); },
        py::arg("labels"));
  m.def("random_shuffle", &bound_random_shuffle, py::arg("image"), py::arg("granularities"),
        py::arg("seed"), "Returns (shuffled, granularity, mapping).");
  m.def("apply_permutation", &bound_apply_permutation, py::arg("image"), py::arg("mapping"));
}
