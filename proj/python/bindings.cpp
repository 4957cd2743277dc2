#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "umbramorph/fft_conv.hpp"
#include "umbramorph/io.hpp"
#include "umbramorph/morphology.hpp"
#include "umbramorph/semiring.hpp"
#include "umbramorph/umbra.hpp"

namespace py = pybind11;
namespace um = umbramorph;

using IntInput = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;
using MaskInput = py::array_t<bool, py::array::c_style | py::array::forcecast>;

namespace {

um::IntArray to_array(const IntInput& a, const um::Index& lo) {
  um::Index shape(a.shape(), a.shape() + a.ndim());
  if (lo.size() != shape.size()) throw std::invalid_argument("origin length must equal the array rank");
  return um::IntArray(shape, lo, std::vector<std::int64_t>(a.data(), a.data() + a.size()));
}

py::array_t<std::int64_t> to_numpy(const um::IntArray& a) {
  std::vector<py::ssize_t> shape(a.shape().begin(), a.shape().end());
  py::array_t<std::int64_t> out(shape);
  std::copy(a.data().begin(), a.data().end(), out.mutable_data());
  return out;
}

um::GridFunction image_from(const IntInput& img, std::optional<std::int64_t> tonal_max) {
  um::IntArray v = to_array(img, um::Index(static_cast<std::size_t>(img.ndim()), 0));
  std::int64_t mx = 1;
  for (auto e : v.data()) mx = std::max(mx, e);
  return um::GridFunction(std::move(v), tonal_max.value_or(mx));
}

um::GridFunction se_from(const IntInput& se, std::optional<std::vector<std::int64_t>> origin,
                         std::optional<MaskInput> mask) {
  const auto rank = static_cast<std::size_t>(se.ndim());
  um::Index lo(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const std::int64_t o = origin ? (*origin)[j] : se.shape(static_cast<py::ssize_t>(j)) / 2;
    lo[j] = -o;
  }
  if (origin && origin->size() != rank) throw std::invalid_argument("origin length must equal the SE rank");
  um::IntArray v = to_array(se, lo);
  um::MaskArray d(v.shape(), v.lo(), std::uint8_t{1});
  if (mask) {
    if (mask->size() != v.size()) throw std::invalid_argument("mask shape must match the SE");
    for (std::int64_t i = 0; i < v.size(); ++i) d[i] = mask->data()[i] ? 1 : 0;
  }
  std::int64_t mx = 1;
  for (auto e : v.data()) mx = std::max(mx, e);
  return um::GridFunction(std::move(v), std::move(d), mx);
}

um::MorphMethod method_from(const std::string& m) {
  if (m == "naive") return um::MorphMethod::Naive;
  if (m == "fft") return um::MorphMethod::FftUmbra;
  throw std::invalid_argument("method must be 'naive' or 'fft'");
}

um::MaxPlus maxplus_from(const std::optional<std::int64_t>& v) { return v ? um::MaxPlus(*v) : um::MaxPlus::neg_inf(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact grey-value dilation and erosion through FFT convolution of umbra volumes";

  py::register_exception<um::PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<um::ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "dilate",
      [](const IntInput& image, const IntInput& se, std::optional<std::vector<std::int64_t>> origin,
         std::optional<MaskInput> se_mask, const std::string& method) {
        auto f = image_from(image, std::nullopt);
        auto b = se_from(se, origin, se_mask);
        return to_numpy(um::dilate(f, b, method_from(method)).image.values());
      },
      py::arg("image"), py::arg("se"), py::arg("origin") = py::none(), py::arg("se_mask") = py::none(),
      py::arg("method") = "fft", "Dilate `image` by `se`; output has the image's shape.");

  m.def(
      "erode",
      [](const IntInput& image, const IntInput& se, std::optional<std::vector<std::int64_t>> origin,
         std::optional<MaskInput> se_mask, const std::string& method, std::optional<std::int64_t> tonal_max) {
        auto f = image_from(image, tonal_max);
        auto b = se_from(se, origin, se_mask);
        um::MorphOptions opts;
        opts.tonal_max = tonal_max;
        return to_numpy(um::erode(f, b, method_from(method), opts).image.values());
      },
      py::arg("image"), py::arg("se"), py::arg("origin") = py::none(), py::arg("se_mask") = py::none(),
      py::arg("method") = "fft", py::arg("tonal_max") = py::none());

  auto compound = [&m](const char* name, um::GridFunction (*fn)(const um::GridFunction&, const um::GridFunction&,
                                                               um::MorphMethod)) {
    m.def(
        name,
        [fn](const IntInput& image, const IntInput& se, std::optional<std::vector<std::int64_t>> origin,
             std::optional<MaskInput> se_mask, const std::string& method) {
          return to_numpy(fn(image_from(image, std::nullopt), se_from(se, origin, se_mask), method_from(method)).values());
        },
        py::arg("image"), py::arg("se"), py::arg("origin") = py::none(), py::arg("se_mask") = py::none(),
        py::arg("method") = "fft");
  };
  compound("opening", &um::opening);
  compound("closing", &um::closing);
  compound("beucher_gradient", &um::beucher_gradient);

  m.def(
      "conv_full",
      [](const IntInput& a, const IntInput& b, const std::string& backend) {
        const um::Index lo(static_cast<std::size_t>(a.ndim()), 0);
        const auto ca = to_array(a, lo);
        const auto cb = to_array(b, um::Index(static_cast<std::size_t>(b.ndim()), 0));
        const auto be = backend == "direct" ? um::ConvBackend::Direct : um::ConvBackend::Fft;
        return to_numpy(um::conv_full(ca, cb, be));
      },
      py::arg("a"), py::arg("b"), py::arg("backend") = "fft", "Full-mode linear convolution of integer arrays.");

  m.def(
      "umbra",
      [](const IntInput& image, std::int64_t lr) {
        return to_numpy(um::build_umbra(image_from(image, std::nullopt), lr).bits);
      },
      py::arg("image"), py::arg("lr"), "0/1 umbra volume; the tonal axis is appended last.");

  m.def(
      "maxplus_sum_of_products",
      [](const std::vector<std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>>& pairs)
          -> std::optional<std::int64_t> {
        std::vector<std::pair<um::MaxPlus, um::MaxPlus>> p;
        for (const auto& [a, b] : pairs) p.emplace_back(maxplus_from(a), maxplus_from(b));
        const auto r = um::maxplus_sum_of_products(p);
        if (r.is_neg_inf()) return std::nullopt;
        return r.value();
      },
      py::arg("pairs"), "max(a_i + b_i) via polynomial degrees; None stands for negative infinity.");

  m.def(
      "read_pgm",
      [](const std::string& path) {
        const auto g = um::read_pgm(path);
        return py::make_tuple(to_numpy(g.values()), g.declared_max());
      },
      py::arg("path"), "Returns (pixels, maxval).");
}
