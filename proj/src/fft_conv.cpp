#include "umbramorph/fft_conv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>

namespace umbramorph {

namespace {

// FFTW planning touches global state; execution of distinct plans does not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

std::vector<int> to_int_dims(const Index& shape) {
  std::vector<int> n(shape.size());
  for (std::size_t j = 0; j < shape.size(); ++j) n[j] = static_cast<int>(shape[j]);
  return n;
}

std::size_t real_count(const Index& padded) { return static_cast<std::size_t>(IntArray::count(padded)); }

std::size_t half_count(const Index& padded) {
  Index h = padded;
  h.back() = h.back() / 2 + 1;
  return static_cast<std::size_t>(IntArray::count(h));
}

Index row_major_strides(const Index& shape) {
  Index s(shape.size(), 1);
  for (std::size_t j = shape.size(); j-- > 1;) s[j - 1] = s[j] * shape[j];
  return s;
}

// Calls fn(x) for every index of `box` whose last coordinate is box.back().lo.
template <typename Fn>
void for_each_row(const Box& box, Fn&& fn) {
  Index x(box.size());
  for (std::size_t j = 0; j < box.size(); ++j) x[j] = box[j].lo;
  const std::size_t outer = box.size() - 1;
  while (true) {
    fn(std::as_const(x));
    std::size_t j = outer;
    while (j-- > 0) {
      if (++x[j] <= box[j].hi) break;
      x[j] = box[j].lo;
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

// Copies the sub-box `sub` of `a` into a zeroed padded buffer, mapping sub.lo to 0.
template <typename T>
void embed(const NDArray<T>& a, const Box& sub, const Index& padded, double* buf) {
  std::fill(buf, buf + real_count(padded), 0.0);
  const Index pstride = row_major_strides(padded);
  const std::int64_t run = sub.back().size();
  for_each_row(sub, [&](const Index& x) {
    std::int64_t dst = 0;
    for (std::size_t j = 0; j < x.size(); ++j) dst += (x[j] - sub[j].lo) * pstride[j];
    const T* src = a.data().data() + a.offset(x);
    for (std::int64_t t = 0; t < run; ++t) buf[dst + t] = static_cast<double>(src[t]);
  });
}

Spectrum forward_from(const double* real, const Index& padded) {
  Spectrum s;
  s.padded_shape = padded;
  const auto nc = half_count(padded);
  auto in = fftw_buffer<double>(real_count(padded));
  auto out = fftw_buffer<fftw_complex>(nc);
  PlanHandle plan;
  {
    std::lock_guard lock(planner_mutex());
    auto dims = to_int_dims(padded);
    plan.reset(fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), in.get(), out.get(), FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("fft: planning failed");
  std::copy(real, real + real_count(padded), in.get());
  fftw_execute(plan.get());
  s.bins.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) s.bins[i] = {out[i][0], out[i][1]};
  return s;
}

// Normalised inverse into `real` (length = padded volume). Consumes `s`.
void inverse_into(Spectrum&& s, double* real) {
  const Index& padded = s.padded_shape;
  const auto nc = half_count(padded);
  auto in = fftw_buffer<fftw_complex>(nc);
  PlanHandle plan;
  {
    std::lock_guard lock(planner_mutex());
    auto dims = to_int_dims(padded);
    plan.reset(fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), in.get(), real, FFTW_ESTIMATE));
  }
  if (!plan) throw std::runtime_error("fft: planning failed");
  for (std::size_t i = 0; i < nc; ++i) {
    in[i][0] = s.bins[i].real();
    in[i][1] = s.bins[i].imag();
  }
  s.bins.clear();
  s.bins.shrink_to_fit();
  fftw_execute(plan.get());
  const auto n = real_count(padded);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) real[i] *= scale;
}

std::optional<Box> nonzero_box(const IntArray& a) {
  const std::size_t rank = a.rank();
  Box bb(rank, IndexRange{1, 0});
  bool any = false;
  const Box full = a.box();
  const std::int64_t run = full.back().size();
  for_each_row(full, [&](const Index& x) {
    const std::int64_t* row = a.data().data() + a.offset(x);
    std::int64_t first = -1, last = -1;
    for (std::int64_t t = 0; t < run; ++t) {
      if (row[t] != 0) {
        if (first < 0) first = t;
        last = t;
      }
    }
    if (first < 0) return;
    const std::int64_t lo_last = full.back().lo + first;
    const std::int64_t hi_last = full.back().lo + last;
    if (!any) {
      for (std::size_t j = 0; j + 1 < rank; ++j) bb[j] = {x[j], x[j]};
      bb.back() = {lo_last, hi_last};
      any = true;
      return;
    }
    for (std::size_t j = 0; j + 1 < rank; ++j) {
      bb[j].lo = std::min(bb[j].lo, x[j]);
      bb[j].hi = std::max(bb[j].hi, x[j]);
    }
    bb.back().lo = std::min(bb.back().lo, lo_last);
    bb.back().hi = std::max(bb.back().hi, hi_last);
  });
  if (!any) return std::nullopt;
  return bb;
}

std::int64_t floor_mod(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

Index ConvPlan::origin() const {
  Index o(in_a.size());
  for (std::size_t j = 0; j < o.size(); ++j) o[j] = in_a[j].lo + in_b[j].lo;
  return o;
}

std::int64_t next_fast_size(std::int64_t n) {
  if (n <= 1) return 1;
  for (std::int64_t m = n;; ++m) {
    std::int64_t r = m;
    for (std::int64_t p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

ConvPlan plan_full(const Box& a, const Box& b, ConvBackend backend) {
  ConvPlan plan;
  plan.in_a = a;
  plan.in_b = b;
  plan.out = full_output_range(a, b);
  plan.backend = backend;
  plan.padded_shape.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) plan.padded_shape[j] = next_fast_size(a[j].size() + b[j].size() - 1);
  return plan;
}

ConvPlan plan_window(const Box& a, const Box& b, const Box& window) {
  if (window.size() != a.size()) throw std::invalid_argument("plan_window: rank mismatch");
  ConvPlan plan;
  plan.in_a = a;
  plan.in_b = b;
  plan.out = window;
  plan.backend = ConvBackend::Fft;
  const Box full = full_output_range(a, b);
  plan.padded_shape.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const std::int64_t len = full[j].size();
    const std::int64_t lo = std::max(window[j].lo, full[j].lo);
    const std::int64_t hi = std::min(window[j].hi, full[j].hi);
    std::int64_t need = std::max(a[j].size(), b[j].size());
    if (lo <= hi) {
      // Window occupies [s, s+w) of the full range; no other full-range
      // index may alias onto it modulo the padded length.
      const std::int64_t s = lo - full[j].lo;
      const std::int64_t w = hi - lo + 1;
      need = std::max({need, len - s, s + w});
    }
    plan.padded_shape[j] = next_fast_size(need);
  }
  return plan;
}

double magnitude_bound(const IntArray& a, const IntArray& b) {
  auto stats = [](const IntArray& x) {
    long double mx = 0, sum = 0;
    for (auto v : x.data()) {
      const long double m = v < 0 ? -static_cast<long double>(v) : static_cast<long double>(v);
      mx = std::max(mx, m);
      sum += m;
    }
    return std::pair{mx, sum};
  };
  const auto [ma, sa] = stats(a);
  const auto [mb, sb] = stats(b);
  return static_cast<double>(std::min(ma * sb, mb * sa));
}

Spectrum& Spectrum::operator*=(const Spectrum& other) {
  if (padded_shape != other.padded_shape) throw std::invalid_argument("Spectrum: shape mismatch");
  for (std::size_t i = 0; i < bins.size(); ++i) bins[i] *= other.bins[i];
  return *this;
}

Spectrum transform_forward(const RealArray& a, const ConvPlan& plan) {
  if (a.rank() != plan.padded_shape.size()) throw std::invalid_argument("transform_forward: rank mismatch");
  for (std::size_t j = 0; j < a.rank(); ++j)
    if (a.shape()[j] > plan.padded_shape[j]) throw std::invalid_argument("transform_forward: array exceeds padded shape");
  auto buf = fftw_buffer<double>(real_count(plan.padded_shape));
  embed(a, a.box(), plan.padded_shape, buf.get());
  return forward_from(buf.get(), plan.padded_shape);
}

RealArray transform_inverse(const Spectrum& s, const ConvPlan& plan) {
  if (s.padded_shape != plan.padded_shape) throw std::invalid_argument("transform_inverse: plan mismatch");
  RealArray out(plan.padded_shape, Index(plan.padded_shape.size(), 0));
  Spectrum copy = s;
  inverse_into(std::move(copy), out.data().data());
  return out;
}

IntArray conv_full_direct(const IntArray& a, const IntArray& b) {
  if (a.rank() != b.rank() || a.rank() == 0) throw std::invalid_argument("conv_full_direct: rank mismatch");
  IntArray out(full_output_range(a.box(), b.box()));
  const Index& os = out.strides();
  // Output offset splits into a part from each operand because out.lo = loA + loB.
  auto sparse = [&](const IntArray& x) {
    std::vector<std::pair<std::int64_t, std::int64_t>> nz;
    for (std::int64_t off = 0; off < x.size(); ++off) {
      if (x[off] == 0) continue;
      std::int64_t rem = off, o = 0;
      for (std::size_t j = 0; j < x.rank(); ++j) {
        o += (rem / x.strides()[j]) * os[j];
        rem %= x.strides()[j];
      }
      nz.emplace_back(o, x[off]);
    }
    return nz;
  };
  const auto na = sparse(a);
  const auto nb = sparse(b);
  for (const auto& [oa, va] : na)
    for (const auto& [ob, vb] : nb) out[oa + ob] += va * vb;
  return out;
}

IntArray conv_window_fft(const IntArray& a, const IntArray& b, const Box& window, ConvReport* report) {
  if (a.rank() != b.rank() || a.rank() != window.size() || a.rank() == 0)
    throw std::invalid_argument("conv_fft: rank mismatch");
  if (magnitude_bound(a, b) >= kPrecisionBudget)
    throw PrecisionError("conv_fft: result magnitude may exceed 2^52; use the direct backend");

  IntArray out(window);
  if (report) *report = ConvReport{};
  const auto box_a = nonzero_box(a);
  const auto box_b = nonzero_box(b);
  if (!box_a || !box_b) return out;

  const auto clip = window_clip(*box_a, *box_b, window);
  if (!clip) return out;
  WindowConvolution conv(*box_a, *box_b, window);
  const Index& padded = conv.plan().padded_shape;
  if (report) report->padded_shape = padded;
  const Index& ps = conv.strides();
  const std::size_t last = window.size() - 1;

  auto put = [&](const IntArray& src, const Box& sub, double* buf) {
    const std::int64_t run = sub.back().size();
    for_each_row(sub, [&](const Index& x) {
      std::int64_t dst = 0;
      for (std::size_t j = 0; j < last; ++j) dst += (x[j] - sub[j].lo) * ps[j];
      const std::int64_t* row = src.data().data() + src.offset(x);
      for (std::int64_t t = 0; t < run; ++t) buf[dst + t] = static_cast<double>(row[t]);
    });
  };
  put(a, *box_a, conv.operand(0));
  put(b, *box_b, conv.operand(1));
  conv.run();

  const double* res = conv.operand(0);
  const Index origin = conv.plan().origin();
  const std::int64_t run = clip->back().size();
  double max_dev = 0.0;
  for_each_row(*clip, [&](const Index& x) {
    std::int64_t base = 0;
    for (std::size_t j = 0; j < last; ++j) base += floor_mod(x[j] - origin[j], padded[j]) * ps[j];
    std::int64_t* dst = out.data().data() + out.offset(x);
    const double* src = res + base;
    std::int64_t k = floor_mod(x[last] - origin[last], padded[last]);
    for (std::int64_t t = 0; t < run; ++t) {
      const double v = src[k];
      const double r = std::floor(v + 0.5);
      max_dev = std::max(max_dev, std::abs(v - r));
      dst[t] = static_cast<std::int64_t>(r);
      if (++k == padded[last]) k = 0;
    }
  });
  if (report) report->max_deviation = max_dev;
  if (!(max_dev < kRoundingTolerance))
    throw PrecisionError("conv_fft: inverse transform deviates from integers by " + std::to_string(max_dev));
  return out;
}

std::optional<Box> window_clip(const Box& a, const Box& b, const Box& window) {
  const Box full = full_output_range(a, b);
  if (full.size() != window.size()) throw std::invalid_argument("window_clip: rank mismatch");
  Box clip(window.size());
  for (std::size_t j = 0; j < window.size(); ++j) {
    clip[j] = {std::max(window[j].lo, full[j].lo), std::min(window[j].hi, full[j].hi)};
    if (clip[j].empty()) return std::nullopt;
  }
  return clip;
}

struct WindowConvolution::Fftw {
  FftwBuffer<double> a, b;
  PlanHandle fwd, inv;
  std::size_t n = 0;  // doubles per buffer
};

WindowConvolution::WindowConvolution(const Box& a, const Box& b, const Box& window) {
  auto clip = window_clip(a, b, window);
  if (!clip) throw std::invalid_argument("WindowConvolution: window misses the output range");
  clip_ = std::move(*clip);
  plan_ = plan_window(a, b, window);
  const Index& padded = plan_.padded_shape;
  pitch_ = 2 * (padded.back() / 2 + 1);
  Index layout = padded;
  layout.back() = pitch_;
  strides_ = row_major_strides(layout);

  fftw_ = std::make_unique<Fftw>();
  fftw_->n = real_count(layout);
  fftw_->a = fftw_buffer<double>(fftw_->n);
  fftw_->b = fftw_buffer<double>(fftw_->n);
  {
    std::lock_guard lock(planner_mutex());
    const auto dims = to_int_dims(padded);
    const int rank = static_cast<int>(dims.size());
    double* buf = fftw_->a.get();
    auto* cbuf = reinterpret_cast<fftw_complex*>(buf);
    fftw_->fwd.reset(fftw_plan_dft_r2c(rank, dims.data(), buf, cbuf, FFTW_ESTIMATE));
    fftw_->inv.reset(fftw_plan_dft_c2r(rank, dims.data(), cbuf, buf, FFTW_ESTIMATE));
  }
  if (!fftw_->fwd || !fftw_->inv) throw std::runtime_error("fft: planning failed");
  // Planning with FFTW_ESTIMATE leaves the arrays alone, so zero afterwards.
  std::fill_n(fftw_->a.get(), fftw_->n, 0.0);
  std::fill_n(fftw_->b.get(), fftw_->n, 0.0);
}

WindowConvolution::~WindowConvolution() = default;

double* WindowConvolution::operand(int which) { return which == 0 ? fftw_->a.get() : fftw_->b.get(); }

void WindowConvolution::run() {
  auto* sa = reinterpret_cast<fftw_complex*>(fftw_->a.get());
  auto* sb = reinterpret_cast<fftw_complex*>(fftw_->b.get());
  fftw_execute(fftw_->fwd.get());
  fftw_execute_dft_r2c(fftw_->fwd.get(), fftw_->b.get(), sb);
  const std::size_t nc = fftw_->n / 2;
  const double scale = 1.0 / static_cast<double>(real_count(plan_.padded_shape));
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = sa[i][0] * sb[i][0] - sa[i][1] * sb[i][1];
    const double im = sa[i][0] * sb[i][1] + sa[i][1] * sb[i][0];
    sa[i][0] = re * scale;
    sa[i][1] = im * scale;
  }
  fftw_->b.reset();
  fftw_execute(fftw_->inv.get());
}

IntArray conv_full_fft(const IntArray& a, const IntArray& b, ConvReport* report) {
  if (a.rank() != b.rank()) throw std::invalid_argument("conv_full_fft: rank mismatch");
  return conv_window_fft(a, b, full_output_range(a.box(), b.box()), report);
}

IntArray conv_full(const IntArray& a, const IntArray& b, ConvBackend backend, ConvReport* report) {
  if (backend == ConvBackend::Direct) {
    if (report) *report = ConvReport{};
    return conv_full_direct(a, b);
  }
  return conv_full_fft(a, b, report);
}

}  // namespace umbramorph
