#include <atomic>

#include "ixa/kernels.hpp"

#ifdef IXA_WITH_OPENMP
#include <omp.h>
#endif

namespace ixa::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::Parallel};

using Index = std::ptrdiff_t;
}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

bool parallel_available() {
#ifdef IXA_WITH_OPENMP
  return true;
#else
  return false;
#endif
}

namespace parallel {

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s) {
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(s.rows); ++r) {
    double* yr = y.data() + static_cast<std::size_t>(r) * s.out;
    const double* xr = x.data() + static_cast<std::size_t>(r) * s.in;
    for (std::size_t o = 0; o < s.out; ++o) yr[o] = bias[o];
    for (std::size_t i = 0; i < s.in; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      const double* wi = w.data() + i * s.out;
      for (std::size_t o = 0; o < s.out; ++o) yr[o] += xi * wi[o];
    }
  }
}

void weight_grad(std::span<const double> x, std::span<const double> dy, std::span<double> dw,
                 Shape s) {
#pragma omp parallel for schedule(static)
  for (Index ii = 0; ii < static_cast<Index>(s.in); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* dwi = dw.data() + i * s.out;
    for (std::size_t o = 0; o < s.out; ++o) dwi[o] = 0.0;
    for (std::size_t r = 0; r < s.rows; ++r) {
      const double xi = x[r * s.in + i];
      if (xi == 0.0) continue;
      const double* dyr = dy.data() + r * s.out;
      for (std::size_t o = 0; o < s.out; ++o) dwi[o] += xi * dyr[o];
    }
  }
}

void bias_grad(std::span<const double> dy, std::span<double> db, Shape s) {
#pragma omp parallel for schedule(static)
  for (Index oo = 0; oo < static_cast<Index>(s.out); ++oo) {
    const auto o = static_cast<std::size_t>(oo);
    double acc = 0.0;
    for (std::size_t r = 0; r < s.rows; ++r) acc += dy[r * s.out + o];
    db[o] = acc;
  }
}

void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s) {
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(s.rows); ++r) {
    const double* dyr = dy.data() + static_cast<std::size_t>(r) * s.out;
    for (std::size_t i = 0; i < s.in; ++i) {
      const double* wi = w.data() + i * s.out;
      double acc = 0.0;
      for (std::size_t o = 0; o < s.out; ++o) acc += dyr[o] * wi[o];
      dx[static_cast<std::size_t>(r) * s.in + i] = acc;
    }
  }
}

}  // namespace parallel

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s) {
  if (backend() == Backend::Parallel) {
    parallel::affine_forward(x, w, bias, y, s);
  } else {
    serial::affine_forward(x, w, bias, y, s);
  }
}

void weight_grad(std::span<const double> x, std::span<const double> dy, std::span<double> dw,
                 Shape s) {
  if (backend() == Backend::Parallel) {
    parallel::weight_grad(x, dy, dw, s);
  } else {
    serial::weight_grad(x, dy, dw, s);
  }
}

void bias_grad(std::span<const double> dy, std::span<double> db, Shape s) {
  if (backend() == Backend::Parallel) {
    parallel::bias_grad(dy, db, s);
  } else {
    serial::bias_grad(dy, db, s);
  }
}

void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s) {
  if (backend() == Backend::Parallel) {
    parallel::input_grad(dy, w, dx, s);
  } else {
    serial::input_grad(dy, w, dx, s);
  }
}

}  // namespace ixa::kernels
