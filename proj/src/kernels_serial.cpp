#include "ixa/kernels.hpp"

namespace ixa::kernels::serial {

void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    double* yr = y.data() + r * s.out;
    const double* xr = x.data() + r * s.in;
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
  for (std::size_t i = 0; i < s.in; ++i) {
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
  for (std::size_t o = 0; o < s.out; ++o) db[o] = 0.0;
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (std::size_t o = 0; o < s.out; ++o) db[o] += dy[r * s.out + o];
  }
}

void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    const double* dyr = dy.data() + r * s.out;
    for (std::size_t i = 0; i < s.in; ++i) {
      const double* wi = w.data() + i * s.out;
      double acc = 0.0;
      for (std::size_t o = 0; o < s.out; ++o) acc += dyr[o] * wi[o];
      dx[r * s.in + i] = acc;
    }
  }
}

}  // namespace ixa::kernels::serial
