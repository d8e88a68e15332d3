#pragma once

#include <cstddef>
#include <span>

// Dense batch kernels behind the network. Each kernel exists twice: a plain
// serial loop nest and an OpenMP version that splits the outermost loop.
// Both accumulate every output element in the same order, so results are
// bit-identical and independent of the thread count.
namespace ixa::kernels {

enum class Backend { Serial, Parallel };

/// Process-wide choice used by the network code. Parallel is the default when
/// built with OpenMP; without it both choices run the serial loops.
void set_backend(Backend backend);
Backend backend();
bool parallel_available();

struct Shape {
  std::size_t rows;  // batch
  std::size_t in;
  std::size_t out;
};

namespace serial {
// y[r,o] = bias[o] + sum_i x[r,i] * w[i,o]
void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s);
// dw[i,o] = sum_r x[r,i] * dy[r,o]
void weight_grad(std::span<const double> x, std::span<const double> dy, std::span<double> dw,
                 Shape s);
// db[o] = sum_r dy[r,o]
void bias_grad(std::span<const double> dy, std::span<double> db, Shape s);
// dx[r,i] = sum_o dy[r,o] * w[i,o]
void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s);
}  // namespace serial

namespace parallel {
void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s);
void weight_grad(std::span<const double> x, std::span<const double> dy, std::span<double> dw,
                 Shape s);
void bias_grad(std::span<const double> dy, std::span<double> db, Shape s);
void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s);
}  // namespace parallel

// Dispatch on backend().
void affine_forward(std::span<const double> x, std::span<const double> w,
                    std::span<const double> bias, std::span<double> y, Shape s);
void weight_grad(std::span<const double> x, std::span<const double> dy, std::span<double> dw,
                 Shape s);
void bias_grad(std::span<const double> dy, std::span<double> db, Shape s);
void input_grad(std::span<const double> dy, std::span<const double> w, std::span<double> dx,
                Shape s);

}  // namespace ixa::kernels
