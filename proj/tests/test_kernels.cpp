#include "doctest.h"

#include <random>
#include <vector>

#include "ixa/kernels.hpp"

namespace k = ixa::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, bool sparse = false) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (double& x : v) x = sparse && rng() % 3 == 0 ? 0.0 : u(rng);
  return v;
}

const k::Shape kShapes[] = {{1, 1, 1}, {3, 5, 2}, {32, 64, 21}, {7, 129, 33}, {64, 300, 17}};

}  // namespace

TEST_CASE("serial kernels match a textbook triple loop") {
  std::mt19937_64 rng(1);
  for (const auto s : kShapes) {
    const auto x = random_vector(s.rows * s.in, rng, true);
    const auto w = random_vector(s.in * s.out, rng);
    const auto b = random_vector(s.out, rng);
    const auto dy = random_vector(s.rows * s.out, rng);
    std::vector<double> y(s.rows * s.out), dw(s.in * s.out), db(s.out), dx(s.rows * s.in);
    k::serial::affine_forward(x, w, b, y, s);
    k::serial::weight_grad(x, dy, dw, s);
    k::serial::bias_grad(dy, db, s);
    k::serial::input_grad(dy, w, dx, s);
    for (std::size_t r = 0; r < s.rows; ++r) {
      for (std::size_t o = 0; o < s.out; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < s.in; ++i) acc += x[r * s.in + i] * w[i * s.out + o];
        CHECK(y[r * s.out + o] == doctest::Approx(acc).epsilon(1e-12));
      }
      for (std::size_t i = 0; i < s.in; ++i) {
        double acc = 0;
        for (std::size_t o = 0; o < s.out; ++o) acc += dy[r * s.out + o] * w[i * s.out + o];
        CHECK(dx[r * s.in + i] == doctest::Approx(acc).epsilon(1e-12));
      }
    }
    for (std::size_t o = 0; o < s.out; ++o) {
      double acc = 0;
      for (std::size_t r = 0; r < s.rows; ++r) acc += dy[r * s.out + o];
      CHECK(db[o] == doctest::Approx(acc).epsilon(1e-12));
      for (std::size_t i = 0; i < s.in; ++i) {
        double g = 0;
        for (std::size_t r = 0; r < s.rows; ++r) g += x[r * s.in + i] * dy[r * s.out + o];
        CHECK(dw[i * s.out + o] == doctest::Approx(g).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("parallel kernels are bitwise identical to serial ones") {
  std::mt19937_64 rng(2);
  for (const auto s : kShapes) {
    const auto x = random_vector(s.rows * s.in, rng, true);
    const auto w = random_vector(s.in * s.out, rng);
    const auto b = random_vector(s.out, rng);
    const auto dy = random_vector(s.rows * s.out, rng);
    std::vector<double> y1(s.rows * s.out), y2(y1.size());
    std::vector<double> dw1(s.in * s.out, 7.0), dw2(dw1.size(), -3.0);
    std::vector<double> db1(s.out), db2(s.out);
    std::vector<double> dx1(s.rows * s.in), dx2(dx1.size());
    k::serial::affine_forward(x, w, b, y1, s);
    k::parallel::affine_forward(x, w, b, y2, s);
    k::serial::weight_grad(x, dy, dw1, s);
    k::parallel::weight_grad(x, dy, dw2, s);
    k::serial::bias_grad(dy, db1, s);
    k::parallel::bias_grad(dy, db2, s);
    k::serial::input_grad(dy, w, dx1, s);
    k::parallel::input_grad(dy, w, dx2, s);
    CHECK(y1 == y2);
    CHECK(dw1 == dw2);
    CHECK(db1 == db2);
    CHECK(dx1 == dx2);
  }
}

TEST_CASE("backend switch routes the dispatching kernels") {
  const k::Backend saved = k::backend();
  k::set_backend(k::Backend::Serial);
  CHECK(k::backend() == k::Backend::Serial);
  std::vector<double> x{1, 2}, w{3, 4}, b{0.5}, y(1);
  k::affine_forward(x, w, b, y, {1, 2, 1});
  CHECK(y[0] == 11.5);
  k::set_backend(k::Backend::Parallel);
  k::affine_forward(x, w, b, y, {1, 2, 1});
  CHECK(y[0] == 11.5);
  k::set_backend(saved);
}
