#include "hintkit/kernels.hpp"

namespace hintkit::kernels::scalar {

namespace {

double dot_f32(const float* a, const float* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_f32(const float* a, std::size_t n) { return dot_f32(a, a, n); }

double sum_squares_f64(const double* a, std::size_t n) { return dot_f64(a, a, n); }

void accumulate_f32(double* acc, const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

const Table table{dot_f32, dot_f64, sum_squares_f32, sum_squares_f64, accumulate_f32};

}  // namespace hintkit::kernels::scalar
