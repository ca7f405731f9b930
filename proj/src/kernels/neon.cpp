#if defined(__aarch64__)

#include <arm_neon.h>

#include "hintkit/kernels.hpp"

namespace hintkit::kernels::neon {

namespace {

double dot_f32(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_f32(const float* a, std::size_t n) { return dot_f32(a, a, n); }

double sum_squares_f64(const double* a, std::size_t n) { return dot_f64(a, a, n); }

void accumulate_f32(double* acc, const float* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vcvt_f64_f32(vld1_f32(x + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), v));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

const Table table{dot_f32, dot_f64, sum_squares_f32, sum_squares_f64, accumulate_f32};

}  // namespace hintkit::kernels::neon

#endif
