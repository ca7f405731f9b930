#pragma once

// Vector-similarity kernels behind the embedding-based metrics.
//
// Each kernel has a scalar reference implementation and SIMD variants (AVX2+FMA
// on x86-64, NEON on AArch64). The variant is chosen once at startup from CPU
// features; HINTKIT_SIMD=scalar forces the reference path. All variants
// accumulate in double. Elementwise kernels are bit-identical across variants;
// reductions differ only by summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace hintkit::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;
bool supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Switches the dispatch table; returns false (and changes nothing) when the
/// CPU lacks the requested instruction set.
bool select_isa(Isa isa) noexcept;

double dot(std::span<const float> a, std::span<const float> b);
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const float> a);
double sum_squares(std::span<const double> a);
/// acc[i] += x[i]
void accumulate(std::span<double> acc, std::span<const float> x);

/// Cosine similarity; 0 when either vector has zero norm. Throws
/// DimensionMismatch when sizes differ.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

// Raw per-ISA entry points, exposed for equivalence tests.
struct Table {
  double (*dot_f32)(const float*, const float*, std::size_t);
  double (*dot_f64)(const double*, const double*, std::size_t);
  double (*sum_squares_f32)(const float*, std::size_t);
  double (*sum_squares_f64)(const double*, std::size_t);
  void (*accumulate_f32)(double*, const float*, std::size_t);
};

/// nullptr when the variant is not compiled in for this target.
const Table* table_for(Isa isa) noexcept;

namespace scalar {
extern const Table table;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Table table;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const Table table;
}
#endif

}  // namespace hintkit::kernels
