#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "hintkit/error.hpp"
#include "hintkit/kernels.hpp"

namespace hintkit::kernels {

namespace {

struct Active {
  const Table* table;
  Isa isa;
};

Isa best_isa() noexcept {
  if (const char* forced = std::getenv("HINTKIT_SIMD"); forced && std::string_view(forced) == "scalar")
    return Isa::scalar;
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const Active*>& active() {
  static const Active initial{table_for(best_isa()), best_isa()};
  static std::atomic<const Active*> current{&initial};
  return current;
}

const Table& tbl() { return *active().load(std::memory_order_acquire)->table; }

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::DimensionMismatch, "vector sizes differ: " + std::to_string(a) + " vs " + std::to_string(b));
}

double cosine_from(double dot, double na, double nb) {
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  // sqrt(na*nb) keeps cosine(v, v) exactly 1 when na == nb.
  return dot / std::sqrt(na * nb);
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return &scalar::table;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &avx2::table;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return &neon::table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Isa active_isa() noexcept { return active().load(std::memory_order_acquire)->isa; }

bool select_isa(Isa isa) noexcept {
  if (!supported(isa) || table_for(isa) == nullptr) return false;
  static const Active choices[] = {{table_for(Isa::scalar), Isa::scalar},
                                   {table_for(Isa::avx2), Isa::avx2},
                                   {table_for(Isa::neon), Isa::neon}};
  active().store(&choices[static_cast<int>(isa)], std::memory_order_release);
  return true;
}

double dot(std::span<const float> a, std::span<const float> b) {
  require_same_size(a.size(), b.size());
  return tbl().dot_f32(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return tbl().dot_f64(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const float> a) { return tbl().sum_squares_f32(a.data(), a.size()); }

double sum_squares(std::span<const double> a) { return tbl().sum_squares_f64(a.data(), a.size()); }

void accumulate(std::span<double> acc, std::span<const float> x) {
  require_same_size(acc.size(), x.size());
  tbl().accumulate_f32(acc.data(), x.data(), x.size());
}

double cosine(std::span<const float> a, std::span<const float> b) {
  require_same_size(a.size(), b.size());
  const auto& t = tbl();
  return cosine_from(t.dot_f32(a.data(), b.data(), a.size()), t.sum_squares_f32(a.data(), a.size()),
                     t.sum_squares_f32(b.data(), b.size()));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  const auto& t = tbl();
  return cosine_from(t.dot_f64(a.data(), b.data(), a.size()), t.sum_squares_f64(a.data(), a.size()),
                     t.sum_squares_f64(b.data(), b.size()));
}

}  // namespace hintkit::kernels
