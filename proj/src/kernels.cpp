#include "polab/kernels.hpp"

#include <atomic>

namespace polab::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_backend() {
  if (avx2_ops_or_null() != nullptr && cpu_has_avx2_fma()) return Backend::Avx2;
  return Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{detect_backend()};
  return slot;
}

}  // namespace

bool avx2_supported() { return avx2_ops_or_null() != nullptr && cpu_has_avx2_fma(); }

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported()) b = Backend::Scalar;
  backend_slot().store(b, std::memory_order_relaxed);
}

const Ops& active_ops() {
  if (active_backend() == Backend::Avx2) return *avx2_ops_or_null();
  return scalar_ops();
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Avx2:
      return "avx2";
    case Backend::Scalar:
      return "scalar";
  }
  return "scalar";
}

}  // namespace polab::kernels
