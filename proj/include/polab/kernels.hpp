#pragma once

/**
 * Data-parallel inner loops: logsumexp/softmax over a logit row, dot and
 * sum-of-squares for score geometry, axpy for parameter updates.
 *
 * Two implementations live behind one table of function pointers:
 *  - scalar reference kernels (pairwise-accumulated reductions), and
 *  - AVX2/FMA variants, compiled in their own translation unit and selected
 *    at runtime via CPU feature detection.
 *
 * Selection happens once and is sticky, so a given binary on a given machine
 * always runs the same code path and reruns stay byte-identical. The scalar
 * table is always available and is the ground truth the SIMD variants are
 * equivalence-tested against.
 */

#include <cstddef>
#include <span>

namespace polab::kernels {

enum class Backend { Scalar, Avx2 };

struct Ops {
  double (*reduce_max)(const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  // y += a * x
  void (*axpy)(double, const double*, double*, std::size_t);
  // out = a * x
  void (*scale)(double, const double*, double*, std::size_t);
  double (*logsumexp)(const double*, std::size_t);
  // out = softmax(x); returns logsumexp(x) as a byproduct
  double (*softmax)(const double*, double*, std::size_t);
};

const Ops& scalar_ops();

// AVX2 table, or nullptr when this build has no AVX2 translation unit.
// Callers must additionally check avx2_supported() before using it.
const Ops* avx2_ops_or_null();

bool avx2_supported();

// Active table. Defaults to the best supported backend; force_backend()
// overrides it (Scalar is always legal).
const Ops& active_ops();
Backend active_backend();
void force_backend(Backend b);
const char* backend_name(Backend b);

// Convenience forwarders through the active table.
inline double reduce_max(std::span<const double> x) {
  return active_ops().reduce_max(x.data(), x.size());
}
inline double sum(std::span<const double> x) {
  return active_ops().sum(x.data(), x.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_ops().dot(a.data(), b.data(), a.size());
}
inline double sumsq(std::span<const double> x) {
  return active_ops().sumsq(x.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active_ops().axpy(a, x.data(), y.data(), x.size());
}
inline void scale(double a, std::span<const double> x, std::span<double> out) {
  active_ops().scale(a, x.data(), out.data(), x.size());
}
inline double logsumexp(std::span<const double> x) {
  return active_ops().logsumexp(x.data(), x.size());
}
inline double softmax(std::span<const double> x, std::span<double> out) {
  return active_ops().softmax(x.data(), out.data(), x.size());
}

}  // namespace polab::kernels
