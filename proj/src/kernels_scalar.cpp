#include "polab/kernels.hpp"

#include <cmath>
#include <limits>

namespace polab::kernels {
namespace {

// Pairwise (cascade) reductions: error grows like log2(n) instead of n,
// which keeps the 1e-12-class geometry identities testable at V*T sizes.
constexpr std::size_t kPairwiseBase = 16;

template <typename F>
double pairwise_reduce(const double* x, std::size_t n, F term) {
  if (n <= kPairwiseBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += term(x, i);
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_reduce(x, half, term) + pairwise_reduce(x + half, n - half, term);
}

template <typename F>
double pairwise_reduce2(const double* a, const double* b, std::size_t n, F term) {
  if (n <= kPairwiseBase) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += term(a, b, i);
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_reduce2(a, b, half, term) +
         pairwise_reduce2(a + half, b + half, n - half, term);
}

double s_reduce_max(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double s_sum(const double* x, std::size_t n) {
  return pairwise_reduce(x, n, [](const double* p, std::size_t i) { return p[i]; });
}

double s_dot(const double* a, const double* b, std::size_t n) {
  return pairwise_reduce2(
      a, b, n, [](const double* p, const double* q, std::size_t i) { return p[i] * q[i]; });
}

double s_sumsq(const double* x, std::size_t n) {
  return pairwise_reduce(x, n,
                         [](const double* p, std::size_t i) { return p[i] * p[i]; });
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_scale(double a, const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

double s_logsumexp(const double* x, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double m = s_reduce_max(x, n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

double s_softmax(const double* x, double* out, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  const double m = s_reduce_max(x, n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp(x[i] - m);
    s += out[i];
  }
  const double inv = 1.0 / s;
  for (std::size_t i = 0; i < n; ++i) out[i] *= inv;
  return m + std::log(s);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {s_reduce_max, s_sum,   s_dot,       s_sumsq,
                          s_axpy,       s_scale, s_logsumexp, s_softmax};
  return ops;
}

}  // namespace polab::kernels
