#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polab/kernels.hpp"
#include "polab/rng.hpp"

using namespace polab;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar kernels: reference values") {
  const auto& ops = kernels::scalar_ops();
  const double x[] = {1.0, 2.0, 3.0, 4.0};
  CHECK(ops.reduce_max(x, 4) == 4.0);
  CHECK(ops.sum(x, 4) == 10.0);
  CHECK(ops.dot(x, x, 4) == 30.0);
  CHECK(ops.sumsq(x, 4) == 30.0);

  // logsumexp of equal entries is entry + log(n).
  const double u[] = {0.7, 0.7, 0.7, 0.7, 0.7};
  CHECK(ops.logsumexp(u, 5) == doctest::Approx(0.7 + std::log(5.0)).epsilon(1e-15));

  double probs[5];
  ops.softmax(u, probs, 5);
  for (double p : probs) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("softmax normalizes and logsumexp shift-invariance") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(64));
    const auto x = random_vec(rng, n, 3.0);
    std::vector<double> p(n);
    kernels::softmax(x, p);
    double total = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);

    auto shifted = x;
    const double c = rng.uniform(-50.0, 50.0);
    for (auto& v : shifted) v += c;
    CHECK(rel_err(kernels::logsumexp(shifted), kernels::logsumexp(x) + c) <= 1e-12);
  }
}

TEST_CASE("axpy and scale match elementwise arithmetic") {
  Rng rng(12);
  const auto x = random_vec(rng, 37, 2.0);
  auto y = random_vec(rng, 37, 2.0);
  const auto y0 = y;
  kernels::axpy(1.5, x, y);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(y[i] == doctest::Approx(y0[i] + 1.5 * x[i]).epsilon(1e-15));

  std::vector<double> out(x.size());
  kernels::scale(-2.0, x, out);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out[i] == -2.0 * x[i]);
}

TEST_CASE("avx2 variants agree with scalar reference") {
  const kernels::Ops* avx2 = kernels::avx2_ops_or_null();
  if (avx2 == nullptr || !kernels::avx2_supported()) {
    MESSAGE("avx2 backend unavailable; equivalence untested on this host");
    return;
  }
  const auto& scalar = kernels::scalar_ops();
  Rng rng(13);
  // Sizes straddle the vector width, including tails and tiny inputs.
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u,
                        100u, 255u, 1024u}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_vec(rng, n, 4.0);
      const auto b = random_vec(rng, n, 4.0);

      CHECK(scalar.reduce_max(a.data(), n) == avx2->reduce_max(a.data(), n));
      CHECK(rel_err(scalar.sum(a.data(), n), avx2->sum(a.data(), n)) <= 1e-13);
      CHECK(rel_err(scalar.dot(a.data(), b.data(), n),
                    avx2->dot(a.data(), b.data(), n)) <= 1e-13);
      CHECK(rel_err(scalar.sumsq(a.data(), n), avx2->sumsq(a.data(), n)) <= 1e-13);
      CHECK(rel_err(scalar.logsumexp(a.data(), n), avx2->logsumexp(a.data(), n)) <=
            1e-13);

      std::vector<double> ps(n), pv(n);
      scalar.softmax(a.data(), ps.data(), n);
      avx2->softmax(a.data(), pv.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(ps[i] - pv[i]) <= 1e-14 + 1e-12 * ps[i]);

      std::vector<double> ys = b, yv = b;
      scalar.axpy(0.37, a.data(), ys.data(), n);
      avx2->axpy(0.37, a.data(), yv.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(ys[i] - yv[i]) <= 1e-14 * (1.0 + std::abs(ys[i])));

      std::vector<double> os(n), ov(n);
      scalar.scale(-1.7, a.data(), os.data(), n);
      avx2->scale(-1.7, a.data(), ov.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(os[i] == ov[i]);
    }
  }
}

TEST_CASE("avx2 exp path handles extreme shifts") {
  const kernels::Ops* avx2 = kernels::avx2_ops_or_null();
  if (avx2 == nullptr || !kernels::avx2_supported()) return;
  // One dominant entry: softmax must saturate without NaN or overflow.
  std::vector<double> x = {500.0, -500.0, -500.0, -500.0, 0.0, 1.0, 2.0, 3.0};
  std::vector<double> p(x.size());
  const double lse = avx2->softmax(x.data(), p.data(), x.size());
  CHECK(std::isfinite(lse));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= 0.0);
  CHECK(avx2->logsumexp(x.data(), x.size()) == doctest::Approx(500.0).epsilon(1e-12));
}

TEST_CASE("backend dispatch is sticky and overridable") {
  const kernels::Backend initial = kernels::active_backend();
  kernels::force_backend(kernels::Backend::Scalar);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);
  CHECK(&kernels::active_ops() == &kernels::scalar_ops());
  kernels::force_backend(initial);
  CHECK(kernels::active_backend() == initial);
}
