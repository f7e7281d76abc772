#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polab/errors.hpp"
#include "polab/oracle.hpp"
#include "polab/policy.hpp"
#include "polab/rng.hpp"

using namespace polab;

namespace {

TabularPolicy random_policy(Rng& rng, int p, int t, int v, double scale = 0.5) {
  TabularPolicy pol(p, t, v);
  for (auto& x : pol.logits) x = scale * rng.normal();
  return pol;
}

}  // namespace

TEST_CASE("log_prob: single-token certainty and uniform two-way softmax") {
  TabularPolicy one(1, 1, 1);
  const int y1[] = {0};
  CHECK(log_prob(one, 0, y1) == 0.0);

  TabularPolicy two(1, 1, 2);
  const int y2[] = {0};
  CHECK(log_prob(two, 0, y2) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("log_prob matches a naive per-token evaluator") {
  Rng rng(101);
  const TabularPolicy pol = random_policy(rng, 1, 2, 3, 1.0);
  const std::vector<int> y = {1, 2};
  // Direct per-position softmax product, written out longhand.
  double expected = 0.0;
  for (int t = 0; t < 2; ++t) {
    const auto row = pol.row(0, t);
    double denom = 0.0;
    for (double v : row) denom += std::exp(v);
    expected += std::log(std::exp(row[static_cast<std::size_t>(y[static_cast<std::size_t>(t)])]) / denom);
  }
  CHECK(log_prob(pol, 0, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_prob: weighted sum and unit-weight sign") {
  Rng rng(102);
  const TabularPolicy pol = random_policy(rng, 2, 4, 5);
  const std::vector<int> y = {0, 3, 2};
  CHECK(log_prob(pol, 1, y) <= 0.0);

  const std::vector<double> w = {0.5, 2.0, 0.0};
  double expected = 0.0;
  for (int t = 0; t < 3; ++t) {
    const auto row = pol.row(1, t);
    double denom = 0.0;
    for (double v : row) denom += std::exp(v);
    expected += w[static_cast<std::size_t>(t)] *
                (row[static_cast<std::size_t>(y[static_cast<std::size_t>(t)])] - std::log(denom));
  }
  CHECK(log_prob(pol, 1, y, w) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_prob and score reject malformed inputs") {
  TabularPolicy pol(2, 3, 4);
  const std::vector<int> ok = {0, 1};
  CHECK_THROWS_AS((void)log_prob(pol, 2, ok), DomainError);       // prompt
  CHECK_THROWS_AS((void)log_prob(pol, 0, std::vector<int>{}), DomainError);
  CHECK_THROWS_AS((void)log_prob(pol, 0, std::vector<int>{0, 1, 2, 3}), DomainError);
  CHECK_THROWS_AS((void)log_prob(pol, 0, std::vector<int>{4}), DomainError);
  CHECK_THROWS_AS((void)log_prob(pol, 0, ok, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS((void)score(pol, 0, ok, std::vector<double>{1.0, -0.1}), DomainError);
}

TEST_CASE("score: uniform two-way case and per-position zero sum") {
  TabularPolicy two(1, 1, 2);
  const std::vector<int> y = {0};
  const ScoreVec s = score(two, 0, y);
  CHECK(s.entry(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.entry(0, 0, 1) == doctest::Approx(-0.5).epsilon(1e-15));

  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularPolicy pol = random_policy(rng, 2, 5, 9, 1.5);
    std::vector<int> seq;
    const int len = 1 + rng.uniform_int(5);
    for (int i = 0; i < len; ++i) seq.push_back(rng.uniform_int(9));
    const ScoreVec sv = score(pol, rng.uniform_int(2), seq);
    for (int t = 0; t < sv.length(); ++t) {
      double row_sum = 0.0;
      for (double v : sv.row(t)) row_sum += v;
      CHECK(std::abs(row_sum) <= 1e-10);  // softmax score identity
    }
  }
}

TEST_CASE("score matches central finite differences of log_prob") {
  Rng rng(104);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 1 + rng.uniform_int(4);
    const int V = 2 + rng.uniform_int(6);
    const TabularPolicy pol = random_policy(rng, 2, T, V, 0.8);
    const int prompt = rng.uniform_int(2);
    std::vector<int> y;
    const int len = 1 + rng.uniform_int(T);
    for (int i = 0; i < len; ++i) y.push_back(rng.uniform_int(V));
    std::vector<double> w;
    if (trial % 3 == 0)
      for (int i = 0; i < len; ++i) w.push_back(rng.uniform(0.1, 2.0));

    const ScoreVec s = score(pol, prompt, y, w);
    for (int t = 0; t < len; ++t) {
      for (int v = 0; v < V; ++v) {
        const double fd = oracle::fd_log_prob_grad(pol, prompt, y, w, t, v,
                                                   oracle::kParamH);
        const double an = s.entry(prompt, t, v);
        const double err = std::abs(fd - an) / std::max(1e-3, std::abs(an));
        worst = std::max(worst, err);
      }
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("score_geometry: antipodal, identical, and frozen three-token cases") {
  TabularPolicy two(1, 1, 2);
  const ScoreVec s0 = score(two, 0, std::vector<int>{0});
  const ScoreVec s1 = score(two, 0, std::vector<int>{1});

  const ScoreGeometry anti = score_geometry(s0, s1);
  CHECK(anti.defined);
  CHECK(anti.inner == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(anti.norm_w == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(anti.norm_l == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(anti.rho == doctest::Approx(-1.0).epsilon(1e-14));

  const ScoreGeometry self = score_geometry(s0, s0);
  CHECK(self.rho == doctest::Approx(1.0).epsilon(1e-14));

  // T=2, V=3, uniform logits, y_w=[0,1], y_l=[0,2]: expanding the four rows
  // by hand gives inner = 1/3, norms^2 = 4/3, rho = 1/4.
  TabularPolicy tri(1, 2, 3);
  const ScoreVec sw = score(tri, 0, std::vector<int>{0, 1});
  const ScoreVec sl = score(tri, 0, std::vector<int>{0, 2});
  const ScoreGeometry g = score_geometry(sw, sl);
  CHECK(g.inner == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(g.norm_w * g.norm_w == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(g.rho == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("score_geometry: cauchy-schwarz and rho range over random pairs") {
  Rng rng(105);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + rng.uniform_int(5);
    const int V = 2 + rng.uniform_int(7);
    const TabularPolicy pol = random_policy(rng, 1, T, V, 2.0);
    std::vector<int> yw, yl;
    const int lw = 1 + rng.uniform_int(T), ll = 1 + rng.uniform_int(T);
    for (int i = 0; i < lw; ++i) yw.push_back(rng.uniform_int(V));
    for (int i = 0; i < ll; ++i) yl.push_back(rng.uniform_int(V));
    const ScoreGeometry g =
        score_geometry(score(pol, 0, yw), score(pol, 0, yl));
    CHECK(std::abs(g.inner) <= g.norm_w * g.norm_l + 1e-9);
    if (g.defined) {
      CHECK(g.rho >= -1.0);
      CHECK(g.rho <= 1.0);
    }
  }
}

TEST_CASE("score_geometry: zero-norm direction reports undefined, not NaN") {
  // Saturate position 0 so softmax is a point mass and the score vanishes.
  TabularPolicy pol(1, 1, 2);
  pol.row(0, 0)[0] = 800.0;
  pol.row(0, 0)[1] = -800.0;
  const ScoreVec s0 = score(pol, 0, std::vector<int>{0});
  const ScoreGeometry g = score_geometry(s0, s0);
  CHECK_FALSE(g.defined);
  CHECK(std::isfinite(g.rho));
}

TEST_CASE("score_geometry honors a position mask") {
  Rng rng(106);
  const TabularPolicy pol = random_policy(rng, 1, 6, 4);
  const std::vector<int> yw = {0, 1, 2, 3, 0, 1};
  const std::vector<int> yl = {1, 0, 2, 0, 3, 2};
  const ScoreVec sw = score(pol, 0, yw);
  const ScoreVec sl = score(pol, 0, yl);

  const PositionMask mask{2, 5};
  const ScoreGeometry masked = score_geometry(sw, sl, &mask);

  double nw2 = 0, nl2 = 0, inner = 0;
  for (int t = 2; t < 5; ++t) {
    for (int v = 0; v < 4; ++v) {
      nw2 += sw.entry(0, t, v) * sw.entry(0, t, v);
      nl2 += sl.entry(0, t, v) * sl.entry(0, t, v);
      inner += sw.entry(0, t, v) * sl.entry(0, t, v);
    }
  }
  CHECK(masked.norm_w == doctest::Approx(std::sqrt(nw2)).epsilon(1e-12));
  CHECK(masked.norm_l == doctest::Approx(std::sqrt(nl2)).epsilon(1e-12));
  CHECK(masked.inner == doctest::Approx(inner).epsilon(1e-12));
}
