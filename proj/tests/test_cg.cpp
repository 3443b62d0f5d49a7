#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tbmcg/cg_filter.hpp"
#include "tbmcg/errors.hpp"
#include "tbmcg/noise.hpp"

using namespace tbmcg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Textbook online CG, written out longhand.
struct CgOracle {
  std::size_t n;
  double lambda, eta;
  std::vector<double> h, R, theta, g, p;

  CgOracle(std::size_t n_, double lambda_, double eta_)
      : n(n_), lambda(lambda_), eta(eta_), h(n_), R(n_ * n_), theta(n_), g(n_), p(n_) {
    for (std::size_t i = 0; i < n; ++i) R[i * n + i] = 1e-2;
  }

  void step(const std::vector<double>& x, double d) {
    double y = 0;
    for (std::size_t i = 0; i < n; ++i) y += h[i] * x[i];
    const double e = d - y;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) R[i * n + j] = lambda * R[i * n + j] + x[i] * x[j];
      theta[i] = lambda * theta[i] + d * x[i];
    }
    std::vector<double> Rp(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Rp[i] += R[i * n + j] * p[j];
    double pRp = 0, pg = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pRp += p[i] * Rp[i];
      pg += p[i] * g[i];
    }
    const double delta = std::abs(pRp) < 1e-12 ? 0.0 : eta * pg / pRp;
    std::vector<double> gn(n);
    for (std::size_t i = 0; i < n; ++i) gn[i] = lambda * g[i] - delta * Rp[i] + x[i] * e;
    double gg = 0, num = 0;
    for (std::size_t i = 0; i < n; ++i) {
      gg += g[i] * g[i];
      num += (gn[i] - g[i]) * gn[i];
    }
    const double beta = gg < 1e-12 ? 0.0 : std::max(0.0, num / gg);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = gn[i] + beta * p[i];
      h[i] += delta * p[i];
    }
    g.swap(gn);
  }
};

struct Colored {
  Rng rng;
  std::vector<double> x;
  double state = 0.0;
  Colored(std::size_t n, std::uint64_t seed) : rng(seed), x(n, 0.0) {}
  const std::vector<double>& next() {
    state = 0.5 * state + rng.normal();
    std::rotate(x.rbegin(), x.rbegin() + 1, x.rend());
    x[0] = state;
    return x;
  }
};

}  // namespace

TEST_CASE("initial state") {
  CgFilter f(10, {}, TukeyEstimator(20.0));
  const auto& R = f.correlation();
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) CHECK(R(i, j) == (i == j ? 0.01 : 0.0));
    CHECK(f.weights()[i] == 0.0);
    CHECK(f.cross_correlation()[i] == 0.0);
    CHECK(f.residual()[i] == 0.0);
    CHECK(f.direction()[i] == 0.0);
  }
  CgOptions scalar;
  scalar.lambda = 0.5;
  scalar.eta = 1.0;
  CHECK_NOTHROW(CgFilter(1, scalar));
}

TEST_CASE("invalid hyperparameters") {
  CHECK_THROWS_AS(CgFilter(0, {}), ConfigError);
  CgOptions o;
  o.lambda = 1.0;
  CHECK_THROWS_AS(CgFilter(4, o), ConfigError);
  o.lambda = 0.0;
  CHECK_THROWS_AS(CgFilter(4, o), ConfigError);
  o = {};
  o.eta = 0.0;
  CHECK_THROWS_AS(CgFilter(4, o), ConfigError);
  CgFilter plain(4, {});
  CHECK_THROWS_AS(plain.set_threshold(3.0), ConfigError);
}

TEST_CASE("step rejects bad input") {
  CgFilter f(3, {});
  std::vector<double> x{1, 2, 3};
  std::vector<double> short_x{1, 2};
  CHECK_THROWS_AS(f.step(short_x, 1.0), InputError);
  CHECK_THROWS_AS(f.step(x, std::nan("")), InputError);
  x[1] = kInf;
  CHECK_THROWS_AS(f.step(x, 0.0), InputError);
}

TEST_CASE("infinite threshold is bit-identical to plain CG") {
  CgFilter plain(10, {});
  CgFilter robust(10, {}, TukeyEstimator(kInf));
  Colored src(10, 42);
  Rng noise(43);
  for (int n = 0; n < 3000; ++n) {
    const auto& x = src.next();
    const double d = x[0] - 0.3 * x[3] + sample_alpha_stable(1.5, 0.1, noise);
    plain.step(x, d);
    robust.step(x, d);
    REQUIRE(std::equal(plain.weights().begin(), plain.weights().end(), robust.weights().begin()));
  }
  CHECK(std::equal(plain.residual().begin(), plain.residual().end(), robust.residual().begin()));
  CHECK(std::equal(plain.correlation().data().begin(), plain.correlation().data().end(),
                   robust.correlation().data().begin()));
}

TEST_CASE("plain CG agrees with a longhand oracle") {
  CgOptions o;
  o.eta = 0.05;
  CgFilter f(6, o);
  CgOracle ref(6, o.lambda, o.eta);
  Colored src(6, 5);
  for (int n = 0; n < 2000; ++n) {
    const auto& x = src.next();
    const double d = 0.7 * x[0] + 0.2 * x[2] - 0.1 * x[5];
    f.step(x, d);
    ref.step(x, d);
  }
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(f.weights()[i] == doctest::Approx(ref.h[i]).epsilon(1e-9));
  }
}

TEST_CASE("scalar filter converges to the constant solution") {
  // Independent scalar recursion: x = d = 1, no estimator.
  const double lambda = 0.5, eta = 1.0;
  double R = 1e-2, g = 0, p = 0, h = 0;
  int oracle_hit = -1;
  for (int n = 0; n < 200; ++n) {
    const double e = 1.0 - h;
    R = lambda * R + 1.0;
    const double pRp = p * R * p;
    const double delta = std::abs(pRp) < 1e-12 ? 0.0 : eta * p * g / pRp;
    const double gn = lambda * g - delta * R * p + e;
    const double beta = g * g < 1e-12 ? 0.0 : std::max(0.0, (gn - g) * gn / (g * g));
    p = gn + beta * p;
    h += delta * p;
    g = gn;
    if (oracle_hit < 0 && std::abs(h - 1.0) < 1e-3) oracle_hit = n;
  }
  REQUIRE(oracle_hit >= 0);

  CgOptions o;
  o.lambda = lambda;
  o.eta = eta;
  CgFilter f(1, o, TukeyEstimator(kInf));
  const std::vector<double> x{1.0};
  int hit = -1;
  for (int n = 0; n < 200; ++n) {
    f.step(x, 1.0);
    if (hit < 0 && std::abs(f.weights()[0] - 1.0) < 1e-3) hit = n;
  }
  CHECK(hit == oracle_hit);
  CHECK(std::abs(f.weights()[0] - 1.0) < 1e-3);
  CHECK(f.weights()[0] == doctest::Approx(h).epsilon(1e-12));
}

TEST_CASE("R stays exactly symmetric") {
  CgFilter f(8, {}, TukeyEstimator(2.0));
  Colored src(8, 9);
  Rng noise(10);
  for (int n = 0; n < 2000; ++n) {
    const auto& x = src.next();
    f.step(x, x[1] + sample_alpha_stable(1.3, 0.5, noise));
    REQUIRE(f.correlation().asymmetry() == 0.0);
  }
}

TEST_CASE("an outlier only decays R and theta") {
  CgFilter f(5, {}, TukeyEstimator(3.0));
  Colored src(5, 11);
  for (int n = 0; n < 100; ++n) {
    const auto& x = src.next();
    f.step(x, 0.4 * x[0]);
  }
  const auto R_before = std::vector<double>(f.correlation().data().begin(),
                                            f.correlation().data().end());
  const auto t_before = std::vector<double>(f.cross_correlation().begin(),
                                            f.cross_correlation().end());
  const auto& x = src.next();
  f.step(x, 1e4);
  CHECK(f.last_weight() == 0.0);
  const double lambda = CgOptions{}.lambda;
  for (std::size_t k = 0; k < R_before.size(); ++k) {
    REQUIRE(f.correlation().data()[k] == lambda * R_before[k]);
  }
  for (std::size_t k = 0; k < t_before.size(); ++k) {
    REQUIRE(f.cross_correlation()[k] == lambda * t_before[k]);
  }
}

TEST_CASE("applied weights stay in [0, 1]") {
  CgFilter f(4, {}, TukeyEstimator(1.0));
  Colored src(4, 12);
  Rng noise(13);
  for (int n = 0; n < 1000; ++n) {
    const auto& x = src.next();
    f.step(x, x[0] + sample_alpha_stable(1.2, 0.3, noise));
    REQUIRE(f.last_weight() >= 0.0);
    REQUIRE(f.last_weight() <= 1.0);
  }
}

TEST_CASE("operation counts") {
  Colored src(10, 3);
  CgFilter cg(10, {});
  CgFilter tb(10, {}, TukeyEstimator(1e3));
  CgFilter tb_out(10, {}, TukeyEstimator(1e3));
  for (int n = 0; n < 20; ++n) {
    const auto& x = src.next();
    cg.step(x, x[0]);
    tb.step(x, x[0]);
    tb_out.step(x, x[0]);
  }
  const auto& x = src.next();
  cg.step(x, x[0]);
  tb.step(x, x[0]);
  tb_out.step(x, 1e6);
  const auto a = cg.last_ops(), b = tb.last_ops(), c = tb_out.last_ops();
  const std::uint64_t L = 10;

  SUBCASE("quadratic terms") {
    CHECK(a.mults == 3 * L * L + 12 * L + 3);
    CHECK(a.adds == 2 * L * L + 10 * L - 4);
    CHECK(a.comparisons == 0);
  }
  SUBCASE("robust step overhead") {
    CHECK(b.mults - a.mults == 2 * L + 2);
    CHECK(b.adds - a.adds == 1);
    CHECK(b.comparisons - a.comparisons == 1);
  }
  SUBCASE("rejected sample is cheaper") {
    CHECK(c.mults < a.mults);
    CHECK(c.mults < b.mults);
    CHECK(c.comparisons == 1);
  }
}

TEST_CASE("weight error diagnostic") {
  CgFilter f(2, {});
  const std::vector<double> zero{0.0, 0.0};
  CHECK(f.weight_error_diagnostic(zero) == 0.0);
  // R = 0.01 I, h = 0, h_o = (3, 4) -> 0.01 * 25
  const std::vector<double> h_o{3.0, 4.0};
  CHECK(f.weight_error_diagnostic(h_o) == doctest::Approx(0.25).epsilon(1e-15));
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(f.weight_error_diagnostic(wrong), InputError);
}

TEST_CASE("unclamped Polak-Ribiere can go negative") {
  CgOptions o;
  o.clamp_beta = false;
  o.eta = 0.5;
  CgFilter f(4, o);
  Colored src(4, 21);
  bool negative = false;
  for (int n = 0; n < 500; ++n) {
    const auto& x = src.next();
    f.step(x, x[0] - x[2]);
    negative = negative || f.last_beta() < 0.0;
  }
  CHECK(negative);

  CgFilter clamped(4, {});
  Colored src2(4, 21);
  for (int n = 0; n < 500; ++n) {
    const auto& x = src2.next();
    clamped.step(x, x[0] - x[2]);
    REQUIRE(clamped.last_beta() >= 0.0);
  }
}

TEST_CASE("no silent NaN on extreme but finite data") {
  CgFilter f(3, {});
  std::vector<double> x{1e200, -1e200, 1e200};
  for (int n = 0; n < 10 && !f.diverged(); ++n) {
    f.step(x, 1e200);
  }
  bool finite = true;
  for (double w : f.weights()) finite = finite && std::isfinite(w);
  CHECK((finite || f.diverged()));
}
