#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tbmcg/audit.hpp"
#include "tbmcg/errors.hpp"
#include "tbmcg/noise.hpp"

using namespace tbmcg;

namespace {

std::vector<double> stable_draws(double alpha, double scale, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_alpha_stable(alpha, scale, rng);
  return out;
}

double quantile(std::vector<double> v, double q) {
  const auto k = static_cast<std::ptrdiff_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[static_cast<std::size_t>(k)];
}

}  // namespace

TEST_CASE("rng is deterministic and in range") {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
  }
  CHECK(derive_seed(1, 0, Stream::noise) != derive_seed(1, 1, Stream::noise));
  CHECK(derive_seed(1, 0, Stream::noise) != derive_seed(1, 0, Stream::input));
  CHECK(derive_seed(1, 0, Stream::noise) != derive_seed(2, 0, Stream::noise));
  CHECK(derive_seed(9, 4, Stream::plant) == derive_seed(9, 4, Stream::plant));
}

TEST_CASE("characteristic function of SaS draws") {
  for (double alpha : {1.2, 1.5, 1.8, 2.0}) {
    const auto x = stable_draws(alpha, 1.0, 200000, 100 + static_cast<int>(alpha * 10));
    for (double t : {0.5, 1.0, 2.0}) {
      CHECK(std::abs(empirical_cf(x, t) - std::exp(-std::pow(t, alpha))) < 0.02);
    }
  }
  // scale enters as exp(-|scale t|^alpha)
  const auto y = stable_draws(1.5, 2.0, 200000, 7);
  CHECK(std::abs(empirical_cf(y, 0.5) - std::exp(-1.0)) < 0.02);
}

TEST_CASE("alpha = 1 is standard Cauchy") {
  const auto x = stable_draws(1.0, 1.0, 100000, 11);
  CHECK(std::abs(quantile(x, 0.5)) < 0.05);
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  CHECK(iqr == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("alpha = 2 is Gaussian with variance 2 scale^2") {
  const auto x = stable_draws(2.0, 1.0, 100000, 21);
  Rng g(22);
  std::vector<double> y(100000);
  for (auto& v : y) v = std::sqrt(2.0) * g.normal();
  const auto ks = ks_two_sample(x, y);
  CHECK(ks.p_value > 0.01);
  const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / x.size();
  CHECK(var == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("KS test detects a scale mismatch") {
  const auto x = stable_draws(2.0, 1.0, 20000, 31);
  Rng g(32);
  std::vector<double> y(20000);
  for (auto& v : y) v = g.normal();
  CHECK(ks_two_sample(x, y).p_value < 1e-6);
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("alpha out of range is rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_alpha_stable(0.0, 1.0, rng), ConfigError);
  CHECK_THROWS_AS(sample_alpha_stable(2.5, 1.0, rng), ConfigError);
  NoiseSpec s;
  s.alpha = 2.1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.scale = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.kind = NoiseKind::mixed;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("logistic map by hand") {
  const auto raw = chaotic_raw(1, 0.9, 3);
  CHECK(raw[0] == doctest::Approx(0.36).epsilon(1e-15));
  CHECK(raw[1] == doctest::Approx(0.9216).epsilon(1e-15));
  CHECK(raw[2] == doctest::Approx(0.28901376).epsilon(1e-14));
  CHECK_THROWS_AS(chaotic_raw(2, 0.9, 3), ConfigError);
}

TEST_CASE("chaotic streams are bounded, centred, unit power") {
  for (int variant : {1, 3}) {
    const auto s = logistic_chaotic(variant, 200000);
    double mean = 0, power = 0, peak = 0;
    for (double v : s) {
      mean += v;
      power += v * v;
      peak = std::max(peak, std::abs(v));
    }
    mean /= s.size();
    power /= s.size();
    CHECK(std::abs(mean) < 0.02);
    CHECK(power == doctest::Approx(1.0).epsilon(0.03));
    CHECK(peak <= std::sqrt(2.0) + 1e-12);
    CHECK(s == logistic_chaotic(variant, 200000));
  }
}

TEST_CASE("AR(1) statistics") {
  Rng rng(41);
  const auto w = ar1_input(0.0, 1000, rng);
  CHECK(w.size() == 1000);

  Rng r2(42);
  const auto x = ar1_input(0.5, 100000, r2);
  double c0 = 0, c1 = 0;
  for (std::size_t n = 1; n < x.size(); ++n) {
    c0 += x[n] * x[n];
    c1 += x[n] * x[n - 1];
  }
  CHECK(std::abs(c1 / c0 - 0.5) < 0.02);

  Rng r3(43);
  const auto y = ar1_input(0.99, 1000000, r3);
  const double var = std::inner_product(y.begin(), y.end(), y.begin(), 0.0) / y.size();
  CHECK(var == doctest::Approx(1.0 / (1.0 - 0.99 * 0.99)).epsilon(0.10));

  Rng r4(44);
  CHECK_THROWS_AS(ar1_input(1.0, 10, r4), ConfigError);
}

TEST_CASE("schedule switches exactly at segment starts") {
  Schedule s;
  Segment a;
  a.noise.alpha = 1.5;
  Segment b;
  b.start = 20000;
  b.noise.alpha = 1.8;
  s.segments = {a, b};
  CHECK(s.segment_index(19999) == 0);
  CHECK(s.active(19999).noise.alpha == 1.5);
  CHECK(s.segment_index(20000) == 1);

  Schedule bad = s;
  bad.segments[1].start = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.segments[0].start = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(Schedule{}.validate(), ConfigError);
}

TEST_CASE("single-segment schedule equals the bare sampler") {
  NoiseSpec spec;
  spec.alpha = 1.7;
  spec.scale = 0.3;
  NoiseSource src(Schedule::single(spec), 77, 78);
  const auto stream = src.generate(1000);
  Rng rng(77);
  for (double v : stream) REQUIRE(v == sample_alpha_stable(1.7, 0.3, rng));
}

TEST_CASE("samples must be requested in order") {
  NoiseSource src(Schedule::single(NoiseSpec{}), 1, 2);
  src.next_sample(0);
  CHECK_THROWS_AS(src.next_sample(5), InputError);
}

TEST_CASE("mixed noise is the sum of two independent streams") {
  NoiseSpec spec;
  spec.kind = NoiseKind::mixed;
  spec.alpha = 1.7;
  spec.snr_db = 5.0;
  const double signal_power = 2.5;
  NoiseSource src(Schedule::single(spec), 10, 11, signal_power);
  const auto v = src.generate(5000);
  Rng a(10), b(11);
  const double sd = std::sqrt(signal_power / std::pow(10.0, 0.5));
  for (double s : v) {
    const double impulsive = sample_alpha_stable(1.7, 1.0, a);
    REQUIRE(s == impulsive + sd * b.normal());
  }
}

TEST_CASE("Gaussian level matches the configured SNR") {
  NoiseSpec spec;
  spec.kind = NoiseKind::gaussian;
  spec.snr_db = 5.0;
  const double signal_power = 0.8;
  NoiseSource src(Schedule::single(spec), 3, 4, signal_power);
  const auto v = src.generate(400000);
  const double p = std::inner_product(v.begin(), v.end(), v.begin(), 0.0) / v.size();
  CHECK(std::abs(10.0 * std::log10(signal_power / p) - 5.0) < 0.2);
}

TEST_CASE("chaotic segments restart from their initial condition") {
  NoiseSpec c1;
  c1.kind = NoiseKind::logistic_chaotic;
  c1.chaotic_variant = 1;
  NoiseSpec c3 = c1;
  c3.chaotic_variant = 3;
  Schedule s;
  s.segments = {Segment{0, c1, std::nullopt}, Segment{10, c3, std::nullopt}};
  NoiseSource src(s, 1, 2);
  const auto v = src.generate(20);
  const auto ref1 = logistic_chaotic(1, 10);
  const auto ref3 = logistic_chaotic(3, 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(v[i] == ref1[i]);
    CHECK(v[10 + i] == ref3[i]);
  }
}
