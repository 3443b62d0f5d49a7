#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tbmcg/algorithm.hpp"
#include "tbmcg/baselines.hpp"
#include "tbmcg/errors.hpp"
#include "tbmcg/noise.hpp"
#include "tbmcg/sysid.hpp"

using namespace tbmcg;

namespace {

struct Record {
  std::vector<std::vector<double>> x;
  std::vector<double> d;
  std::vector<double> h_o;
};

Record colored_record(std::size_t L, std::size_t N, std::uint64_t seed) {
  Rng rng(seed);
  Record r;
  r.h_o = random_plant(L, rng).h_o;
  const auto u = ar1_input(0.5, N, rng);
  std::vector<double> tap(L, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    std::rotate(tap.rbegin(), tap.rbegin() + 1, tap.rend());
    tap[0] = u[n];
    r.x.push_back(tap);
    double d = 0;
    for (std::size_t i = 0; i < L; ++i) d += r.h_o[i] * tap[i];
    r.d.push_back(d);
  }
  return r;
}

// Exponentially weighted, ridge-regularised least squares on the record.
Eigen::VectorXd ls_solution(const Record& r, double lambda, double delta) {
  const auto L = static_cast<Eigen::Index>(r.h_o.size());
  const std::size_t N = r.d.size();
  Eigen::MatrixXd A = std::pow(lambda, static_cast<double>(N)) * delta *
                      Eigen::MatrixXd::Identity(L, L);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(L);
  for (std::size_t n = 0; n < N; ++n) {
    const double w = std::pow(lambda, static_cast<double>(N - 1 - n));
    const Eigen::Map<const Eigen::VectorXd> x(r.x[n].data(), L);
    A += w * x * x.transpose();
    b += w * r.d[n] * x;
  }
  return A.ldlt().solve(b);
}

}  // namespace

TEST_CASE("RLS matches a regularised least-squares solve") {
  const std::size_t L = 10;
  const auto rec = colored_record(L, 500, 17);
  for (double lambda : {0.999, 0.99}) {
    RlsFilter f(L, lambda, 1e-2);
    for (std::size_t n = 0; n < rec.d.size(); ++n) f.step(rec.x[n], rec.d[n]);
    const Eigen::VectorXd ref = ls_solution(rec, lambda, 1e-2);
    const Eigen::Map<const Eigen::VectorXd> h(f.weights().data(), static_cast<Eigen::Index>(L));
    CHECK((h - ref).norm() / ref.norm() < 1e-6);
  }
}

TEST_CASE("RLS identifies a noiseless plant") {
  const auto rec = colored_record(10, 500, 3);
  RlsFilter f(10, 0.999, 1e-2);
  for (std::size_t n = 0; n < rec.d.size(); ++n) f.step(rec.x[n], rec.d[n]);
  CHECK(nmsd_db(f.weights(), rec.h_o) < -60.0);
}

TEST_CASE("LMS with zero step size never moves") {
  const auto rec = colored_record(4, 200, 5);
  LmsFilter f(4, 0.0);
  for (std::size_t n = 0; n < rec.d.size(); ++n) f.step(rec.x[n], rec.d[n]);
  for (double w : f.weights()) CHECK(w == 0.0);
}

TEST_CASE("LMS and NLMS converge on clean data") {
  const auto rec = colored_record(6, 4000, 8);
  LmsFilter lms(6, 0.02);
  NlmsFilter nlms(6, 0.5, 1e-6);
  for (std::size_t n = 0; n < rec.d.size(); ++n) {
    lms.step(rec.x[n], rec.d[n]);
    nlms.step(rec.x[n], rec.d[n]);
  }
  CHECK(nmsd_db(lms.weights(), rec.h_o) < -40.0);
  CHECK(nmsd_db(nlms.weights(), rec.h_o) < -40.0);
}

TEST_CASE("NMCC shrinks large-error updates below NLMS") {
  const std::vector<double> x{0.5, -1.0, 0.25};
  NmccFilter nmcc(3, 0.5, 1.0, 1e-6);
  NlmsFilter nlms(3, 0.5, 1e-6);
  nmcc.step(x, 8.0);
  nlms.step(x, 8.0);
  double a = 0, b = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    a += nmcc.weights()[i] * nmcc.weights()[i];
    b += nlms.weights()[i] * nlms.weights()[i];
  }
  CHECK(std::sqrt(a) < std::sqrt(b));
  // exp(-64 / 2) scaling by hand
  CHECK(std::sqrt(a / b) == doctest::Approx(std::exp(-32.0)).epsilon(1e-9));
  CHECK(nmcc.last_ops().specials == 1);
}

TEST_CASE("LMM Hampel weight regions") {
  LmmOptions o;
  o.window = 5;
  LmmFilter f(2, o);
  const std::vector<double> x{1.0, 0.0};
  for (int i = 0; i < 5; ++i) f.step(x, 0.0 + 1.0);  // first steps fix sigma
  const double s = f.scale();
  REQUIRE(s > 0.0);
  CHECK(f.hampel_weight(0.5 * 1.96 * s) == 1.0);
  const double mid = 2.1 * s;
  CHECK(f.hampel_weight(mid) == doctest::Approx(1.96 * s / mid));
  const double ramp = 2.4 * s;
  CHECK(f.hampel_weight(ramp) ==
        doctest::Approx(1.96 * s / ramp * (2.576 * s - ramp) / (2.576 * s - 2.24 * s)));
  CHECK(f.hampel_weight(3.0 * s) == 0.0);
  CHECK(f.hampel_weight(-3.0 * s) == 0.0);
}

TEST_CASE("LMM ignores a gross impulse") {
  const auto rec = colored_record(4, 3000, 12);
  LmmOptions o;
  o.mu = 0.01;
  LmmFilter f(4, o);
  for (std::size_t n = 0; n < rec.d.size(); ++n) f.step(rec.x[n], rec.d[n] + 1e-3);
  const std::vector<double> before(f.weights().begin(), f.weights().end());
  f.step(rec.x[5], rec.d[5] + 1e6);
  CHECK(std::equal(before.begin(), before.end(), f.weights().begin()));
}

TEST_CASE("robust NLMS and log LMS bound impulse updates") {
  const std::vector<double> x{1.0, 0.5};
  RobustNlmsFilter r(2, 0.5, 1e-6, 2);
  LogLmsFilter g(2, 0.5, 1.0);
  LmsFilter plain(2, 0.5);
  r.step(x, 1e6);
  g.step(x, 1e6);
  plain.step(x, 1e6);
  CHECK(std::abs(r.weights()[0]) < 1.0);
  CHECK(std::abs(g.weights()[0]) < 1.0);
  CHECK(std::abs(plain.weights()[0]) > 1e5);
}

TEST_CASE("factory honours aliases and validates") {
  CHECK(parse_algorithm_kind("fxrls") == AlgorithmKind::rls);
  CHECK(parse_algorithm_kind("rfxlms") == AlgorithmKind::robust_nlms);
  CHECK(parse_algorithm_kind("fxlog") == AlgorithmKind::log_lms);
  CHECK(parse_algorithm_kind("fxtbmcg") == AlgorithmKind::tbmcg);
  CHECK_THROWS_AS(parse_algorithm_kind("kalman"), ConfigError);
  AlgorithmSpec s;
  s.kind = AlgorithmKind::rls;
  s.lambda = 1.5;
  CHECK_THROWS_AS(make_filter(s, 4), ConfigError);
  s = {};
  s.kind = AlgorithmKind::nmcc;
  s.sigma = 0.0;
  CHECK_THROWS_AS(make_filter(s, 4), ConfigError);
  for (auto k : {AlgorithmKind::lms, AlgorithmKind::nlms, AlgorithmKind::rls, AlgorithmKind::lmm,
                 AlgorithmKind::nmcc, AlgorithmKind::robust_nlms, AlgorithmKind::log_lms,
                 AlgorithmKind::cg, AlgorithmKind::tbmcg}) {
    AlgorithmSpec spec;
    spec.kind = k;
    auto f = make_filter(spec, 5);
    CHECK(f->length() == 5);
  }
}

TEST_CASE("divergence is flagged, not thrown") {
  LmsFilter f(2, 10.0);
  Rng rng(1);
  std::vector<double> x(2);
  for (int n = 0; n < 2000 && !f.diverged(); ++n) {
    x[1] = x[0];
    x[0] = 10.0 * rng.normal();
    f.step(x, x[0]);
  }
  CHECK(f.diverged());
}
