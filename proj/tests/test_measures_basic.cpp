#include <doctest.h>

#include <cmath>
#include <random>

#include "elastic/measures_basic.hpp"
#include "oracles.hpp"

using namespace elastic;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("euclidean and minkowski on the 3-4-5 triangle") {
  const auto a = vec({0, 0}), b = vec({3, 4});
  CHECK(euclidean(a, b) == 5.0);
  CHECK(euclidean(a, a) == 0.0);
  CHECK(minkowski(a, b, MinkowskiOrder(1)) == 7.0);
  CHECK(minkowski(a, b, MinkowskiOrder::infinity()) == 4.0);
  CHECK(minkowski(a, b, MinkowskiOrder(3)) == doctest::Approx(std::cbrt(27.0 + 64.0)));
  CHECK_THROWS_AS(MinkowskiOrder(0.5), ParameterError);
  CHECK_THROWS_AS(euclidean(a, vec({1, 2, 3})), DimensionError);
}

TEST_CASE("minkowski with p=2 matches euclidean on random inputs") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto x = oracle::random_series(rng, 17), y = oracle::random_series(rng, 17);
    CHECK(std::abs(minkowski(x, y, MinkowskiOrder(2)) - euclidean(x, y)) <= 1e-12);
    CHECK(euclidean(x, y) == euclidean(y, x));
  }
}

TEST_CASE("corr values and invariances") {
  CHECK(corr(vec({1, 2, 3}), vec({1, 2, 4})) == doctest::Approx(0.9819805060619657).epsilon(1e-12));
  std::mt19937_64 rng(2);
  const auto x = oracle::random_series(rng, 20);
  CHECK(corr(x, x) == doctest::Approx(1.0));
  CHECK(corr(x, (3.0 * x.array() + 2.0).matrix()) == doctest::Approx(1.0));
  CHECK(corr(x, (-0.5 * x.array() + 2.0).matrix()) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(corr(x, Eigen::VectorXd::Constant(20, 1.0)), DegenerateSeriesError);
}

TEST_CASE("autocorrelation closed forms") {
  Eigen::VectorXd alt(10);
  for (int t = 0; t < 10; ++t) alt(t) = t % 2 == 0 ? 1.0 : -1.0;
  CHECK(autocorr(alt, 1) == doctest::Approx(-9.0 / 10.0));
  CHECK(autocorr(Eigen::VectorXd::LinSpaced(12, 0, 11), 1) > 0);
  std::mt19937_64 rng(3);
  const auto x = oracle::random_series(rng, 30);
  for (int tau = 1; tau < 30; ++tau) {
    const double r = autocorr(x, tau);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
  CHECK_THROWS_AS(autocorr(x, 0), ParameterError);
  CHECK_THROWS_AS(autocorr(x, 30), ParameterError);
  CHECK_THROWS_AS(autocorr(Eigen::VectorXd::Constant(5, 2.0), 1), DegenerateSeriesError);
}

TEST_CASE("daco against a direct feature computation") {
  // Features written out longhand for a 3-series fixture.
  auto feature = [](const Eigen::VectorXd& x, int tau) {
    const double m = x.mean();
    double num = 0, den = 0;
    for (Eigen::Index t = 0; t < x.size(); ++t) den += (x(t) - m) * (x(t) - m);
    for (Eigen::Index t = 0; t + tau < x.size(); ++t) num += (x(t) - m) * (x(t + tau) - m);
    return num / den;
  };
  const std::vector<Eigen::VectorXd> s{vec({1, 3, 2, 5, 4, 6}), vec({0, -1, 2, 1, 3, 0}), vec({2, 2, 1, 0, 1, 5})};
  for (int k = 1; k <= 5; ++k) {
    for (const auto& a : s) {
      for (const auto& b : s) {
        double ref = 0;
        for (int tau = 1; tau <= k; ++tau) ref += std::pow(feature(a, tau) - feature(b, tau), 2);
        CHECK(daco(a, b, DacoConfig{k}) == doctest::Approx(ref).epsilon(1e-12));
      }
    }
  }
  CHECK(daco(s[0], s[0], DacoConfig{3}) == 0.0);
  CHECK(daco(s[0], (2.5 * s[0].array() - 7.0).matrix(), DacoConfig{4}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(daco(s[0], (-2.0 * s[0].array()).matrix(), DacoConfig{4}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(daco(s[0], s[1], DacoConfig{6}), ParameterError);
}

TEST_CASE("correlation equals one minus scaled squared distance after z-normalization") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 200; ++k) {
    const int T = 2 + k % 60;
    const auto x = znormalized(oracle::random_series(rng, T));
    const auto y = znormalized(oracle::random_series(rng, T));
    const double d = euclidean(x, y);
    CHECK(std::abs(corr(x, y) - (1.0 - d * d / (2.0 * T))) <= 1e-9);
  }
}

TEST_CASE("TimeSeries overloads agree with the vector forms") {
  const TimeSeries a(vec({0, 1, 3, 2}), 1), b(vec({1, 1, 0, 2}), 2);
  CHECK(euclidean(a, b) == euclidean(a.values(), b.values()));
  CHECK(corr(a, b) == corr(a.values(), b.values()));
  CHECK(daco(a, b, DacoConfig{2}) == daco(a.values(), b.values(), DacoConfig{2}));
}
