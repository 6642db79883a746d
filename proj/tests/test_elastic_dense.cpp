#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "elastic/elastic_dense.hpp"
#include "oracles.hpp"

using namespace elastic;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd small_ints(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> d(-4, 4);
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) v(t) = d(rng);
  return v;
}

double diagonal_cost(const Eigen::VectorXd& x, const Eigen::VectorXd& y, LocalCost c) {
  double s = 0;
  for (Eigen::Index t = 0; t < x.size(); ++t) s += local_cost(x(t), y(t), c);
  return s;
}

}  // namespace

TEST_CASE("dtw violates the triangle inequality with absolute differences") {
  const auto x = vec({0}), y = vec({1, 2}), z = vec({2, 3, 3});
  const auto abs = LocalCost::absolute_difference;
  CHECK(dtw(x, y, abs).value == 3.0);
  CHECK(dtw(y, z, abs).value == 3.0);
  CHECK(dtw(x, z, abs).value == 8.0);
  CHECK(dtw(x, y).value == 5.0);
}

TEST_CASE("dtw of a series with itself follows the diagonal") {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_series(rng, 9);
  for (auto c : {LocalCost::squared_difference, LocalCost::absolute_difference}) {
    const auto r = dtw(x, x, c);
    CHECK(r.value == 0.0);
    REQUIRE(r.path.size() == 9);
    for (int t = 0; t < 9; ++t) CHECK(r.path.cells[t] == Cell{t, t});
  }
}

TEST_CASE("backtracking prefers the diagonal, then up, then left") {
  // All-zero costs: every step is tied.
  const auto z = dtw(vec({0, 0, 0}), vec({0, 0, 0}));
  CHECK(z.path.cells == std::vector<Cell>{{0, 0}, {1, 1}, {2, 2}});
  // Up and left tied at the last cell; diagonal worse.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> D(2, 2);
  D << 0, 1, 1, 5;
  CHECK(backtrack(D).cells == std::vector<Cell>{{0, 0}, {1, 1}});
  D << 2, 1, 1, 5;
  CHECK(backtrack(D).cells == std::vector<Cell>{{0, 0}, {0, 1}, {1, 1}});
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> E(2, 3);
  E << 0, 1, 3, 4, 9, 1;
  // at (1,2): diag (0,1)=1, up (0,2)=3, left (1,1)=9
  CHECK(backtrack(E).cells == std::vector<Cell>{{0, 0}, {0, 1}, {1, 2}});
}

TEST_CASE("dtw equals the minimum over enumerated paths") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> len(1, 5);
  int instances = 0;
  for (int k = 0; k < 600; ++k) {
    const int n = len(rng), m = len(rng);
    const bool ints = k % 2 == 0;
    const auto x = ints ? small_ints(rng, n) : oracle::random_series(rng, n);
    const auto y = ints ? small_ints(rng, m) : oracle::random_series(rng, m);
    for (auto c : {LocalCost::squared_difference, LocalCost::absolute_difference}) {
      const auto r = dtw(x, y, c);
      const double ref = oracle::dtw(x, y, c);
      if (ints) CHECK(r.value == ref);
      else CHECK(r.value == doctest::Approx(ref).epsilon(1e-12));
      CHECK(r.visited == n * m);
      CHECK(is_admissible(r.path, n, m));
      CHECK(r.path.size() >= static_cast<std::size_t>(std::max(n, m)));
      CHECK(r.path.size() <= static_cast<std::size_t>(n + m - 1));
      CHECK(oracle::path_cost(r.path.cells, x, y, c) == doctest::Approx(r.value).epsilon(1e-9));
      CHECK(dtw_value(x, y, c).value == doctest::Approx(r.value).epsilon(1e-12));
    }
    ++instances;
  }
  CHECK(instances >= 500);
}

TEST_CASE("banded dtw bounds and limits") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const int T = 1 + k % 25;
    const auto x = oracle::random_series(rng, T), y = oracle::random_series(rng, T);
    const auto c = k % 3 == 0 ? LocalCost::absolute_difference : LocalCost::squared_difference;
    const double full = dtw(x, y, c).value;
    double prev = diagonal_cost(x, y, c);
    for (int pct = 0; pct <= 100; pct += 5) {
      const BandConfig band{pct};
      const int r = band.radius(T);
      const auto b = dtw_sc(x, y, c, band);
      CHECK(b.visited == band_cell_count(T, r));
      CHECK(b.value >= full - 1e-12);
      CHECK(b.value <= prev + 1e-12);
      prev = b.value;
    }
    CHECK(dtw_sc(x, y, c, BandConfig{0}).value == doctest::Approx(diagonal_cost(x, y, c)).epsilon(1e-12));
    CHECK(dtw_sc(x, y, c, BandConfig{100}).value == doctest::Approx(full).epsilon(1e-12));
  }
}

TEST_CASE("banded dtw matches enumeration restricted to the band") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const int T = 1 + k % 5;
    const auto x = oracle::random_series(rng, T), y = oracle::random_series(rng, T);
    for (int pct : {0, 20, 25, 40, 50, 75, 100}) {
      const int r = BandConfig{pct}.radius(T);
      const double ref = oracle::dtw(x, y, LocalCost::squared_difference,
                                     [r](Cell c) { return std::abs(c.row - c.col) <= r; });
      CHECK(dtw_sc(x, y, LocalCost::squared_difference, BandConfig{pct}).value == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("band radius and cell counts") {
  CHECK(BandConfig{6}.radius(270) == 16);
  CHECK(band_cell_count(270, 16) == 8638);
  CHECK(band_cell_count(176, BandConfig{3}.radius(176)) == 1906);
  CHECK(band_cell_count(128, BandConfig{11}.radius(128)) == 3502);
  CHECK(band_cell_count(150, 0) == 150);
  CHECK(band_cell_count(10, 9) == 100);
  CHECK(BandConfig{100}.radius(10) == 9);
  CHECK_THROWS_AS(BandConfig{101}.radius(10), ParameterError);
  CHECK_THROWS_AS(BandConfig{-1}.radius(10), ParameterError);
  // geometric count by brute force
  for (int T = 1; T < 40; ++T) {
    for (int r = 0; r < T; ++r) {
      std::int64_t n = 0;
      for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) n += std::abs(i - j) <= r;
      CHECK(band_cell_count(T, r) == n);
    }
  }
}

TEST_CASE("local kernel") {
  const KernelConfig k{1.0};
  CHECK(local_kernel(0.3, 0.3, k) == 1.0);
  CHECK(local_kernel(0.0, 1.0, k) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  double prev = 1.0;
  for (double d = 0.1; d < 10; d += 0.1) {
    const double v = local_kernel(0.0, d, k);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(local_kernel(0.0, 1.0, KernelConfig{0.0}), ParameterError);
  CHECK_THROWS_AS(local_kernel(0.0, 1.0, KernelConfig{-1.0}), ParameterError);
}

TEST_CASE("krdtw of single samples is twice the local kernel") {
  const KernelConfig k{0.7};
  const auto r = krdtw(vec({0.2}), vec({1.1}), k);
  CHECK(std::exp(r.log_value) == doctest::Approx(2 * local_kernel(0.2, 1.1, k)).epsilon(1e-14));
  CHECK(r.visited == 1);
  const auto s = krdtw_sc(vec({0.2}), vec({1.1}), k, BandConfig{0});
  CHECK(s.log_value == doctest::Approx(r.log_value));
}

TEST_CASE("krdtw terms equal the enumerated path sums") {
  std::mt19937_64 rng(9);
  int instances = 0;
  for (int k = 0; k < 600; ++k) {
    const int T = 1 + k % 5;
    const double nu = 0.1 + 0.3 * (k % 7);
    const auto x = oracle::random_series(rng, T), y = oracle::random_series(rng, T);
    const auto r = krdtw(x, y, KernelConfig{nu});
    const double k1 = oracle::k1(x, y, nu), k2 = oracle::k2(x, y, nu);
    CHECK(std::exp(r.log_k1) == doctest::Approx(k1).epsilon(1e-9));
    CHECK(std::exp(r.log_k2) == doctest::Approx(k2).epsilon(1e-9));
    CHECK(std::exp(r.log_value) == doctest::Approx(k1 + k2).epsilon(1e-9));
    CHECK(r.visited == T * T);
    ++instances;
  }
  CHECK(instances >= 500);
}

TEST_CASE("banded krdtw matches enumeration within the band") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 150; ++k) {
    const int T = 1 + k % 5;
    const auto x = oracle::random_series(rng, T), y = oracle::random_series(rng, T);
    for (int pct : {0, 25, 50, 100}) {
      const int r = BandConfig{pct}.radius(T);
      auto in_band = [r](Cell c) { return std::abs(c.row - c.col) <= r; };
      const double ref = oracle::k1(x, y, 0.5, in_band) + oracle::k2(x, y, 0.5, in_band);
      const auto b = krdtw_sc(x, y, KernelConfig{0.5}, BandConfig{pct});
      CHECK(std::exp(b.log_value) == doctest::Approx(ref).epsilon(1e-9));
      CHECK(b.visited == band_cell_count(T, r));
    }
  }
}

TEST_CASE("krdtw is symmetric, banded at full width equals full, and survives long series") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const int T = 2 + k;
    const auto x = oracle::random_series(rng, T), y = oracle::random_series(rng, T);
    const KernelConfig cfg{0.2};
    const double a = krdtw(x, y, cfg).log_value, b = krdtw(y, x, cfg).log_value;
    CHECK(std::abs(a - b) <= 1e-9 * std::abs(a) + 1e-12);
    CHECK(krdtw_sc(x, y, cfg, BandConfig{100}).log_value == doctest::Approx(a).epsilon(1e-12));
  }
  const auto x = oracle::random_series(rng, 2000), y = oracle::random_series(rng, 2000);
  const auto r = krdtw(x, y, KernelConfig{1.0});
  CHECK(std::isfinite(r.log_value));
  CHECK(r.log_value < -1000);  // far below the smallest double
}

TEST_CASE("normalized krdtw Gram matrices are positive semidefinite") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<Eigen::VectorXd> s;
    for (int i = 0; i < 30; ++i) s.push_back(oracle::random_series(rng, 24));
    for (int pct : {100, 10}) {
      Eigen::MatrixXd L(30, 30);
      for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) L(i, j) = krdtw_sc(s[i], s[j], KernelConfig{0.5}, BandConfig{pct}).log_value;
      Eigen::MatrixXd G(30, 30);
      for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) G(i, j) = std::exp(L(i, j) - 0.5 * L(i, i) - 0.5 * L(j, j));
      CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(dtw(Eigen::VectorXd(), vec({1})), DimensionError);
  CHECK_THROWS_AS(dtw_sc(vec({1, 2}), vec({1}), LocalCost::squared_difference, BandConfig{0}), DimensionError);
  CHECK_THROWS_AS(krdtw(vec({1, 2}), vec({1}), KernelConfig{}), DimensionError);
  CHECK(dtw(vec({1, 2}), vec({1})).value == 1.0);
}

TEST_CASE("admissibility checker") {
  AlignmentPath p{{{0, 0}, {1, 1}, {1, 2}}};
  CHECK(is_admissible(p, 2, 3));
  CHECK_FALSE(is_admissible(p, 3, 3));
  CHECK_FALSE(is_admissible(AlignmentPath{{{0, 0}, {1, 2}}}, 2, 3));
  CHECK_FALSE(is_admissible(AlignmentPath{{{0, 0}, {0, 0}, {1, 1}}}, 2, 2));
  CHECK_FALSE(is_admissible(AlignmentPath{}, 1, 1));
}
