#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "elastic/errors.hpp"
#include "elastic/eval.hpp"
#include "oracles.hpp"

using namespace elastic;

namespace {

Dataset toy(std::uint64_t seed, int per_class, int T) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.3);
  std::uniform_int_distribution<int> shift(-2, 2);
  std::vector<TimeSeries> items;
  for (int i = 0; i < 3 * per_class; ++i) {
    const int label = i % 3;
    Eigen::VectorXd v(T);
    const int s = shift(rng);
    for (int t = 0; t < T; ++t) {
      const double u = static_cast<double>(t + s) / T;
      v(t) = (label == 0 ? std::sin(6.3 * u) : label == 1 ? (u > 0.5 ? 1.0 : -1.0) : 2 * u - 1) + noise(rng);
    }
    items.emplace_back(v, label);
  }
  return Dataset(std::move(items), "toy");
}

Dataset ucr(const std::string& name, const std::string& part) {
  return load_ucr(std::string(ELASTIC_DATA_DIR) + "/" + name + "/" + name + "_" + part + ".tsv");
}

MeasureSpec spec(MeasureKind k) {
  MeasureSpec s;
  s.kind = k;
  return s;
}

}  // namespace

TEST_CASE("speed-up accounting") {
  CHECK(speedup(0, 10) == 100.0);
  CHECK(speedup(100, 10) == 0.0);
  CHECK(speedup(1320, 176) == doctest::Approx(95.7386).epsilon(1e-4));
  CHECK(mean_speedup(300, 3, 10) == 0.0);
  CHECK(mean_speedup(150, 3, 10) == 50.0);
  CHECK(mean_speedup(0, 0, 10) == 0.0);
  CHECK_THROWS_AS(speedup(1, 0), ParameterError);
}

TEST_CASE("measure names round trip") {
  for (auto k : {MeasureKind::ed, MeasureKind::minkowski, MeasureKind::corr, MeasureKind::daco, MeasureKind::dtw,
                 MeasureKind::dtw_sc, MeasureKind::krdtw, MeasureKind::krdtw_sc, MeasureKind::sp_dtw,
                 MeasureKind::sp_krdtw})
    CHECK(parse_measure_kind(to_string(k)) == k);
  CHECK(parse_measure_kind("sp-dtw") == MeasureKind::sp_dtw);
  CHECK_THROWS_AS(parse_measure_kind("cosine"), ParameterError);
}

TEST_CASE("nearest neighbour ties keep the lowest index") {
  Eigen::RowVectorXd row(4);
  row << 2, 1, 1, 3;
  CHECK(nearest(row, false) == 1);
  CHECK(nearest(row, false, 1) == 2);
  CHECK(nearest(row, true) == 3);
  row << 5, 5, 5, 5;
  CHECK(nearest(row, true, 0) == 1);
}

TEST_CASE("classifying the training set against itself makes no error") {
  const auto d = toy(60, 5, 24);
  for (auto k : {MeasureKind::ed, MeasureKind::dtw, MeasureKind::dtw_sc, MeasureKind::krdtw, MeasureKind::corr}) {
    const auto r = onenn(d, d, Measure(spec(k)));
    CAPTURE(to_string(k));
    CHECK(r.error_rate == 0.0);
    CHECK(r.comparisons == static_cast<std::int64_t>(d.size() * d.size()));
  }
}

TEST_CASE("full-grid sparse measures predict like their dense counterparts") {
  const auto train = toy(61, 6, 20), test = toy(62, 6, 20);
  const auto full = std::make_shared<const SparsePathMatrix>(SparsePathMatrix::full_grid(20));
  const auto a = onenn(train, test, Measure(spec(MeasureKind::dtw)));
  const auto b = onenn(train, test, Measure(spec(MeasureKind::sp_dtw), full));
  CHECK(a.predictions == b.predictions);
  CHECK(a.total_visited == b.total_visited);
  CHECK(b.speedup_pct == 0.0);
  const auto c = onenn(train, test, Measure(spec(MeasureKind::krdtw)));
  const auto e = onenn(train, test, Measure(spec(MeasureKind::sp_krdtw), full));
  CHECK(c.predictions == e.predictions);
}

TEST_CASE("corr and Ed agree on z-normalized Gun-Point") {
  const auto train = znormalize(ucr("GunPoint", "TRAIN")), test = znormalize(ucr("GunPoint", "TEST"));
  const auto a = onenn(train, test, Measure(spec(MeasureKind::ed)));
  const auto b = onenn(train, test, Measure(spec(MeasureKind::corr)));
  CHECK(a.predictions == b.predictions);
  CHECK(a.error_rate == doctest::Approx(0.0867).epsilon(1e-3));
}

TEST_CASE("leave-one-out is symmetric-aware and independent of workers") {
  const auto d = toy(63, 8, 30);
  for (auto k : {MeasureKind::dtw, MeasureKind::krdtw, MeasureKind::ed}) {
    const Measure m(spec(k));
    const auto within = compare_within(d, m, 1);
    const auto full = compare(d, d, m, 1);
    CHECK((within.values - full.values).cwiseAbs().maxCoeff() <= 1e-12);
    const double one = loo_error(d, m, 1), four = loo_error(d, m, 4);
    CHECK(one == four);
    const auto labels = d.labels();
    CHECK(loo_error(within.values, labels, m.similarity()) == one);
  }
}

TEST_CASE("leave-one-out excludes the held-out item") {
  // two identical items of different classes see each other; the third ties
  // between them and takes the lower index
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(5, 0, 1);
  const Dataset d(std::vector<TimeSeries>{TimeSeries(v, 0), TimeSeries(v, 1), TimeSeries(v * 3, 1)});
  CHECK(loo_error(d, Measure(spec(MeasureKind::ed))) == 1.0);
}

TEST_CASE("lattice defaults") {
  const auto l = Lattice::defaults(150);
  CHECK(l.thetas.size() == 16);
  CHECK(l.thetas.front() == 0);
  CHECK(l.thetas.back() == 15);
  CHECK(l.gammas == std::vector<double>{0, 0.25, 0.5, 1, 2});
  CHECK(l.band_pcts.size() == 21);
  CHECK(l.cs == std::vector<double>{0.1, 1, 10, 100});
  CHECK(l.daco_ks == std::vector<int>{1, 19, 38, 75, 149});
  CHECK(Lattice::defaults(2).daco_ks == std::vector<int>{1});
}

TEST_CASE("lattice expansion puts sparser points first and drops inadmissible thetas") {
  const auto d = toy(64, 4, 16);
  const auto grid = LearnedGrid::learn(d, LocalCost::squared_difference);
  Lattice l;
  l.thetas = {0, 3, 1000000};
  l.gammas = {0, 1};
  const auto pts = expand_lattice(spec(MeasureKind::sp_dtw), l, d, TuneOptions{}, &grid);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].sparsify.theta == 3);
  CHECK(pts[0].sparsify.gamma == 0);
  CHECK(pts[1].sparsify.gamma == 1);
  CHECK(pts[3].sparsify.theta == 0);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK_FALSE(sparser_first(pts[i], pts[i - 1]));
}

TEST_CASE("grid search keeps the first minimum") {
  const auto d = toy(65, 5, 20);
  std::vector<MeasureSpec> one{spec(MeasureKind::dtw)};
  const auto r = grid_search_loo(d, one, TuneOptions{});
  CHECK(r.curve.size() == 1);
  CHECK(r.best_error == loo_error(d, Measure(spec(MeasureKind::dtw))));

  // every corridor width gives the same error on identical series
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(10, 0, 1);
  const Dataset same(std::vector<TimeSeries>{TimeSeries(v, 0), TimeSeries(v, 0), TimeSeries(-v, 1), TimeSeries(-v, 1)});
  std::vector<MeasureSpec> bands;
  for (int pct : {5, 0, 10}) {
    auto s = spec(MeasureKind::dtw_sc);
    s.band.pct = pct;
    bands.push_back(s);
  }
  const auto b = grid_search_loo(same, bands, TuneOptions{});
  CHECK(b.best.band.pct == 5);
  CHECK(b.best_error == 0.0);
}

TEST_CASE("theta zero never beats a sparser tie") {
  const auto d = toy(66, 5, 20);
  auto base = spec(MeasureKind::sp_dtw);
  Lattice l;
  l.thetas = {0, 1, 2};
  l.gammas = {0};
  const auto t = tune_onenn(d, base, TuneOptions{}, l);
  double err_at_zero = 1;
  for (const auto& p : t.search.curve)
    if (p.spec.sparsify.theta == 0) err_at_zero = p.error;
  CHECK(t.search.best_error <= err_at_zero);
  for (const auto& p : t.search.curve)
    if (p.error == t.search.best_error) {
      CHECK(p.spec.sparsify.theta <= t.search.best.sparsify.theta);
    }
  REQUIRE(t.measure.path_matrix() != nullptr);
  CHECK(t.measure.path_matrix()->theta() == t.search.best.sparsify.theta);
}

TEST_CASE("stratified folds") {
  std::vector<int> labels;
  for (int i = 0; i < 23; ++i) labels.push_back(i < 13 ? 4 : 9);
  const auto f = stratified_folds(labels, 5, 7);
  CHECK(f == stratified_folds(labels, 5, 7));
  std::map<std::pair<int, int>, int> count;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(f[i] >= 0);
    CHECK(f[i] < 5);
    ++count[{labels[i], f[i]}];
  }
  for (int k = 0; k < 5; ++k) {
    CHECK(std::abs(count[{4, k}] - 13.0 / 5) < 1);
    CHECK(std::abs(count[{9, k}] - 10.0 / 5) < 1);
  }
}

TEST_CASE("normalized kernel Gram matrices") {
  const auto d = toy(67, 4, 16);
  auto s = spec(MeasureKind::krdtw);
  s.kernel.nu = 0.5;
  const auto g = kernel_gram(d, Measure(s), 0);
  CHECK((g.diagonal().array() - 1).abs().maxCoeff() <= 1e-12);
  CHECK(is_positive_semidefinite(g, 1e-8));
  std::int64_t visited = 0;
  const auto cross = kernel_matrix(d, d, Measure(s), 0, &visited);
  CHECK((cross - g).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(visited == static_cast<std::int64_t>(d.size() * d.size()) * 16 * 16);
  auto e = spec(MeasureKind::ed);
  e.kernel.nu = 0.1;
  const auto ge = kernel_gram(d, Measure(e), 0);
  const double d01 = (d[0].values() - d[1].values()).squaredNorm();
  CHECK(ge(0, 1) == doctest::Approx(std::exp(-0.1 * d01)).epsilon(1e-12));
}

TEST_CASE("SVM evaluation on a toy problem") {
  const auto train = toy(68, 6, 20), test = toy(69, 6, 20);
  Lattice l = Lattice::defaults(20);
  l.thetas = {0, 2};
  l.nus = {0.1, 1};
  const auto r = svm_evaluate(train, test, spec(MeasureKind::sp_krdtw), TuneOptions{}, l);
  CHECK(r.report.error_rate <= 0.2);
  CHECK(r.curve.size() == 2 * 2 * 4);
  CHECK(r.report.chosen_params.find(";C=") != std::string::npos);
}

TEST_CASE("report rows") {
  EvalReport r;
  r.error_rate = 0.0866666;
  r.total_visited = 123;
  r.speedup_pct = 61.66;
  r.chosen_params = "theta=15;gamma=2";
  CHECK(report_header() == "dataset,measure,classifier,error_rate,visited_total,speedup_pct,params");
  CHECK(report_row("GunPoint", "sp_dtw", "1nn", r) == "GunPoint,sp_dtw,1nn,0.087,123,61.7,theta=15;gamma=2");
}

TEST_CASE("measure specifications are validated") {
  auto s = spec(MeasureKind::dtw_sc);
  s.band.pct = 101;
  CHECK_THROWS_AS(s.validate(10), ParameterError);
  auto k = spec(MeasureKind::krdtw);
  k.kernel.nu = 0;
  CHECK_THROWS_AS(k.validate(10), ParameterError);
  auto dc = spec(MeasureKind::daco);
  dc.daco.k = 10;
  CHECK_THROWS_AS(dc.validate(10), ParameterError);
  CHECK_THROWS(Measure(spec(MeasureKind::sp_dtw)));
}
