#include <doctest.h>

#include <cmath>
#include <sstream>

#include "elastic/series.hpp"

using namespace elastic;

namespace {

Dataset parse(const std::string& text, std::optional<char> delim = std::nullopt) {
  std::istringstream in(text);
  return parse_ucr(in, delim);
}

}  // namespace

TEST_CASE("comma fixture parses to two labeled series") {
  const auto d = parse("1,0.0,1.0\n2,1.0,0.0");
  CHECK(d.size() == 2);
  CHECK(d.length() == 2);
  CHECK(d.labels() == std::vector<int>{1, 2});
  CHECK(d[0][1] == 1.0);
  CHECK(d[1][0] == 1.0);
}

TEST_CASE("delimiters are detected from the first line") {
  CHECK(parse("1\t0.5\t2\n0\t1\t3\n").length() == 2);
  CHECK(parse("  1   0.5  2\n  0  1   3\n").length() == 2);
  CHECK(parse("1,0.5,2\n", ',').length() == 2);
  CHECK_THROWS_AS(parse("1;0.5;2\n", ';'), ParameterError);
}

TEST_CASE("real-valued labels are truncated toward zero") {
  const auto d = parse("1.0,3,4\n-2.7,1,2\n2.9,0,0\n");
  CHECK(d.labels() == std::vector<int>{1, -2, 2});
}

TEST_CASE("malformed input raises the documented errors") {
  CHECK_THROWS_AS(parse(""), EmptyInputError);
  CHECK_THROWS_AS(parse("\n\n"), EmptyInputError);
  CHECK_THROWS_AS(parse("1,a,2\n"), ParseError);
  try {
    parse("1,1,2\n1,1,2\n2,1\n");
    FAIL("ragged input accepted");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("1,nan,2\n"), ParseError);
}

TEST_CASE("time series and datasets enforce their invariants") {
  CHECK_THROWS_AS(TimeSeries(Eigen::VectorXd()), DimensionError);
  Eigen::VectorXd bad(2);
  bad << 1, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TimeSeries(bad, 1), DataError);
  CHECK_THROWS_AS(Dataset(std::vector<TimeSeries>{}), EmptyInputError);
  CHECK_THROWS_AS(Dataset({TimeSeries(Eigen::VectorXd::Zero(2)), TimeSeries(Eigen::VectorXd::Zero(3))}), FormatError);
}

TEST_CASE("write then parse reproduces every value bit for bit") {
  std::vector<TimeSeries> items;
  Eigen::VectorXd a(3), b(3);
  a << 0.1, -1.0 / 3.0, 1e-300;
  b << 123456.789, M_PI, -0.0;
  items.emplace_back(a, 1);
  items.emplace_back(b, 7);
  const Dataset d(items);
  for (char delim : {'\t', ','}) {
    std::ostringstream out;
    write_ucr(out, d, delim);
    const auto back = parse(out.str());
    REQUIRE(back.size() == 2);
    CHECK(back.labels() == d.labels());
    for (std::size_t i = 0; i < 2; ++i)
      for (Eigen::Index t = 0; t < 3; ++t) CHECK(back[i][t] == d[i][t]);
  }
}

TEST_CASE("znormalize uses the population deviation") {
  Eigen::VectorXd x(3);
  x << 1, 2, 3;
  const auto z = znormalize(TimeSeries(x, 4));
  CHECK(z.label() == 4);
  CHECK(z[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-12));
  CHECK(std::abs(z[1]) < 1e-15);
  CHECK(z[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK(std::abs(z.values().sum()) <= 1e-12);
  CHECK(std::abs(z.values().squaredNorm() - 3.0) <= 1e-9);
}

TEST_CASE("znormalize is idempotent and refuses constant series") {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(50, -3, 7).array().sin();
  const auto z1 = znormalize(TimeSeries(x));
  const auto z2 = znormalize(z1);
  CHECK((z1.values() - z2.values()).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK_THROWS_AS(znormalize(TimeSeries(Eigen::VectorXd::Constant(3, 5.0))), DegenerateSeriesError);
  CHECK_THROWS_AS(znormalize(TimeSeries(Eigen::VectorXd::Constant(1, 5.0))), DegenerateSeriesError);
}

TEST_CASE("archive split loads with the expected shape") {
  const auto d = load_ucr(std::string(ELASTIC_DATA_DIR) + "/GunPoint/GunPoint_TRAIN.tsv");
  CHECK(d.size() == 50);
  CHECK(d.length() == 150);
  const auto dev = normalization_deviation(d);
  CHECK(dev.max_abs_mean < 1e-6);
  CHECK(dev.max_abs_sigma_error < 0.01);
  const auto z = znormalize(d);
  CHECK(normalization_deviation(z).max_abs_sigma_error < 1e-9);
  CHECK_THROWS_AS(load_ucr("/nonexistent/file.tsv"), DataError);
}
