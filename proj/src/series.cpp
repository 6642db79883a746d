#include "elastic/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace elastic {

TimeSeries::TimeSeries(Eigen::VectorXd values, std::optional<int> label)
    : values_(std::move(values)), label_(label) {
  if (values_.size() < 1) throw DimensionError("time series must have at least one sample");
  if (!values_.allFinite()) throw DataError("time series contains a non-finite value");
}

Dataset::Dataset(std::vector<TimeSeries> items, std::string name)
    : items_(std::move(items)), name_(std::move(name)) {
  if (items_.empty()) throw EmptyInputError("dataset is empty");
  length_ = items_.front().size();
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (items_[i].size() != length_) {
      throw FormatError("series " + std::to_string(i + 1) + " has length " +
                        std::to_string(items_[i].size()) + ", expected " + std::to_string(length_));
    }
  }
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(items_.size());
  for (const auto& s : items_) out.push_back(s.label().value_or(0));
  return out;
}

namespace {

enum class Split { tab, comma, blanks };

Split detect(std::string_view line) {
  if (line.find('\t') != std::string_view::npos) return Split::tab;
  if (line.find(',') != std::string_view::npos) return Split::comma;
  return Split::blanks;
}

Split from_char(char c) {
  if (c == '\t') return Split::tab;
  if (c == ',') return Split::comma;
  if (c == ' ') return Split::blanks;
  throw ParameterError(std::string("unsupported delimiter '") + c + "'");
}

std::vector<std::string_view> tokenize(std::string_view line, Split split) {
  std::vector<std::string_view> out;
  if (split == Split::blanks) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  const char sep = split == Split::tab ? '\t' : ',';
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view tok, std::size_t line_no) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(tok) +
                     "' as a number");
  }
  return v;
}

}  // namespace

Dataset parse_ucr(std::istream& in, std::optional<char> delimiter, std::string name) {
  std::vector<TimeSeries> items;
  std::optional<Split> split;
  if (delimiter) split = from_char(*delimiter);
  Eigen::Index expected = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!split) split = detect(view);
    const auto tokens = tokenize(view, *split);
    if (tokens.size() < 2) {
      throw FormatError("line " + std::to_string(line_no) + ": expected a label and at least one value");
    }
    const double label = parse_number(tokens[0], line_no);
    Eigen::VectorXd values(static_cast<Eigen::Index>(tokens.size() - 1));
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      values[static_cast<Eigen::Index>(k - 1)] = parse_number(tokens[k], line_no);
    }
    if (expected < 0) expected = values.size();
    if (values.size() != expected) {
      throw FormatError("line " + std::to_string(line_no) + ": " + std::to_string(values.size()) +
                        " values, expected " + std::to_string(expected));
    }
    if (!values.allFinite()) {
      throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
    }
    items.emplace_back(std::move(values), static_cast<int>(std::trunc(label)));
  }
  if (items.empty()) throw EmptyInputError("no series in input" + (name.empty() ? "" : " " + name));
  return Dataset(std::move(items), std::move(name));
}

Dataset load_ucr(const std::filesystem::path& path, std::optional<char> delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_ucr(in, delimiter, path.stem().string());
}

void write_ucr(std::ostream& out, const Dataset& data, char delimiter) {
  char buf[32];
  for (const auto& s : data) {
    out << s.label().value_or(0);
    for (Eigen::Index t = 0; t < s.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", s[t]);
      out << delimiter << buf;
    }
    out << '\n';
  }
}

TimeSeries znormalize(const TimeSeries& x) { return TimeSeries(znormalized(x.values()), x.label()); }

Dataset znormalize(const Dataset& data) {
  std::vector<TimeSeries> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(znormalize(s));
  return Dataset(std::move(out), data.name());
}

NormalizationDeviation normalization_deviation(const Dataset& data) {
  NormalizationDeviation dev;
  for (const auto& s : data) {
    const double mean = s.values().mean();
    const double var = (s.values().array() - mean).square().mean();
    dev.max_abs_mean = std::max(dev.max_abs_mean, std::abs(mean));
    dev.max_abs_sigma_error = std::max(dev.max_abs_sigma_error, std::abs(std::sqrt(var) - 1.0));
  }
  return dev;
}

}  // namespace elastic
