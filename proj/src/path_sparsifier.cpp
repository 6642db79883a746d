#include "elastic/path_sparsifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "elastic/parallel.hpp"

namespace elastic {

void SparsifyConfig::validate() const {
  if (theta < 0) throw ParameterError("threshold theta must be >= 0");
  if (!(gamma >= 0) || !std::isfinite(gamma)) throw ParameterError("weight exponent gamma must be >= 0");
}

SparsePathMatrix::SparsePathMatrix(int length, std::vector<SparseEntry> entries, std::int64_t theta, double gamma,
                                   std::string source)
    : length_(length), entries_(std::move(entries)), theta_(theta), gamma_(gamma), source_(std::move(source)) {
  if (length_ < 1) throw DimensionError("sparse path matrix needs a positive length");
  std::sort(entries_.begin(), entries_.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.cell() < b.cell();
  });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.row < 0 || e.col < 0 || e.row >= length_ || e.col >= length_) {
      throw FormatError("sparse entry (" + std::to_string(e.row + 1) + "," + std::to_string(e.col + 1) +
                        ") outside a " + std::to_string(length_) + "x" + std::to_string(length_) + " grid");
    }
    if (!(e.weight > 0) || !std::isfinite(e.weight)) {
      throw FormatError("sparse entry weights must be positive and finite");
    }
    if (k > 0 && entries_[k - 1].cell() == e.cell()) {
      throw FormatError("duplicate sparse entry (" + std::to_string(e.row + 1) + "," + std::to_string(e.col + 1) + ")");
    }
  }
}

SparsePathMatrix SparsePathMatrix::full_grid(int length, double weight) {
  return band(length, std::max(length - 1, 0), weight);
}

SparsePathMatrix SparsePathMatrix::band(int length, int radius, double weight) {
  std::vector<SparseEntry> e;
  e.reserve(static_cast<std::size_t>(band_cell_count(length, radius)));
  for (int i = 0; i < length; ++i)
    for (int j = std::max(0, i - radius); j <= std::min(length - 1, i + radius); ++j) e.push_back({i, j, weight});
  return SparsePathMatrix(length, std::move(e));
}

SparsePathMatrix SparsePathMatrix::diagonal(int length, double weight) { return band(length, 0, weight); }

bool SparsePathMatrix::contains(Cell c) const {
  return std::binary_search(entries_.begin(), entries_.end(), SparseEntry{c.row, c.col, 1.0},
                            [](const SparseEntry& a, const SparseEntry& b) { return a.cell() < b.cell(); });
}

bool SparsePathMatrix::is_symmetric() const {
  auto less = [](const SparseEntry& a, const SparseEntry& b) { return a.cell() < b.cell(); };
  for (const auto& e : entries_) {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), SparseEntry{e.col, e.row, 1.0}, less);
    if (it == entries_.end() || it->row != e.col || it->col != e.row || it->weight != e.weight) return false;
  }
  return true;
}

double SparsePathMatrix::max_weight() const {
  double w = 0;
  for (const auto& e : entries_) w = std::max(w, e.weight);
  return w;
}

CountGrid accumulate_paths(const Dataset& train, LocalCost cost, unsigned workers) {
  if (train.size() < 2) throw InsufficientDataError("learning a path grid needs at least two series");
  const Eigen::Index T = train.length();
  const auto pairs = upper_triangle_pairs(train.size());
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, pairs.size()));
  std::vector<CountGrid> partial(workers, CountGrid::Zero(T, T));
  parallel_for(pairs.size(), workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    CountGrid& g = partial[w];
    for (std::size_t k = begin; k < end; ++k) {
      const auto path = dtw(train[pairs[k].i].values(), train[pairs[k].j].values(), cost).path;
      for (const Cell c : path.cells) {
        g(c.row, c.col) += 1;
        g(c.col, c.row) += 1;
      }
    }
  });
  CountGrid total = CountGrid::Zero(T, T);
  for (const auto& g : partial) total += g;
  return total;
}

OccupancyGrid normalize_grid(const CountGrid& counts) {
  std::int64_t sum = 0;
  for (Eigen::Index j = 0; j < counts.cols(); ++j)
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
      if (counts(i, j) < 0) throw DataError("count grid has a negative cell");
      sum += counts(i, j);
    }
  if (sum == 0) throw EmptyGridError("count grid has no visited cell");
  return counts.cast<double>() / static_cast<double>(sum);
}

SparsePathMatrix select_cells(const CountGrid& counts, const OccupancyGrid& occupancy, const SparsifyConfig& cfg) {
  cfg.validate();
  if (counts.rows() != counts.cols() || occupancy.rows() != counts.rows() || occupancy.cols() != counts.cols()) {
    throw DimensionError("count and occupancy grids must be square with equal dimensions");
  }
  const auto T = static_cast<int>(counts.rows());
  const std::int64_t corner = std::min(counts(0, 0), counts(T - 1, T - 1));
  if (corner <= cfg.theta) {
    throw OverThresholdError("threshold " + std::to_string(cfg.theta) + " removes a corner cell (largest admissible " +
                                 std::to_string(corner - 1) + ")",
                             corner - 1);
  }
  std::vector<SparseEntry> entries;
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      if (counts(i, j) > cfg.theta) {
        const double w = cfg.gamma == 0 ? 1.0 : std::pow(occupancy(i, j), -cfg.gamma);
        entries.push_back({i, j, w});
      }
    }
  }
  return SparsePathMatrix(T, std::move(entries), cfg.theta, cfg.gamma);
}

SparsePathMatrix sparsify(const CountGrid& counts, const OccupancyGrid& occupancy, const SparsifyConfig& cfg) {
  return ensure_connectivity(select_cells(counts, occupancy, cfg));
}

bool has_admissible_path(const SparsePathMatrix& m) {
  const int T = m.length();
  const auto n = static_cast<std::size_t>(T);
  std::vector<char> prev(n, 0), cur(n, 0);
  int cur_row = -1;
  for (const auto& e : m.entries()) {
    if (e.row != cur_row) {
      if (e.row == cur_row + 1) {
        std::swap(prev, cur);
      } else {
        std::fill(prev.begin(), prev.end(), 0);
      }
      std::fill(cur.begin(), cur.end(), 0);
      cur_row = e.row;
    }
    const int i = e.row, j = e.col;
    if (i == 0 && j == 0) {
      cur[0] = 1;
      continue;
    }
    cur[j] = (j > 0 && cur[j - 1]) || (i > 0 && prev[j]) || (i > 0 && j > 0 && prev[j - 1]);
  }
  return cur_row == T - 1 && cur[n - 1];
}

SparsePathMatrix ensure_connectivity(const SparsePathMatrix& m) {
  if (has_admissible_path(m)) return m;
  const double w = m.size() > 0 ? m.max_weight() : 1.0;
  std::vector<SparseEntry> entries = m.entries();
  for (int t = 0; t < m.length(); ++t)
    if (!m.contains({t, t})) entries.push_back({t, t, w});
  return SparsePathMatrix(m.length(), std::move(entries), m.theta(), m.gamma(), m.source());
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_spm(std::ostream& out, const SparsePathMatrix& m) {
  out << "SPM v1 T=" << m.length() << " theta=" << m.theta() << " gamma=" << shortest(m.gamma());
  if (!m.source().empty()) out << " source=" << m.source();
  out << '\n';
  char buf[64];
  for (const auto& e : m.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.row + 1 << ' ' << e.col + 1 << ' ' << buf << '\n';
  }
}

SparsePathMatrix read_spm(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw EmptyInputError("empty path-matrix file");
  std::istringstream hs(header);
  std::string magic, version, tok;
  hs >> magic >> version;
  if (magic != "SPM" || version != "v1") throw FormatError("not an SPM v1 file");
  long long T = -1, theta = 0;
  double gamma = 0;
  std::string source;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "T") T = std::stoll(val);
      else if (key == "theta") theta = std::stoll(val);
      else if (key == "gamma") gamma = std::stod(val);
      else if (key == "source") source = val;
    } catch (const std::exception&) {
      throw ParseError("cannot parse header value '" + tok + "'");
    }
  }
  if (T < 1) throw FormatError("SPM header lacks a positive T");
  std::vector<SparseEntry> entries;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long r = 0, c = 0;
    std::string wtok;
    if (!(ls >> r >> c >> wtok)) throw ParseError("line " + std::to_string(line_no) + ": expected `row col weight`");
    double w = 0;
    const auto [ptr, ec] = std::from_chars(wtok.data(), wtok.data() + wtok.size(), w);
    if (ec != std::errc{} || ptr != wtok.data() + wtok.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": bad weight '" + wtok + "'");
    }
    entries.push_back({static_cast<int>(r - 1), static_cast<int>(c - 1), w});
  }
  return SparsePathMatrix(static_cast<int>(T), std::move(entries), theta, gamma, source);
}

void save_spm(const std::string& path, const SparsePathMatrix& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_spm(out, m);
  if (!out) throw DataError("write failed for " + path);
}

SparsePathMatrix load_spm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_spm(in);
}

LearnedGrid LearnedGrid::learn(const Dataset& train, LocalCost cost, unsigned workers) {
  LearnedGrid g;
  g.counts = accumulate_paths(train, cost, workers);
  g.occupancy = normalize_grid(g.counts);
  return g;
}

std::int64_t LearnedGrid::max_admissible_theta() const {
  const auto T = counts.rows();
  return std::min(counts(0, 0), counts(T - 1, T - 1)) - 1;
}

}  // namespace elastic
