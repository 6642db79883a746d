#include "elastic/eval.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "elastic/errors.hpp"
#include "elastic/parallel.hpp"

namespace elastic {

namespace {

constexpr std::array<std::pair<MeasureKind, std::string_view>, 10> kNames{{
    {MeasureKind::ed, "ed"},
    {MeasureKind::minkowski, "minkowski"},
    {MeasureKind::corr, "corr"},
    {MeasureKind::daco, "daco"},
    {MeasureKind::dtw, "dtw"},
    {MeasureKind::dtw_sc, "dtw_sc"},
    {MeasureKind::krdtw, "krdtw"},
    {MeasureKind::krdtw_sc, "krdtw_sc"},
    {MeasureKind::sp_dtw, "sp_dtw"},
    {MeasureKind::sp_krdtw, "sp_krdtw"},
}};

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool uses_band(MeasureKind k) { return k == MeasureKind::dtw_sc || k == MeasureKind::krdtw_sc; }
bool uses_nu(MeasureKind k) { return is_kernel(k); }

void require_labels(const Dataset& d, const char* role) {
  for (const auto& s : d) {
    if (!s.label()) throw FormatError(std::string(role) + " set has unlabeled series");
  }
}

std::vector<Eigen::VectorXd> prepare_all(const Dataset& d, const Measure& m) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(d.size());
  for (const auto& s : d) out.push_back(m.prepare(s.values()));
  return out;
}

// Cosine normalization in log domain; unreachable pairs stay at -inf.
double normalized_log(double lxy, double lxx, double lyy) {
  if (!std::isfinite(lxy)) return -std::numeric_limits<double>::infinity();
  return lxy - 0.5 * lxx - 0.5 * lyy;
}

}  // namespace

std::string_view to_string(MeasureKind kind) {
  for (const auto& [k, n] : kNames)
    if (k == kind) return n;
  return "?";
}

MeasureKind parse_measure_kind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  if (name == "sp-dtw") return MeasureKind::sp_dtw;
  if (name == "sp-krdtw") return MeasureKind::sp_krdtw;
  if (name == "dtw-sc") return MeasureKind::dtw_sc;
  if (name == "krdtw-sc") return MeasureKind::krdtw_sc;
  throw ParameterError("unknown measure '" + std::string(name) + "'");
}

void MeasureSpec::validate(Eigen::Index length) const {
  switch (kind) {
    case MeasureKind::minkowski:
      MinkowskiOrder{minkowski_p};
      break;
    case MeasureKind::daco:
      if (daco.k < 1 || daco.k > length - 1) {
        throw ParameterError("DACO lag count " + std::to_string(daco.k) + " outside [1, " +
                             std::to_string(length - 1) + "]");
      }
      break;
    case MeasureKind::dtw_sc:
      band.radius(length);
      break;
    case MeasureKind::krdtw_sc:
      band.radius(length);
      kernel.validate();
      break;
    case MeasureKind::krdtw:
      kernel.validate();
      break;
    case MeasureKind::sp_dtw:
      sparsify.validate();
      break;
    case MeasureKind::sp_krdtw:
      sparsify.validate();
      kernel.validate();
      break;
    default:
      break;
  }
}

std::string MeasureSpec::params() const {
  std::vector<std::string> parts;
  if (kind == MeasureKind::minkowski) parts.push_back("p=" + shortest(minkowski_p));
  if (kind == MeasureKind::daco) parts.push_back("k=" + std::to_string(daco.k));
  if (is_sparse(kind)) parts.push_back("theta=" + std::to_string(sparsify.theta));
  if (kind == MeasureKind::sp_dtw) parts.push_back("gamma=" + shortest(sparsify.gamma));
  if (uses_band(kind)) parts.push_back("band_pct=" + std::to_string(band.pct));
  if (uses_nu(kind)) parts.push_back("nu=" + shortest(kernel.nu));
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ";") + p;
  return out;
}

Measure::Measure(MeasureSpec spec, std::shared_ptr<const SparsePathMatrix> spm)
    : spec_(spec), spm_(std::move(spm)) {
  if (is_sparse(spec_.kind)) {
    if (!spm_) throw ParameterError(std::string(to_string(spec_.kind)) + " needs a path matrix");
    symmetric_ = spm_->is_symmetric();
  }
}

Eigen::VectorXd Measure::prepare(const Eigen::VectorXd& x) const {
  if (spec_.kind == MeasureKind::daco) return autocorr_features(x, spec_.daco.k);
  return x;
}

PairValue Measure::on_prepared(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const auto T = static_cast<std::int64_t>(x.size());
  switch (spec_.kind) {
    case MeasureKind::ed:
      return {euclidean(x, y), T};
    case MeasureKind::minkowski:
      return {minkowski(x, y, MinkowskiOrder(spec_.minkowski_p)), T};
    case MeasureKind::corr:
      return {corr(x, y), T};
    case MeasureKind::daco: {
      const double d = euclidean(x, y);
      return {d * d, T};
    }
    case MeasureKind::dtw: {
      const auto r = dtw_value(x, y, spec_.cost);
      return {r.value, r.visited};
    }
    case MeasureKind::dtw_sc: {
      const auto r = dtw_sc(x, y, spec_.cost, spec_.band);
      return {r.value, r.visited};
    }
    case MeasureKind::krdtw: {
      const auto r = krdtw(x, y, spec_.kernel);
      return {r.log_value, r.visited};
    }
    case MeasureKind::krdtw_sc: {
      const auto r = krdtw_sc(x, y, spec_.kernel, spec_.band);
      return {r.log_value, r.visited};
    }
    case MeasureKind::sp_dtw: {
      const auto r = sp_dtw(x, y, *spm_, spec_.cost);
      return {r.value, r.visited};
    }
    case MeasureKind::sp_krdtw: {
      const auto r = sp_krdtw(x, y, *spm_, spec_.kernel);
      return {r.value, r.visited};
    }
  }
  throw InvariantError("unhandled measure kind");
}

PairValue Measure::operator()(const TimeSeries& x, const TimeSeries& y) const {
  return on_prepared(prepare(x.values()), prepare(y.values()));
}

Measure bind(const MeasureSpec& spec, const LearnedGrid* grid) {
  if (!is_sparse(spec.kind)) return Measure(spec);
  if (grid == nullptr) throw ParameterError(std::string(to_string(spec.kind)) + " needs a learned grid");
  auto spm = std::make_shared<SparsePathMatrix>(grid->sparsify(spec.sparsify));
  return Measure(spec, std::move(spm));
}

ComparisonMatrix compare(const Dataset& queries, const Dataset& references, const Measure& m, unsigned workers) {
  const auto q = prepare_all(queries, m);
  const auto r = prepare_all(references, m);
  const auto nq = static_cast<Eigen::Index>(q.size()), nr = static_cast<Eigen::Index>(r.size());
  ComparisonMatrix out;
  out.values.resize(nq, nr);
  out.comparisons = static_cast<std::int64_t>(nq) * nr;
  if (workers == 0) workers = default_workers();
  std::vector<std::int64_t> visited(workers, 0);
  parallel_for(q.size(), workers, [&](std::size_t b, std::size_t e, unsigned w) {
    for (std::size_t i = b; i < e; ++i) {
      for (Eigen::Index j = 0; j < nr; ++j) {
        const auto pv = m.on_prepared(q[i], r[j]);
        out.values(static_cast<Eigen::Index>(i), j) = pv.value;
        visited[w] += pv.visited;
      }
    }
  });
  out.visited = std::accumulate(visited.begin(), visited.end(), std::int64_t{0});

  if (is_kernel(m.spec().kind)) {
    Eigen::VectorXd sq(nq), sr(nr);
    for (Eigen::Index i = 0; i < nq; ++i) sq(i) = m.on_prepared(q[i], q[i]).value;
    for (Eigen::Index j = 0; j < nr; ++j) sr(j) = m.on_prepared(r[j], r[j]).value;
    for (Eigen::Index i = 0; i < nq; ++i)
      for (Eigen::Index j = 0; j < nr; ++j) out.values(i, j) = normalized_log(out.values(i, j), sq(i), sr(j));
  }
  return out;
}

ComparisonMatrix compare_within(const Dataset& data, const Measure& m, unsigned workers) {
  if (!m.symmetric()) return compare(data, data, m, workers);
  const auto p = prepare_all(data, m);
  const auto n = static_cast<Eigen::Index>(p.size());
  ComparisonMatrix out;
  out.values.resize(n, n);
  out.comparisons = static_cast<std::int64_t>(n) * (n - 1) / 2;
  std::vector<IndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) pairs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  if (workers == 0) workers = default_workers();
  std::vector<std::int64_t> visited(workers, 0);
  parallel_for(pairs.size(), workers, [&](std::size_t b, std::size_t e, unsigned w) {
    for (std::size_t k = b; k < e; ++k) {
      const auto [i, j] = pairs[k];
      const auto pv = m.on_prepared(p[i], p[j]);
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pv.value;
      out.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = pv.value;
      if (i != j) visited[w] += pv.visited;
    }
  });
  out.visited = std::accumulate(visited.begin(), visited.end(), std::int64_t{0});

  if (is_kernel(m.spec().kind)) {
    const Eigen::VectorXd self = out.values.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out.values(i, j) = normalized_log(out.values(i, j), self(i), self(j));
  }
  return out;
}

Eigen::Index nearest(const Eigen::Ref<const Eigen::RowVectorXd>& row, bool similarity, Eigen::Index exclude) {
  Eigen::Index best = -1;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j == exclude) continue;
    if (best < 0) {
      best = j;
      continue;
    }
    const bool better = similarity ? row(j) > row(best) : row(j) < row(best);
    if (better) best = j;
  }
  return best;
}

double error_rate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DimensionError("prediction and label counts differ");
  if (truth.empty()) throw EmptyInputError("error rate of an empty set");
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) wrong += predicted[k] != truth[k];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double speedup(std::int64_t visited, std::int64_t length) {
  if (length <= 0) throw ParameterError("series length must be positive");
  return 100.0 * (1.0 - static_cast<double>(visited) / (static_cast<double>(length) * static_cast<double>(length)));
}

double mean_speedup(std::int64_t total_visited, std::int64_t comparisons, std::int64_t length) {
  if (comparisons <= 0) return 0;
  if (length <= 0) throw ParameterError("series length must be positive");
  const double full = static_cast<double>(length) * static_cast<double>(length);
  return 100.0 * (1.0 - static_cast<double>(total_visited) / (static_cast<double>(comparisons) * full));
}

EvalReport onenn(const Dataset& train, const Dataset& test, const Measure& m, unsigned workers) {
  require_labels(train, "training");
  require_labels(test, "test");
  if (train.length() != test.length()) throw DimensionError("training and test series lengths differ");
  m.spec().validate(train.length());
  const auto cmp = compare(test, train, m, workers);
  const auto train_labels = train.labels();
  EvalReport rep;
  rep.predictions.reserve(test.size());
  for (Eigen::Index i = 0; i < cmp.values.rows(); ++i) {
    const auto j = nearest(cmp.values.row(i), m.similarity());
    rep.predictions.push_back(train_labels[static_cast<std::size_t>(j)]);
  }
  rep.error_rate = error_rate(rep.predictions, test.labels());
  rep.total_visited = cmp.visited;
  rep.comparisons = cmp.comparisons;
  rep.speedup_pct = mean_speedup(cmp.visited, cmp.comparisons, train.length());
  rep.chosen_params = m.spec().params();
  return rep;
}

double loo_error(const Eigen::MatrixXd& within, std::span<const int> labels, bool similarity) {
  const auto n = within.rows();
  if (within.cols() != n || static_cast<std::size_t>(n) != labels.size()) {
    throw DimensionError("comparison matrix and label count disagree");
  }
  if (n < 2) throw InsufficientDataError("leave-one-out needs at least two series");
  std::size_t wrong = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = nearest(within.row(i), similarity, i);
    wrong += labels[static_cast<std::size_t>(j)] != labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(wrong) / static_cast<double>(n);
}

double loo_error(const Dataset& train, const Measure& m, unsigned workers) {
  require_labels(train, "training");
  m.spec().validate(train.length());
  const auto cmp = compare_within(train, m, workers);
  const auto labels = train.labels();
  return loo_error(cmp.values, labels, m.similarity());
}

Lattice Lattice::defaults(Eigen::Index length) {
  Lattice l;
  for (std::int64_t t = 0; t <= 15; ++t) l.thetas.push_back(t);
  l.gammas = {0, 0.25, 0.5, 1, 2};
  l.nus = {0.01, 0.1, 1, 10};
  for (int b = 0; b <= 20; ++b) l.band_pcts.push_back(b);
  l.cs = {0.1, 1, 10, 100};
  const auto T = static_cast<int>(length);
  auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  for (int k : {1, ceil_div(T, 8), ceil_div(T, 4), ceil_div(T, 2), T - 1}) {
    if (k >= 1 && k <= T - 1 && std::find(l.daco_ks.begin(), l.daco_ks.end(), k) == l.daco_ks.end()) {
      l.daco_ks.push_back(k);
    }
  }
  return l;
}

double nu_scale(const Dataset& train, std::uint64_t seed) {
  if (train.empty()) throw EmptyInputError("empty training set");
  const auto n = static_cast<std::uint64_t>(train.size());
  const auto T = static_cast<std::uint64_t>(train.length());
  const std::uint64_t cells = n * T;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, cells - 1);
  auto value = [&](std::uint64_t c) { return train[static_cast<std::size_t>(c / T)][static_cast<Eigen::Index>(c % T)]; };
  constexpr int kSamples = 20000;
  std::vector<double> sq;
  sq.reserve(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    const double d = value(pick(rng)) - value(pick(rng));
    sq.push_back(d * d);
  }
  auto mid = sq.begin() + kSamples / 2;
  std::nth_element(sq.begin(), mid, sq.end());
  const double med = *mid;
  if (!(med > 0)) throw DegenerateSeriesError("training values have no spread to set the kernel bandwidth");
  return 1.0 / med;
}

bool sparser_first(const MeasureSpec& a, const MeasureSpec& b) {
  const auto key = [](const MeasureSpec& s) {
    return std::make_tuple(-s.sparsify.theta, s.band.pct, s.sparsify.gamma, s.kernel.nu, s.daco.k);
  };
  return key(a) < key(b);
}

std::vector<MeasureSpec> expand_lattice(const MeasureSpec& base, const Lattice& lattice, const Dataset& train,
                                        const TuneOptions& opt, const LearnedGrid* grid) {
  const MeasureKind kind = base.kind;
  std::vector<MeasureSpec> out{base};
  auto cross = [&out](auto values, auto apply) {
    std::vector<MeasureSpec> next;
    for (const auto& s : out) {
      for (const auto& v : values) {
        MeasureSpec t = s;
        apply(t, v);
        next.push_back(t);
      }
    }
    out = std::move(next);
  };

  if (kind == MeasureKind::daco) cross(lattice.daco_ks, [](MeasureSpec& s, int k) { s.daco.k = k; });
  if (uses_band(kind)) cross(lattice.band_pcts, [](MeasureSpec& s, int b) { s.band.pct = b; });
  if (uses_nu(kind)) {
    const double scale = lattice.scale_nus ? nu_scale(train, opt.seed) : 1.0;
    std::vector<double> nus;
    for (double v : lattice.nus) nus.push_back(v * scale);
    cross(nus, [](MeasureSpec& s, double nu) { s.kernel.nu = nu; });
  }
  if (is_sparse(kind)) {
    if (grid == nullptr) throw ParameterError("sparse measures need a learned grid");
    const auto max_theta = grid->max_admissible_theta();
    std::vector<std::int64_t> thetas;
    for (auto t : lattice.thetas)
      if (t >= 0 && t <= max_theta) thetas.push_back(t);
    if (thetas.empty()) throw OverThresholdError("no candidate threshold keeps the corner cells", max_theta);
    cross(thetas, [](MeasureSpec& s, std::int64_t t) { s.sparsify.theta = t; });
  }
  if (kind == MeasureKind::sp_dtw) cross(lattice.gammas, [](MeasureSpec& s, double g) { s.sparsify.gamma = g; });
  // The kernel path ignores weights; gamma stays at its base value.

  std::stable_sort(out.begin(), out.end(), sparser_first);
  return out;
}

GridSearchResult grid_search_loo(const Dataset& train, std::span<const MeasureSpec> lattice, const TuneOptions& opt,
                                 const LearnedGrid* grid) {
  if (lattice.empty()) throw ParameterError("empty parameter lattice");
  require_labels(train, "training");
  const auto labels = train.labels();
  GridSearchResult res;
  bool have = false;
  for (const auto& spec : lattice) {
    spec.validate(train.length());
    const Measure m = bind(spec, grid);
    const auto cmp = compare_within(train, m, opt.workers);
    const double err = loo_error(cmp.values, labels, m.similarity());
    res.curve.push_back({spec, err, 0});
    if (!have || err < res.best_error) {
      res.best = spec;
      res.best_error = err;
      have = true;
    }
  }
  return res;
}

TunedMeasure tune_onenn(const Dataset& train, const MeasureSpec& base, const TuneOptions& opt, const Lattice& lattice,
                        std::shared_ptr<const LearnedGrid> grid) {
  if (is_sparse(base.kind) && !grid) {
    grid = std::make_shared<LearnedGrid>(LearnedGrid::learn(train, base.cost, opt.workers));
  }
  const auto specs = expand_lattice(base, lattice, train, opt, grid.get());
  auto search = grid_search_loo(train, specs, opt, grid.get());
  Measure m = bind(search.best, grid.get());
  return {std::move(m), std::move(search)};
}

Eigen::MatrixXd kernel_matrix(const Dataset& rows, const Dataset& cols, const Measure& m, unsigned workers,
                              std::int64_t* visited) {
  const auto kind = m.spec().kind;
  if (kind == MeasureKind::ed) {
    m.spec().kernel.validate();
    const auto cmp = compare(rows, cols, m, workers);
    if (visited) *visited = cmp.visited;
    const double nu = m.spec().kernel.nu;
    return (-nu * cmp.values.array().square()).exp().matrix();
  }
  if (!is_kernel(kind)) throw ParameterError(std::string(to_string(kind)) + " does not define a kernel");
  const auto cmp = compare(rows, cols, m, workers);
  if (visited) *visited = cmp.visited;
  return cmp.values.array().exp().matrix();
}

Eigen::MatrixXd kernel_gram(const Dataset& data, const Measure& m, unsigned workers) {
  const auto kind = m.spec().kind;
  if (kind == MeasureKind::ed) {
    m.spec().kernel.validate();
    const auto cmp = compare_within(data, m, workers);
    return (-m.spec().kernel.nu * cmp.values.array().square()).exp().matrix();
  }
  if (!is_kernel(kind)) throw ParameterError(std::string(to_string(kind)) + " does not define a kernel");
  return compare_within(data, m, workers).values.array().exp().matrix();
}

std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ParameterError("cross-validation needs at least two folds");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int>(i));
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (auto& [cls, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i : idx) {
      fold[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

double svm_cv_error(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmConfig& cfg, int folds,
                    std::uint64_t seed) {
  const auto fold = stratified_folds(labels, folds, seed);
  SvmConfig inner = cfg;
  inner.check_psd = false;  // sub-blocks of a PSD matrix are PSD
  std::size_t wrong = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> tr, te;
    for (std::size_t i = 0; i < labels.size(); ++i) (fold[i] == f ? te : tr).push_back(static_cast<int>(i));
    if (te.empty()) continue;
    std::vector<int> ytr;
    for (int i : tr) ytr.push_back(labels[static_cast<std::size_t>(i)]);
    std::vector<int> pred;
    if (std::adjacent_find(ytr.begin(), ytr.end(), std::not_equal_to<>()) == ytr.end()) {
      pred.assign(te.size(), ytr.empty() ? 0 : ytr.front());
    } else {
      const Eigen::MatrixXd g = gram(tr, tr);
      const auto model = svm_train(g, ytr, inner);
      const Eigen::MatrixXd cross = gram(te, tr);
      pred = svm_predict(model, cross);
    }
    for (std::size_t k = 0; k < te.size(); ++k) wrong += pred[k] != labels[static_cast<std::size_t>(te[k])];
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

SvmEvaluation svm_evaluate(const Dataset& train, const Dataset& test, const MeasureSpec& base, const TuneOptions& opt,
                           const Lattice& lattice, std::shared_ptr<const LearnedGrid> grid) {
  require_labels(train, "training");
  require_labels(test, "test");
  if (train.length() != test.length()) throw DimensionError("training and test series lengths differ");
  if (base.kind != MeasureKind::ed && !is_kernel(base.kind)) {
    throw ParameterError(std::string(to_string(base.kind)) + " does not define a kernel");
  }
  if (lattice.cs.empty()) throw ParameterError("empty C lattice");
  if (is_sparse(base.kind) && !grid) {
    grid = std::make_shared<LearnedGrid>(LearnedGrid::learn(train, base.cost, opt.workers));
  }
  std::vector<MeasureSpec> specs;
  if (base.kind == MeasureKind::ed) {
    // Gaussian kernel on the Euclidean distance: only nu is tuned.
    const double scale =
        lattice.scale_nus ? nu_scale(train, opt.seed) / static_cast<double>(std::max<Eigen::Index>(1, train.length()))
                          : 1.0;
    for (double v : lattice.nus) {
      MeasureSpec s = base;
      s.kernel.nu = v * scale;
      specs.push_back(s);
    }
  } else {
    specs = expand_lattice(base, lattice, train, opt, grid.get());
  }
  std::vector<double> cs = lattice.cs;
  std::sort(cs.begin(), cs.end());

  const auto labels = train.labels();
  SvmEvaluation ev;
  bool have = false;
  for (const auto& spec : specs) {
    spec.validate(train.length());
    const Measure m = bind(spec, grid.get());
    const Eigen::MatrixXd gram = kernel_gram(train, m, opt.workers);
    SvmConfig cfg;
    const bool psd = is_positive_semidefinite(gram, cfg.psd_tolerance);
    for (double c : cs) {
      cfg.c = c;
      const double err = psd ? svm_cv_error(gram, labels, cfg, opt.folds, opt.seed)
                             : std::numeric_limits<double>::quiet_NaN();
      ev.curve.push_back({spec, err, c});
      if (psd && (!have || err < ev.cv_error)) {
        ev.spec = spec;
        ev.c = c;
        ev.cv_error = err;
        have = true;
      }
    }
  }
  if (!have) throw KernelError("no lattice point gives a positive semidefinite Gram matrix");

  const Measure m = bind(ev.spec, grid.get());
  SvmConfig cfg;
  cfg.c = ev.c;
  const Eigen::MatrixXd gram = kernel_gram(train, m, opt.workers);
  const auto model = svm_train(gram, labels, cfg);
  std::int64_t visited = 0;
  const Eigen::MatrixXd cross = kernel_matrix(test, train, m, opt.workers, &visited);
  ev.report.predictions = svm_predict(model, cross);
  ev.report.error_rate = error_rate(ev.report.predictions, test.labels());
  ev.report.total_visited = visited;
  ev.report.comparisons = static_cast<std::int64_t>(test.size()) * static_cast<std::int64_t>(train.size());
  ev.report.speedup_pct = mean_speedup(visited, ev.report.comparisons, train.length());
  const std::string p = ev.spec.kind == MeasureKind::ed ? "nu=" + shortest(ev.spec.kernel.nu) : ev.spec.params();
  ev.report.chosen_params = p + (p.empty() ? "" : ";") + "C=" + shortest(ev.c);
  return ev;
}

std::string report_header() { return "dataset,measure,classifier,error_rate,visited_total,speedup_pct,params"; }

std::string report_row(std::string_view dataset, std::string_view measure, std::string_view classifier,
                       const EvalReport& r) {
  char num[96];
  std::snprintf(num, sizeof num, "%.3f,%lld,%.1f", r.error_rate, static_cast<long long>(r.total_visited),
                r.speedup_pct);
  std::string out;
  out.append(dataset).append(",").append(measure).append(",").append(classifier).append(",").append(num);
  out.append(",").append(r.chosen_params);
  return out;
}

}  // namespace elastic
