#include "elastic/svm.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "elastic/errors.hpp"

namespace elastic {

void SvmConfig::validate() const {
  if (!(c > 0)) throw ParameterError("SVM regularization C must be positive");
  if (!(tolerance > 0)) throw ParameterError("SVM tolerance must be positive");
  if (max_iterations < 1) throw ParameterError("SVM iteration bound must be positive");
}

bool is_positive_semidefinite(const Eigen::MatrixXd& gram, double tol) {
  if (gram.rows() != gram.cols()) return false;
  if (gram.size() == 0) return true;
  const double scale = std::max(gram.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return ev.minCoeff() >= -tol * std::max(ev.maxCoeff(), 0.0);
}

namespace {

constexpr double kTau = 1e-12;

// Solves min 0.5 a'Qa - e'a, y'a = 0, 0 <= a <= C with Q_ij = y_i y_j K_ij.
BinarySvm solve_binary(const Eigen::MatrixXd& gram, const std::vector<int>& members, const std::vector<int>& y,
                       const SvmConfig& cfg) {
  const auto n = static_cast<int>(members.size());
  const double C = cfg.c;
  Eigen::MatrixXd K(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) K(a, b) = gram(members[a], members[b]);

  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto is_upper = [&](int t) { return alpha[t] >= C; };
  auto is_lower = [&](int t) { return alpha[t] <= 0; };
  auto in_up = [&](int t) { return y[t] == +1 ? !is_upper(t) : !is_lower(t); };
  auto in_low = [&](int t) { return y[t] == +1 ? !is_lower(t) : !is_upper(t); };
  auto objective = [&] {
    double o = 0;
    for (int t = 0; t < n; ++t) o += alpha[t] * (G[t] - 1.0);
    return -0.5 * o;  // dual maximization objective
  };

  BinarySvm out;
  long long iter = 0;
  double gap = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    // Maximal violating pair with second-order selection of j.
    double gmax = -std::numeric_limits<double>::infinity();
    int i = -1;
    for (int t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] > gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    int j = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmin = std::min(gmin, -y[t] * G[t]);
      if (i < 0) continue;
      const double b = gmax + y[t] * G[t];
      if (b > 0) {
        double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (a <= 0) a = kTau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    gap = gmax - gmin;
    if (i < 0 || j < 0 || gap < cfg.tolerance) break;

    const double Qii = K(i, i), Qjj = K(j, j), Qij = y[i] * y[j] * K(i, j);
    const double old_ai = alpha[i], old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Qii + Qjj + 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Qii + Qjj - 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (int t = 0; t < n; ++t) G[t] += y[t] * (y[i] * K(t, i) * dai + y[j] * K(t, j) * daj);
    if (cfg.record_objective) out.objective_trace.push_back(objective());
  }

  // rho: mean of y G over free vectors, else midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (is_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] == +1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  out.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2;
  out.iterations = iter;
  out.max_violation = gap;
  out.members = members;
  out.alpha = alpha;
  for (int t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      out.support.push_back(members[t]);
      out.coef.push_back(alpha[t] * y[t]);
    }
  }
  return out;
}

}  // namespace

SvmModel svm_train(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmConfig& cfg) {
  cfg.validate();
  if (gram.rows() != gram.cols() || gram.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw DimensionError("Gram matrix and label count disagree");
  }
  if (cfg.check_psd && !is_positive_semidefinite(gram, cfg.psd_tolerance)) {
    throw KernelError("Gram matrix is not symmetric positive semidefinite within tolerance");
  }
  SvmModel model;
  model.n_train = gram.rows();
  model.classes.assign(labels.begin(), labels.end());
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
  if (model.classes.size() < 2) throw DegenerateProblemError("SVM training needs at least two classes");

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      std::vector<int> members, y;
      for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == model.classes[a] || labels[t] == model.classes[b]) {
          members.push_back(static_cast<int>(t));
          y.push_back(labels[t] == model.classes[a] ? +1 : -1);
        }
      }
      BinarySvm m = solve_binary(gram, members, y, cfg);
      m.positive = model.classes[a];
      m.negative = model.classes[b];
      model.machines.push_back(std::move(m));
    }
  }
  return model;
}

double decision_value(const BinarySvm& machine, const Eigen::Ref<const Eigen::RowVectorXd>& cross_row) {
  double f = 0;
  for (std::size_t k = 0; k < machine.support.size(); ++k) f += machine.coef[k] * cross_row(machine.support[k]);
  return f - machine.rho;
}

std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& cross) {
  if (cross.cols() != model.n_train) throw DimensionError("test kernel block has the wrong number of columns");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cross.rows()));
  std::map<int, std::size_t> slot;
  for (std::size_t k = 0; k < model.classes.size(); ++k) slot[model.classes[k]] = k;
  std::vector<int> votes(model.classes.size());
  for (Eigen::Index r = 0; r < cross.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& m : model.machines) {
      const double f = decision_value(m, cross.row(r));
      ++votes[slot[f > 0 ? m.positive : m.negative]];
    }
    // first maximum = smallest class id among ties
    const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

}  // namespace elastic
