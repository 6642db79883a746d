#pragma once

// C-SVC on a precomputed Gram matrix. Binary problems are solved by
// sequential minimal optimization with second-order working-set selection;
// multiclass problems use one-vs-one voting.

#include <Eigen/Core>

#include <span>
#include <vector>

namespace elastic {

struct SvmConfig {
  double c = 1.0;
  double tolerance = 1e-3;       ///< KKT violation allowed at convergence
  long long max_iterations = 10'000'000;
  double psd_tolerance = 1e-8;   ///< min eigenvalue >= -psd_tolerance * max eigenvalue
  bool check_psd = true;
  bool record_objective = false;

  void validate() const;
};

/// One binary machine: class `positive` (+1) against `negative` (-1).
struct BinarySvm {
  int positive = 0;
  int negative = 0;
  std::vector<int> support;  ///< indices into the training set
  std::vector<double> coef;  ///< alpha_i * y_i for each support vector
  std::vector<double> alpha; ///< dual variables of every training point of the pair
  std::vector<int> members;  ///< training indices of the pair, in order
  double rho = 0;            ///< decision = sum coef_i K(x_i, x) - rho
  long long iterations = 0;
  double max_violation = 0;  ///< final m(alpha) - M(alpha)
  std::vector<double> objective_trace;  ///< dual objective per iteration, when recorded
};

struct SvmModel {
  std::vector<int> classes;  ///< ascending
  std::vector<BinarySvm> machines;
  Eigen::Index n_train = 0;
};

/// Throws KernelError when the Gram matrix is asymmetric or indefinite
/// beyond tolerance, DegenerateProblemError when only one class is present.
SvmModel svm_train(const Eigen::MatrixXd& gram, std::span<const int> labels, const SvmConfig& cfg);

/// `cross` holds K(test_i, train_j), one row per test item.
std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& cross);

double decision_value(const BinarySvm& machine, const Eigen::Ref<const Eigen::RowVectorXd>& cross_row);

/// Symmetric and min eigenvalue >= -tol * max eigenvalue.
bool is_positive_semidefinite(const Eigen::MatrixXd& gram, double tol);

}  // namespace elastic
