#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace regiolex {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L2-regularized multinomial cross-entropy for a softmax regression.
///
///   loss(W) = (1/n) sum_i [logsumexp(W x_i) - (W x_i)_{y_i}]
///             + (l2/2) ||W without its bias column||^2
///
/// W is classes x d. When `bias_column` is true the last column of X is the
/// constant 1 feature and the matching weight column is not regularized.
class SoftmaxObjective {
 public:
  SoftmaxObjective(SparseRowMatrix features, std::vector<std::uint32_t> labels, std::size_t num_classes,
                   double l2, bool bias_column = true);

  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_features() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t num_samples() const { return labels_.size(); }

  double loss(const Eigen::MatrixXd& weights) const;
  /// Returns the loss and writes the analytic gradient into `gradient`.
  double loss_and_gradient(const Eigen::MatrixXd& weights, Eigen::MatrixXd& gradient) const;

 private:
  double evaluate(const Eigen::MatrixXd& weights, Eigen::MatrixXd* gradient) const;

  SparseRowMatrix x_;
  std::vector<std::uint32_t> labels_;
  std::size_t num_classes_;
  double l2_;
  bool bias_column_;
};

/// Row-wise softmax of the class scores X W^T, computed stably.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores);

struct OptimizerParams {
  double learning_rate = 1.0;
  std::size_t max_epochs = 300;
  /// Stop once an accepted step improves the loss by less than this.
  double tolerance = 1e-6;
  /// Consecutive step halvings allowed within one epoch before giving up.
  std::size_t max_halvings = 40;
  /// Factor applied to the step size after every accepted step (1 = fixed).
  double step_growth = 1.0;
};

struct TrainingTrace {
  std::vector<double> losses;  // loss before the first step, then after each accepted step
  std::size_t epochs = 0;
  bool converged = false;
  double final_learning_rate = 0.0;
};

/// Full-batch gradient descent from W = 0. A step that would increase the
/// loss is rejected and retried with half the step size, so the recorded
/// losses are non-increasing. Throws TrainingError on a non-finite loss.
Eigen::MatrixXd fit_softmax(const SoftmaxObjective& objective, const OptimizerParams& params,
                            TrainingTrace* trace = nullptr);

}  // namespace regiolex
