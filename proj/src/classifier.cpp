#include "regiolex/classifier.hpp"

#include <cmath>
#include <sstream>

namespace regiolex {

SoftmaxObjective::SoftmaxObjective(SparseRowMatrix features, std::vector<std::uint32_t> labels,
                                   std::size_t num_classes, double l2, bool bias_column)
    : x_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      l2_(l2),
      bias_column_(bias_column) {
  if (static_cast<std::size_t>(x_.rows()) != labels_.size()) {
    throw TrainingError("feature matrix has " + std::to_string(x_.rows()) + " rows but " +
                        std::to_string(labels_.size()) + " labels were given");
  }
  if (labels_.empty()) throw TrainingError("no training samples");
  if (num_classes_ < 2) throw TrainingError("need at least two classes");
  for (auto y : labels_) {
    if (y >= num_classes_) throw TrainingError("label out of range");
  }
  if (l2_ < 0.0) throw TrainingError("l2 strength must be non-negative");
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd p(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    p.row(i) = (scores.row(i).array() - m).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

double SoftmaxObjective::evaluate(const Eigen::MatrixXd& weights, Eigen::MatrixXd* gradient) const {
  const auto n = static_cast<double>(labels_.size());
  const Eigen::MatrixXd scores = x_ * weights.transpose();  // n x C

  double data_loss = 0.0;
  Eigen::MatrixXd residual;
  if (gradient != nullptr) residual.resize(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double m = scores.row(i).maxCoeff();
    const Eigen::ArrayXd shifted = (scores.row(i).array() - m).transpose();
    const double sum = shifted.exp().sum();
    data_loss += std::log(sum) + m - scores(i, labels_[static_cast<std::size_t>(i)]);
    if (gradient != nullptr) {
      residual.row(i) = (shifted.exp() / sum).transpose().matrix();
      residual(i, labels_[static_cast<std::size_t>(i)]) -= 1.0;
    }
  }

  const Eigen::Index penalized = bias_column_ ? weights.cols() - 1 : weights.cols();
  const double penalty = 0.5 * l2_ * weights.leftCols(penalized).squaredNorm();

  if (gradient != nullptr) {
    *gradient = (residual.transpose() * x_) / n;
    gradient->leftCols(penalized) += l2_ * weights.leftCols(penalized);
  }
  return data_loss / n + penalty;
}

double SoftmaxObjective::loss(const Eigen::MatrixXd& weights) const { return evaluate(weights, nullptr); }

double SoftmaxObjective::loss_and_gradient(const Eigen::MatrixXd& weights, Eigen::MatrixXd& gradient) const {
  return evaluate(weights, &gradient);
}

Eigen::MatrixXd fit_softmax(const SoftmaxObjective& objective, const OptimizerParams& params,
                            TrainingTrace* trace) {
  if (!(params.learning_rate > 0.0)) throw TrainingError("learning rate must be positive");
  TrainingTrace local;
  TrainingTrace& t = trace != nullptr ? *trace : local;
  t = TrainingTrace{};

  Eigen::MatrixXd weights =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(objective.num_classes()),
                            static_cast<Eigen::Index>(objective.num_features()));
  Eigen::MatrixXd gradient;
  double loss = objective.loss_and_gradient(weights, gradient);
  if (!std::isfinite(loss)) throw TrainingError("initial loss is not finite");
  t.losses.push_back(loss);

  double rate = params.learning_rate;
  Eigen::MatrixXd candidate;
  Eigen::MatrixXd candidate_gradient;
  for (std::size_t epoch = 1; epoch <= params.max_epochs; ++epoch) {
    t.epochs = epoch;
    bool accepted = false;
    double candidate_loss = loss;
    for (std::size_t halving = 0; halving <= params.max_halvings; ++halving) {
      candidate = weights - rate * gradient;
      candidate_loss = objective.loss_and_gradient(candidate, candidate_gradient);
      if (std::isfinite(candidate_loss) && candidate_loss <= loss) {
        accepted = true;
        break;
      }
      rate *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(candidate_loss)) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ": loss " << candidate_loss << " with step size "
            << rate << " (last finite loss " << loss << ", gradient norm " << gradient.norm() << ")";
        throw TrainingError(msg.str());
      }
      // No step size decreases the loss any further.
      t.converged = true;
      break;
    }
    const double improvement = loss - candidate_loss;
    weights.swap(candidate);
    gradient.swap(candidate_gradient);
    loss = candidate_loss;
    t.losses.push_back(loss);
    rate *= params.step_growth;
    if (improvement < params.tolerance) {
      t.converged = true;
      break;
    }
  }
  t.final_learning_rate = rate;
  return weights;
}

}  // namespace regiolex
