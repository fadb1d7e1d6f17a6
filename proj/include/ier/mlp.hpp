#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ier/traffic.hpp"

namespace ier {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

/// Fully connected Q-network: rectified-linear hidden layers, linear head.
class QNetwork {
 public:
  QNetwork() = default;
  /// Glorot-uniform weights, zero biases.
  QNetwork(int input_size, std::vector<int> hidden, int output_size, Rng& rng);
  explicit QNetwork(std::vector<DenseLayer> layers);

  int input_size() const { return static_cast<int>(layers_.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().weight.rows()); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  /// Throws std::invalid_argument on an input of the wrong length.
  Eigen::VectorXd forward(std::span<const double> obs) const;
  /// Column-per-sample batch evaluation.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch) const;

  /// Activations kept for the backward pass; activations[0] is the input.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch, std::vector<Eigen::MatrixXd>& activations) const;

  /// Gradients w.r.t. all parameters given dL/dQ for the cached batch.
  std::vector<DenseLayer> backward(const std::vector<Eigen::MatrixXd>& activations,
                                   const Eigen::MatrixXd& grad_output) const;

 private:
  std::vector<DenseLayer> layers_;
};

/// Argmax with ties going to the lowest index.
int argmax(std::span<const double> values);
int greedy_action_index(const QNetwork& net, std::span<const double> obs);

/// Smooth-L1 with unit threshold.
double huber(double x);
double huber_grad(double x);

/// Importance-weighted mean Huber loss over the batch:
/// L = (1/B) * sum_i w_i * huber(Q(s_i, a_i) - y_i).
/// Fills `grads` (when non-null) and per-sample TD errors Q - y.
double td_loss(const QNetwork& net, const Eigen::MatrixXd& obs, std::span<const int> actions,
               std::span<const double> targets, std::span<const double> weights,
               std::vector<DenseLayer>* grads, std::vector<double>* td_errors);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(QNetwork& net, const std::vector<DenseLayer>& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<DenseLayer> m_, v_;
};

}  // namespace ier
