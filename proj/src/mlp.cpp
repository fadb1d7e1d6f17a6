#include "ier/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ier {

QNetwork::QNetwork(int input_size, std::vector<int> hidden, int output_size, Rng& rng) {
  std::vector<int> sizes{input_size};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_size);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    if (in <= 0 || out <= 0) throw std::invalid_argument("layer sizes must be positive");
    const double limit = std::sqrt(6.0 / (in + out));
    DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) layer.weight(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    layers_.push_back(std::move(layer));
  }
}

QNetwork::QNetwork(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].bias.size() != layers_[l].weight.rows()) throw std::invalid_argument("bias/weight mismatch");
    if (l > 0 && layers_[l].weight.cols() != layers_[l - 1].weight.rows()) {
      throw std::invalid_argument("layer shapes do not chain");
    }
  }
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Eigen::VectorXd QNetwork::forward(std::span<const double> obs) const {
  if (static_cast<int>(obs.size()) != input_size()) {
    throw std::invalid_argument("observation length does not match the network input");
  }
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size()));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    x = layers_[l].weight * x + layers_[l].bias;
    if (l + 1 < layers_.size()) x = x.cwiseMax(0.0);
  }
  return x;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& batch) const {
  if (batch.rows() != input_size()) throw std::invalid_argument("batch rows do not match the network input");
  Eigen::MatrixXd x = batch;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * x;
    z.colwise() += layers_[l].bias;
    x = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return x;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& batch, std::vector<Eigen::MatrixXd>& activations) const {
  if (batch.rows() != input_size()) throw std::invalid_argument("batch rows do not match the network input");
  activations.resize(layers_.size());
  activations[0] = batch;
  Eigen::MatrixXd out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weight * activations[l];
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) {
      activations[l + 1] = z.cwiseMax(0.0);
    } else {
      out = std::move(z);
    }
  }
  return out;
}

std::vector<DenseLayer> QNetwork::backward(const std::vector<Eigen::MatrixXd>& activations,
                                           const Eigen::MatrixXd& grad_output) const {
  std::vector<DenseLayer> grads(layers_.size());
  Eigen::MatrixXd delta = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grads[l].weight = delta * activations[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = layers_[l].weight.transpose() * delta;
    // activations[l] is the rectified output of layer l-1
    delta = back.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

int greedy_action_index(const QNetwork& net, std::span<const double> obs) {
  const Eigen::VectorXd q = net.forward(obs);
  return argmax(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

double huber(double x) {
  const double a = std::abs(x);
  return a <= 1.0 ? 0.5 * x * x : a - 0.5;
}

double huber_grad(double x) { return std::clamp(x, -1.0, 1.0); }

double td_loss(const QNetwork& net, const Eigen::MatrixXd& obs, std::span<const int> actions,
               std::span<const double> targets, std::span<const double> weights,
               std::vector<DenseLayer>* grads, std::vector<double>* td_errors) {
  const auto batch = static_cast<std::size_t>(obs.cols());
  if (actions.size() != batch || targets.size() != batch || weights.size() != batch) {
    throw std::invalid_argument("td_loss: batch components differ in size");
  }
  std::vector<Eigen::MatrixXd> acts;
  const Eigen::MatrixXd q = net.forward(obs, acts);
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  if (td_errors) td_errors->resize(batch);
  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const double td = q(actions[i], col) - targets[i];
    loss += weights[i] * huber(td) * inv_b;
    dq(actions[i], col) = weights[i] * huber_grad(td) * inv_b;
    if (td_errors) (*td_errors)[i] = td;
  }
  if (grads) *grads = net.backward(acts, dq);
  return loss;
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(QNetwork& net, const std::vector<DenseLayer>& grads) {
  auto& layers = net.layers();
  if (m_.empty()) {
    for (const auto& l : layers) {
      m_.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
      v_.push_back(m_.back());
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const double step = lr_ * std::sqrt(c2) / c1;
  const double eps_hat = eps_ * std::sqrt(c2);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    m_[l].weight = beta1_ * m_[l].weight + (1.0 - beta1_) * grads[l].weight;
    v_[l].weight = beta2_ * v_[l].weight + (1.0 - beta2_) * grads[l].weight.cwiseAbs2();
    layers[l].weight.array() -= step * m_[l].weight.array() / (v_[l].weight.array().sqrt() + eps_hat);
    m_[l].bias = beta1_ * m_[l].bias + (1.0 - beta1_) * grads[l].bias;
    v_[l].bias = beta2_ * v_[l].bias + (1.0 - beta2_) * grads[l].bias.cwiseAbs2();
    layers[l].bias.array() -= step * m_[l].bias.array() / (v_[l].bias.array().sqrt() + eps_hat);
  }
}

}  // namespace ier
