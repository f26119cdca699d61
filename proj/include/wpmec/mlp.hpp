#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace wpmec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully connected network with rectifier hidden layers and a linear output.
/// Inputs are column-major batches (features x batch). All parameters live
/// in one flat vector so optimizers, checkpoints and finite-difference
/// checks can treat the net as a point in R^n.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int inputs, std::vector<int> hidden, int outputs, std::mt19937_64& rng);

  /// Activations kept from a forward pass for the backward pass.
  struct Tape {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each hidden layer
  };

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Tape& tape) const;

  /// Gradient of a scalar loss w.r.t. all parameters, given dLoss/dOutput.
  Vector backward(const Tape& tape, const Matrix& grad_out) const;

  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }
  Eigen::Index parameter_count() const { return params_.size(); }

 private:
  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  std::vector<int> sizes_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weights
  Vector params_;
};

/// First/second-moment adaptive optimizer state for one parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  void step(Vector& params, const Vector& grad);

  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  Vector m;
  Vector v;
};

/// Row-wise softmax over the action dimension of a (actions x batch) matrix.
Matrix softmax_columns(const Matrix& logits);
Matrix log_softmax_columns(const Matrix& logits);

}  // namespace wpmec
