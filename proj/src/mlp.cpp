#include "wpmec/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace wpmec {

Mlp::Mlp(int inputs, std::vector<int> hidden, int outputs, std::mt19937_64& rng) {
  if (inputs < 1 || outputs < 1) throw std::invalid_argument("Mlp: empty input or output layer");
  sizes_.push_back(inputs);
  sizes_.insert(sizes_.end(), hidden.begin(), hidden.end());
  sizes_.push_back(outputs);

  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
  }
  params_.resize(total);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    std::uniform_real_distribution<double> init(-bound, bound);
    const Eigen::Index n = static_cast<Eigen::Index>(sizes_[l + 1]) * (sizes_[l] + 1);
    for (Eigen::Index i = 0; i < n; ++i) params_[offsets_[l] + i] = init(rng);
  }
}

Eigen::Map<const Matrix> Mlp::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], sizes_[l + 1], sizes_[l]};
}

Eigen::Map<const Vector> Mlp::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l], sizes_[l + 1]};
}

Matrix Mlp::forward(const Matrix& x) const {
  Matrix h = x;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    h = (l + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return h;
}

Matrix Mlp::forward(const Matrix& x, Tape& tape) const {
  const std::size_t layers = sizes_.size() - 1;
  tape.inputs.assign(layers, Matrix());
  tape.pre.assign(layers - 1, Matrix());
  Matrix h = x;
  for (std::size_t l = 0; l < layers; ++l) {
    tape.inputs[l] = h;
    Matrix z = weight(l) * h;
    z.colwise() += bias(l);
    if (l + 1 < layers) {
      h = z.cwiseMax(0.0);
      tape.pre[l] = std::move(z);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Vector Mlp::backward(const Tape& tape, const Matrix& grad_out) const {
  Vector grad(params_.size());
  const std::size_t layers = sizes_.size() - 1;
  Matrix delta = grad_out;
  for (std::size_t l = layers; l-- > 0;) {
    Eigen::Map<Matrix> gw(grad.data() + offsets_[l], sizes_[l + 1], sizes_[l]);
    Eigen::Map<Vector> gb(grad.data() + offsets_[l] + static_cast<Eigen::Index>(sizes_[l + 1]) * sizes_[l],
                          sizes_[l + 1]);
    gw.noalias() = delta * tape.inputs[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Matrix back = weight(l).transpose() * delta;
      delta = back.cwiseProduct((tape.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grad;
}

Adam::Adam(Eigen::Index size, double lr, double b1, double b2, double eps)
    : learning_rate(lr), beta1(b1), beta2(b2), epsilon(eps), m(Vector::Zero(size)), v(Vector::Zero(size)) {}

void Adam::step(Vector& params, const Vector& grad) {
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
}

Matrix log_softmax_columns(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j).array() -= out.col(j).maxCoeff();
    out.col(j).array() -= std::log(out.col(j).array().exp().sum());
  }
  return out;
}

Matrix softmax_columns(const Matrix& logits) { return log_softmax_columns(logits).array().exp(); }

}  // namespace wpmec
