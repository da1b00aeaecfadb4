#include "learn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssilkc::learn {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

Eigen::MatrixXd apply_activation(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::Identity:
      return z;
    case Activation::Tanh:
      return z.array().tanh().matrix();
    case Activation::Relu:
      return z.cwiseMax(0.0);
    case Activation::Softplus:
      return z.unaryExpr([](double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); });
  }
  throw std::logic_error("unknown activation");
}

Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::Tanh:
      return (1.0 - z.array().tanh().square()).matrix();
    case Activation::Relu:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::Softplus:
      return sigmoid(z);
  }
  throw std::logic_error("unknown activation");
}

Eigen::MatrixXd activation_second_derivative(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::Identity:
    case Activation::Relu:
      return Eigen::MatrixXd::Zero(z.rows(), z.cols());
    case Activation::Tanh: {
      const Eigen::ArrayXXd t = z.array().tanh();
      return (-2.0 * t * (1.0 - t.square())).matrix();
    }
    case Activation::Softplus: {
      const Eigen::ArrayXXd s = sigmoid(z).array();
      return (s * (1.0 - s)).matrix();
    }
  }
  throw std::logic_error("unknown activation");
}

MLP::MLP(const std::vector<int>& sizes, Activation hidden, Activation output, std::mt19937_64& rng) {
  *this = zeros(sizes, hidden, output);
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_size()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = u(rng);
  }
}

MLP MLP::zeros(const std::vector<int>& sizes, Activation hidden, Activation output) {
  if (sizes.size() < 2) throw std::invalid_argument("MLP: need at least input and output sizes");
  MLP net;
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    if (sizes[k - 1] <= 0 || sizes[k] <= 0) throw std::invalid_argument("MLP: layer sizes must be positive");
    DenseLayer layer;
    layer.weight = Eigen::MatrixXd::Zero(sizes[k], sizes[k - 1]);
    layer.bias = Eigen::VectorXd::Zero(sizes[k]);
    layer.grad_weight = Eigen::MatrixXd::Zero(sizes[k], sizes[k - 1]);
    layer.grad_bias = Eigen::VectorXd::Zero(sizes[k]);
    layer.activation = (k + 1 == sizes.size()) ? output : hidden;
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

int MLP::input_size() const { return layers_.empty() ? 0 : layers_.front().in_size(); }
int MLP::output_size() const { return layers_.empty() ? 0 : layers_.back().out_size(); }

std::vector<int> MLP::sizes() const {
  std::vector<int> s;
  if (layers_.empty()) return s;
  s.push_back(input_size());
  for (const auto& l : layers_) s.push_back(l.out_size());
  return s;
}

std::size_t MLP::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MLP::forward_into(const Eigen::MatrixXd& x, Cache& c) const {
  if (x.rows() != input_size())
    throw std::domain_error("MLP: input has " + std::to_string(x.rows()) + " rows, expected " +
                            std::to_string(input_size()));
  c.pre.clear();
  c.post.clear();
  c.post.push_back(x);
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * c.post.back();
    z.colwise() += layer.bias;
    c.post.push_back(apply_activation(layer.activation, z));
    c.pre.push_back(std::move(z));
  }
}

Eigen::MatrixXd MLP::forward(const Eigen::MatrixXd& x) {
  cache_.resize(1);
  forward_into(x, cache_.front());
  return cache_.front().post.back();
}

Eigen::MatrixXd MLP::predict(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size())
    throw std::domain_error("MLP: input has " + std::to_string(x.rows()) + " rows, expected " +
                            std::to_string(input_size()));
  Eigen::MatrixXd h = x;
  for (const auto& layer : layers_) {
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    h = apply_activation(layer.activation, z);
  }
  return h;
}

Eigen::VectorXd MLP::predict(const Eigen::VectorXd& x) const {
  return predict(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd MLP::backward(const Eigen::MatrixXd& upstream) {
  if (cache_.empty()) throw std::logic_error("MLP::backward called without a cached forward pass");
  const Cache& c = cache_.front();
  if (upstream.rows() != output_size() || upstream.cols() != c.post.back().cols())
    throw std::domain_error("MLP::backward: upstream gradient shape mismatch");
  Eigen::MatrixXd delta = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    auto& layer = layers_[k];
    delta = delta.cwiseProduct(activation_derivative(layer.activation, c.pre[k]));
    layer.grad_weight.noalias() += delta * c.post[k].transpose();
    layer.grad_bias += delta.rowwise().sum();
    delta = layer.weight.transpose() * delta;
  }
  return delta;
}

Eigen::MatrixXd MLP::input_gradient(const Eigen::MatrixXd& x, bool sigmoid_output) const {
  if (output_size() != 1) throw std::domain_error("input_gradient: network must have a scalar output");
  Cache c;
  forward_into(x, c);
  const std::size_t n = layers_.size();
  Eigen::MatrixXd u = activation_derivative(layers_.back().activation, c.pre.back());
  if (sigmoid_output) {
    const Eigen::ArrayXXd s = sigmoid(c.post.back()).array();
    u = u.cwiseProduct((s * (1.0 - s)).matrix());
  }
  for (std::size_t k = n; k-- > 0;) {
    Eigen::MatrixXd v = layers_[k].weight.transpose() * u;
    if (k == 0) return v;
    u = v.cwiseProduct(activation_derivative(layers_[k - 1].activation, c.pre[k - 1]));
  }
  return u;
}

double MLP::input_gradient_penalty(const Eigen::MatrixXd& x, int n_penalized, bool sigmoid_output,
                                   double weight) {
  if (output_size() != 1) throw std::domain_error("gradient penalty: network must have a scalar output");
  if (layers_.back().activation != Activation::Identity)
    throw std::domain_error("gradient penalty: output layer must be linear");
  if (x.cols() == 0) throw std::domain_error("gradient penalty: empty batch");
  if (n_penalized <= 0 || n_penalized > input_size())
    throw std::domain_error("gradient penalty: bad penalized input count");
  const std::size_t n = layers_.size();
  const double batch = static_cast<double>(x.cols());
  Cache c;
  forward_into(x, c);

  // Gradient graph: u_K = dD/dz_K; v_{k-1} = W_k^T u_k; u_{k-1} = v_{k-1} .* s'(z_{k-1}).
  std::vector<Eigen::MatrixXd> u(n), v(n);  // u[k] for layer k (0-based), v[k] = W_k^T u_k
  Eigen::ArrayXXd s;
  if (sigmoid_output) {
    s = sigmoid(c.pre.back()).array();
    u[n - 1] = (s * (1.0 - s)).matrix();
  } else {
    u[n - 1] = Eigen::MatrixXd::Ones(1, x.cols());
  }
  for (std::size_t k = n; k-- > 0;) {
    v[k] = layers_[k].weight.transpose() * u[k];
    if (k > 0) u[k - 1] = v[k].cwiseProduct(activation_derivative(layers_[k - 1].activation, c.pre[k - 1]));
  }
  const Eigen::MatrixXd g = v[0].topRows(n_penalized);
  const Eigen::RowVectorXd norms = g.colwise().norm();
  double penalty = 0.0;
  for (Eigen::Index b = 0; b < norms.size(); ++b) penalty += (norms[b] - 1.0) * (norms[b] - 1.0);
  penalty /= batch;
  if (weight == 0.0) return penalty;

  // Reverse through the gradient graph.
  Eigen::MatrixXd v_bar = Eigen::MatrixXd::Zero(v[0].rows(), x.cols());
  for (Eigen::Index b = 0; b < norms.size(); ++b) {
    if (norms[b] > 0.0) v_bar.col(b).head(n_penalized) = (2.0 * (norms[b] - 1.0) / (norms[b] * batch)) * g.col(b);
  }
  std::vector<Eigen::MatrixXd> z_bar(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& layer = layers_[k];
    layer.grad_weight.noalias() += weight * (u[k] * v_bar.transpose());
    const Eigen::MatrixXd u_bar = layer.weight * v_bar;
    if (k + 1 < n) {
      v_bar = u_bar.cwiseProduct(activation_derivative(layer.activation, c.pre[k]));
      z_bar[k] = u_bar.cwiseProduct(v[k + 1]).cwiseProduct(activation_second_derivative(layer.activation, c.pre[k]));
    } else if (sigmoid_output) {
      z_bar[k] = u_bar.cwiseProduct((s * (1.0 - s) * (1.0 - 2.0 * s)).matrix());
    } else {
      z_bar[k] = Eigen::MatrixXd::Zero(u_bar.rows(), u_bar.cols());
    }
  }
  // Reverse through the forward graph with the injected pre-activation adjoints.
  for (std::size_t k = n; k-- > 0;) {
    auto& layer = layers_[k];
    layer.grad_weight.noalias() += weight * (z_bar[k] * c.post[k].transpose());
    layer.grad_bias += weight * z_bar[k].rowwise().sum();
    if (k > 0) {
      z_bar[k - 1] += (layer.weight.transpose() * z_bar[k])
                          .cwiseProduct(activation_derivative(layers_[k - 1].activation, c.pre[k - 1]));
    }
  }
  return penalty;
}

void MLP::zero_grad() {
  for (auto& l : layers_) {
    l.grad_weight.setZero();
    l.grad_bias.setZero();
  }
}

std::vector<ParamBlock> MLP::parameters() {
  std::vector<ParamBlock> out;
  for (auto& l : layers_) {
    out.push_back({l.weight.data(), l.grad_weight.data(), static_cast<std::size_t>(l.weight.size())});
    out.push_back({l.bias.data(), l.grad_bias.data(), static_cast<std::size_t>(l.bias.size())});
  }
  return out;
}

std::vector<double> MLP::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void MLP::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw std::domain_error("set_flat_parameters: size mismatch");
  std::size_t off = 0;
  for (auto& l : layers_) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), l.weight.size(), l.weight.data());
    off += static_cast<std::size_t>(l.weight.size());
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), l.bias.size(), l.bias.data());
    off += static_cast<std::size_t>(l.bias.size());
  }
}

std::vector<double> MLP::flat_gradients() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.grad_weight.data(), l.grad_weight.data() + l.grad_weight.size());
    out.insert(out.end(), l.grad_bias.data(), l.grad_bias.data() + l.grad_bias.size());
  }
  return out;
}

void MLP::polyak_update(const MLP& src, double tau) {
  if (src.layers_.size() != layers_.size()) throw std::domain_error("polyak_update: shape mismatch");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    layers_[k].weight = tau * src.layers_[k].weight + (1.0 - tau) * layers_[k].weight;
    layers_[k].bias = tau * src.layers_[k].bias + (1.0 - tau) * layers_[k].bias;
  }
}

}  // namespace ssilkc::learn
