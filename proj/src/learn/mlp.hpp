#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ssilkc::learn {

enum class Activation : std::uint8_t { Identity = 0, Tanh = 1, Relu = 2, Softplus = 3 };

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::Identity;
  Eigen::MatrixXd grad_weight;
  Eigen::VectorXd grad_bias;

  [[nodiscard]] int in_size() const { return static_cast<int>(weight.cols()); }
  [[nodiscard]] int out_size() const { return static_cast<int>(weight.rows()); }
};

/// A view of one parameter tensor and its gradient buffer.
struct ParamBlock {
  double* value = nullptr;
  double* grad = nullptr;
  std::size_t size = 0;
};

/// Dense feed-forward network. Samples are columns of the input matrix.
class MLP {
 public:
  MLP() = default;
  /// sizes = {in, hidden..., out}. Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  MLP(const std::vector<int>& sizes, Activation hidden, Activation output, std::mt19937_64& rng);
  /// Same shapes, all parameters zero.
  static MLP zeros(const std::vector<int>& sizes, Activation hidden, Activation output);

  [[nodiscard]] int input_size() const;
  [[nodiscard]] int output_size() const;
  [[nodiscard]] std::vector<int> sizes() const;
  [[nodiscard]] std::size_t parameter_count() const;

  /// Forward pass that caches activations for a following backward().
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x);
  /// Forward pass without touching the cache.
  [[nodiscard]] Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;
  [[nodiscard]] Eigen::VectorXd predict(const Eigen::VectorXd& x) const;

  /// Accumulates parameter gradients of sum_j <upstream_j, y_j> and returns
  /// the gradient with respect to the cached input.
  Eigen::MatrixXd backward(const Eigen::MatrixXd& upstream);

  /// Gradient-norm penalty for a scalar network read through a sigmoid
  /// (when `sigmoid_output`): mean_b (||d out_b / d x_b[0:n_penalized]|| - 1)^2.
  /// Adds `weight` times its parameter gradient into the gradient buffers
  /// and returns the unweighted penalty value.
  double input_gradient_penalty(const Eigen::MatrixXd& x, int n_penalized, bool sigmoid_output,
                                double weight);

  /// Input gradients of a scalar network (through the sigmoid if requested),
  /// one column per sample. Does not touch parameter gradients.
  [[nodiscard]] Eigen::MatrixXd input_gradient(const Eigen::MatrixXd& x, bool sigmoid_output) const;

  void zero_grad();
  [[nodiscard]] bool has_cache() const { return !cache_.empty(); }
  void clear_cache() { cache_.clear(); }

  std::vector<ParamBlock> parameters();
  [[nodiscard]] std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);
  [[nodiscard]] std::vector<double> flat_gradients() const;

  /// this <- tau * src + (1 - tau) * this
  void polyak_update(const MLP& src, double tau);

  std::vector<DenseLayer>& layers() { return layers_; }
  [[nodiscard]] const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  struct Cache {
    std::vector<Eigen::MatrixXd> pre;   // z_k
    std::vector<Eigen::MatrixXd> post;  // h_k, post[0] = input
  };
  void forward_into(const Eigen::MatrixXd& x, Cache& c) const;

  std::vector<DenseLayer> layers_;
  std::vector<Cache> cache_;  // empty or one entry
};

Eigen::MatrixXd apply_activation(Activation a, const Eigen::MatrixXd& z);
Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& z);
Eigen::MatrixXd activation_second_derivative(Activation a, const Eigen::MatrixXd& z);

}  // namespace ssilkc::learn
