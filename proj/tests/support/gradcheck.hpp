#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "learn/mlp.hpp"

namespace ssilkc::testing {

struct FdReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

/// Largest relative disagreement between analytic parameter gradients and
/// central differences of `loss`. The denominator is floored at `floor` so
/// entries that are zero up to round-off do not dominate. Coordinates whose
/// perturbation flips the sign of any ReLU pre-activation on `x` straddle a
/// kink, where no derivative exists; those are counted and skipped.
inline std::vector<bool> relu_signs(const learn::MLP& net, const Eigen::MatrixXd& x) {
  std::vector<bool> signs;
  Eigen::MatrixXd h = x;
  for (const auto& layer : net.layers()) {
    Eigen::MatrixXd z = layer.weight * h;
    z.colwise() += layer.bias;
    if (layer.activation == learn::Activation::Relu)
      for (Eigen::Index i = 0; i < z.size(); ++i) signs.push_back(z.data()[i] > 0.0);
    h = learn::apply_activation(layer.activation, z);
  }
  return signs;
}

inline FdReport fd_report(learn::MLP& net, const std::function<double(const learn::MLP&)>& loss,
                          const std::vector<double>& analytic, const Eigen::MatrixXd& x, double h = 1e-5,
                          double floor = 1e-6) {
  std::vector<double> theta = net.flat_parameters();
  const std::vector<bool> center = relu_signs(net, x);
  FdReport rep;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    net.set_flat_parameters(theta);
    const double up = loss(net);
    const bool kink_up = relu_signs(net, x) != center;
    theta[i] = keep - h;
    net.set_flat_parameters(theta);
    const double down = loss(net);
    const bool kink_down = relu_signs(net, x) != center;
    theta[i] = keep;
    if (kink_up || kink_down) {
      ++rep.skipped_kinks;
      continue;
    }
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), floor});
    rep.max_relative_error = std::max(rep.max_relative_error, std::abs(numeric - analytic[i]) / denom);
    ++rep.checked;
  }
  net.set_flat_parameters(theta);
  return rep;
}

/// Gradient of sum(U .* net(X)) checked against central differences.
inline FdReport backward_fd_report(learn::MLP& net, int batch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(net.input_size(), batch), u(net.output_size(), batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = n01(rng);
  net.zero_grad();
  net.forward(x);
  net.backward(u);
  const std::vector<double> analytic = net.flat_gradients();
  return fd_report(
      net, [&](const learn::MLP& m) { return m.predict(x).cwiseProduct(u).sum(); }, analytic, x);
}

/// Gradient-penalty parameter gradient checked against central differences.
inline FdReport penalty_fd_report(learn::MLP& net, int batch, int n_penalized, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(net.input_size(), batch);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
  net.zero_grad();
  net.input_gradient_penalty(x, n_penalized, true, 1.0);
  const std::vector<double> analytic = net.flat_gradients();
  return fd_report(
      net,
      [&](const learn::MLP& m) {
        const Eigen::MatrixXd g = m.input_gradient(x, true).topRows(n_penalized);
        double p = 0.0;
        for (Eigen::Index b = 0; b < g.cols(); ++b) p += std::pow(g.col(b).norm() - 1.0, 2);
        return p / static_cast<double>(g.cols());
      },
      analytic, x);
}

}  // namespace ssilkc::testing
