#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"

#include "gradcheck.hpp"
#include "learn/adam.hpp"
#include "learn/checkpoint.hpp"
#include "learn/mlp.hpp"
#include "learn/shapes.hpp"

using namespace ssilkc::learn;

namespace {

std::map<std::string, std::vector<double>> read_golden(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::map<std::string, std::vector<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    double v;
    while (ls >> v) out[key].push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("forward pass basics") {
  MLP z = MLP::zeros({3, 4, 2}, Activation::Tanh, Activation::Identity);
  z.layers().back().bias << 0.25, -1.5;
  const Eigen::VectorXd y = z.predict(Eigen::VectorXd(Eigen::VectorXd::Constant(3, 7.0)));
  CHECK(y[0] == 0.25);
  CHECK(y[1] == -1.5);

  MLP id = MLP::zeros({3, 3}, Activation::Identity, Activation::Identity);
  id.layers()[0].weight.setIdentity();
  const Eigen::Vector3d x(1.0, -2.0, 3.5);
  CHECK((id.predict(Eigen::VectorXd(x)) - x).norm() == 0.0);

  CHECK_THROWS_AS((void)id.predict(Eigen::VectorXd(Eigen::VectorXd::Zero(4))), std::domain_error);
  MLP fresh = MLP::zeros({2, 2}, Activation::Identity, Activation::Identity);
  CHECK_THROWS_AS(fresh.backward(Eigen::MatrixXd::Zero(2, 1)), std::logic_error);
}

TEST_CASE("seed-42 two-layer golden forward pass") {
  const auto golden = read_golden(std::string(SSILKC_TEST_DATA_DIR) + "/mlp_seed42_golden.txt");
  std::mt19937_64 rng(42);
  MLP net({2, 3, 1}, Activation::Tanh, Activation::Identity, rng);
  const auto params = net.flat_parameters();
  const auto& expected_params = golden.at("params");
  REQUIRE(params.size() == expected_params.size());
  for (std::size_t i = 0; i < params.size(); ++i) CHECK(params[i] == doctest::Approx(expected_params[i]).epsilon(1e-15));
  const Eigen::VectorXd y = net.predict(Eigen::VectorXd(Eigen::Vector2d(1.0, 0.0)));
  CHECK(y[0] == doctest::Approx(golden.at("output")[0]).epsilon(1e-14));
}

TEST_CASE("backward matches finite differences on every library network") {
  std::uint64_t seed = 100;
  for (const auto& shape : network_catalog()) {
    CAPTURE(shape.name);
    std::mt19937_64 rng(seed++);
    MLP net = make_network(shape, rng);
    const auto rep = ssilkc::testing::backward_fd_report(net, 3, seed);
    CHECK(rep.max_relative_error < 1e-4);
    CHECK(rep.skipped_kinks * 1000 < rep.checked);
  }
  for (Activation out : {Activation::Identity, Activation::Tanh, Activation::Softplus}) {
    std::mt19937_64 rng(seed++);
    MLP net({4, 5, 3}, Activation::Tanh, out, rng);
    const auto rep = ssilkc::testing::backward_fd_report(net, 4, seed);
    CHECK(rep.max_relative_error < 1e-4);
    CHECK(rep.skipped_kinks == 0);
  }
}

TEST_CASE("input gradient matches finite differences of the output") {
  std::mt19937_64 rng(5);
  MLP net({5, 7, 7, 1}, Activation::Tanh, Activation::Identity, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 3);
  for (bool sig : {false, true}) {
    const Eigen::MatrixXd g = net.input_gradient(x, sig);
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Eigen::VectorXd up = x.col(b), dn = x.col(b);
        up[i] += 1e-6;
        dn[i] -= 1e-6;
        auto out = [&](const Eigen::VectorXd& v) {
          const double z = net.predict(v)[0];
          return sig ? 1.0 / (1.0 + std::exp(-z)) : z;
        };
        CHECK(g(i, b) == doctest::Approx((out(up) - out(dn)) / 2e-6).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("gradient penalty parameter gradients match finite differences") {
  std::mt19937_64 rng(9);
  MLP disc = make_network(discriminator_shape(), rng);
  const auto big = ssilkc::testing::penalty_fd_report(disc, 4, 27, 21);
  CHECK(big.max_relative_error < 1e-4);
  CHECK(big.skipped_kinks == 0);
  MLP small({6, 8, 8, 1}, Activation::Tanh, Activation::Identity, rng);
  const auto little = ssilkc::testing::penalty_fd_report(small, 5, 4, 22);
  CHECK(little.max_relative_error < 1e-4);
  CHECK(little.skipped_kinks == 0);
}

TEST_CASE("gradient penalty values") {
  MLP constant = MLP::zeros({4, 3, 1}, Activation::Tanh, Activation::Identity);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 6);
  CHECK(constant.input_gradient_penalty(x, 4, true, 0.0) == doctest::Approx(1.0));

  // Linear pre-sigmoid net with w chosen so |d sigmoid/dx| = 1 at the origin.
  MLP lin = MLP::zeros({2, 1}, Activation::Identity, Activation::Identity);
  lin.layers()[0].weight << 4.0, 0.0;  // sigmoid'(0) = 1/4
  CHECK(lin.input_gradient_penalty(Eigen::MatrixXd::Zero(2, 1), 2, true, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("backward linearity and optimum") {
  std::mt19937_64 rng(1);
  MLP net({3, 4, 2}, Activation::Tanh, Activation::Identity, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 2);
  Eigen::MatrixXd u = Eigen::MatrixXd::Random(2, 2);
  net.zero_grad();
  net.forward(x);
  net.backward(u);
  const auto both = net.flat_gradients();
  net.zero_grad();
  net.forward(x.col(0));
  net.backward(u.col(0));
  net.forward(x.col(1));
  net.backward(u.col(1));
  const auto sum = net.flat_gradients();
  for (std::size_t i = 0; i < both.size(); ++i) CHECK(both[i] == doctest::Approx(sum[i]).epsilon(1e-12));

  MLP lin = MLP::zeros({2, 1}, Activation::Identity, Activation::Identity);
  lin.layers()[0].weight << 1.5, -0.5;
  const Eigen::MatrixXd xs = Eigen::MatrixXd::Random(2, 5);
  const Eigen::MatrixXd target = lin.predict(xs);
  lin.zero_grad();
  const Eigen::MatrixXd y = lin.forward(xs);
  lin.backward(2.0 * (y - target));
  for (double g : lin.flat_gradients()) CHECK(g == 0.0);
}

TEST_CASE("adam") {
  MLP net = MLP::zeros({2, 1}, Activation::Identity, Activation::Identity);
  AdamState st(0.01);
  adam_step(net, st);
  for (double v : net.flat_parameters()) CHECK(v == 0.0);

  AdamState first(0.01);
  net.layers()[0].grad_weight << 3.0, -0.002;
  net.layers()[0].grad_bias << 1e-3;
  adam_step(net, first);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(-0.01 * 3.0 / (3.0 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers()[0].weight(0, 1) == doctest::Approx(0.01 * 0.002 / (0.002 + 1e-8)).epsilon(1e-12));

  MLP c = MLP::zeros({1, 1}, Activation::Identity, Activation::Identity);
  AdamState cst(0.05);
  double prev = 0.0;
  for (int k = 0; k < 2000; ++k) {
    c.layers()[0].grad_weight << 2.0;
    c.layers()[0].grad_bias << 2.0;
    adam_step(c, cst);
    if (k > 10) CHECK(prev - c.layers()[0].weight(0, 0) == doctest::Approx(0.05).epsilon(1e-6));
    prev = c.layers()[0].weight(0, 0);
  }
}

TEST_CASE("training determinism over 100 updates") {
  auto run = [] {
    std::mt19937_64 rng(77);
    MLP net = make_network(s2r_shape(), rng);
    AdamState st(0.01);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(15, 32);
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(6, 32);
    std::normal_distribution<double> n01;
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = n01(rng);
    for (int k = 0; k < 100; ++k) {
      net.zero_grad();
      const Eigen::MatrixXd out = net.forward(x);
      net.backward((out - y) / 32.0);
      adam_step(net, st);
    }
    return net.flat_parameters();
  };
  const auto a = run();
  const auto b = run();
  CHECK(a == b);
}

TEST_CASE("polyak update") {
  std::mt19937_64 rng(2);
  MLP a({2, 3, 1}, Activation::Relu, Activation::Identity, rng);
  MLP b({2, 3, 1}, Activation::Relu, Activation::Identity, rng);
  const auto pa = a.flat_parameters(), pb = b.flat_parameters();
  a.polyak_update(b, 0.25);
  const auto mixed = a.flat_parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(mixed[i] == doctest::Approx(0.25 * pb[i] + 0.75 * pa[i]));
}

TEST_CASE("checkpoint round trip") {
  std::mt19937_64 rng(4);
  MLP net = make_network(critic_shape(16, 5), rng);
  std::stringstream first;
  write_checkpoint(first, net);
  const std::string bytes = first.str();
  CHECK(bytes.substr(0, 8) == "SSILKC01");
  CHECK(static_cast<unsigned char>(bytes[8]) == kCheckpointVersion);
  std::stringstream in(bytes);
  MLP loaded = read_checkpoint(in);
  CHECK(loaded.sizes() == net.sizes());
  std::stringstream second;
  write_checkpoint(second, loaded);
  CHECK(second.str() == bytes);
  const auto p = net.flat_parameters(), q = loaded.flat_parameters();
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(q[i] == static_cast<double>(static_cast<float>(p[i])));

  std::stringstream bad("SSILKC02xxxx");
  CHECK_THROWS(read_checkpoint(bad));
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS(read_checkpoint(truncated));
}
