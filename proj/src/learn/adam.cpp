#include "learn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ssilkc::learn {

void adam_step(std::span<const ParamBlock> params, AdamState& st) {
  if (st.first_moment.empty()) {
    for (const auto& p : params) {
      st.first_moment.emplace_back(p.size, 0.0);
      st.second_moment.emplace_back(p.size, 0.0);
    }
  }
  if (st.first_moment.size() != params.size()) throw std::domain_error("adam_step: parameter group changed");
  ++st.step_count;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  for (std::size_t b = 0; b < params.size(); ++b) {
    const auto& p = params[b];
    auto& m = st.first_moment[b];
    auto& v = st.second_moment[b];
    if (m.size() != p.size) throw std::domain_error("adam_step: moment shape mismatch");
    for (std::size_t i = 0; i < p.size; ++i) {
      const double g = p.grad[i];
      m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * g;
      v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p.value[i] -= st.learning_rate * m_hat / (std::sqrt(v_hat) + st.eps);
    }
  }
}

void adam_step(MLP& net, AdamState& state) {
  const auto blocks = net.parameters();
  adam_step(blocks, state);
}

}  // namespace ssilkc::learn
