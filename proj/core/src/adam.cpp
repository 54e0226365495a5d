#include "lle/adam.hpp"

#include <cmath>

#include "lle/error.hpp"

namespace lle {

void adam_step(const std::vector<NamedParam>& params, AdamState& state) {
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) throw ArgumentError("missing gradient for parameter '" + p.name + "'");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor.numel(), 0.0f);
      state.v.emplace_back(p.tensor.numel(), 0.0f);
    }
  }
  if (state.m.size() != params.size()) throw ArgumentError("Adam state was built for a different parameter list");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    ag::Tensor tensor = params[k].tensor;
    auto w = tensor.mutable_data();
    auto g = tensor.grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    if (m.size() != w.size()) throw ArgumentError("Adam moment shape mismatch for '" + params[k].name + "'");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double grad = static_cast<double>(g[i]) + state.weight_decay * static_cast<double>(w[i]);
      const double mi = state.beta1 * m[i] + (1.0 - state.beta1) * grad;
      const double vi = state.beta2 * v[i] + (1.0 - state.beta2) * grad * grad;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update = state.lr * (mi / bias1) / (std::sqrt(vi / bias2) + state.eps);
      w[i] = static_cast<float>(static_cast<double>(w[i]) - update);
    }
  }
}

}  // namespace lle
