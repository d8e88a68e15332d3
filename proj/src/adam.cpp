#include "ixa/adam.hpp"

#include <cmath>

#include "ixa/error.hpp"

namespace ixa {

AdamState make_adam(const NetworkSpec& spec, double lr) {
  AdamState s;
  s.m = zero_params(spec);
  s.v = zero_params(spec);
  s.lr = lr;
  return s;
}

void adam_step(Params& params, const Gradients& grads, AdamState& state) {
  if (grads.tensors.size() != params.tensors.size() || state.m.tensors.size() != params.tensors.size() ||
      state.v.tensors.size() != params.tensors.size()) {
    throw Error("adam: tensor count mismatch");
  }
  for (std::size_t k = 0; k < grads.tensors.size(); ++k) {
    const Tensor& g = grads.tensors[k];
    if (g.size() != params.tensors[k].size()) throw Error("adam: shape mismatch in " + g.name);
    for (double v : g.values) {
      if (!std::isfinite(v)) throw Error("adam: non-finite gradient in tensor '" + g.name + "'");
    }
  }

  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < params.tensors.size(); ++k) {
    auto& p = params.tensors[k].values;
    const auto& g = grads.tensors[k].values;
    auto& m = state.m.tensors[k].values;
    auto& v = state.v.tensors[k].values;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

}  // namespace ixa
